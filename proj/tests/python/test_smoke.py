# Copyright 2026 The pfkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke tests for the Python bindings."""

import json
import math
import pathlib

import pytest

import pfkit

ROOT = pathlib.Path(__file__).resolve().parents[2]
GOLDEN = ROOT / "tests" / "golden"


def golden_sample():
    return {
        "id": "golden",
        "category": "captioning",
        "source_dataset": "test",
        "instruction": "What is on the table?",
        "response": "There is a red apple on the wooden table. It looks fresh and ready to eat.",
        "images": [],
    }


def test_prompt_goldens():
    s = golden_sample()
    skip = (GOLDEN / "distortion_prompt_skip.txt").read_text()
    insert = (GOLDEN / "distortion_prompt_insert.txt").read_text()
    assert len(pfkit.command_pool()) == 24
    assert pfkit.render_llm_distortion_prompt(s["instruction"], s["response"]) == skip
    assert pfkit.render_llm_distortion_prompt(
        s["instruction"], s["response"], pfkit.command_pool()[22]) == insert
    seen = set()
    for seed in range(200):
        prompt, index = pfkit.build_llm_distortion_prompt(s, seed)
        if index is None:
            assert prompt == skip
        seen.add(index is None)
    assert seen == {True, False}


def test_extract_and_augment():
    assert pfkit.extract_distorted_response('a cat" trailing') == "a cat"
    a = pfkit.random_text_augment("The quick brown fox jumps. It runs away fast.", 3)
    b = pfkit.random_text_augment("The quick brown fox jumps. It runs away fast.", 3)
    assert a == b
    assert a["text"]


def test_rouge_l():
    assert pfkit.rouge_l("the cat sat", "the cat sat") == pytest.approx(1.0)
    assert pfkit.rouge_l("", "the cat") == 0.0
    # LCS of 2 over lengths 3 and 4 with beta 1.
    assert pfkit.rouge_l("a b c", "a x c d") == pytest.approx(2 * 2 / 7)
    assert pfkit.rouge_tokens("Hello, World!") == ["hello", "world"]


def test_cache_key_separates_fields():
    k = pfkit.compute_cache_key("ab", ["c"], "e")
    assert k == pfkit.compute_cache_key("ab", ["c"], "e")
    assert k != pfkit.compute_cache_key("a", ["bc"], "e")
    assert k != pfkit.compute_cache_key("ab", ["c"], "f")
    assert len(k) == 64


def test_filters_and_keep_rate():
    assert not pfkit.length_filter("short")
    assert pfkit.length_filter("x" * 20)
    assert not pfkit.change_filter("a  b", "a b")
    corpus = []
    for i in range(10):
        corpus.append({
            "id": f"s{i}",
            "category": "captioning",
            "source_dataset": "test",
            "instruction": "Describe the image.",
            "response": f"A detailed and rewritten description number {i}.",
            "raw_annotation": f"raw caption {i}",
            "images": [{"uri": f"img{i}.png", "width_px": 4, "height_px": 4}],
        })
    table = {
        "defaults": {"sts": 0.9, "clipscore": 25.0, "nli": "entailment"},
        "sts": [{"a": "raw caption 0", "b": corpus[0]["response"], "score": 0.39}],
    }
    kept, verdicts, report = pfkit.filter_corpus(corpus, table, jobs=2)
    assert len(kept) == 9
    assert report["total_in"] == 10
    assert report["keep_rate"] == pytest.approx(0.9)
    assert verdicts[0]["rejected_by"] == "sts"


def test_pack_multiturn_masks():
    corpus = [{
        "id": f"p{i}",
        "category": "vqa_plain",
        "source_dataset": "test",
        "instruction": "What colour is it?",
        "response": "It is red and round.",
        "images": [],
    } for i in range(6)]
    packed, stats = pfkit.pack_multiturn(corpus, budget=64, max_images=3, seed=1)
    assert stats["sequences"] == len(packed)
    for seq in packed:
        assert len(seq["token_ids"]) == 64
        assert pfkit.loss_mask(seq["token_ids"]) == seq["loss_mask"]
    again, _ = pfkit.pack_multiturn(corpus, budget=64, max_images=3, seed=1)
    assert again == packed


def test_plan_and_mix():
    plan = pfkit.emit_u_shaped_plan()
    lrs = [s["learning_rate"] for s in plan["stages"]]
    assert lrs == [1e-4, 1e-4, 1e-5]
    assert [s["context_length"] for s in plan["stages"]] == [1024, 196, 1024]
    with pytest.raises(pfkit.ValidationError):
        pfkit.emit_u_shaped_plan({"stage3": {"learning_rate": 1e-4}})
    pf = [f"pf{i}" for i in range(1000)]
    mix = pfkit.stage1_mix(pf, ["t"], ["l"], 5)
    assert len(mix) == 102
    assert mix == pfkit.stage1_mix(pf, ["t"], ["l"], 5)


def test_evaluators():
    samples = [{"id": f"s{i}", "instruction": "q", "ground_truth": "g",
                "responses": {"A": "a", "B": "b"}} for i in range(4)]
    rewards = {}
    for i in range(4):
        rewards[(f"s{i}", "A")] = 1.0 if i < 3 else 0.0
        rewards[(f"s{i}", "B")] = 1.0 if i == 0 else 0.5
    w = pfkit.win_rate_matrix(samples, rewards)
    assert w["rates"][0][1] + w["rates"][1][0] == pytest.approx(100.0)
    assert w["rates"][0][1] == pytest.approx(62.5)
    tax = pfkit.alignment_tax({"a": 0.8, "b": 0.5}, {"a": 0.6, "b": 0.55})
    assert tax["tax"] == pytest.approx(0.15)
    human = [json.loads(line) for line in
             (GOLDEN / "meta_agreement" / "human.jsonl").read_text().splitlines() if line]
    table = {(r["sample_id"], r["model_id"]): r["score"] for r in
             json.loads((GOLDEN / "meta_agreement" / "rewards.json").read_text())}
    assert pfkit.meta_agreement(table, human)["accuracy"] == pytest.approx(0.7)
    assert math.isfinite(pfkit.derive_seed(1, "x"))


def test_errors_are_typed():
    with pytest.raises(pfkit.ValidationError):
        pfkit.build_llm_distortion_prompt({"id": "x"}, 1)
    assert issubclass(pfkit.ValidationError, pfkit.PfkitError)
