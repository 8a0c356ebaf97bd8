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
"""Python interface to the pfkit native core.

Records are plain dicts shaped like the JSONL files the CLI reads and writes.
"""

import json

from . import _core
from ._core import (
    PfkitEnvironmentError,
    PfkitError,
    ValidationError,
    alignment_tax as _alignment_tax,
    assemble_rewrite_prompt as _assemble_rewrite_prompt,
    build_llm_distortion_prompt as _build_llm_distortion_prompt,
    caption_bbox_distortion,
    change_filter,
    command_pool,
    compute_cache_key,
    derive_seed,
    emit_u_shaped_plan as _emit_u_shaped_plan,
    extract_distorted_response,
    filter_corpus as _filter_corpus,
    length_filter,
    loss_mask,
    meta_agreement as _meta_agreement,
    pack_multiturn as _pack_multiturn,
    random_text_augment as _random_text_augment,
    render_llm_distortion_prompt,
    rouge_l,
    rouge_tokens,
    stage1_mix,
    tokenize,
    win_rate_matrix as _win_rate_matrix,
)

__all__ = [
    "PfkitEnvironmentError",
    "PfkitError",
    "ValidationError",
    "alignment_tax",
    "assemble_rewrite_prompt",
    "build_llm_distortion_prompt",
    "caption_bbox_distortion",
    "change_filter",
    "command_pool",
    "compute_cache_key",
    "derive_seed",
    "emit_u_shaped_plan",
    "extract_distorted_response",
    "filter_corpus",
    "length_filter",
    "loss_mask",
    "meta_agreement",
    "pack_multiturn",
    "random_text_augment",
    "render_llm_distortion_prompt",
    "rouge_l",
    "rouge_tokens",
    "stage1_mix",
    "tokenize",
    "win_rate_matrix",
]


def _dumps(rows):
    return [json.dumps(r) for r in rows]


def _reward_rows(rewards):
    return [(sid, model, float(score)) for (sid, model), score in rewards.items()]


def build_llm_distortion_prompt(sample, seed):
    """Returns (prompt, command_index or None) for one sample dict."""
    return _build_llm_distortion_prompt(json.dumps(sample), seed)


def random_text_augment(text, seed):
    """Returns a dict with the augmented text and which levels fired."""
    out, char, word, sentence = _random_text_augment(text, seed)
    return {"text": out, "char_fired": char, "word_fired": word, "sentence_fired": sentence}


def assemble_rewrite_prompt(sample):
    return _assemble_rewrite_prompt(json.dumps(sample))


def filter_corpus(corpus, scorer_table, config=None, jobs=1):
    """Runs the filter chain with a stub scorer table.

    Returns (kept samples, verdicts, report).
    """
    kept, verdicts, report = _filter_corpus(
        _dumps(corpus), json.dumps(scorer_table), json.dumps(config) if config else "", jobs
    )
    return [json.loads(k) for k in kept], [json.loads(v) for v in verdicts], json.loads(report)


def pack_multiturn(corpus, budget, max_images, seed, reuse_fillers=False, max_misses=4):
    """Packs samples into sequences; returns (sequences, stats)."""
    packed, stats = _pack_multiturn(
        _dumps(corpus), budget, max_images, seed, reuse_fillers, max_misses
    )
    return [json.loads(p) for p in packed], json.loads(stats)


def emit_u_shaped_plan(overrides=None):
    return json.loads(_emit_u_shaped_plan(json.dumps(overrides) if overrides else ""))


def win_rate_matrix(samples, rewards, model_ids=()):
    """`rewards` maps (sample_id, model_id) to a score."""
    return json.loads(_win_rate_matrix(_dumps(samples), _reward_rows(rewards), list(model_ids)))


def alignment_tax(before, after):
    return json.loads(_alignment_tax(before, after))


def meta_agreement(rewards, human):
    """`rewards` maps (sample_id, model_id) to a score; `human` holds ranking dicts."""
    return json.loads(_meta_agreement(_reward_rows(rewards), _dumps(human)))
