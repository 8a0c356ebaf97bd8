// Copyright 2026 The pfkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "httplib.h"
#include "pfkit/errors.h"
#include "pfkit/filters/filters.h"
#include "pfkit/filters/scorer.h"
#include "pfkit/filters/stub_scoring_server.h"
#include "test_support.h"

namespace pfkit {
namespace {

std::shared_ptr<StubScorer> Table(const char* json) {
  return StubScorer::FromJson(Json::parse(json));
}

InstructionSample Caption(const std::string& id, const std::string& response) {
  InstructionSample s;
  s.id = id;
  s.category = Category::kCaptioning;
  s.instruction = "Describe the image in detail.";
  s.response = response;
  s.raw_annotation = "raw " + id;
  s.images = {{"img/" + id + ".png", 64, 64, {}}};
  return s;
}

TEST(LengthFilter, InclusiveCodePointBounds) {
  EXPECT_FALSE(LengthFilter(std::string(19, 'a'), 20, 30));
  EXPECT_TRUE(LengthFilter(std::string(20, 'a'), 20, 30));
  EXPECT_TRUE(LengthFilter(std::string(30, 'a'), 20, 30));
  EXPECT_FALSE(LengthFilter(std::string(31, 'a'), 20, 30));
  std::string accented;
  for (int i = 0; i < 20; ++i) accented += "\xC3\xA9";  // 40 bytes, 20 code points
  EXPECT_TRUE(LengthFilter(accented, 20, 20 + 1));
  EXPECT_THROW(LengthFilter("x", 5, 5), BadConfig);
}

TEST(ChangeFilter, IgnoresWhitespaceOnlyEdits) {
  EXPECT_FALSE(ChangeFilter("a  dog\n", " a dog"));
  EXPECT_TRUE(ChangeFilter("a dog", "A dog."));
}

TEST(StsFilter, ThresholdBoundary) {
  auto table = Table(R"({"sts": [{"a": "o", "b": "low", "score": 0.39},
                                 {"a": "o", "b": "edge", "score": 0.40}]})");
  const ScorerHandle h(ScorerKind::kSts, table);
  EXPECT_FALSE(StsFilter("o", "low", h).keep);
  EXPECT_TRUE(StsFilter("o", "edge", h).keep);
  EXPECT_TRUE(StsFilter("edge", "o", h).keep);  // symmetric lookup
  EXPECT_DOUBLE_EQ(StsFilter("o", "low", h).score, 0.39);
}

TEST(ClipScoreFilter, DropsParagraphsBelowThreshold) {
  auto table = Table(R"({"clipscore": [
      {"text": "Para one.", "image": "i.png", "score": 16.9},
      {"text": "Para two.", "image": "i.png", "score": 17.0},
      {"text": "Para three.", "image": "i.png", "score": 25.0}]})");
  const ScorerHandle h(ScorerKind::kClipScore, table);
  const ImageRef image{"i.png", 8, 8, {}};
  const auto r = ClipScoreParagraphFilter("Para one.\n\nPara two.\n\n\nPara three.", image, h);
  ASSERT_TRUE(r.keep());
  EXPECT_EQ(*r.surviving, "Para two.\n\nPara three.");
  EXPECT_EQ(r.dropped, 1u);
  EXPECT_EQ(r.paragraph_scores, (std::vector<double>{16.9, 17.0, 25.0}));
  const auto none = ClipScoreParagraphFilter("Para one.", image, h);
  EXPECT_FALSE(none.keep());
}

TEST(NliFilter, RejectsOnlyContradiction) {
  const std::string q = "What color is the bus?";
  auto table = std::make_shared<StubScorer>();
  table->SetNli(AnswerStatement("blue", q), AnswerStatement("red", q), NliLabel::kContradiction);
  table->SetNli(AnswerStatement("It is red.", q), AnswerStatement("red", q), NliLabel::kEntailment);
  table->SetNli(AnswerStatement("Hard to say.", q), AnswerStatement("red", q), NliLabel::kNeutral);
  const ScorerHandle h(ScorerKind::kNli, table);
  EXPECT_FALSE(NliContradictionFilter("red", "blue", q, h).keep);
  EXPECT_TRUE(NliContradictionFilter("red", "It is red.", q, h).keep);
  EXPECT_TRUE(NliContradictionFilter("red", "Hard to say.", q, h).keep);
  EXPECT_EQ(AnswerStatement(" red ", " Q? "), "\"red\" is the answer to the question: \"Q?\"");
}

TEST(ScorerHandle, KindMismatchAndRangeChecks) {
  EXPECT_THROW(Table(R"({"sts": [{"a": "x", "b": "y", "score": 1.5}]})"), BadConfig);
  auto table = Table(R"({"defaults": {"clipscore": 20}})");
  table->SetSts("x", "y", 1.5);  // bypasses the loader so the handle guard is exercised
  const ScorerHandle sts(ScorerKind::kSts, table);
  EXPECT_THROW(sts.ClipScore("x", "y"), BadConfig);
  EXPECT_THROW(sts.Sts("x", "y"), ScorerUnavailable);
  EXPECT_THROW(sts.Sts("x", "z"), ScorerUnavailable);  // miss without default
  const ScorerHandle clip(ScorerKind::kClipScore, table);
  EXPECT_DOUBLE_EQ(clip.ClipScore("anything", "i"), 20.0);
  const ScorerHandle empty(ScorerKind::kReward, nullptr);
  EXPECT_THROW(empty.Reward("a", "b"), ScorerUnavailable);
}

TEST(FilterSample, ShortCircuitsInOrder) {
  auto table = Table(R"({"defaults": {"sts": 0.9, "clipscore": 30, "nli": "entailment"}})");
  const FilterScorers scorers = FilterScorers::FromSet(ScorerSet::FromBackend(table));
  const FilterConfig config;
  InstructionSample s = Caption("a", "short");
  FilterVerdict v = FilterSample(s, scorers, config);
  EXPECT_EQ(v.rejected_by, FilterName::kLength);
  EXPECT_EQ(v.scores.count("sts"), 0u);
  EXPECT_EQ(table->total_calls(), 0u);

  s = Caption("b", "A rich, detailed, polite description.");
  s.raw_annotation = s.response;
  v = FilterSample(s, scorers, config);
  EXPECT_EQ(v.rejected_by, FilterName::kChange);

  s = Caption("c", "A rich, detailed, polite description.");
  v = FilterSample(s, scorers, config);
  EXPECT_TRUE(v.kept);
  EXPECT_DOUBLE_EQ(v.scores.at("sts"), 0.9);
  EXPECT_DOUBLE_EQ(v.scores.at("clipscore"), 30.0);
  EXPECT_EQ(v.scores.count("nli"), 0u);  // captioning is not routed to NLI
}

TEST(FilterSample, VqaGoesToNliOnly) {
  auto table = Table(R"({"defaults": {"nli": "contradiction"}})");
  const FilterScorers scorers = FilterScorers::FromSet(ScorerSet::FromBackend(table));
  InstructionSample s = Caption("v", "The answer is definitely blue.");
  s.category = Category::kVqaPlain;
  s.instruction = "What color?";
  s.raw_annotation = "red";
  const FilterVerdict v = FilterSample(s, scorers, FilterConfig{});
  EXPECT_EQ(v.rejected_by, FilterName::kNli);
  EXPECT_DOUBLE_EQ(v.scores.at("nli"), 2.0);
  EXPECT_EQ(table->calls(ScorerKind::kSts), 0u);
  EXPECT_EQ(table->calls(ScorerKind::kClipScore), 0u);
}

TEST(FilterSample, MissingRawAnnotationAndScorer) {
  auto table = Table(R"({"defaults": {"sts": 0.9, "clipscore": 30, "nli": "neutral"}})");
  InstructionSample s = Caption("m", "A sufficiently long response here.");
  s.raw_annotation.reset();
  EXPECT_THROW(FilterSample(s, FilterScorers::FromSet(ScorerSet::FromBackend(table)), {}),
               MissingRawAnnotation);
  EXPECT_THROW(RunFilterPipeline({Caption("z", "A sufficiently long response.")}, {}, {}),
               BadConfig);
  FilterConfig rules_only;
  rules_only.enable_sts = rules_only.enable_clipscore = rules_only.enable_nli = false;
  EXPECT_EQ(RunFilterPipeline({Caption("z", "A sufficiently long response.")}, {}, rules_only)
                .report.total_kept,
            1u);
}

TEST(FilterConfig, JsonRoundTripAndValidation) {
  FilterConfig c;
  c.sts_threshold = 0.5;
  c.enable_nli = false;
  c.nli_categories = {Category::kVqaPlain};
  const FilterConfig back = FilterConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_THROW(FilterConfig::FromJson(Json::parse(R"({"sts_threshold": 2})")), BadConfig);
  EXPECT_THROW(FilterConfig::FromJson(Json::parse(R"({"min_chars": 50, "max_chars": 10})")),
               BadConfig);
}

TEST(FilterVerdict, JsonRoundTrip) {
  FilterVerdict v{"id", false, FilterName::kClipScore, {{"clipscore", 1.0}, {"length", 40}}, "r"};
  EXPECT_EQ(FilterVerdictFromJson(ToJson(v)), v);
}

TEST(Pipeline, OrderedDeterministicAcrossJobCounts) {
  Rng rng(3);
  const auto corpus = testing::FuzzFilterCorpus(rng, 300);
  auto backend = std::make_shared<testing::HashScorer>(1);
  const FilterScorers scorers = FilterScorers::FromSet(ScorerSet::FromBackend(backend));
  std::vector<std::string> sink_order;
  const auto one = RunFilterPipeline(corpus, scorers, {}, 1);
  const auto many = RunFilterPipeline(corpus, scorers, {}, 8, [&](const FilterVerdict& v) {
    sink_order.push_back(v.sample_id);
  });
  EXPECT_EQ(one.verdicts, many.verdicts);
  ASSERT_EQ(sink_order.size(), corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) EXPECT_EQ(sink_order[i], corpus[i].id);
  EXPECT_TRUE(many.report.Consistent());
  EXPECT_EQ(many.report.total_in, 300u);
  EXPECT_EQ(many.kept.size(), many.report.total_kept);
  for (size_t i = 0, k = 0; i < corpus.size(); ++i) {
    if (!many.verdicts[i].kept) continue;
    EXPECT_EQ(many.kept[k].id, corpus[i].id);
    EXPECT_EQ(many.kept[k].response, many.verdicts[i].surviving_response);
    ++k;
  }
}

TEST(Pipeline, RethrowsLowestFailingIndex) {
  auto table = Table(R"({"defaults": {"clipscore": 30, "nli": "neutral"}})");
  table->SetSts("raw c3", "A sufficiently long response.", 0.9);
  std::vector<InstructionSample> corpus;
  for (int i = 0; i < 10; ++i) corpus.push_back(Caption("c" + std::to_string(i),
                                                         "A sufficiently long response."));
  try {
    RunFilterPipeline(corpus, FilterScorers::FromSet(ScorerSet::FromBackend(table)), {}, 4);
    FAIL();
  } catch (const ScorerUnavailable& e) {
    EXPECT_NE(std::string(e.what()).find("sample c0"), std::string::npos) << e.what();
  }
}

TEST(FilterReport, AccountsEveryRejection) {
  FilterReport r;
  r.Add({"a", true, std::nullopt, {}, ""});
  r.Add({"b", false, FilterName::kSts, {}, ""});
  r.Add({"c", false, FilterName::kSts, {}, ""});
  EXPECT_TRUE(r.Consistent());
  EXPECT_EQ(r.per_filter_rejections.at("sts"), 2u);
  EXPECT_NEAR(r.keep_rate, 1.0 / 3.0, 1e-12);
  const Json j = r.ToJson();
  for (const char* name : {"length", "change", "sts", "clipscore", "nli"}) {
    EXPECT_TRUE(j["per_filter_rejections"].contains(name)) << name;
  }
}

// ---------------------------------------------------------------------------
// Wire contract: the same checks run against the in-process stub and the
// stub served over HTTP.

const char* kContractTable = R"({
  "model_id": "contract",
  "sts": [{"a": "a cat", "b": "a kitten", "score": 0.83}],
  "nli": [{"premise": "A red bus.", "hypothesis": "The bus is red.", "label": "entailment"}],
  "clipscore": [{"text": "a cat", "image": "cat.png", "score": 24.5}],
  "reward": [{"instruction": "Hi", "response": "Hello!", "score": -1.25}]
})";

void RunContract(ScorerBackend& backend) {
  EXPECT_DOUBLE_EQ(backend.Sts("a cat", "a kitten"), 0.83);
  EXPECT_DOUBLE_EQ(backend.Sts("a kitten", "a cat"), 0.83);
  EXPECT_EQ(backend.Nli("A red bus.", "The bus is red."), NliLabel::kEntailment);
  EXPECT_DOUBLE_EQ(backend.ClipScore("a cat", "cat.png"), 24.5);
  EXPECT_DOUBLE_EQ(backend.Reward("Hi", "Hello!"), -1.25);
  EXPECT_THROW(backend.Sts("unknown", "pair"), ScorerUnavailable);
  EXPECT_THROW(backend.Nli("x", "y"), ScorerUnavailable);
  EXPECT_THROW(backend.ClipScore("x", "y"), ScorerUnavailable);
  EXPECT_THROW(backend.Reward("x", "y"), ScorerUnavailable);
}

TEST(WireContract, InProcessStub) {
  auto table = Table(kContractTable);
  RunContract(*table);
}

TEST(WireContract, HttpStubServer) {
  StubScoringServer server(Table(kContractTable), "secret");
  server.Start();
  HttpScorer client(server.base_url(), "secret", 5);
  RunContract(client);
  const Json health = client.Health();
  EXPECT_EQ(health["status"], "ok");
  EXPECT_EQ(health["loaded_models"], Json::array());
  EXPECT_EQ(client.Health(), health);
}

TEST(WireContract, StatusCodes) {
  StubScoringServer server(Table(kContractTable), "secret");
  const int port = server.Start();
  httplib::Client raw("127.0.0.1", port);
  httplib::Headers auth = {{"Authorization", "Bearer secret"}};
  auto bad = raw.Post("/sts", auth, R"({"texts": ["only one"]})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto miss = raw.Post("/sts", auth, R"({"texts": ["p", "q"]})", "application/json");
  ASSERT_TRUE(miss);
  EXPECT_EQ(miss->status, 422);
  auto ok = raw.Post("/nli", auth, R"({"texts": ["A red bus.", "The bus is red."]})",
                     "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  const Json body = Json::parse(ok->body);
  EXPECT_EQ(body["label"], "entailment");
  EXPECT_EQ(body["model_id"], "contract");
  auto unauthorized = raw.Post("/sts", R"({"texts": ["a cat", "a kitten"]})", "application/json");
  ASSERT_TRUE(unauthorized);
  EXPECT_EQ(unauthorized->status, 401);
  HttpScorer wrong_token(server.base_url(), "nope", 5);
  EXPECT_THROW(wrong_token.Sts("a cat", "a kitten"), ScorerUnavailable);
}

TEST(WireContract, UnreachableServiceIsScorerUnavailable) {
  HttpScorer client("http://127.0.0.1:1", "", 1);
  EXPECT_THROW(client.Sts("a", "b"), ScorerUnavailable);
}

TEST(WireContract, FilterThroughHttpMatchesInProcess) {
  auto table = Table(R"({"defaults": {"sts": 0.41, "clipscore": 18, "nli": "entailment"}})");
  table->SetSts("raw c1", "A sufficiently long response.", 0.2);
  StubScoringServer server(table);
  server.Start();
  auto http = std::make_shared<HttpScorer>(server.base_url(), "", 5);
  std::vector<InstructionSample> corpus;
  for (int i = 0; i < 6; ++i) corpus.push_back(Caption("c" + std::to_string(i),
                                                         "A sufficiently long response."));
  const auto local = RunFilterPipeline(corpus, FilterScorers::FromSet(ScorerSet::FromBackend(table)), {});
  const auto remote = RunFilterPipeline(corpus, FilterScorers::FromSet(ScorerSet::FromBackend(http)), {}, 3);
  EXPECT_EQ(local.verdicts, remote.verdicts);
  EXPECT_EQ(local.report.total_kept, 5u);
}

}  // namespace
}  // namespace pfkit
