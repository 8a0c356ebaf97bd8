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

#include "pfkit/corpus/adapter.h"
#include "pfkit/corpus/corpus_io.h"
#include "pfkit/corpus/region_marker.h"
#include "pfkit/corpus/sample.h"
#include "pfkit/errors.h"
#include "test_support.h"

namespace pfkit {
namespace {

using testing::SourceDir;
using testing::TempDir;

InstructionSample Basic() {
  InstructionSample s;
  s.id = "s1";
  s.source_dataset = "coco";
  s.category = Category::kRegion;
  s.instruction = "Describe the object inside this green bounding box.";
  s.response = "A brown dog.";
  s.raw_annotation = "dog";
  ImageRef image{"img.png", 100, 80, {}};
  image.regions.push_back({RegionKind::kBox, {10, 10, 50, 40}, MarkerColor::kGreen, "dog"});
  s.images.push_back(image);
  s.metadata["split"] = "train";
  return s;
}

const AdapterConfig& Adapter(const std::string& name) {
  static const AdapterRegistry registry =
      AdapterRegistry::LoadDirectory(SourceDir() / "configs" / "adapters");
  return registry.Find(name);
}

TEST(Sample, JsonRoundTrip) {
  const InstructionSample s = Basic();
  EXPECT_EQ(SampleFromJson(ToJson(s)), s);
  EXPECT_TRUE(CheckSample(s).empty());
}

TEST(Sample, MissingFieldNamesTheField) {
  Json j = ToJson(Basic());
  j.erase("instruction");
  try {
    SampleFromJson(j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "instruction");
  }
  j = ToJson(Basic());
  j["category"] = "poetry";
  EXPECT_THROW(SampleFromJson(j), SchemaError);
}

TEST(Sample, CategoryNamesRoundTrip) {
  for (Category c : {Category::kCaptioning, Category::kClassification,
                     Category::kChangeCaptioning, Category::kVqaRationale, Category::kVqaPlain,
                     Category::kRegion, Category::kTextOnly}) {
    EXPECT_EQ(ParseCategory(CategoryName(c)), c);
  }
  EXPECT_TRUE(IsVqaCategory(Category::kVqaPlain));
  EXPECT_FALSE(IsVqaCategory(Category::kCaptioning));
}

TEST(Sample, RegionGeometryChecks) {
  EXPECT_EQ(CheckRegion({RegionKind::kBox, {0, 0, 99, 79}}, 100, 80), "");
  EXPECT_NE(CheckRegion({RegionKind::kBox, {0, 0, 120, 79}}, 100, 80), "");
  EXPECT_NE(CheckRegion({RegionKind::kBox, {50, 0, 40, 79}}, 100, 80), "");
  EXPECT_NE(CheckRegion({RegionKind::kCircle, {50, 40}}, 100, 80), "");
  EXPECT_NE(CheckRegion({RegionKind::kArrow, {-1, 5}}, 100, 80), "");
  InstructionSample s = Basic();
  s.images[0].regions[0].coords = {10, 10, 500, 40};
  EXPECT_FALSE(CheckSample(s).empty());
}

TEST(CorpusIo, WriteReadRoundTrip) {
  TempDir dir;
  InstructionSample a = Basic();
  InstructionSample b = Basic();
  b.id = "s2";
  b.raw_annotation.reset();
  WriteCorpus(dir / "c.jsonl", {a, b});
  const auto back = ReadCorpus(dir / "c.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
}

TEST(CorpusIo, ReadReportsLineNumber) {
  TempDir dir;
  WriteFileAtomic(dir / "c.jsonl", DumpLine(ToJson(Basic())) + "\n{\"id\": 3}\n");
  try {
    ReadCorpus(dir / "c.jsonl");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(CorpusIo, ValidateFindsDuplicatesAndBadLinesWithoutModifying) {
  TempDir dir;
  const std::string line = DumpLine(ToJson(Basic()));
  const std::string text = line + "\n" + line + "\nnot json\n";
  WriteFileAtomic(dir / "c.jsonl", text);
  const ValidationReport report = ValidateCorpus(dir / "c.jsonl");
  EXPECT_EQ(report.valid, 1u);
  ASSERT_EQ(report.errors.size(), 2u);
  EXPECT_EQ(report.errors[0].line, 2u);
  EXPECT_EQ(report.errors[1].line, 3u);
  EXPECT_EQ(ReadFile(dir / "c.jsonl"), text);
  EXPECT_THROW(ValidateCorpus(dir / "missing.jsonl"), IoError);
}

TEST(Adapter, FieldTemplateRendering) {
  const Json rec = Json::parse(R"({"a": "x", "n": {"b": 2}, "list": ["p", "q"]})");
  EXPECT_EQ(FieldTemplate("{a}-{n.b}").Render(rec, " "), "x-2");
  EXPECT_EQ(FieldTemplate("{list}").Render(rec, ", "), "p, q");
  EXPECT_EQ(FieldTemplate("{{lit}} {missing?}").Render(rec, " "), "{lit}");
  EXPECT_THROW(FieldTemplate("{a").Render(rec, " "), BadConfig);
  EXPECT_THROW(FieldTemplate("{}"), BadConfig);
  EXPECT_THROW(FieldTemplate("{missing}").Render(rec, " "), SchemaError);
}

TEST(Adapter, UnknownAdapterThrows) {
  const AdapterRegistry registry =
      AdapterRegistry::LoadDirectory(SourceDir() / "configs" / "adapters");
  EXPECT_THROW(registry.Find("nope"), UnknownAdapter);
  EXPECT_GE(registry.Names().size(), 8u);
}

TEST(Adapter, CocoCaptionsBuildsCaptionAndBoxDraft) {
  const Json rec = Json::parse(R"({"image_id": 7, "file_name": "a.jpg", "width": 200,
      "height": 100, "captions": ["A dog runs.", " A dog on grass. "],
      "objects": [{"category": "dog", "bbox": [20, 10, 100, 50]}]})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("coco_captions"));
  EXPECT_EQ(s.id, "coco-7");
  EXPECT_EQ(s.category, Category::kCaptioning);
  EXPECT_EQ(s.instruction, "Describe the image in detail.");
  ASSERT_TRUE(s.raw_annotation);
  EXPECT_EQ(*s.raw_annotation,
            "A dog runs.\nA dog on grass.\n"
            "The followings are specific object locations within the image, represented as "
            "(category: [x1, y1, x2, y2]):\n"
            "dog: [0.100, 0.100, 0.600, 0.600]");
  ASSERT_EQ(s.images.size(), 1u);
  EXPECT_EQ(s.images[0].width_px, 200);
  EXPECT_TRUE(CheckSample(s).empty());
}

TEST(Adapter, ElevaterTemplate) {
  const Json rec = Json::parse(R"({"dataset": "cifar10", "id": 3, "class": "cat",
      "knowledge": "A small domesticated carnivore.", "image": "c.png", "width": 32,
      "height": 32})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("elevater"));
  EXPECT_EQ(s.id, "elevater-cifar10-3");
  EXPECT_EQ(s.instruction, "What is this?");
  EXPECT_EQ(s.response, "a photo of a cat. A small domesticated carnivore.");
  Json bare = rec;
  bare.erase("knowledge");
  EXPECT_EQ(ConvertToUnified(bare, Adapter("elevater")).response, "a photo of a cat.");
}

TEST(Adapter, RefcocogBoxBecomesGreenRegion) {
  const Json rec = Json::parse(R"({"ref_id": 11, "sentence": "the left man",
      "file_name": "r.jpg", "width": 100, "height": 100, "bbox": [10, 20, 30, 40]})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("refcocog"));
  ASSERT_EQ(s.images[0].regions.size(), 1u);
  const RegionAnnotation& r = s.images[0].regions[0];
  EXPECT_EQ(r.kind, RegionKind::kBox);
  EXPECT_EQ(r.color, MarkerColor::kGreen);
  EXPECT_EQ(r.coords, (std::vector<double>{10, 20, 40, 60}));
}

TEST(Adapter, PointQaUsesRedArrow) {
  const Json rec = Json::parse(R"({"qa_id": 1, "question": "What color?", "answer": "red",
      "file_name": "p.jpg", "width": 100, "height": 100, "point": [50, 60]})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("pointqa"));
  const RegionAnnotation& r = s.images[0].regions[0];
  EXPECT_EQ(r.kind, RegionKind::kArrow);
  EXPECT_EQ(r.color, MarkerColor::kRed);
}

TEST(Adapter, OutOfBoundsRegionRejected) {
  const Json rec = Json::parse(R"({"ref_id": 11, "sentence": "x", "file_name": "r.jpg",
      "width": 100, "height": 100, "bbox": [90, 20, 30, 40]})");
  EXPECT_THROW(ConvertToUnified(rec, Adapter("refcocog")), ValidationError);
}

TEST(Adapter, AokvqaJoinsRationales) {
  const Json rec = Json::parse(R"({"question_id": "q1", "question": "Why?",
      "answer": "rain", "rationales": ["It is wet.", "Clouds are dark."],
      "file_name": "a.jpg", "width": 10, "height": 10})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("aokvqa"));
  EXPECT_EQ(s.category, Category::kVqaRationale);
  EXPECT_EQ(s.response, "rain. It is wet. Clouds are dark.");
}

TEST(Adapter, SpotTheDiffHasTwoImages) {
  const Json rec = Json::parse(R"({"pair_id": 4, "differences": ["car moved", "man left"],
      "image_a": "a.png", "image_b": "b.png", "width": 10, "height": 10})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("spot_the_diff"));
  EXPECT_EQ(s.images.size(), 2u);
  EXPECT_EQ(s.response, "car moved\nman left");
}

TEST(Adapter, TextInstructionsOptionalInput) {
  const Json rec = Json::parse(R"({"id": 1, "instruction": "Add.", "output": "2"})");
  const InstructionSample s = ConvertToUnified(rec, Adapter("text_instructions"));
  EXPECT_EQ(s.instruction, "Add.");
  EXPECT_TRUE(s.images.empty());
  Json with_input = rec;
  with_input["input"] = "1 + 1";
  EXPECT_EQ(ConvertToUnified(with_input, Adapter("text_instructions")).instruction,
            "Add.\n1 + 1");
}

TEST(Adapter, MissingFieldIsSchemaError) {
  const Json rec = Json::parse(R"({"question_id": 1, "file_name": "a.jpg", "width": 10,
      "height": 10, "answer": "yes"})");
  try {
    ConvertToUnified(rec, Adapter("vqav2"));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "question");
  }
}

TEST(RegionMarker, BoxOutlineIsFourPixelsInward) {
  Raster raster(40, 30);
  DrawRegionMarker(raster, {RegionKind::kBox, {5, 5, 25, 20}, MarkerColor::kGreen});
  auto green = [&](int x, int y) {
    const uint8_t* p = raster.Pixel(x, y);
    return p[0] == 0 && p[1] == 255 && p[2] == 0;
  };
  EXPECT_TRUE(green(5, 5));
  EXPECT_TRUE(green(8, 12));   // 4th column of the left edge
  EXPECT_FALSE(green(9, 12));  // inside the outline
  EXPECT_TRUE(green(25, 20));
  EXPECT_FALSE(green(4, 5));   // outside the box
  EXPECT_FALSE(green(15, 12));
}

TEST(RegionMarker, ArrowApexOnPointAndFlipsNearBottom) {
  Raster raster(60, 60);
  DrawRegionMarker(raster, {RegionKind::kArrow, {30, 10}, MarkerColor::kRed});
  EXPECT_EQ(raster.Pixel(30, 10)[0], 255);
  EXPECT_EQ(raster.Pixel(30, 10 + kArrowHeightPx)[0], 255);
  EXPECT_EQ(raster.Pixel(30, 9)[0], 0);
  Raster low(60, 60);
  DrawRegionMarker(low, {RegionKind::kArrow, {30, 55}, MarkerColor::kRed});
  EXPECT_EQ(low.Pixel(30, 55 - kArrowHeightPx)[0], 255);
  EXPECT_EQ(low.Pixel(30, 56)[0], 0);
}

TEST(RegionMarker, CircleRing) {
  Raster raster(50, 50);
  DrawRegionMarker(raster, {RegionKind::kCircle, {25, 25, 10}, MarkerColor::kBlue});
  EXPECT_EQ(raster.Pixel(35, 25)[2], 255);
  EXPECT_EQ(raster.Pixel(25, 25)[2], 0);
  EXPECT_EQ(raster.Pixel(40, 25)[2], 0);
}

TEST(RegionMarker, InvalidGeometryThrows) {
  Raster raster(10, 10);
  EXPECT_THROW(DrawRegionMarker(raster, {RegionKind::kBox, {0, 0, 20, 5}}), OutOfBounds);
}

TEST(RegionMarker, PngAndPpmRoundTrip) {
  Raster raster(7, 5);
  for (size_t i = 0; i < raster.rgb.size(); ++i) raster.rgb[i] = static_cast<uint8_t>(i * 7);
  for (ImageFormat f : {ImageFormat::kPng, ImageFormat::kPpm}) {
    const auto bytes = EncodeImage(raster, f);
    ImageFormat detected = f == ImageFormat::kPng ? ImageFormat::kPpm : ImageFormat::kPng;
    EXPECT_EQ(DecodeImage(bytes, &detected), raster);
    EXPECT_EQ(detected, f);
  }
  const std::vector<uint8_t> junk = {1, 2, 3, 4};
  EXPECT_THROW(DecodeImage(junk), DecodeError);
}

TEST(RegionMarker, RenderKeepsFormatAndDraws) {
  Raster raster(20, 20);
  const auto png = EncodeImage(raster, ImageFormat::kPng);
  const auto out = RenderRegionMarker(png, {RegionKind::kBox, {2, 2, 10, 10}});
  ImageFormat f = ImageFormat::kPpm;
  const Raster drawn = DecodeImage(out, &f);
  EXPECT_EQ(f, ImageFormat::kPng);
  EXPECT_EQ(drawn.Pixel(2, 2)[1], 255);
}

}  // namespace
}  // namespace pfkit
