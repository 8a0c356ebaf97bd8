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

#ifndef PFKIT_TEXT_UTIL_H_
#define PFKIT_TEXT_UTIL_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pfkit {

// UTF-8 helpers. Invalid bytes decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);
size_t CountCodePoints(std::string_view text);

bool IsSpace(char32_t c);

std::string Trim(std::string_view text);

// Runs of whitespace become one space; leading/trailing whitespace dropped.
std::string CollapseWhitespace(std::string_view text);

std::vector<std::string> SplitWhitespace(std::string_view text);

// Paragraphs are separated by one or more blank lines. Empty paragraphs are
// dropped and each paragraph is trimmed.
std::vector<std::string> SplitParagraphs(std::string_view text);

// A piece of text with the whitespace that followed it.
struct Segment {
  std::string text;
  std::string trailing;
};

// Sentence boundary: '.', '!' or '?' followed by whitespace. Each segment
// keeps its terminal punctuation; the whitespace run goes to `trailing`.
std::vector<Segment> SplitSentences(std::string_view text);

// Whitespace-delimited words, each with the whitespace that followed it.
// Leading whitespace of the text is returned through `leading`.
std::vector<Segment> SplitWords(std::string_view text, std::string* leading);

std::string JoinSegments(const std::vector<Segment>& segments,
                         std::string_view leading = "");

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

std::string AsciiLower(std::string_view text);

}  // namespace pfkit

#endif  // PFKIT_TEXT_UTIL_H_
