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

#include "pfkit/distortion/command_pool.h"

#include "pfkit/errors.h"
#include "pfkit/hashing.h"
#include "pfkit/json_io.h"

namespace pfkit {
namespace {

// Must stay byte-identical to data/distortion_commands.txt.
constexpr std::string_view kBuiltinPoolText =
    "Additionally, I have removed all the punctuation marks and capitalization in my response.\n"
    "To make my response more unnatural, I have added a little amount of typos and spelling mistakes.\n"
    "I have also added some grammatical errors to my response.\n"
    "Moreover, random words and sentences have been removed from my response.\n"
    "In addition, all letters in my response have been converted to uppercase.\n"
    "In addition, all letters in my response have been converted to lowercase.\n"
    "Furthermore, I have replaced certain words with their synonyms in my response.\n"
    "Additionally, I have inserted unnecessary repetition in my response.\n"
    "To make my response less coherent, I have rearranged the sentence structure.\n"
    "I have deliberately used incorrect tenses and verb conjugations in my response.\n"
    "Moreover, I have introduced unnecessary verbosity in my response.\n"
    "I make my response as short as possible by removing all unnecessary words and sentences.\n"
    "I have kept only the essential information and separated them by commas.\n"
    "I have removed any decorative formatting or styling, which may affect the readability of my response.\n"
    "I have rewritten the sentences and replaced words with their synonyms.\n"
    "I have reversed the order of sentences, presenting information from back to front.\n"
    "I made my response sounds more unprofessional and causual.\n"
    "Furthermore, I have made the language more complex and sophisticated in my response.\n"
    "To create ambiguity, I have added multiple interpretations in my sentences.\n"
    "Additionally, I have used unconventional metaphors and analogies in my response.\n"
    "To lower the quality of my response, I have added some irrelevant information.\n"
    "I picked one sentence from my response and repeated it multiple times, each time with a slight change.\n"
    "Now I use only five words to summarize my response.\n"
    "I made some modification to make my response less coherent and more unnatural.\n";

}  // namespace

CommandPool CommandPool::FromText(std::string_view text) {
  CommandPool pool;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    pool.commands_.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (pool.commands_.size() != kCommandPoolSize) {
    throw BadConfig("command pool has " + std::to_string(pool.commands_.size()) +
                    " entries, expected " + std::to_string(kCommandPoolSize));
  }
  if (const std::string digest = Sha256Hex(text); digest != kCommandPoolSha256) {
    throw BadConfig("command pool hash mismatch: " + digest);
  }
  return pool;
}

CommandPool CommandPool::Load(const std::filesystem::path& path) {
  return FromText(ReadFile(path));
}

const CommandPool& CommandPool::Builtin() {
  static const CommandPool pool = FromText(kBuiltinPoolText);
  return pool;
}

}  // namespace pfkit
