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

#ifndef PFKIT_RANDOM_H_
#define PFKIT_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace pfkit {

// Seeded generator with platform-independent draws. The standard
// distributions are implementation-defined, so bounded integers and unit
// doubles are derived directly from the mt19937_64 stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  size_t UniformIndex(size_t n);

  // Uniform double in [0, 1) with 53 bits of precision.
  double Uniform01();

  bool Bernoulli(double p) { return Uniform01() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[UniformIndex(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

uint64_t SplitMix64(uint64_t x);

// Seed for one record: depends on the global seed and the record key only,
// never on the record's position in a corpus.
uint64_t DeriveSeed(uint64_t global_seed, std::string_view key);

}  // namespace pfkit

#endif  // PFKIT_RANDOM_H_
