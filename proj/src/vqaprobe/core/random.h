// Copyright 2026 The vqaprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VQAPROBE_CORE_RANDOM_H_
#define VQAPROBE_CORE_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace vqaprobe {

// Seeded random source with a fixed engine (mt19937_64) and distributions
// taken from Boost.Random, whose algorithms are identical on every platform.
// The std:: distributions are implementation-defined and would make results
// files differ between standard libraries.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform();
  double Normal(double mean, double stddev);
  int64_t Poisson(double mean);
  bool Bernoulli(double p);
  // Uniform in [0, n). n must be positive.
  size_t Index(size_t n);

  // k distinct indices from [0, n), in draw order.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
};

// Independent stream seed for one (run, sample, metric, trial) coordinate.
// The mapping only depends on its arguments, so the degree of parallelism
// never changes which numbers a trial sees.
uint64_t DeriveSeed(uint64_t run_seed, std::string_view sample_id,
                    std::string_view stream, uint64_t index);

}  // namespace vqaprobe

#endif  // VQAPROBE_CORE_RANDOM_H_
