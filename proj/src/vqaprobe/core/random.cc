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

#include "vqaprobe/core/random.h"

#include <numeric>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "vqaprobe/core/text.h"

namespace vqaprobe {

double Rng::Uniform() {
  // Top 53 bits of one engine draw.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal(double mean, double stddev) {
  boost::random::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

int64_t Rng::Poisson(double mean) {
  if (mean <= 0.0) return 0;
  boost::random::poisson_distribution<int64_t, double> dist(mean);
  return dist(engine_);
}

bool Rng::Bernoulli(double p) { return Uniform() < p; }

size_t Rng::Index(size_t n) {
  boost::random::uniform_int_distribution<size_t> dist(0, n - 1);
  return dist(engine_);
}

std::vector<size_t> Rng::SampleWithoutReplacement(size_t n, size_t k) {
  if (k > n) k = n;
  std::vector<size_t> pool(n);
  std::iota(pool.begin(), pool.end(), size_t{0});
  // Partial Fisher-Yates.
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + Index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

uint64_t DeriveSeed(uint64_t run_seed, std::string_view sample_id,
                    std::string_view stream, uint64_t index) {
  uint64_t h = Mix64(run_seed);
  h = Fnv1a64(sample_id, h);
  h = Fnv1a64(std::string_view("\0", 1), h);
  h = Fnv1a64(stream, h);
  h = Fnv1a64(std::string_view("\0", 1), h);
  return Mix64(h ^ Mix64(index));
}

}  // namespace vqaprobe
