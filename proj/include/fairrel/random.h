// fairrel/random.h

// Copyright 2026 The fairrel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRREL_RANDOM_H_
#define FAIRREL_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fairrel {

// Seeded generator with distribution algorithms pinned in this file.  The
// std:: distributions are implementation-defined, so allocations drawn with
// them would differ between standard libraries; only the raw mt19937_64
// stream is specified by the standard.
class Rng {
 public:
  static constexpr const char *kAlgorithm =
      "mt19937_64;u53;binomial=inversion-split@64;poisson=inversion-split@64;laplace=inversion";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1).
  double UniformOpen();
  // Uniform integer on [0, n).
  std::uint64_t Below(std::uint64_t n);

  std::uint64_t Binomial(std::uint64_t n, double p);
  std::uint64_t Poisson(double mean);
  double Laplace(double scale);
  // Index drawn from unnormalized non-negative weights.
  size_t Categorical(std::span<const double> weights);
  // One multinomial draw; the last positive-probability cell absorbs the
  // remainder so the counts always sum to n.
  std::vector<std::uint64_t> Multinomial(std::uint64_t n, std::span<const double> probs);

 private:
  std::uint64_t BinomialSmall(std::uint64_t n, double p);
  std::uint64_t PoissonSmall(double mean);

  std::mt19937_64 engine_;
};

// Derives independent sub-stream seeds (splitmix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fairrel

#endif  // FAIRREL_RANDOM_H_
