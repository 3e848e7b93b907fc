// fairrel/random.cc

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

#include "fairrel/random.h"

#include <algorithm>
#include <cmath>

namespace fairrel {

namespace {
// Above this mean the binomial and Poisson draws are split into two
// independent halves; below it the inversion loop is short and exp(-mean)
// stays far from underflow.
constexpr double kInversionLimit = 64.0;
}  // namespace

double Rng::Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::UniformOpen() {
  double u;
  do {
    u = Uniform();
  } while (u == 0.0);
  return u;
}

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t Rng::BinomialSmall(std::uint64_t n, double p) {
  // Sequential CDF inversion.
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  const double r0 = std::pow(q, static_cast<double>(n));
  while (true) {
    double r = r0;
    double u = Uniform();
    std::uint64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - s;
    }
    if (x <= n) return x;
  }
}

std::uint64_t Rng::Binomial(std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - Binomial(n, 1.0 - p);
  if (static_cast<double>(n) * p <= kInversionLimit) return BinomialSmall(n, p);
  const std::uint64_t half = n / 2;
  std::uint64_t first = Binomial(half, p);
  return first + Binomial(n - half, p);
}

std::uint64_t Rng::PoissonSmall(double mean) {
  const double p0 = std::exp(-mean);
  while (true) {
    double p = p0;
    double cdf = p0;
    double u = Uniform();
    std::uint64_t x = 0;
    while (u > cdf) {
      ++x;
      p *= mean / static_cast<double>(x);
      cdf += p;
      if (p == 0.0 && u > cdf) break;  // numerically exhausted; redraw
    }
    if (u <= cdf) return x;
  }
}

std::uint64_t Rng::Poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean <= kInversionLimit) return PoissonSmall(mean);
  std::uint64_t first = Poisson(mean / 2.0);
  return first + Poisson(mean - mean / 2.0);
}

double Rng::Laplace(double scale) {
  // u on (-1/2, 1/2); x = -b sgn(u) ln(1 - 2|u|).
  double u = UniformOpen() - 0.5;
  if (u == 0.0) return 0.0;
  double mag = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0.0 ? -mag : mag;
}

size_t Rng::Categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = Uniform() * total;
  size_t last_positive = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last_positive;
}

std::vector<std::uint64_t> Rng::Multinomial(std::uint64_t n, std::span<const double> probs) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  size_t last = probs.size();
  for (size_t i = probs.size(); i-- > 0;)
    if (probs[i] > 0.0) {
      last = i;
      break;
    }
  if (last == probs.size() || n == 0) return counts;

  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += std::max(p, 0.0);
  std::uint64_t remaining = n;
  for (size_t i = 0; i < last && remaining > 0; ++i) {
    double p = std::max(probs[i], 0.0);
    if (p <= 0.0) continue;
    double cond = remaining_mass > 0.0 ? std::min(1.0, p / remaining_mass) : 1.0;
    counts[i] = Binomial(remaining, cond);
    remaining -= counts[i];
    remaining_mass -= p;
  }
  counts[last] += remaining;
  return counts;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fairrel
