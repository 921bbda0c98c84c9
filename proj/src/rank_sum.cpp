// Copyright 2026 The segsurp Authors.
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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "segsurp/error.hpp"
#include "segsurp/evaluation.hpp"

namespace segsurp {
namespace {

// Number of size-k subsets of ranks {1..n} with each possible rank sum,
// indexed by sum. Counts fit in doubles exactly up to n = 20 (C(20,10)).
std::vector<double> rank_sum_counts(std::size_t n, std::size_t k) {
  const std::size_t max_sum = n * (n + 1) / 2;
  // ways[j][s]: subsets of size j with sum s among ranks seen so far
  std::vector<std::vector<double>> ways(k + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t j = std::min(k, r); j >= 1; --j) {
      for (std::size_t s = max_sum; s >= r; --s) ways[j][s] += ways[j - 1][s - r];
    }
  }
  return ways[k];
}

double exact_p(double w, std::size_t n_a, std::size_t n_b) {
  const auto counts = rank_sum_counts(n_a + n_b, n_a);
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  const auto ws = static_cast<std::size_t>(std::llround(w));
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (s <= ws) lower += counts[s];
    if (s >= ws) upper += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

double normal_p(double w, std::size_t n_a, std::size_t n_b, double tie_term) {
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double n = na + nb;
  const double mean = na * (n + 1.0) / 2.0;
  double var = na * nb / 12.0 * (n + 1.0);
  if (n > 1) var -= na * nb * tie_term / (12.0 * n * (n - 1.0));
  if (var <= 0.0) return 1.0;
  const double dev = std::max(0.0, std::fabs(w - mean) - 0.5);
  const double z = dev / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::numbers::sqrt2));
}

}  // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, RankSumMethod method) {
  if (a.empty() || b.empty()) throw ValidationError("rank-sum test needs two non-empty samples");

  struct Item {
    double value;
    bool in_a;
  };
  std::vector<Item> all;
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.value < y.value; });

  double w = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool ties = false;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].in_a) w += avg_rank;
    }
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  RankSumResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  r.w = w;
  r.u = w - static_cast<double>(r.n_a * (r.n_a + 1)) / 2.0;

  bool use_exact = false;
  switch (method) {
    case RankSumMethod::Auto:
      use_exact = !ties && all.size() <= kExactRankSumLimit;
      break;
    case RankSumMethod::Exact:
      if (ties) throw ValidationError("exact rank-sum distribution requires tie-free samples");
      use_exact = true;
      break;
    case RankSumMethod::Normal:
      break;
  }
  r.exact = use_exact;
  r.p = use_exact ? exact_p(w, r.n_a, r.n_b) : normal_p(w, r.n_a, r.n_b, tie_term);
  return r;
}

}  // namespace segsurp
