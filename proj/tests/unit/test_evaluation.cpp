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
#include <random>

#include "doctest.h"
#include "segsurp/error.hpp"
#include "segsurp/evaluation.hpp"

using namespace segsurp;

namespace {

std::vector<FeatureRow> synthetic_rows(std::uint64_t seed, std::size_t n, double beta_s, std::size_t texts = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(1.0, 12.0);
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow r;
    r.text_id = "t" + std::to_string(i % texts);
    r.word_index = i;
    r.surprisal = {u(rng)};
    r.length = {std::round(u(rng))};
    r.log_freq = {u(rng)};
    r.rt_ms = 200 + beta_s * r.surprisal[0] + 0.5 * r.length[0] - 0.3 * r.log_freq[0] + z(rng);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RowKey> keys_of(const std::vector<FeatureRow>& rows) {
  std::vector<RowKey> keys;
  for (const auto& r : rows) keys.push_back(row_key(r));
  return keys;
}

}  // namespace

TEST_CASE("fold assignment") {
  const auto rows = synthetic_rows(1, 103, 1.0);
  auto keys = keys_of(rows);
  const auto a = FoldAssignment::make(keys, 42);
  std::reverse(keys.begin(), keys.end());
  const auto b = FoldAssignment::make(keys, 42);
  const auto c = FoldAssignment::make(keys, 43);
  std::vector<std::size_t> sizes(10, 0);
  bool differs = false;
  for (const auto& k : keys) {
    REQUIRE(a.fold(k).has_value());
    CHECK(a.fold(k) == b.fold(k));
    differs |= a.fold(k) != c.fold(k);
    ++sizes[*a.fold(k)];
  }
  CHECK(differs);
  CHECK(a.size() == 103);
  for (auto s : sizes) CHECK((s == 10 || s == 11));
  CHECK_FALSE(a.fold({"nope", 0}).has_value());

  auto extra = rows;
  extra.push_back(FeatureRow{"other", 1});
  CHECK_THROWS_AS(a.apply(extra), ValidationError);
}

TEST_CASE("cross-validation") {
  auto rows = synthetic_rows(2, 400, 2.0);
  FoldAssignment::make(keys_of(rows), 7).apply(rows);
  const auto base = control_predictors(0);
  const auto full = surprisal_predictors(0);
  const auto cv = cross_validate(rows, 10, base, full);
  REQUIRE(cv.fold_delta.size() == 10);
  for (double d : cv.fold_delta) CHECK(d > 0.0);
  std::size_t total = 0;
  for (auto n : cv.fold_rows) total += n;
  CHECK(total == rows.size());

  // Duplicated surprisal column -> identical per-fold values.
  auto copy = rows;
  CHECK(cross_validate(copy, 10, base, full).fold_delta == cv.fold_delta);

  // Row order does not matter once folds come from the same seed.
  auto shuffled = synthetic_rows(2, 400, 2.0);
  std::mt19937 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  FoldAssignment::make(keys_of(shuffled), 7).apply(shuffled);
  const auto cv2 = cross_validate(shuffled, 10, base, full);
  for (std::size_t f = 0; f < 10; ++f) CHECK(cv2.fold_delta[f] == doctest::Approx(cv.fold_delta[f]).epsilon(1e-12));

  auto tiny = synthetic_rows(3, 8, 1.0);
  FoldAssignment::make(keys_of(tiny), 7).apply(tiny);
  CHECK_THROWS_AS(cross_validate(tiny, 10, base, full), FoldTooSmallError);
}

TEST_CASE("rank-sum basics") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6};
  const auto r = wilcoxon_rank_sum(a, b);
  CHECK(r.w == 6.0);
  CHECK(r.u == 0.0);
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(0.1).epsilon(1e-12));

  const auto same = wilcoxon_rank_sum(a, a);
  CHECK(same.p == 1.0);
  CHECK_FALSE(same.exact);

  CHECK_THROWS_AS(wilcoxon_rank_sum(a, std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(wilcoxon_rank_sum(a, a, RankSumMethod::Exact), ValidationError);
}

TEST_CASE("exact rank-sum p-values match full enumeration for 3 vs 3") {
  // Every way of giving sample a three of the ranks 1..6.
  std::vector<double> sums;
  for (int m = 0; m < 64; ++m) {
    if (__builtin_popcount(m) != 3) continue;
    double s = 0;
    for (int i = 0; i < 6; ++i) {
      if (m & (1 << i)) s += i + 1;
    }
    sums.push_back(s);
  }
  REQUIRE(sums.size() == 20);
  for (int m = 0; m < 64; ++m) {
    if (__builtin_popcount(m) != 3) continue;
    std::vector<double> a;
    std::vector<double> b;
    for (int i = 0; i < 6; ++i) ((m & (1 << i)) ? a : b).push_back(i + 1);
    const auto r = wilcoxon_rank_sum(a, b);
    const double lower = static_cast<double>(std::count_if(sums.begin(), sums.end(), [&](double s) { return s <= r.w; }));
    const double upper = static_cast<double>(std::count_if(sums.begin(), sums.end(), [&](double s) { return s >= r.w; }));
    CHECK(r.p == doctest::Approx(std::min(1.0, 2 * std::min(lower, upper) / 20.0)).epsilon(1e-12));
  }
}

TEST_CASE("rank-sum symmetry and calibration") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(10);
    std::vector<double> b(10);
    for (auto& v : a) v = z(rng);
    for (auto& v : b) v = z(rng) + 0.5 * (trial % 3);
    const auto ab = wilcoxon_rank_sum(a, b);
    const auto ba = wilcoxon_rank_sum(b, a);
    CHECK(ab.w + ba.w == 210.0);
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
    const auto normal = wilcoxon_rank_sum(a, b, RankSumMethod::Normal);
    CHECK(std::fabs(ab.p - normal.p) < 0.03);
  }
}

TEST_CASE("rank-sum magnitudes for 10 vs 10 fold comparisons") {
  // U = 43 and U = 50 of the first sample.
  auto sample_with_u = [](int u) {
    // Place b at ranks so that a's rank sum is u + 55.
    std::vector<double> a;
    std::vector<double> b;
    std::vector<int> ranks(20);
    for (int i = 0; i < 20; ++i) ranks[i] = i + 1;
    // Start with a = {1..10} (U = 0) and raise a's top ranks one at a time.
    std::vector<int> ra{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int need = u;
    for (int i = 9; i >= 0 && need > 0; --i) {
      const int room = (20 - (9 - i)) - ra[i];
      const int step = std::min(room, need);
      ra[i] += step;
      need -= step;
    }
    for (int r = 1; r <= 20; ++r) {
      (std::find(ra.begin(), ra.end(), r) != ra.end() ? a : b).push_back(r);
    }
    return std::make_pair(a, b);
  };
  const auto [a43, b43] = sample_with_u(43);
  const auto r43 = wilcoxon_rank_sum(a43, b43);
  CHECK(r43.u == 43.0);
  CHECK(r43.p == doctest::Approx(0.63).epsilon(0.01));
  const auto [a50, b50] = sample_with_u(50);
  const auto r50 = wilcoxon_rank_sum(a50, b50);
  CHECK(r50.u == 50.0);
  CHECK(r50.p == 1.0);
}

TEST_CASE("segmentation statistics") {
  auto word = [](std::string w, std::size_t k) {
    TokenizedWord t;
    t.word = std::move(w);
    for (std::size_t i = 0; i < k; ++i) t.tokens.push_back({"x", i == 0});
    return t;
  };
  std::vector<TokenizedWord> words{word("the", 1), word("cats", 2), word("of", 1), word("unhappily", 3),
                                   word("--", 0)};
  const auto none = segmentation_stats(words, StopwordList{});
  CHECK(none.words == 4);
  REQUIRE(none.rows.size() == 3);
  CHECK(none.rows[0].percent == 50.0);
  CHECK(none.rows[0].percent_no_stop == 50.0);

  const StopwordList stop({"the", "of"});
  const auto with = segmentation_stats(words, stop);
  CHECK(with.words_no_stop == 2);
  CHECK(with.rows[0].words_no_stop == 0);
  CHECK(with.rows[1].percent_no_stop == 50.0);
  double total = 0;
  for (const auto& r : with.rows) total += r.percent;
  CHECK(total == doctest::Approx(100.0));

  std::vector<TokenizedWord> unsplit{word("a", 1), word("b", 1)};
  const auto orth = segmentation_stats(unsplit, stop);
  REQUIRE(orth.rows.size() == 1);
  CHECK(orth.rows[0].percent == 100.0);
}

TEST_CASE("shipped stopword list") {
  const auto list = StopwordList::load(SEGSURP_DATA_DIR "/stopwords_en.txt");
  CHECK(list.sha256() == kShippedStopwordsSha256);
  CHECK(list.size() == 318);
  CHECK(list.contains("The"));
  CHECK_FALSE(list.contains("court"));
}

TEST_CASE("type-7 quantiles") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_type7(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_type7(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_type7(v, 1.0) == 4.0);
  CHECK(quantile_type7(std::vector<double>{5}, 0.3) == 5.0);
}

TEST_CASE("surprisal by token count") {
  // Each extra token adds c = 2.5 bits on top of a base of 3.
  std::vector<WordSurprisal> words;
  for (std::size_t i = 0; i < 30; ++i) {
    WordSurprisal w;
    const std::size_t k = 1 + i % 3;
    for (std::size_t t = 0; t < k; ++t) w.tokenized.tokens.push_back({"x", t == 0});
    w.surprisal_bits = 3.0 + 2.5 * static_cast<double>(k - 1);
    if (i == 29) w.exclusion = Exclusion::OutOfVocabulary;
    words.push_back(w);
  }
  const auto groups = surprisal_by_token_count(words);
  REQUIRE(groups.size() == 3);
  CHECK(groups[1].mean - groups[0].mean == doctest::Approx(2.5));
  CHECK(groups[2].mean - groups[1].mean == doctest::Approx(2.5));
  std::size_t total = 0;
  for (const auto& g : groups) total += g.count;
  CHECK(total == 29);
  CHECK(surprisal_by_token_count(words, false)[2].count == 10);
}

TEST_CASE("whole versus split analysis") {
  const auto base = control_predictors(0);
  const auto full = surprisal_predictors(0);
  SUBCASE("all unsplit") {
    const auto rows = synthetic_rows(4, 200, 2.0);
    const auto r = whole_vs_split_analysis(rows, base, full, 1);
    CHECK(r.whole.rows == 200);
    CHECK(r.whole.folds == 10);
    CHECK(r.split.rows == 0);
    CHECK(r.split.folds == 0);
    CHECK(r.split.fold_delta.empty());
  }
  SUBCASE("small split subset reduces the fold count") {
    auto rows = synthetic_rows(5, 200, 2.0);
    for (std::size_t i = 0; i < 30; ++i) rows[i].token_count = 2;
    const auto r = whole_vs_split_analysis(rows, base, full, 1);
    CHECK(r.whole.rows + r.split.rows == 200);
    CHECK(r.split.folds == 10);
    for (std::size_t i = 30; i < 200; ++i) rows[i].token_count = 1;
    std::vector<FeatureRow> few(rows.begin(), rows.begin() + 8);
    const auto small = whole_vs_split_analysis(few, base, full, 1);
    CHECK(small.split.folds > 0);
    CHECK(small.split.folds < 10);
    CHECK(small.split.note.find("reduced") != std::string::npos);
    CHECK(small.split.fold_delta.size() == small.split.folds);
  }
}

TEST_CASE("item differences") {
  std::vector<RTRecord> recs{{"t", 0, "The", 200}, {"t", 1, "cat", 210}, {"t", 2, "sat.", 220},
                             {"t", 3, "It", 200},  {"t", 4, "ran", 190}};
  auto make = [&](std::vector<double> bits) {
    std::vector<WordSurprisal> out;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      WordSurprisal w;
      w.record = i;
      w.tokenized.word = recs[i].word;
      w.tokenized.tokens.push_back({recs[i].word, true});
      w.surprisal_bits = bits[i];
      out.push_back(w);
    }
    return out;
  };
  auto a = make({1, 2, 3, 4, 5});
  auto b = make({1, 5, 3, 3, 5});
  a[2].exclusion = Exclusion::NonAlphabetic;

  const auto self = item_diff_report(recs, a, a);
  CHECK(self.size() == 4);
  for (const auto& d : self) CHECK(d.diff == 0.0);

  const auto diff = item_diff_report(recs, a, b);
  REQUIRE(diff.size() == 4);
  CHECK(diff[0].word == "cat");
  CHECK(diff[0].diff == -3.0);
  CHECK(diff[0].sentence == "The cat sat.");
  CHECK(diff[1].word == "It");
  CHECK(diff[1].sentence == "It ran");
  for (std::size_t i = 1; i < diff.size(); ++i) CHECK(std::fabs(diff[i - 1].diff) >= std::fabs(diff[i].diff));
}
