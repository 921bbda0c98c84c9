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

// Cross-validation, rank-sum comparisons and the descriptive analyses.

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "segsurp/regression.hpp"
#include "segsurp/surprisal.hpp"

namespace segsurp {

inline constexpr std::size_t kDefaultFolds = 10;
inline constexpr std::uint64_t kDefaultSeed = 20231;

struct RowKey {
  std::string text_id;
  std::size_t word_index = 0;
  auto operator<=>(const RowKey&) const = default;
};

RowKey row_key(const FeatureRow& row);

class FoldAssignment {
 public:
  // Sorts and deduplicates the keys, shuffles them with mt19937_64(seed)
  // and deals them round-robin into `folds` folds.
  static FoldAssignment make(std::vector<RowKey> keys, std::uint64_t seed, std::size_t folds = kDefaultFolds);

  std::optional<std::size_t> fold(const RowKey& key) const;
  std::size_t folds() const { return folds_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return map_.size(); }

  // Sets FeatureRow::fold; throws ValidationError for unassigned rows.
  void apply(std::vector<FeatureRow>& rows) const;

 private:
  std::map<RowKey, std::size_t> map_;
  std::size_t folds_ = 0;
  std::uint64_t seed_ = 0;
};

struct CrossValidation {
  std::vector<double> fold_delta;  // held-out per-token delta loglik, one per fold
  std::vector<std::size_t> fold_rows;
};

// Rows must carry fold ids in [0, folds). Throws FoldTooSmallError if a
// fold is empty or leaves too few training rows for the full model.
CrossValidation cross_validate(std::span<const FeatureRow> rows, std::size_t folds,
                               std::span<const Predictor> baseline, std::span<const Predictor> full);

enum class RankSumMethod { Auto, Exact, Normal };

struct RankSumResult {
  double w = 0.0;  // rank sum of sample a, average ranks for ties
  double u = 0.0;  // Mann-Whitney U of sample a: w - n_a (n_a + 1) / 2
  double p = 1.0;  // two-sided: min(1, 2 min(lower tail, upper tail))
  bool exact = false;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

inline constexpr std::size_t kExactRankSumLimit = 20;

// Auto uses the exact null distribution when n_a + n_b <= 20 and there are
// no ties, otherwise the normal approximation with tie and continuity
// corrections. Exact on tied data throws ValidationError.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                RankSumMethod method = RankSumMethod::Auto);

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;  // case-insensitive
  std::size_t size() const { return words_.size(); }
  const std::string& sha256() const { return sha256_; }

 private:
  std::set<std::string> words_;
  std::string sha256_;
};

// SHA-256 of data/stopwords_en.txt as shipped.
inline constexpr std::string_view kShippedStopwordsSha256 =
    "4e22be0ad71ae1c41dd7a8f944e851ead671d114edf4faad1ee8c698d2ba5084";

struct SegmentationRow {
  std::size_t tokens = 0;
  std::size_t words = 0;
  double percent = 0.0;
  std::size_t words_no_stop = 0;
  double percent_no_stop = 0.0;
};

struct SegmentationTable {
  std::size_t words = 0;
  std::size_t words_no_stop = 0;
  std::vector<SegmentationRow> rows;  // tokens = 1 .. max
};

// Words with no tokens (bare punctuation) are skipped.
SegmentationTable segmentation_stats(std::span<const TokenizedWord> words, const StopwordList& stopwords);

struct TokenCountSummary {
  std::size_t tokens = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Linear-interpolation quantile (R type 7) of sorted data.
double quantile_type7(std::span<const double> sorted, double q);

std::vector<TokenCountSummary> surprisal_by_token_count(std::span<const WordSurprisal> words, bool kept_only = true);

struct SubsetCrossValidation {
  std::size_t rows = 0;
  std::size_t folds = 0;  // 0 when the subset is too small for two folds
  std::vector<double> fold_delta;
  std::string note;
};

struct WholeVsSplit {
  SubsetCrossValidation whole;  // token_count == 1
  SubsetCrossValidation split;  // token_count > 1
};

// Cross-validates each subset with fresh folds from `seed`, lowering the
// fold count below `max_folds` when the subset cannot fill them.
WholeVsSplit whole_vs_split_analysis(std::span<const FeatureRow> rows, std::span<const Predictor> baseline,
                                     std::span<const Predictor> full, std::uint64_t seed,
                                     std::size_t max_folds = kDefaultFolds);

struct ItemDiff {
  std::string text_id;
  std::size_t word_index = 0;
  std::string word;
  std::string tokens_a;
  std::string tokens_b;
  double bits_a = 0.0;
  double bits_b = 0.0;
  double diff = 0.0;  // bits_a - bits_b
  std::string sentence;
};

// Words kept under both schemes, sorted by |diff| descending then by key.
std::vector<ItemDiff> item_diff_report(std::span<const RTRecord> records, std::span<const WordSurprisal> a,
                                       std::span<const WordSurprisal> b);

}  // namespace segsurp
