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

#include "segsurp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "segsurp/error.hpp"
#include "segsurp/hash.hpp"
#include "segsurp/text.hpp"

namespace segsurp {

RowKey row_key(const FeatureRow& row) { return {row.text_id, row.word_index}; }

FoldAssignment FoldAssignment::make(std::vector<RowKey> keys, std::uint64_t seed, std::size_t folds) {
  if (folds == 0) throw ConfigError("fold count must be positive");
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::mt19937_64 rng(seed);
  std::shuffle(keys.begin(), keys.end(), rng);

  FoldAssignment fa;
  fa.folds_ = folds;
  fa.seed_ = seed;
  for (std::size_t i = 0; i < keys.size(); ++i) fa.map_.emplace(std::move(keys[i]), i % folds);
  return fa;
}

std::optional<std::size_t> FoldAssignment::fold(const RowKey& key) const {
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void FoldAssignment::apply(std::vector<FeatureRow>& rows) const {
  for (auto& r : rows) {
    auto f = fold(row_key(r));
    if (!f) throw ValidationError("row " + r.text_id + ":" + std::to_string(r.word_index) + " has no fold");
    r.fold = static_cast<int>(*f);
  }
}

CrossValidation cross_validate(std::span<const FeatureRow> rows, std::size_t folds,
                               std::span<const Predictor> baseline, std::span<const Predictor> full) {
  CrossValidation cv;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<FeatureRow> train;
    std::vector<FeatureRow> test;
    for (const auto& r : rows) {
      if (r.fold < 0 || static_cast<std::size_t>(r.fold) >= folds) {
        throw ValidationError("row " + r.text_id + ":" + std::to_string(r.word_index) + " has an invalid fold");
      }
      (static_cast<std::size_t>(r.fold) == f ? test : train).push_back(r);
    }
    if (test.empty() || train.size() <= full.size() + 1) {
      throw FoldTooSmallError("fold " + std::to_string(f) + " has " + std::to_string(test.size()) +
                              " held-out and " + std::to_string(train.size()) + " training rows for " +
                              std::to_string(full.size()) + " predictors");
    }
    cv.fold_delta.push_back(delta_loglik(train, test, baseline, full).value);
    cv.fold_rows.push_back(test.size());
  }
  return cv;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open stopword list " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (!t.empty()) words.insert(text::ascii_lower(t));
  }
  StopwordList list(std::move(words));
  list.sha256_ = sha256_file(path);
  return list;
}

bool StopwordList::contains(std::string_view word) const { return words_.count(text::ascii_lower(word)) > 0; }

SegmentationTable segmentation_stats(std::span<const TokenizedWord> words, const StopwordList& stopwords) {
  SegmentationTable table;
  std::vector<std::size_t> all;
  std::vector<std::size_t> no_stop;
  for (const auto& w : words) {
    const std::size_t k = w.size();
    if (k == 0) continue;
    if (all.size() < k) {
      all.resize(k, 0);
      no_stop.resize(k, 0);
    }
    ++all[k - 1];
    ++table.words;
    if (!stopwords.contains(text::strip_punctuation(w.word))) {
      ++no_stop[k - 1];
      ++table.words_no_stop;
    }
  }
  for (std::size_t k = 1; k <= all.size(); ++k) {
    SegmentationRow row;
    row.tokens = k;
    row.words = all[k - 1];
    row.words_no_stop = no_stop[k - 1];
    row.percent = table.words ? 100.0 * static_cast<double>(row.words) / static_cast<double>(table.words) : 0.0;
    row.percent_no_stop = table.words_no_stop ? 100.0 * static_cast<double>(row.words_no_stop) /
                                                    static_cast<double>(table.words_no_stop)
                                              : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

double quantile_type7(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<TokenCountSummary> surprisal_by_token_count(std::span<const WordSurprisal> words, bool kept_only) {
  std::map<std::size_t, std::vector<double>> groups;
  for (const auto& w : words) {
    if (w.token_count() == 0 || (kept_only && !w.kept())) continue;
    groups[w.token_count()].push_back(w.surprisal_bits);
  }
  std::vector<TokenCountSummary> out;
  for (auto& [k, v] : groups) {
    std::sort(v.begin(), v.end());
    TokenCountSummary s;
    s.tokens = k;
    s.count = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile_type7(v, 0.25);
    s.median = quantile_type7(v, 0.5);
    s.q3 = quantile_type7(v, 0.75);
    out.push_back(s);
  }
  return out;
}

namespace {

SubsetCrossValidation subset_cv(std::vector<FeatureRow> rows, std::span<const Predictor> baseline,
                                std::span<const Predictor> full, std::uint64_t seed, std::size_t max_folds) {
  SubsetCrossValidation out;
  out.rows = rows.size();
  const std::size_t n = rows.size();
  std::size_t k = max_folds;
  for (; k >= 2; --k) {
    const std::size_t largest_fold = (n + k - 1) / k;
    if (n >= k && n - largest_fold > full.size() + 1) break;
  }
  if (k < 2) {
    out.note = n == 0 ? "empty subset" : "too few rows for two folds";
    return out;
  }
  if (k < max_folds) out.note = "reduced to " + std::to_string(k) + " folds";

  std::vector<RowKey> keys;
  for (const auto& r : rows) keys.push_back(row_key(r));
  FoldAssignment::make(std::move(keys), seed, k).apply(rows);
  try {
    out.fold_delta = cross_validate(rows, k, baseline, full).fold_delta;
    out.folds = k;
  } catch (const SingularDesignError& e) {
    out.fold_delta.clear();
    out.note = std::string("singular design: ") + e.what();
  }
  return out;
}

}  // namespace

WholeVsSplit whole_vs_split_analysis(std::span<const FeatureRow> rows, std::span<const Predictor> baseline,
                                     std::span<const Predictor> full, std::uint64_t seed, std::size_t max_folds) {
  std::vector<FeatureRow> whole;
  std::vector<FeatureRow> split;
  for (const auto& r : rows) (r.token_count > 1 ? split : whole).push_back(r);
  return {subset_cv(std::move(whole), baseline, full, seed, max_folds),
          subset_cv(std::move(split), baseline, full, seed, max_folds)};
}

std::vector<ItemDiff> item_diff_report(std::span<const RTRecord> records, std::span<const WordSurprisal> a,
                                       std::span<const WordSurprisal> b) {
  if (a.size() != records.size() || b.size() != records.size()) {
    throw ValidationError("item diff needs surprisals for every record under both schemes");
  }
  std::vector<std::string> sentence_of(records.size());
  for (const auto& textv : texts_in_order(records)) {
    std::size_t start = 0;
    for (std::size_t k = 0; k < textv.size(); ++k) {
      if (text::ends_sentence(records[textv[k]].word) || k + 1 == textv.size()) {
        std::string s;
        for (std::size_t m = start; m <= k; ++m) {
          if (!s.empty()) s.push_back(' ');
          s += records[textv[m]].word;
        }
        for (std::size_t m = start; m <= k; ++m) sentence_of[textv[m]] = s;
        start = k + 1;
      }
    }
  }

  std::vector<ItemDiff> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!a[i].kept() || !b[i].kept()) continue;
    ItemDiff d;
    d.text_id = records[i].text_id;
    d.word_index = records[i].word_index;
    d.word = records[i].word;
    d.tokens_a = a[i].tokenized.joined();
    d.tokens_b = b[i].tokenized.joined();
    d.bits_a = a[i].surprisal_bits;
    d.bits_b = b[i].surprisal_bits;
    d.diff = d.bits_a - d.bits_b;
    d.sentence = sentence_of[i];
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(), [](const ItemDiff& x, const ItemDiff& y) {
    const double ax = std::fabs(x.diff);
    const double ay = std::fabs(y.diff);
    if (ax != ay) return ax > ay;
    return RowKey{x.text_id, x.word_index} < RowKey{y.text_id, y.word_index};
  });
  return out;
}

}  // namespace segsurp
