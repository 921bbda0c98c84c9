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

// Evaluation report: report.json plus one CSV per figure-style summary.
//
//   crossval.csv          corpus,scheme,fold,rows,delta_loglik
//   surprisal_by_k.csv    corpus,scheme,tokens,count,mean,min,q1,median,q3,max
//   whole_vs_split.csv    corpus,scheme,subset,folds,fold,rows,delta_loglik
//   item_diff.csv         corpus,scheme_a,scheme_b,rank,text_id,word_index,word,
//                         tokens_a,tokens_b,bits_a,bits_b,diff,sentence
//   segmentation.csv      corpus,scheme,tokens,words,percent,words_no_stop,percent_no_stop

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsurp/evaluation.hpp"

namespace segsurp {

inline constexpr int kReportSchemaVersion = 1;

struct CellResult {
  std::string corpus;
  Scheme scheme = Scheme::Orthographic;
  int spillover = 1;
  std::size_t words = 0;
  std::size_t kept_words = 0;
  std::map<std::string, std::size_t> exclusions;  // reason -> count
  std::size_t rows = 0;
  double delta_loglik = 0.0;        // in sample, full data
  std::optional<double> cohens_f2;  // unset when infinite
  nlohmann::json baseline_fit;
  nlohmann::json full_fit;
  std::vector<double> fold_delta;
  std::optional<RankSumResult> vs_orthographic;
  SegmentationTable segmentation;
  std::vector<TokenCountSummary> by_token_count;
  WholeVsSplit whole_vs_split;
};

struct ItemDiffSet {
  std::string corpus;
  Scheme a = Scheme::Morphological;
  Scheme b = Scheme::BPE;
  std::vector<ItemDiff> items;
};

struct EvaluationReport {
  std::uint64_t seed = 0;
  std::size_t folds = kDefaultFolds;
  bool alignment = true;
  std::size_t order = 0;
  std::string stopwords_sha256;
  std::vector<CellResult> cells;
  std::vector<ItemDiffSet> item_diffs;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const EvaluationReport& report);

// Violations of the report invariants (fold counts, percentage sums);
// empty when the report is consistent.
std::vector<std::string> check_report(const EvaluationReport& report);
std::vector<std::string> check_report(const nlohmann::json& report);

void write_report(const EvaluationReport& report, const std::filesystem::path& dir);

// Plain-text tables from a report.json document.
std::string summarize_report(const nlohmann::json& report);

}  // namespace segsurp
