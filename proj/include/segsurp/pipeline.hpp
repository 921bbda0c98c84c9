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

// Run stages. Output layout under RunConfig::out_dir:
//
//   models/manifest.json          hashes of inputs and models, order, seed
//   models/<scheme>.arpa
//   models/frequencies.tsv        orthographic training counts
//   models/merges.learned.txt     only when merges are learned
//   tokens/<scheme>.txt           training token streams
//   features/<corpus>.<scheme>.tsv
//   report/                       report.json and CSVs (see report.hpp)

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsurp/config.hpp"
#include "segsurp/corpus_io.hpp"
#include "segsurp/evaluation.hpp"
#include "segsurp/ngram_lm.hpp"
#include "segsurp/report.hpp"
#include "segsurp/tokenization.hpp"

namespace segsurp {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kManifestVersion = 1;

// Tokenizer resources owned for the duration of a stage.
struct LoadedResources {
  std::optional<MergeTable> merges;
  std::optional<SegmentationLexicon> lexicon;

  TokenizerResources view() const;
};

// Loads the merge file and lexicon the selected schemes need. With
// bpe_merges set and no merge file, merges come from `learned_merges`.
LoadedResources load_resources(const RunConfig& config, const std::filesystem::path& learned_merges = {});

struct CorpusInput {
  std::string name;
  std::vector<RTRecord> records;
  int spillover = 1;
};

struct SchemeInput {
  const Tokenizer* tokenizer = nullptr;
  const NGramModel* model = nullptr;
};

struct EvaluationOptions {
  std::uint64_t seed = kDefaultSeed;
  std::size_t folds = kDefaultFolds;
  bool alignment = true;
  std::optional<std::pair<Scheme, Scheme>> item_diff;
  const StopwordList* stopwords = nullptr;
  // When set, feature rows are dumped here as <corpus>.<scheme>.tsv.
  std::filesystem::path feature_dir;
};

// Surprisal, exclusions, fits, cross-validation and descriptive analyses
// for every corpus x scheme cell.
EvaluationReport evaluate_corpora(std::span<const CorpusInput> corpora, std::span<const SchemeInput> schemes,
                                  const FrequencyTable& frequencies, const EvaluationOptions& options);

nlohmann::json run_train(const RunConfig& config, std::ostream& log);
EvaluationReport run_evaluate(const RunConfig& config, std::ostream& log);
// One block per input line: "<scheme>\t<tokens>" for each scheme, then a
// blank line.
void run_tokenize(const RunConfig& config, std::istream& in, std::ostream& out);
std::string run_report(const RunConfig& config);

}  // namespace segsurp
