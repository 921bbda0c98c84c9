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

// Run configuration: a flat "key = value" file, '#' starts a comment.
//
//   train_corpus          = path
//   merge_file            = path      (needed for bpe unless bpe_merges > 0)
//   bpe_merges            = N         (learn N merges when merge_file is unset)
//   lexicon               = path      (needed for morphological)
//   stopwords             = path
//   rt_corpus.<name>      = path
//   spillover.<name>      = 1 | 3
//   order                 = 5
//   seed                  = 20231
//   folds                 = 10
//   schemes               = orthographic, bpe, morphological
//   alignment             = on | off
//   item_diff             = morphological, bpe
//   out                   = directory
//
// Relative paths resolve against the config file's directory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "segsurp/tokenization.hpp"

namespace segsurp {

struct RtCorpusConfig {
  std::string name;
  std::filesystem::path path;
  int spillover = 1;
};

struct RunConfig {
  std::filesystem::path train_corpus;
  std::filesystem::path merge_file;
  std::size_t bpe_merges = 0;
  std::filesystem::path lexicon;
  std::filesystem::path stopwords;
  std::vector<RtCorpusConfig> rt_corpora;
  std::size_t order = 5;
  std::uint64_t seed = 20231;
  std::size_t folds = 10;
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  bool alignment = true;
  std::optional<std::pair<Scheme, Scheme>> item_diff;
  std::filesystem::path out_dir;
  std::string sha256;  // of the config file text

  bool has_scheme(Scheme s) const;
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Comma-separated scheme names. Throws ConfigError listing the valid names.
std::vector<Scheme> parse_scheme_list(std::string_view list);

// Checks paths and ranges; throws ConfigError on the first problem.
// Input paths are only required by the stages that read them.
enum class Stage { Train, Evaluate, Tokenize };
void validate_config(const RunConfig& config, Stage stage);

}  // namespace segsurp
