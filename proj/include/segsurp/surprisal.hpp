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

// Word-level surprisal over subword token streams and the feature rows fed
// to the reading-time regressions.
//
// A word's surprisal is the sum of its tokens' surprisals, each token
// conditioned on every token before it in the sentence:
//   S(w) = sum_i -log2 P(t_i | history, t_1 .. t_{i-1})
// The history resets at the start of each text and after every word that
// ends a sentence.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segsurp/corpus_io.hpp"
#include "segsurp/ngram_lm.hpp"
#include "segsurp/tokenization.hpp"

namespace segsurp {

enum class Exclusion { Kept, AdjacentPunctuation, NonAlphabetic, OutOfVocabulary };

std::string_view exclusion_name(Exclusion e);

struct WordSurprisal {
  std::size_t record = 0;  // index into the reading-time corpus
  Scheme scheme = Scheme::Orthographic;
  TokenizedWord tokenized;  // empty for words with no letters or digits
  std::vector<double> token_bits;
  double surprisal_bits = 0.0;
  bool oov = false;
  Exclusion exclusion = Exclusion::Kept;

  std::size_t token_count() const { return tokenized.tokens.size(); }
  bool kept() const { return exclusion == Exclusion::Kept; }
};

// Running token context for one sentence.
class TokenHistory {
 public:
  TokenHistory() { reset(); }
  void reset();
  void push(TokenId id) { ids_.push_back(id); }
  std::span<const TokenId> ids() const { return ids_; }

 private:
  std::vector<TokenId> ids_;
};

// Scores one tokenized word and advances `history` past its tokens. The
// word is flagged OOV if any of its symbols is outside the model vocabulary.
WordSurprisal word_surprisal(const NGramModel& model, const Tokenizer& tokenizer, const TokenizedWord& word,
                             TokenHistory& history);

// Surprisal of every record, in corpus order. Words whose normalized form
// has zero training frequency are also flagged OOV. Exclusions are left
// at Kept; see apply_exclusions.
std::vector<WordSurprisal> compute_surprisals(std::span<const RTRecord> records, const Tokenizer& tokenizer,
                                              const NGramModel& model, const FrequencyTable& frequencies);

// Exclusion reason per record. Priority: non-alphabetic word, neighbor
// (same text) containing a character outside [a-zA-Z], then OOV.
std::vector<Exclusion> apply_exclusions(std::span<const RTRecord> records, const std::vector<bool>& oov);

// Applies apply_exclusions to one scheme's surprisals in place.
void apply_exclusions(std::span<const RTRecord> records, std::vector<WordSurprisal>& surprisals);

// Keeps a word only if it is kept under every scheme. Words dropped this
// way take the OOV reason.
void align_exclusions(std::span<std::vector<WordSurprisal>* const> schemes);

struct FeatureRow {
  std::string text_id;
  std::size_t word_index = 0;
  double rt_ms = 0.0;
  // Index is the lag: 0 is the current word, k is the k-th previous word.
  std::vector<double> surprisal;
  std::vector<double> length;
  std::vector<double> log_freq;
  std::size_t token_count = 1;  // tokens of the current word
  int fold = -1;

  std::size_t lags() const { return surprisal.size(); }
};

enum class Feature { Surprisal, Length, LogFrequency };

struct Predictor {
  Feature feature;
  std::size_t lag;

  std::string name() const;  // "s0", "len1", "f2", ...
  double value(const FeatureRow& row) const;
  friend bool operator==(const Predictor&, const Predictor&) = default;
};

// Length and log frequency at lags 0..K.
std::vector<Predictor> control_predictors(std::size_t spillover);
// Controls plus surprisal at lags 0..K.
std::vector<Predictor> surprisal_predictors(std::size_t spillover);

// One row per kept word whose `spillover` predecessors in the same text are
// also kept. Throws ConfigError for negative spillover.
std::vector<FeatureRow> build_feature_rows(std::span<const RTRecord> records,
                                           std::span<const WordSurprisal> surprisals,
                                           const FrequencyTable& frequencies, int spillover);

// TSV with header: text_id word_index rt_ms fold s0 len0 f0 s1 len1 f1 ...
void write_feature_rows(std::ostream& out, std::span<const FeatureRow> rows);

// Records grouped by text (first-appearance order) and sorted by
// word_index; returns indices into `records`.
std::vector<std::vector<std::size_t>> texts_in_order(std::span<const RTRecord> records);

}  // namespace segsurp
