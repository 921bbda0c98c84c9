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

// Backoff n-gram language models with interpolated modified Kneser-Ney
// smoothing.
//
// Counting follows the KenLM lmplz conventions so that models agree with
// ARPA files produced by that toolkit:
//   * each sentence is "<s> t1 ... tn </s>"; a run of begin markers is
//     collapsed to one, so n-grams contain <s> only in first position;
//   * the highest order keeps raw counts, lower orders use continuation
//     counts (number of distinct left extensions), except n-grams that
//     start with <s>, which keep raw counts;
//   * unigrams are interpolated with the uniform distribution over the
//     vocabulary including <unk> and excluding <s>.
//
// Probabilities are stored interpolated, so queries use plain backoff:
//   log p(w | h) = log p*(h w)                 if (h w) is stored
//                = backoff(h) + log p(w | h')  otherwise (h' drops h's first token)
// All values are natural logs; ARPA I/O converts to log10.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace segsurp {

inline constexpr std::size_t kMaxOrder = 8;
using TokenId = std::uint32_t;

inline constexpr std::string_view kUnkSymbol = "<unk>";
inline constexpr std::string_view kBosSymbol = "<s>";
inline constexpr std::string_view kEosSymbol = "</s>";

class Vocabulary {
 public:
  static constexpr TokenId kUnk = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;

  Vocabulary();

  TokenId intern(std::string_view symbol);
  std::optional<TokenId> find(std::string_view symbol) const;
  // Unknown symbols map to kUnk.
  TokenId lookup(std::string_view symbol) const;
  const std::string& symbol(TokenId id) const { return symbols_.at(id); }
  std::size_t size() const { return symbols_.size(); }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, TokenId> ids_;
};

// Fixed-capacity n-gram key.
class NGram {
 public:
  NGram() = default;
  explicit NGram(std::span<const TokenId> ids);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  TokenId operator[](std::size_t i) const { return ids_[i]; }
  TokenId back() const { return ids_[size_ - 1]; }
  std::span<const TokenId> ids() const { return {ids_.data(), size_}; }

  NGram context() const;  // all but the last token
  NGram suffix() const;   // all but the first token
  NGram extended(TokenId next) const;

  friend bool operator==(const NGram& a, const NGram& b) {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i) {
      if (a.ids_[i] != b.ids_[i]) return false;
    }
    return true;
  }

 private:
  std::array<TokenId, kMaxOrder> ids_{};
  std::uint8_t size_ = 0;
};

struct NGramHash {
  std::size_t operator()(const NGram& g) const noexcept;
};

using CountMap = std::unordered_map<NGram, std::uint64_t, NGramHash>;

struct CountTrie {
  std::size_t order = 0;
  Vocabulary vocabulary;
  std::vector<CountMap> raw;       // raw[n-1]: occurrences of each n-gram
  std::vector<CountMap> adjusted;  // adjusted[n-1]: Kneser-Ney counts

  std::uint64_t raw_count(std::span<const std::string> ngram) const;
  std::uint64_t adjusted_count(std::span<const std::string> ngram) const;
};

struct Discounts {
  // amount[k] is subtracted from n-grams with (adjusted) count k; k = 3 covers 3+.
  std::array<double, 4> amount{0.0, 0.0, 0.0, 0.0};
  // count_of_counts[k] = number of n-grams with count k, k = 1..4
  std::array<std::uint64_t, 5> count_of_counts{};
  bool fallback = false;

  double operator()(std::uint64_t count) const { return amount[count < 3 ? count : 3]; }
};

inline constexpr double kFallbackDiscount = 0.75;

// Modified Kneser-Ney discounts from count-of-counts:
//   Y = n1 / (n1 + 2 n2),  D_k = k - (k + 1) Y n_{k+1} / n_k
// Falls back to a single discount of 0.75 when n1, n2 or n3 is zero or a
// discount lands outside [0, k].
Discounts estimate_discounts(const std::array<std::uint64_t, 5>& count_of_counts);

class NGramModel {
 public:
  struct Entry {
    double logprob = 0.0;
    double backoff = 0.0;
  };

  NGramModel(Vocabulary vocabulary, std::size_t order);

  std::size_t order() const { return order_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }

  // Construction only; models are treated as immutable once built.
  void set(const NGram& ngram, Entry entry);
  void set_discounts(std::vector<Discounts> discounts) { discounts_ = std::move(discounts); }
  void add_warning(std::string warning) { warnings_.push_back(std::move(warning)); }

  const Entry* find(const NGram& ngram) const;
  const std::unordered_map<NGram, Entry, NGramHash>& table(std::size_t n) const { return tables_.at(n - 1); }
  std::size_t count(std::size_t n) const { return tables_.at(n - 1).size(); }

  // Natural-log conditional probability. Only the last order-1 context
  // tokens are used; unknown ids/symbols are scored as <unk>.
  double logprob(TokenId token, std::span<const TokenId> context) const;
  double logprob(std::string_view token, std::span<const std::string> context) const;

  bool in_vocabulary(std::string_view symbol) const;

  // Empty for models loaded from ARPA.
  const std::vector<Discounts>& discounts() const { return discounts_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Vocabulary vocabulary_;
  std::size_t order_;
  std::vector<std::unordered_map<NGram, Entry, NGramHash>> tables_;
  std::vector<Discounts> discounts_;
  std::vector<std::string> warnings_;
};

// Throws EmptyCorpusError if there are no sentences, ConfigError if the
// order is outside [1, kMaxOrder].
CountTrie count_ngrams(const std::vector<std::vector<std::string>>& token_sentences, std::size_t order);

NGramModel estimate(const CountTrie& counts);

// Sum of P(w | context) over every vocabulary symbol except <s>.
double probability_mass(const NGramModel& model, std::span<const TokenId> context);

// Stored contexts (n-grams with a backoff weight) of length 1..order-1 plus
// the empty context. Useful for sampling normalization checks.
std::vector<NGram> stored_contexts(const NGramModel& model);

// ARPA text format, log10 values.
void export_arpa(const NGramModel& model, std::ostream& out);
void export_arpa(const NGramModel& model, const std::filesystem::path& path);
NGramModel import_arpa(std::istream& in);
NGramModel import_arpa(const std::filesystem::path& path);

}  // namespace segsurp
