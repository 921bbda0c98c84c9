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

// Subword segmentation of orthographic words.
//
// Three schemes are supported:
//   Orthographic   the (lowercased) word itself, one token per word
//   BPE            greedy application of an ordered merge table
//   Morphological  lookup in a word -> morph list lexicon produced offline
//                  by a morphological segmenter
//
// Every token records whether it starts a word. When token streams are
// written out or fed to a language model, word-initial tokens of the
// subword schemes carry a marker prefix (GPT-2's "Ġ" by default) so that a
// word-initial "s" and a suffix "s" are different symbols.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "segsurp/corpus_io.hpp"

namespace segsurp {

enum class Scheme { Orthographic, BPE, Morphological };

inline constexpr Scheme kAllSchemes[] = {Scheme::Orthographic, Scheme::BPE, Scheme::Morphological};

// "orthographic", "bpe", "morphological"
std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

// "Ġ" (U+0120), the byte-level encoding of a leading space in GPT-2 merges.
inline constexpr std::string_view kDefaultMarker = "\xC4\xA0";

struct Token {
  std::string text;  // without marker
  bool word_initial = false;

  friend bool operator==(const Token&, const Token&) = default;
};

struct TokenizedWord {
  std::string word;
  Scheme scheme = Scheme::Orthographic;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  // Token texts joined with single spaces, e.g. "releg ates".
  std::string joined() const;
  // Concatenation of token texts.
  std::string concatenated() const;
};

class MergeTable {
 public:
  explicit MergeTable(std::string marker = std::string(kDefaultMarker)) : marker_(std::move(marker)) {}

  // Throws ValidationError on a duplicate pair.
  void append(std::string left, std::string right);

  // Priority of (left, right): lower is applied first.
  std::optional<std::size_t> rank(std::string_view left, std::string_view right) const;

  std::size_t size() const { return merges_.size(); }
  bool empty() const { return merges_.empty(); }
  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
  // Empty string disables word-initial marking.
  const std::string& marker() const { return marker_; }

 private:
  std::vector<std::pair<std::string, std::string>> merges_;
  std::unordered_map<std::string, std::size_t> ranks_;
  std::string marker_;
};

MergeTable parse_merge_table(std::istream& in, std::string marker = std::string(kDefaultMarker));
MergeTable load_merge_table(const std::filesystem::path& path, std::string marker = std::string(kDefaultMarker));
void write_merge_table(std::ostream& out, const MergeTable& merges);

TokenizedWord apply_bpe(std::string_view word, const MergeTable& merges);

// Frequency-greedy BPE learning over the words of `corpus` (no case
// folding). Ties go to the lexicographically smallest (left, right).
// If `frequencies` is given it receives the pair frequency of each learned
// merge at the time it was chosen.
MergeTable train_bpe(std::span<const Sentence> corpus, std::size_t num_merges,
                     std::string marker = std::string(kDefaultMarker),
                     std::vector<std::uint64_t>* frequencies = nullptr);

class SegmentationLexicon {
 public:
  struct Entry {
    std::vector<std::string> morphs;
    // Morph concatenation equals the surface word. False for canonicalized
    // output such as "commune ity" for "community".
    bool surface_concatenative = false;
  };

  void add(std::string word, std::vector<std::string> morphs);
  const Entry* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

// TSV: word <TAB> morph1 morph2 ...
SegmentationLexicon parse_segmentation_lexicon(std::istream& in);
SegmentationLexicon load_segmentation_lexicon(const std::filesystem::path& path);

// Lexicon lookup (exact form, then lowercased); unknown words become a single morph.
TokenizedWord segment_morph(std::string_view word, const SegmentationLexicon& lexicon);

TokenizedWord tokenize_orthographic(std::string_view word);

struct TokenizerResources {
  const MergeTable* merges = nullptr;
  const SegmentationLexicon* lexicon = nullptr;
  // Marker for morphological token symbols; BPE symbols use the merge table's.
  std::string marker = std::string(kDefaultMarker);
};

// Binds a scheme to its resources. Throws ConfigError if a resource the
// scheme needs is missing.
class Tokenizer {
 public:
  Tokenizer(Scheme scheme, TokenizerResources resources);

  Scheme scheme() const { return scheme_; }
  TokenizedWord tokenize(std::string_view word) const;

  // Language-model vocabulary symbols for a tokenized word.
  std::vector<std::string> symbols(const TokenizedWord& word) const;
  const std::string& marker() const;

 private:
  Scheme scheme_;
  TokenizerResources resources_;
};

using TokenStream = std::vector<Token>;

std::vector<TokenStream> tokenize_corpus(std::span<const Sentence> corpus, Scheme scheme,
                                         const TokenizerResources& resources);

// Symbol sequences for LM training, one per sentence.
std::vector<std::vector<std::string>> symbol_streams(std::span<const Sentence> corpus, const Tokenizer& tokenizer);

// One sentence per line, symbols separated by spaces.
void write_token_streams(std::ostream& out, const std::vector<std::vector<std::string>>& streams);

}  // namespace segsurp
