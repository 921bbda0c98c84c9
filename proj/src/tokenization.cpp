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

#include "segsurp/tokenization.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "segsurp/error.hpp"
#include "segsurp/text.hpp"

namespace segsurp {
namespace {

std::string merge_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

// Initial symbol sequence: optional marker followed by the word's characters.
std::vector<std::string> initial_symbols(std::string_view word, const std::string& marker) {
  std::vector<std::string> symbols;
  if (!marker.empty()) symbols.push_back(marker);
  for (auto& c : text::utf8_chars(word)) symbols.push_back(std::move(c));
  return symbols;
}

// Replaces every non-overlapping (left, right) occurrence, scanning left to right.
void merge_pair(std::vector<std::string>& symbols, const std::string& left, const std::string& right) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size();) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      out.push_back(left + right);
      i += 2;
    } else {
      out.push_back(std::move(symbols[i]));
      ++i;
    }
  }
  symbols = std::move(out);
}

TokenizedWord from_symbols(std::string_view word, Scheme scheme, std::vector<std::string> symbols,
                           const std::string& marker) {
  TokenizedWord out{std::string(word), scheme, {}};
  if (!symbols.empty() && !marker.empty() && symbols[0].starts_with(marker)) {
    symbols[0].erase(0, marker.size());
    // A marker that never merged carries no characters of the word.
    if (symbols[0].empty()) symbols.erase(symbols.begin());
  }
  out.tokens.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) out.tokens.push_back({std::move(symbols[i]), i == 0});
  return out;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Orthographic:
      return "orthographic";
    case Scheme::BPE:
      return "bpe";
    case Scheme::Morphological:
      return "morphological";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  const std::string lower = text::ascii_lower(text::trim(name));
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == lower) return s;
  }
  if (lower == "orth") return Scheme::Orthographic;
  if (lower == "morph") return Scheme::Morphological;
  return std::nullopt;
}

std::string TokenizedWord::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

std::string TokenizedWord::concatenated() const {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

// ---------------------------------------------------------------------------
// MergeTable

void MergeTable::append(std::string left, std::string right) {
  auto key = merge_key(left, right);
  if (!ranks_.emplace(std::move(key), merges_.size()).second) {
    throw ValidationError("duplicate merge '" + left + " " + right + "'");
  }
  merges_.emplace_back(std::move(left), std::move(right));
}

std::optional<std::size_t> MergeTable::rank(std::string_view left, std::string_view right) const {
  auto it = ranks_.find(merge_key(left, right));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

MergeTable parse_merge_table(std::istream& in, std::string marker) {
  MergeTable table(std::move(marker));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("#")) continue;
    if (line.empty()) continue;
    if (!text::is_valid_utf8(line)) throw ParseError("invalid UTF-8 in merge file", line_no);
    const auto fields = text::split(line, ' ');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected 'left right' in merge file", line_no);
    }
    try {
      table.append(fields[0], fields[1]);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

MergeTable load_merge_table(const std::filesystem::path& path, std::string marker) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open merge file " + path.string());
  return parse_merge_table(in, std::move(marker));
}

void write_merge_table(std::ostream& out, const MergeTable& merges) {
  out << "#version: 0.2\n";
  for (const auto& [l, r] : merges.merges()) out << l << ' ' << r << '\n';
}

TokenizedWord apply_bpe(std::string_view word, const MergeTable& merges) {
  auto symbols = initial_symbols(word, merges.marker());
  while (symbols.size() > 1) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t best_at = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto r = merges.rank(symbols[i], symbols[i + 1]);
      if (r && *r < best) {
        best = *r;
        best_at = i;
      }
    }
    if (best == std::numeric_limits<std::size_t>::max()) break;
    const std::string left = symbols[best_at];
    const std::string right = symbols[best_at + 1];
    merge_pair(symbols, left, right);
  }
  return from_symbols(word, Scheme::BPE, std::move(symbols), merges.marker());
}

// ---------------------------------------------------------------------------
// BPE learning

namespace {

using Pair = std::pair<std::string, std::string>;

struct BpeState {
  std::vector<std::vector<std::string>> words;
  std::vector<std::uint64_t> freq;
  std::map<Pair, std::uint64_t> pair_freq;
  std::map<Pair, std::set<std::size_t>> pair_words;
  // (-frequency, left, right): begin() is the next merge
  std::set<std::tuple<std::int64_t, std::string, std::string>> queue;

  void adjust(const Pair& p, std::size_t word, std::int64_t delta) {
    auto& f = pair_freq[p];
    if (f > 0) queue.erase({-static_cast<std::int64_t>(f), p.first, p.second});
    f = static_cast<std::uint64_t>(static_cast<std::int64_t>(f) + delta);
    if (f > 0) {
      queue.emplace(-static_cast<std::int64_t>(f), p.first, p.second);
    } else {
      pair_freq.erase(p);
    }
    if (delta > 0) pair_words[p].insert(word);
  }

  void count_word(std::size_t w, std::int64_t sign) {
    const auto& s = words[w];
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      adjust({s[i], s[i + 1]}, w, sign * static_cast<std::int64_t>(freq[w]));
    }
  }
};

}  // namespace

MergeTable train_bpe(std::span<const Sentence> corpus, std::size_t num_merges, std::string marker,
                     std::vector<std::uint64_t>* frequencies) {
  if (corpus.empty()) throw EmptyCorpusError("cannot learn BPE merges from an empty corpus");
  MergeTable table(marker);
  if (frequencies) frequencies->clear();
  if (num_merges == 0) return table;

  std::map<std::string, std::uint64_t> word_counts;
  for (const auto& s : corpus) {
    for (const auto& w : s.words) ++word_counts[w];
  }
  BpeState st;
  for (const auto& [w, c] : word_counts) {
    st.words.push_back(initial_symbols(w, marker));
    st.freq.push_back(c);
  }
  for (std::size_t w = 0; w < st.words.size(); ++w) st.count_word(w, +1);

  while (table.size() < num_merges && !st.queue.empty()) {
    auto [neg_freq, left, right] = *st.queue.begin();
    const Pair best{left, right};
    table.append(left, right);
    if (frequencies) frequencies->push_back(static_cast<std::uint64_t>(-neg_freq));

    const auto affected = st.pair_words[best];
    for (std::size_t w : affected) {
      st.count_word(w, -1);
      merge_pair(st.words[w], left, right);
      st.count_word(w, +1);
    }
    st.pair_words.erase(best);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Morphological lexicon

void SegmentationLexicon::add(std::string word, std::vector<std::string> morphs) {
  if (word.empty()) throw ValidationError("lexicon entry with empty word");
  if (morphs.empty()) throw ValidationError("lexicon entry '" + word + "' has no morphs");
  std::string joined;
  for (const auto& m : morphs) joined += m;
  if (joined.empty()) throw ValidationError("lexicon entry '" + word + "' has only empty morphs");
  Entry e{std::move(morphs), joined == word};
  entries_.insert_or_assign(std::move(word), std::move(e));
}

const SegmentationLexicon::Entry* SegmentationLexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

SegmentationLexicon parse_segmentation_lexicon(std::istream& in) {
  SegmentationLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line.starts_with("#")) continue;
    if (!text::is_valid_utf8(line)) throw ParseError("invalid UTF-8 in lexicon", line_no);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected 'word<TAB>morphs' in lexicon", line_no);
    std::string word(text::trim(std::string_view(line).substr(0, tab)));
    auto morphs = text::split_whitespace(std::string_view(line).substr(tab + 1));
    try {
      if (lex.find(word)) throw ValidationError("duplicate lexicon entry '" + word + "'");
      lex.add(std::move(word), std::move(morphs));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return lex;
}

SegmentationLexicon load_segmentation_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open segmentation lexicon " + path.string());
  return parse_segmentation_lexicon(in);
}

TokenizedWord segment_morph(std::string_view word, const SegmentationLexicon& lexicon) {
  const auto* entry = lexicon.find(word);
  if (!entry) entry = lexicon.find(text::ascii_lower(word));
  TokenizedWord out{std::string(word), Scheme::Morphological, {}};
  if (!entry) {
    out.tokens.push_back({std::string(word), true});
    return out;
  }
  for (std::size_t i = 0; i < entry->morphs.size(); ++i) out.tokens.push_back({entry->morphs[i], i == 0});
  return out;
}

TokenizedWord tokenize_orthographic(std::string_view word) {
  return TokenizedWord{std::string(word), Scheme::Orthographic, {{normalize_word(word), true}}};
}

// ---------------------------------------------------------------------------
// Tokenizer

Tokenizer::Tokenizer(Scheme scheme, TokenizerResources resources) : scheme_(scheme), resources_(std::move(resources)) {
  if (scheme_ == Scheme::BPE && !resources_.merges) {
    throw ConfigError("the bpe scheme needs a merge table");
  }
  if (scheme_ == Scheme::Morphological && !resources_.lexicon) {
    throw ConfigError("the morphological scheme needs a segmentation lexicon");
  }
}

TokenizedWord Tokenizer::tokenize(std::string_view word) const {
  switch (scheme_) {
    case Scheme::Orthographic:
      return tokenize_orthographic(word);
    case Scheme::BPE:
      return apply_bpe(word, *resources_.merges);
    case Scheme::Morphological:
      return segment_morph(word, *resources_.lexicon);
  }
  throw ConfigError("unknown scheme");
}

const std::string& Tokenizer::marker() const {
  static const std::string kNone;
  switch (scheme_) {
    case Scheme::Orthographic:
      return kNone;
    case Scheme::BPE:
      return resources_.merges->marker();
    case Scheme::Morphological:
      return resources_.marker;
  }
  return kNone;
}

std::vector<std::string> Tokenizer::symbols(const TokenizedWord& word) const {
  const std::string& m = marker();
  std::vector<std::string> out;
  out.reserve(word.tokens.size());
  for (const auto& t : word.tokens) out.push_back(t.word_initial ? m + t.text : t.text);
  return out;
}

std::vector<TokenStream> tokenize_corpus(std::span<const Sentence> corpus, Scheme scheme,
                                         const TokenizerResources& resources) {
  const Tokenizer tokenizer(scheme, resources);
  std::unordered_map<std::string, TokenizedWord> cache;
  std::vector<TokenStream> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    TokenStream stream;
    for (const auto& w : s.words) {
      auto it = cache.find(w);
      if (it == cache.end()) it = cache.emplace(w, tokenizer.tokenize(w)).first;
      stream.insert(stream.end(), it->second.tokens.begin(), it->second.tokens.end());
    }
    out.push_back(std::move(stream));
  }
  return out;
}

std::vector<std::vector<std::string>> symbol_streams(std::span<const Sentence> corpus, const Tokenizer& tokenizer) {
  std::unordered_map<std::string, std::vector<std::string>> cache;
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    std::vector<std::string> stream;
    for (const auto& w : s.words) {
      auto it = cache.find(w);
      if (it == cache.end()) it = cache.emplace(w, tokenizer.symbols(tokenizer.tokenize(w))).first;
      stream.insert(stream.end(), it->second.begin(), it->second.end());
    }
    out.push_back(std::move(stream));
  }
  return out;
}

void write_token_streams(std::ostream& out, const std::vector<std::vector<std::string>>& streams) {
  for (const auto& s : streams) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << s[i];
    }
    out << '\n';
  }
}

}  // namespace segsurp
