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

#include "segsurp/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "segsurp/error.hpp"

namespace segsurp {

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  intern(kUnkSymbol);
  intern(kBosSymbol);
  intern(kEosSymbol);
}

TokenId Vocabulary::intern(std::string_view symbol) {
  auto it = ids_.find(std::string(symbol));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(symbols_.size());
  symbols_.emplace_back(symbol);
  ids_.emplace(symbols_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::lookup(std::string_view symbol) const { return find(symbol).value_or(kUnk); }

// ---------------------------------------------------------------------------
// NGram

NGram::NGram(std::span<const TokenId> ids) {
  if (ids.size() > kMaxOrder) throw ConfigError("n-gram longer than the maximum order");
  std::copy(ids.begin(), ids.end(), ids_.begin());
  size_ = static_cast<std::uint8_t>(ids.size());
}

NGram NGram::context() const {
  NGram g = *this;
  if (g.size_) --g.size_;
  g.ids_[g.size_] = 0;
  return g;
}

NGram NGram::suffix() const {
  NGram g;
  if (size_ == 0) return g;
  std::copy(ids_.begin() + 1, ids_.begin() + size_, g.ids_.begin());
  g.size_ = static_cast<std::uint8_t>(size_ - 1);
  return g;
}

NGram NGram::extended(TokenId next) const {
  if (size_ >= kMaxOrder) throw ConfigError("n-gram longer than the maximum order");
  NGram g = *this;
  g.ids_[g.size_++] = next;
  return g;
}

std::size_t NGramHash::operator()(const NGram& g) const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ g.size();
  for (TokenId id : g.ids()) {
    h ^= id + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

// ---------------------------------------------------------------------------
// Counting

namespace {

std::optional<NGram> to_ngram(const Vocabulary& vocab, std::span<const std::string> symbols) {
  if (symbols.empty() || symbols.size() > kMaxOrder) return std::nullopt;
  std::array<TokenId, kMaxOrder> ids{};
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    auto id = vocab.find(symbols[i]);
    if (!id) return std::nullopt;
    ids[i] = *id;
  }
  return NGram(std::span<const TokenId>(ids.data(), symbols.size()));
}

std::uint64_t lookup_count(const std::vector<CountMap>& maps, const Vocabulary& vocab,
                           std::span<const std::string> symbols) {
  auto g = to_ngram(vocab, symbols);
  if (!g || g->size() > maps.size()) return 0;
  const auto& m = maps[g->size() - 1];
  auto it = m.find(*g);
  return it == m.end() ? 0 : it->second;
}

}  // namespace

std::uint64_t CountTrie::raw_count(std::span<const std::string> ngram) const {
  return lookup_count(raw, vocabulary, ngram);
}

std::uint64_t CountTrie::adjusted_count(std::span<const std::string> ngram) const {
  return lookup_count(adjusted, vocabulary, ngram);
}

CountTrie count_ngrams(const std::vector<std::vector<std::string>>& token_sentences, std::size_t order) {
  if (order < 1 || order > kMaxOrder) {
    throw ConfigError("n-gram order must be in [1, " + std::to_string(kMaxOrder) + "]");
  }
  if (token_sentences.empty()) throw EmptyCorpusError("cannot count n-grams of an empty corpus");

  CountTrie trie;
  trie.order = order;
  trie.raw.resize(order);
  trie.adjusted.resize(order);

  std::vector<TokenId> ids;
  for (const auto& sentence : token_sentences) {
    ids.clear();
    ids.push_back(Vocabulary::kBos);
    for (const auto& tok : sentence) ids.push_back(trie.vocabulary.intern(tok));
    ids.push_back(Vocabulary::kEos);
    for (std::size_t end = 1; end < ids.size(); ++end) {
      for (std::size_t n = 1; n <= order && n <= end + 1; ++n) {
        const std::size_t begin = end + 1 - n;
        ++trie.raw[n - 1][NGram(std::span<const TokenId>(ids.data() + begin, n))];
        if (ids[begin] == Vocabulary::kBos) break;  // nothing precedes <s>
      }
    }
  }

  trie.adjusted[order - 1] = trie.raw[order - 1];
  for (std::size_t n = order - 1; n >= 1; --n) {
    CountMap& adj = trie.adjusted[n - 1];
    for (const auto& [g, c] : trie.raw[n]) ++adj[g.suffix()];
    for (const auto& [g, c] : trie.raw[n - 1]) {
      if (g[0] == Vocabulary::kBos) adj[g] = c;
    }
  }
  return trie;
}

// ---------------------------------------------------------------------------
// Estimation

Discounts estimate_discounts(const std::array<std::uint64_t, 5>& n) {
  Discounts d;
  d.count_of_counts = n;
  auto fallback = [&] {
    d.amount = {0.0, kFallbackDiscount, kFallbackDiscount, kFallbackDiscount};
    d.fallback = true;
    return d;
  };
  if (n[1] == 0 || n[2] == 0 || n[3] == 0) return fallback();
  const double y = static_cast<double>(n[1]) / (static_cast<double>(n[1]) + 2.0 * static_cast<double>(n[2]));
  for (std::size_t k = 1; k <= 3; ++k) {
    const double dk = static_cast<double>(k) - static_cast<double>(k + 1) * y * static_cast<double>(n[k + 1]) /
                                                   static_cast<double>(n[k]);
    if (dk < 0.0 || dk > static_cast<double>(k)) return fallback();
    d.amount[k] = dk;
  }
  return d;
}

NGramModel estimate(const CountTrie& counts) {
  const std::size_t order = counts.order;
  if (order == 0 || counts.adjusted.size() != order || counts.adjusted[0].empty()) {
    throw EmptyCorpusError("cannot estimate a model from empty counts");
  }
  NGramModel model(counts.vocabulary, order);

  std::vector<Discounts> discounts;
  for (std::size_t n = 1; n <= order; ++n) {
    std::array<std::uint64_t, 5> coc{};
    for (const auto& [g, c] : counts.adjusted[n - 1]) {
      if (c >= 1 && c <= 4) ++coc[c];
    }
    discounts.push_back(estimate_discounts(coc));
    if (discounts.back().fallback) {
      const std::string msg = "order " + std::to_string(n) +
                              ": degenerate count-of-counts, using fixed discount 0.75";
      std::cerr << "warning: " << msg << '\n';
      model.add_warning(msg);
    }
  }

  // Vocabulary size for the uniform base distribution: everything but <s>.
  const double uniform = 1.0 / static_cast<double>(counts.vocabulary.size() - 1);

  // Interpolated probabilities of the previous order, needed for lower-order terms.
  std::unordered_map<NGram, double, NGramHash> lower;
  std::unordered_map<NGram, double, NGramHash> current;
  std::unordered_map<NGram, double, NGramHash> gamma_prev;  // gamma of contexts of length n-1

  for (std::size_t n = 1; n <= order; ++n) {
    const auto& adj = counts.adjusted[n - 1];
    const Discounts& d = discounts[n - 1];

    struct ContextSums {
      double denominator = 0.0;
      double discounted = 0.0;
    };
    std::unordered_map<NGram, ContextSums, NGramHash> sums;
    for (const auto& [g, c] : adj) {
      auto& s = sums[g.context()];
      s.denominator += static_cast<double>(c);
      s.discounted += d(c);
    }

    // gamma(h) doubles as the backoff weight of n-gram h at order n-1.
    std::unordered_map<NGram, double, NGramHash> gamma;
    for (const auto& [h, s] : sums) gamma[h] = s.discounted / s.denominator;

    if (n > 1) {
      for (const auto& [h, gm] : gamma) {
        const auto* e = model.find(h);
        if (e) model.set(h, {e->logprob, std::log(gm)});
      }
    }

    current.clear();
    for (const auto& [g, c] : adj) {
      const NGram h = g.context();
      const double lower_p = n == 1 ? uniform : lower.at(g.suffix());
      const double p = (static_cast<double>(c) - d(c)) / sums.at(h).denominator + gamma.at(h) * lower_p;
      current[g] = p;
      model.set(g, {std::log(p), 0.0});
    }
    if (n == 1) {
      // <unk> never occurs in training text but receives interpolation mass.
      const NGram unk(std::span<const TokenId>(&Vocabulary::kUnk, 1));
      if (!current.contains(unk)) {
        const double p = gamma.at(NGram()) * uniform;
        current[unk] = p;
        model.set(unk, {std::log(p), 0.0});
      }
      // <s> is never predicted; it is stored so that its backoff exists.
      const NGram bos(std::span<const TokenId>(&Vocabulary::kBos, 1));
      model.set(bos, {-99.0 * std::log(10.0), 0.0});
    }
    lower.swap(current);
  }
  model.set_discounts(std::move(discounts));
  return model;
}

// ---------------------------------------------------------------------------
// NGramModel

NGramModel::NGramModel(Vocabulary vocabulary, std::size_t order)
    : vocabulary_(std::move(vocabulary)), order_(order), tables_(order) {
  if (order < 1 || order > kMaxOrder) throw ConfigError("n-gram order out of range");
}

void NGramModel::set(const NGram& ngram, Entry entry) {
  if (ngram.empty() || ngram.size() > order_) throw ConfigError("n-gram length does not fit the model order");
  tables_[ngram.size() - 1][ngram] = entry;
}

const NGramModel::Entry* NGramModel::find(const NGram& ngram) const {
  if (ngram.empty() || ngram.size() > order_) return nullptr;
  const auto& t = tables_[ngram.size() - 1];
  auto it = t.find(ngram);
  return it == t.end() ? nullptr : &it->second;
}

double NGramModel::logprob(TokenId token, std::span<const TokenId> context) const {
  if (token >= vocabulary_.size()) token = Vocabulary::kUnk;
  if (context.size() > order_ - 1) context = context.subspan(context.size() - (order_ - 1));

  std::array<TokenId, kMaxOrder> ids{};
  for (std::size_t i = 0; i < context.size(); ++i) {
    ids[i] = context[i] < vocabulary_.size() ? context[i] : Vocabulary::kUnk;
  }
  ids[context.size()] = token;

  double backoff = 0.0;
  for (std::size_t start = 0; start <= context.size(); ++start) {
    const NGram full(std::span<const TokenId>(ids.data() + start, context.size() - start + 1));
    if (const auto* e = find(full)) return backoff + e->logprob;
    if (start < context.size()) {
      const NGram ctx(std::span<const TokenId>(ids.data() + start, context.size() - start));
      if (const auto* c = find(ctx)) backoff += c->backoff;
    }
  }
  // Symbol in the vocabulary without a unigram entry (possible for hand-written ARPA files).
  const NGram unk(std::span<const TokenId>(&Vocabulary::kUnk, 1));
  if (const auto* e = find(unk)) return backoff + e->logprob;
  throw Error("model has no <unk> unigram");
}

double NGramModel::logprob(std::string_view token, std::span<const std::string> context) const {
  std::vector<TokenId> ids;
  ids.reserve(context.size());
  for (const auto& c : context) ids.push_back(vocabulary_.lookup(c));
  return logprob(vocabulary_.lookup(token), ids);
}

bool NGramModel::in_vocabulary(std::string_view symbol) const {
  auto id = vocabulary_.find(symbol);
  return id && *id != Vocabulary::kUnk && *id != Vocabulary::kBos;
}

double probability_mass(const NGramModel& model, std::span<const TokenId> context) {
  double total = 0.0;
  for (TokenId w = 0; w < model.vocabulary().size(); ++w) {
    if (w == Vocabulary::kBos) continue;
    total += std::exp(model.logprob(w, context));
  }
  return total;
}

std::vector<NGram> stored_contexts(const NGramModel& model) {
  std::vector<NGram> out{NGram()};
  for (std::size_t n = 1; n < model.order(); ++n) {
    for (const auto& [g, e] : model.table(n)) {
      if (e.backoff != 0.0) out.push_back(g);
    }
  }
  return out;
}

}  // namespace segsurp
