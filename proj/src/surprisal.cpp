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

#include "segsurp/surprisal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "segsurp/error.hpp"
#include "segsurp/text.hpp"

namespace segsurp {

std::string_view exclusion_name(Exclusion e) {
  switch (e) {
    case Exclusion::Kept:
      return "kept";
    case Exclusion::AdjacentPunctuation:
      return "adjacent-punctuation";
    case Exclusion::NonAlphabetic:
      return "non-alphabetic";
    case Exclusion::OutOfVocabulary:
      return "oov";
  }
  return "unknown";
}

void TokenHistory::reset() {
  ids_.clear();
  ids_.push_back(Vocabulary::kBos);
}

WordSurprisal word_surprisal(const NGramModel& model, const Tokenizer& tokenizer, const TokenizedWord& word,
                             TokenHistory& history) {
  WordSurprisal out;
  out.scheme = tokenizer.scheme();
  out.tokenized = word;
  const auto symbols = tokenizer.symbols(word);
  out.token_bits.reserve(symbols.size());
  for (const auto& sym : symbols) {
    const auto id = model.vocabulary().find(sym);
    if (!model.in_vocabulary(sym)) out.oov = true;
    const TokenId tok = id.value_or(Vocabulary::kUnk);
    const double bits = -model.logprob(tok, history.ids()) / std::numbers::ln2;
    out.token_bits.push_back(bits);
    out.surprisal_bits += bits;
    history.push(tok);
  }
  return out;
}

std::vector<std::vector<std::size_t>> texts_in_order(std::span<const RTRecord> records) {
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<std::size_t>> texts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = slot.emplace(records[i].text_id, texts.size());
    if (inserted) texts.emplace_back();
    texts[it->second].push_back(i);
  }
  for (auto& t : texts) {
    std::stable_sort(t.begin(), t.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].word_index < records[b].word_index; });
  }
  return texts;
}

std::vector<WordSurprisal> compute_surprisals(std::span<const RTRecord> records, const Tokenizer& tokenizer,
                                              const NGramModel& model, const FrequencyTable& frequencies) {
  std::vector<WordSurprisal> out(records.size());
  for (const auto& text : texts_in_order(records)) {
    TokenHistory history;
    for (std::size_t i : text) {
      const auto& rec = records[i];
      const std::string form = text::strip_punctuation(rec.word);
      WordSurprisal ws;
      if (form.empty()) {
        ws.scheme = tokenizer.scheme();
        ws.tokenized = TokenizedWord{rec.word, tokenizer.scheme(), {}};
      } else {
        ws = word_surprisal(model, tokenizer, tokenizer.tokenize(form), history);
        if (frequencies.count(normalize_word(form)) == 0) ws.oov = true;
      }
      ws.record = i;
      out[i] = std::move(ws);
      if (text::ends_sentence(rec.word)) history.reset();
    }
  }
  return out;
}

std::vector<Exclusion> apply_exclusions(std::span<const RTRecord> records, const std::vector<bool>& oov) {
  if (oov.size() != records.size()) throw ValidationError("OOV flags do not match the record count");
  std::vector<Exclusion> out(records.size(), Exclusion::Kept);
  for (const auto& text : texts_in_order(records)) {
    for (std::size_t k = 0; k < text.size(); ++k) {
      const std::size_t i = text[k];
      if (!text::is_alphabetic(records[i].word)) {
        out[i] = Exclusion::NonAlphabetic;
      } else if ((k > 0 && !text::is_alphabetic(records[text[k - 1]].word)) ||
                 (k + 1 < text.size() && !text::is_alphabetic(records[text[k + 1]].word))) {
        out[i] = Exclusion::AdjacentPunctuation;
      } else if (oov[i]) {
        out[i] = Exclusion::OutOfVocabulary;
      }
    }
  }
  return out;
}

void apply_exclusions(std::span<const RTRecord> records, std::vector<WordSurprisal>& surprisals) {
  std::vector<bool> oov(surprisals.size());
  for (std::size_t i = 0; i < surprisals.size(); ++i) oov[i] = surprisals[i].oov;
  const auto flags = apply_exclusions(records, oov);
  for (std::size_t i = 0; i < surprisals.size(); ++i) surprisals[i].exclusion = flags[i];
}

void align_exclusions(std::span<std::vector<WordSurprisal>* const> schemes) {
  if (schemes.empty()) return;
  const std::size_t n = schemes.front()->size();
  for (const auto* s : schemes) {
    if (s->size() != n) throw ValidationError("schemes cover different numbers of words");
  }
  for (std::size_t i = 0; i < n; ++i) {
    Exclusion reason = Exclusion::Kept;
    for (const auto* s : schemes) {
      if (!(*s)[i].kept()) {
        reason = (*s)[i].exclusion;
        break;
      }
    }
    if (reason == Exclusion::Kept) continue;
    for (auto* s : schemes) {
      if ((*s)[i].kept()) (*s)[i].exclusion = Exclusion::OutOfVocabulary;
    }
  }
}

std::string Predictor::name() const {
  switch (feature) {
    case Feature::Surprisal:
      return "s" + std::to_string(lag);
    case Feature::Length:
      return "len" + std::to_string(lag);
    case Feature::LogFrequency:
      return "f" + std::to_string(lag);
  }
  return "?";
}

double Predictor::value(const FeatureRow& row) const {
  switch (feature) {
    case Feature::Surprisal:
      return row.surprisal.at(lag);
    case Feature::Length:
      return row.length.at(lag);
    case Feature::LogFrequency:
      return row.log_freq.at(lag);
  }
  return 0.0;
}

std::vector<Predictor> control_predictors(std::size_t spillover) {
  std::vector<Predictor> out;
  for (std::size_t k = 0; k <= spillover; ++k) {
    out.push_back({Feature::Length, k});
    out.push_back({Feature::LogFrequency, k});
  }
  return out;
}

std::vector<Predictor> surprisal_predictors(std::size_t spillover) {
  auto out = control_predictors(spillover);
  for (std::size_t k = 0; k <= spillover; ++k) out.push_back({Feature::Surprisal, k});
  return out;
}

std::vector<FeatureRow> build_feature_rows(std::span<const RTRecord> records,
                                           std::span<const WordSurprisal> surprisals,
                                           const FrequencyTable& frequencies, int spillover) {
  if (spillover < 0) throw ConfigError("spillover must be non-negative");
  if (surprisals.size() != records.size()) throw ValidationError("surprisals do not match the record count");
  const auto lags = static_cast<std::size_t>(spillover);

  std::vector<FeatureRow> rows;
  for (const auto& text : texts_in_order(records)) {
    for (std::size_t k = lags; k < text.size(); ++k) {
      bool eligible = true;
      for (std::size_t lag = 0; lag <= lags && eligible; ++lag) eligible = surprisals[text[k - lag]].kept();
      if (!eligible) continue;

      const auto& rec = records[text[k]];
      FeatureRow row;
      row.text_id = rec.text_id;
      row.word_index = rec.word_index;
      row.rt_ms = rec.rt_ms;
      row.token_count = surprisals[text[k]].token_count();
      for (std::size_t lag = 0; lag <= lags; ++lag) {
        const std::size_t i = text[k - lag];
        const std::string form = text::strip_punctuation(records[i].word);
        const auto count = frequencies.count(normalize_word(form));
        if (count == 0) throw ValidationError("kept word '" + records[i].word + "' has zero training frequency");
        row.surprisal.push_back(surprisals[i].surprisal_bits);
        row.length.push_back(static_cast<double>(text::utf8_length(form)));
        row.log_freq.push_back(std::log(static_cast<double>(count)));
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_feature_rows(std::ostream& out, std::span<const FeatureRow> rows) {
  const std::size_t lags = rows.empty() ? 0 : rows.front().lags();
  out << "text_id\tword_index\trt_ms\tfold";
  for (std::size_t k = 0; k < lags; ++k) out << "\ts" << k << "\tlen" << k << "\tf" << k;
  out << '\n';
  for (const auto& r : rows) {
    out << r.text_id << '\t' << r.word_index << '\t' << text::format_double(r.rt_ms) << '\t' << r.fold;
    for (std::size_t k = 0; k < lags; ++k) {
      out << '\t' << text::format_double(r.surprisal[k]) << '\t' << text::format_double(r.length[k]) << '\t'
          << text::format_double(r.log_freq[k]);
    }
    out << '\n';
  }
}

}  // namespace segsurp
