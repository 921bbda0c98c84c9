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

// ARPA backoff model files:
//
//   \data\ (header)
//   ngram 1=<count>
//   ...
//
//   \1-grams:
//   <log10 prob> <TAB> <w1> [<TAB> <log10 backoff>]
//   ...
//   \end\ (trailer)
//
// Entries are written sorted by symbol sequence so that output is
// byte-stable for a given model.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "segsurp/error.hpp"
#include "segsurp/ngram_lm.hpp"
#include "segsurp/text.hpp"

namespace segsurp {
namespace {

constexpr double kLn10 = std::numbers::ln10;
constexpr int kDigits = 9;
constexpr double kMinLog10 = -99.0;

std::string log10_string(double natural_log) {
  double v = natural_log / kLn10;
  if (v <= kMinLog10) v = kMinLog10;
  if (v == 0.0) v = 0.0;  // no "-0"
  return text::format_significant(v, kDigits);
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

void export_arpa(const NGramModel& model, std::ostream& out) {
  if (model.count(1) == 0) throw Error("cannot export a model without unigrams; ARPA requires at least one");
  const auto& vocab = model.vocabulary();

  out << "\\data\\\n";
  for (std::size_t n = 1; n <= model.order(); ++n) out << "ngram " << n << '=' << model.count(n) << '\n';

  for (std::size_t n = 1; n <= model.order(); ++n) {
    std::vector<std::pair<std::string, const NGramModel::Entry*>> rows;
    rows.reserve(model.count(n));
    for (const auto& [g, e] : model.table(n)) {
      std::string key;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) key.push_back(' ');
        key += vocab.symbol(g[i]);
      }
      rows.emplace_back(std::move(key), &e);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    out << "\n\\" << n << "-grams:\n";
    for (const auto& [key, e] : rows) {
      out << log10_string(e->logprob) << '\t' << key;
      if (n < model.order()) out << '\t' << log10_string(e->backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void export_arpa(const NGramModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  export_arpa(model, out);
  if (!out) throw Error("write failed: " + path.string());
}

NGramModel import_arpa(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  // Header: skip anything before \data\.
  bool found_data = false;
  while (next_line()) {
    if (text::trim(line) == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) throw ParseError("missing \\data\\ section", line_no);

  std::vector<std::size_t> expected;
  while (next_line()) {
    const auto t = text::trim(line);
    if (t.empty()) {
      if (!expected.empty()) break;
      continue;
    }
    if (!t.starts_with("ngram ")) throw ParseError("malformed ngram count line '" + std::string(t) + "'", line_no);
    const auto eq = t.find('=');
    std::size_t n = 0;
    std::size_t c = 0;
    if (eq == std::string_view::npos) throw ParseError("malformed ngram count line", line_no);
    const auto ns = text::trim(t.substr(6, eq - 6));
    const auto cs = text::trim(t.substr(eq + 1));
    auto r1 = std::from_chars(ns.data(), ns.data() + ns.size(), n);
    auto r2 = std::from_chars(cs.data(), cs.data() + cs.size(), c);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != ns.data() + ns.size() ||
        r2.ptr != cs.data() + cs.size() || n != expected.size() + 1) {
      throw ParseError("malformed ngram count line '" + std::string(t) + "'", line_no);
    }
    expected.push_back(c);
  }
  if (expected.empty()) throw ParseError("no ngram counts in \\data\\ section", line_no);
  if (expected[0] == 0) throw ParseError("ARPA model has no unigrams", line_no);
  const std::size_t order = expected.size();
  if (order > kMaxOrder) throw ParseError("order exceeds the supported maximum", line_no);

  struct Row {
    std::vector<std::string> words;
    double prob = 0.0;
    double backoff = 0.0;
  };
  std::vector<std::vector<Row>> sections(order);

  std::size_t current = 0;
  bool ended = false;
  while (next_line()) {
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t.front() == '\\') {
      if (t == "\\end\\") {
        ended = true;
        break;
      }
      const std::string expected_header = "\\" + std::to_string(current + 1) + "-grams:";
      if (t != expected_header) throw ParseError("malformed section header '" + std::string(t) + "'", line_no);
      ++current;
      continue;
    }
    if (current == 0) throw ParseError("n-gram entry outside of a section", line_no);
    auto fields = text::split_whitespace(t);
    const std::size_t n = current;
    if (fields.size() != n + 1 && fields.size() != n + 2) {
      throw ParseError("expected " + std::to_string(n) + " words in " + std::to_string(n) + "-gram entry", line_no);
    }
    Row row;
    if (!parse_double(fields[0], row.prob)) throw ParseError("bad probability '" + fields[0] + "'", line_no);
    if (fields.size() == n + 2 && !parse_double(fields[n + 1], row.backoff)) {
      throw ParseError("bad backoff '" + fields[n + 1] + "'", line_no);
    }
    row.words.assign(fields.begin() + 1, fields.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    sections[n - 1].push_back(std::move(row));
  }
  if (!ended) throw ParseError("missing \\end\\ marker", line_no);
  for (std::size_t n = 1; n <= order; ++n) {
    if (sections[n - 1].size() != expected[n - 1]) {
      throw ParseError("section " + std::to_string(n) + "-grams has " + std::to_string(sections[n - 1].size()) +
                           " entries, header says " + std::to_string(expected[n - 1]),
                       0);
    }
  }

  Vocabulary vocab;
  for (const auto& row : sections[0]) vocab.intern(row.words[0]);
  NGramModel model(vocab, order);
  for (std::size_t n = 1; n <= order; ++n) {
    for (const auto& row : sections[n - 1]) {
      std::array<TokenId, kMaxOrder> ids{};
      for (std::size_t i = 0; i < n; ++i) {
        auto id = model.vocabulary().find(row.words[i]);
        if (!id) throw ParseError("word '" + row.words[i] + "' is missing from the unigram section", 0);
        ids[i] = *id;
      }
      model.set(NGram(std::span<const TokenId>(ids.data(), n)), {row.prob * kLn10, row.backoff * kLn10});
    }
  }
  const NGram unk(std::span<const TokenId>(&Vocabulary::kUnk, 1));
  if (!model.find(unk)) {
    model.set(unk, {-100.0 * kLn10, 0.0});
    model.add_warning("ARPA file has no <unk> unigram; assigned log10 probability -100");
  }
  return model;
}

NGramModel import_arpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return import_arpa(in);
}

}  // namespace segsurp
