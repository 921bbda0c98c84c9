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

#include "segsurp/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "segsurp/error.hpp"
#include "segsurp/text.hpp"

namespace segsurp {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = text::trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string normalize_word(std::string_view word) { return text::ascii_lower(word); }

void FrequencyTable::add(std::string_view normalized_word, std::uint64_t n) {
  if (n == 0) return;
  auto it = counts_.find(normalized_word);
  if (it == counts_.end()) {
    counts_.emplace(std::string(normalized_word), n);
  } else {
    it->second += n;
  }
  total_ += n;
}

std::uint64_t FrequencyTable::count(std::string_view normalized_word) const {
  auto it = counts_.find(normalized_word);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, std::uint64_t>> FrequencyTable::sorted_entries() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::vector<Sentence> parse_training_corpus(std::istream& in, const std::string& source) {
  std::vector<Sentence> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!text::is_valid_utf8(line)) throw DecodeError(source, line_no);
    auto words = text::split_whitespace(line);
    if (words.empty()) continue;
    corpus.push_back({std::to_string(corpus.size() + 1), std::move(words)});
  }
  if (corpus.empty()) throw EmptyCorpusError(source + ": training corpus is empty");
  return corpus;
}

std::vector<Sentence> load_training_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_training_corpus(in, path.string());
}

void write_training_corpus(std::ostream& out, std::span<const Sentence> corpus) {
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.words.size(); ++i) {
      if (i) out << ' ';
      out << s.words[i];
    }
    out << '\n';
  }
}

std::vector<RTRecord> parse_rt_corpus(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SchemaError(source + ": missing header");
  ++line_no;
  strip_cr(line);
  if (!text::is_valid_utf8(line)) throw DecodeError(source, line_no);

  const auto header = text::split(line, '\t');
  auto column = [&](std::string_view name) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return text::trim(h) == name; });
    if (it == header.end()) throw SchemaError(source + ": missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_text = column("text_id");
  const std::size_t c_index = column("word_index");
  const std::size_t c_word = column("word");
  const std::size_t c_rt = column("rt_ms");
  const std::size_t needed = std::max({c_text, c_index, c_word, c_rt}) + 1;

  std::vector<RTRecord> records;
  std::set<std::pair<std::string, std::size_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!text::is_valid_utf8(line)) throw DecodeError(source, line_no);
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, '\t');
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() < needed) throw SchemaError(where + ": expected " + std::to_string(needed) + " columns");

    RTRecord rec;
    rec.text_id = std::string(text::trim(fields[c_text]));
    rec.word = std::string(text::trim(fields[c_word]));
    if (!parse_number(fields[c_index], rec.word_index)) {
      throw ValidationError(where + ": word_index is not a non-negative integer");
    }
    if (!parse_number(fields[c_rt], rec.rt_ms) || !std::isfinite(rec.rt_ms)) {
      throw ValidationError(where + ": rt_ms is not a number");
    }
    if (rec.rt_ms <= 0.0) throw ValidationError(where + ": rt_ms must be positive");
    if (rec.word.empty()) throw ValidationError(where + ": empty word");
    if (!seen.emplace(rec.text_id, rec.word_index).second) {
      throw ValidationError(where + ": duplicate (text_id, word_index) (" + rec.text_id + ", " +
                            std::to_string(rec.word_index) + ")");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<RTRecord> load_rt_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_rt_corpus(in, path.string());
}

void write_rt_corpus(std::ostream& out, std::span<const RTRecord> records) {
  out << "text_id\tword_index\tword\trt_ms\n";
  for (const auto& r : records) {
    out << r.text_id << '\t' << r.word_index << '\t' << r.word << '\t' << text::format_double(r.rt_ms) << '\n';
  }
}

FrequencyTable build_frequency_table(std::span<const Sentence> corpus) {
  if (corpus.empty()) throw EmptyCorpusError("cannot build a frequency table from an empty corpus");
  FrequencyTable table;
  for (const auto& s : corpus) {
    for (const auto& w : s.words) table.add(normalize_word(w));
  }
  return table;
}

void write_frequency_table(std::ostream& out, const FrequencyTable& table) {
  out << "word\tcount\n";
  for (const auto& [word, count] : table.sorted_entries()) out << word << '\t' << count << '\n';
}

FrequencyTable parse_frequency_table(std::istream& in) {
  FrequencyTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line_no == 1 && line == "word\tcount") continue;
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    std::uint64_t n = 0;
    if (fields.size() != 2 || !parse_number(fields[1], n)) {
      throw ParseError("expected 'word<TAB>count'", line_no);
    }
    table.add(fields[0], n);
  }
  return table;
}

}  // namespace segsurp
