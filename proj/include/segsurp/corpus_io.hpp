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

// Training corpora, reading-time corpora and unigram frequency tables.
//
// Training corpus: UTF-8, one sentence per line, whitespace-delimited words.
// Blank lines are skipped.
//
// Reading-time corpus: UTF-8 TSV with header
//   text_id <TAB> word_index <TAB> word <TAB> rt_ms
// Columns are located by name, so extra columns are ignored.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace segsurp {

struct Sentence {
  std::string text_id;  // 1-based ordinal of the sentence within its file
  std::vector<std::string> words;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct RTRecord {
  std::string text_id;
  std::size_t word_index = 0;
  std::string word;
  double rt_ms = 0.0;

  friend bool operator==(const RTRecord&, const RTRecord&) = default;
};

// Canonical word form for frequency counting and orthographic LM training.
std::string normalize_word(std::string_view word);

class FrequencyTable {
 public:
  void add(std::string_view normalized_word, std::uint64_t n = 1);

  // 0 for unseen words.
  std::uint64_t count(std::string_view normalized_word) const;
  std::uint64_t total() const { return total_; }
  std::size_t size() const { return counts_.size(); }
  const std::map<std::string, std::uint64_t, std::less<>>& counts() const { return counts_; }

  // Descending count, then lexicographic.
  std::vector<std::pair<std::string, std::uint64_t>> sorted_entries() const;

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::map<std::string, std::uint64_t, std::less<>> counts_;
  std::uint64_t total_ = 0;
};

std::vector<Sentence> parse_training_corpus(std::istream& in, const std::string& source = "<stream>");
std::vector<Sentence> load_training_corpus(const std::filesystem::path& path);
void write_training_corpus(std::ostream& out, std::span<const Sentence> corpus);

std::vector<RTRecord> parse_rt_corpus(std::istream& in, const std::string& source = "<stream>");
std::vector<RTRecord> load_rt_corpus(const std::filesystem::path& path);
void write_rt_corpus(std::ostream& out, std::span<const RTRecord> records);

FrequencyTable build_frequency_table(std::span<const Sentence> corpus);
void write_frequency_table(std::ostream& out, const FrequencyTable& table);
FrequencyTable parse_frequency_table(std::istream& in);

}  // namespace segsurp
