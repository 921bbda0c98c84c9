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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace segsurp::text {

bool is_valid_utf8(std::string_view s);

// Splits a valid UTF-8 string into one substring per Unicode scalar value.
std::vector<std::string> utf8_chars(std::string_view s);

// Number of Unicode scalar values.
std::size_t utf8_length(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string_view trim(std::string_view s);

std::string ascii_lower(std::string_view s);

// True iff s is non-empty and every byte is in [a-zA-Z].
bool is_alphabetic(std::string_view s);

// Drops leading and trailing characters outside [a-zA-Z0-9]. Used to get
// the form of a reading-time word ("end." -> "end") that is fed to a
// tokenizer; exclusion decisions are made on the unstripped word.
std::string strip_punctuation(std::string_view s);

bool ends_sentence(std::string_view word);

// Shortest decimal representation that round-trips.
std::string format_double(double v);

// Fixed number of significant digits, used where byte-stable output matters.
std::string format_significant(double v, int digits);

}  // namespace segsurp::text
