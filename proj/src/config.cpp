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

#include "segsurp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "segsurp/error.hpp"
#include "segsurp/hash.hpp"
#include "segsurp/ngram_lm.hpp"
#include "segsurp/text.hpp"

namespace segsurp {
namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value, std::size_t line) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("line " + std::to_string(line) + ": " + std::string(key) + " expects an integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

bool parse_flag(std::string_view key, std::string_view value, std::size_t line) {
  const auto v = text::ascii_lower(value);
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("line " + std::to_string(line) + ": " + std::string(key) + " expects on/off, got '" +
                    std::string(value) + "'");
}

std::string valid_scheme_names() {
  std::string s;
  for (Scheme sc : kAllSchemes) {
    if (!s.empty()) s += ", ";
    s += scheme_name(sc);
  }
  return s;
}

void require_file(const std::filesystem::path& p, std::string_view what) {
  if (p.empty()) throw ConfigError(std::string(what) + " is not set");
  if (!std::filesystem::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

}  // namespace

bool RunConfig::has_scheme(Scheme s) const { return std::find(schemes.begin(), schemes.end(), s) != schemes.end(); }

std::vector<Scheme> parse_scheme_list(std::string_view list) {
  std::vector<Scheme> out;
  for (const auto& part : text::split(list, ',')) {
    const auto name = text::trim(part);
    if (name.empty()) continue;
    auto s = parse_scheme(name);
    if (!s) throw ConfigError("unknown scheme '" + std::string(name) + "'; valid schemes: " + valid_scheme_names());
    if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  }
  if (out.empty()) throw ConfigError("empty scheme list; valid schemes: " + valid_scheme_names());
  return out;
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::stringstream whole;
  whole << in.rdbuf();
  const std::string content = whole.str();

  RunConfig cfg;
  cfg.sha256 = sha256_hex(content);
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_absolute() ? p : (base_dir / p).lexically_normal();
  };

  std::map<std::string, std::filesystem::path> corpora;
  std::map<std::string, int> spillover;
  std::set<std::string> seen;
  std::istringstream lines(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = text::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key{text::trim(t.substr(0, eq))};
    const std::string_view value = text::trim(t.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);

    if (key == "train_corpus") {
      cfg.train_corpus = resolve(value);
    } else if (key == "merge_file") {
      cfg.merge_file = resolve(value);
    } else if (key == "bpe_merges") {
      cfg.bpe_merges = parse_number<std::size_t>(key, value, line_no);
    } else if (key == "lexicon") {
      cfg.lexicon = resolve(value);
    } else if (key == "stopwords") {
      cfg.stopwords = resolve(value);
    } else if (key == "order") {
      cfg.order = parse_number<std::size_t>(key, value, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value, line_no);
    } else if (key == "folds") {
      cfg.folds = parse_number<std::size_t>(key, value, line_no);
    } else if (key == "schemes") {
      cfg.schemes = parse_scheme_list(value);
    } else if (key == "alignment") {
      cfg.alignment = parse_flag(key, value, line_no);
    } else if (key == "item_diff") {
      const auto pair = parse_scheme_list(value);
      if (pair.size() != 2) throw ConfigError("item_diff needs exactly two distinct schemes");
      cfg.item_diff = std::make_pair(pair[0], pair[1]);
    } else if (key == "out") {
      cfg.out_dir = resolve(value);
    } else if (key.starts_with("rt_corpus.") && key.size() > 10) {
      corpora[key.substr(10)] = resolve(value);
    } else if (key.starts_with("spillover.") && key.size() > 10) {
      spillover[key.substr(10)] = parse_number<int>(key, value, line_no);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  for (const auto& [name, path] : corpora) {
    auto it = spillover.find(name);
    if (it == spillover.end()) throw ConfigError("rt_corpus." + name + " has no spillover." + name);
    cfg.rt_corpora.push_back({name, path, it->second});
    spillover.erase(it);
  }
  if (!spillover.empty()) throw ConfigError("spillover." + spillover.begin()->first + " has no rt_corpus");

  if (!cfg.item_diff && cfg.has_scheme(Scheme::Morphological) && cfg.has_scheme(Scheme::BPE)) {
    cfg.item_diff = std::make_pair(Scheme::Morphological, Scheme::BPE);
  }
  if (cfg.out_dir.empty()) cfg.out_dir = (base_dir / "runs").lexically_normal();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, std::filesystem::absolute(path).parent_path());
}

void validate_config(const RunConfig& cfg, Stage stage) {
  if (cfg.order < 2 || cfg.order > kMaxOrder) {
    throw ConfigError("order must be in [2, " + std::to_string(kMaxOrder) + "], got " + std::to_string(cfg.order));
  }
  if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
  if (cfg.schemes.empty()) throw ConfigError("no schemes selected; valid schemes: " + valid_scheme_names());
  if (cfg.item_diff) {
    if (cfg.item_diff->first == cfg.item_diff->second) throw ConfigError("item_diff needs two distinct schemes");
  }

  if (cfg.has_scheme(Scheme::BPE)) {
    if (cfg.merge_file.empty() && cfg.bpe_merges == 0) {
      throw ConfigError("scheme bpe needs merge_file (or bpe_merges > 0 to learn merges)");
    }
    if (!cfg.merge_file.empty()) require_file(cfg.merge_file, "merge_file");
  }
  if (cfg.has_scheme(Scheme::Morphological)) require_file(cfg.lexicon, "lexicon");

  if (stage == Stage::Train) require_file(cfg.train_corpus, "train_corpus");
  if (stage == Stage::Evaluate) {
    require_file(cfg.train_corpus, "train_corpus");
    require_file(cfg.stopwords, "stopwords");
    if (cfg.rt_corpora.empty()) throw ConfigError("no rt_corpus.<name> entries");
    for (const auto& c : cfg.rt_corpora) {
      require_file(c.path, "rt_corpus." + c.name);
      if (c.spillover != 1 && c.spillover != 3) {
        throw ConfigError("spillover." + c.name + " must be 1 or 3, got " + std::to_string(c.spillover));
      }
    }
  }
}

}  // namespace segsurp
