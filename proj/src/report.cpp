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

#include "segsurp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "segsurp/error.hpp"
#include "segsurp/text.hpp"

namespace segsurp {
namespace {

using nlohmann::json;

json rank_sum_json(const RankSumResult& r) {
  return {{"w", r.w}, {"u", r.u}, {"p", r.p}, {"exact", r.exact}, {"n_a", r.n_a}, {"n_b", r.n_b}};
}

json subset_json(const SubsetCrossValidation& s) {
  return {{"rows", s.rows}, {"folds", s.folds}, {"fold_delta_loglik", s.fold_delta}, {"note", s.note}};
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string num(double v) { return text::format_double(v); }

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

json to_json(const EvaluationReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = r.seed;
  j["folds"] = r.folds;
  j["alignment"] = r.alignment;
  j["order"] = r.order;
  j["stopwords_sha256"] = r.stopwords_sha256;
  j["warnings"] = r.warnings;
  auto& cells = j["cells"] = json::array();
  for (const auto& c : r.cells) {
    json cell;
    cell["corpus"] = c.corpus;
    cell["scheme"] = scheme_name(c.scheme);
    cell["spillover"] = c.spillover;
    cell["words"] = c.words;
    cell["kept_words"] = c.kept_words;
    cell["exclusions"] = c.exclusions;
    cell["rows"] = c.rows;
    cell["delta_loglik"] = c.delta_loglik;
    cell["cohens_f2"] = c.cohens_f2 ? json(*c.cohens_f2) : json();
    cell["baseline_fit"] = c.baseline_fit;
    cell["full_fit"] = c.full_fit;
    cell["fold_delta_loglik"] = c.fold_delta;
    cell["rank_sum_vs_orthographic"] = c.vs_orthographic ? rank_sum_json(*c.vs_orthographic) : json();
    auto& seg = cell["segmentation"];
    seg["words"] = c.segmentation.words;
    seg["words_no_stop"] = c.segmentation.words_no_stop;
    seg["rows"] = json::array();
    for (const auto& row : c.segmentation.rows) {
      seg["rows"].push_back({{"tokens", row.tokens},
                             {"words", row.words},
                             {"percent", row.percent},
                             {"words_no_stop", row.words_no_stop},
                             {"percent_no_stop", row.percent_no_stop}});
    }
    auto& byk = cell["surprisal_by_tokens"] = json::array();
    for (const auto& s : c.by_token_count) {
      byk.push_back({{"tokens", s.tokens},
                     {"count", s.count},
                     {"mean", s.mean},
                     {"min", s.min},
                     {"q1", s.q1},
                     {"median", s.median},
                     {"q3", s.q3},
                     {"max", s.max}});
    }
    cell["whole_vs_split"] = {{"whole", subset_json(c.whole_vs_split.whole)},
                              {"split", subset_json(c.whole_vs_split.split)}};
    cells.push_back(std::move(cell));
  }
  auto& diffs = j["item_diffs"] = json::array();
  for (const auto& d : r.item_diffs) {
    json top = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(d.items.size(), 20); ++i) {
      const auto& it = d.items[i];
      top.push_back({{"text_id", it.text_id},
                     {"word_index", it.word_index},
                     {"word", it.word},
                     {"tokens_a", it.tokens_a},
                     {"tokens_b", it.tokens_b},
                     {"bits_a", it.bits_a},
                     {"bits_b", it.bits_b},
                     {"diff", it.diff}});
    }
    diffs.push_back({{"corpus", d.corpus},
                     {"scheme_a", scheme_name(d.a)},
                     {"scheme_b", scheme_name(d.b)},
                     {"items", d.items.size()},
                     {"top", std::move(top)}});
  }
  return j;
}

std::vector<std::string> check_report(const json& j) {
  std::vector<std::string> bad;
  if (j.value("schema_version", 0) != kReportSchemaVersion) bad.push_back("unexpected schema_version");
  const std::size_t folds = j.value("folds", std::size_t{0});
  for (const auto& c : j.at("cells")) {
    const std::string where = c.at("corpus").get<std::string>() + "/" + c.at("scheme").get<std::string>();
    if (c.at("fold_delta_loglik").size() != folds) {
      bad.push_back(where + ": expected " + std::to_string(folds) + " fold values, got " +
                    std::to_string(c.at("fold_delta_loglik").size()));
    }
    double pct = 0.0;
    double pct_ns = 0.0;
    for (const auto& row : c.at("segmentation").at("rows")) {
      pct += row.at("percent").get<double>();
      pct_ns += row.at("percent_no_stop").get<double>();
    }
    if (c.at("segmentation").at("words").get<std::size_t>() > 0 && std::fabs(pct - 100.0) > 0.1) {
      bad.push_back(where + ": segmentation percentages sum to " + num(pct));
    }
    if (c.at("segmentation").at("words_no_stop").get<std::size_t>() > 0 && std::fabs(pct_ns - 100.0) > 0.1) {
      bad.push_back(where + ": stopword-free segmentation percentages sum to " + num(pct_ns));
    }
    std::size_t by_k = 0;
    for (const auto& s : c.at("surprisal_by_tokens")) by_k += s.at("count").get<std::size_t>();
    if (by_k != c.at("kept_words").get<std::size_t>()) {
      bad.push_back(where + ": token-count groups cover " + std::to_string(by_k) + " of " +
                    std::to_string(c.at("kept_words").get<std::size_t>()) + " kept words");
    }
    const auto& wvs = c.at("whole_vs_split");
    const auto parts = wvs.at("whole").at("rows").get<std::size_t>() + wvs.at("split").at("rows").get<std::size_t>();
    if (parts != c.at("rows").get<std::size_t>()) bad.push_back(where + ": whole/split rows do not sum to rows");
  }
  return bad;
}

std::vector<std::string> check_report(const EvaluationReport& report) { return check_report(to_json(report)); }

void write_report(const EvaluationReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << to_json(r).dump(2) << '\n';
  }

  auto crossval = open_csv(dir / "crossval.csv");
  crossval << "corpus,scheme,fold,rows,delta_loglik\n";
  auto byk = open_csv(dir / "surprisal_by_k.csv");
  byk << "corpus,scheme,tokens,count,mean,min,q1,median,q3,max\n";
  auto wvs = open_csv(dir / "whole_vs_split.csv");
  wvs << "corpus,scheme,subset,folds,fold,rows,delta_loglik\n";
  auto seg = open_csv(dir / "segmentation.csv");
  seg << "corpus,scheme,tokens,words,percent,words_no_stop,percent_no_stop\n";

  for (const auto& c : r.cells) {
    const std::string key = csv_field(c.corpus) + "," + std::string(scheme_name(c.scheme));
    for (std::size_t f = 0; f < c.fold_delta.size(); ++f) {
      crossval << key << ',' << f << ',' << c.rows << ',' << num(c.fold_delta[f]) << '\n';
    }
    for (const auto& s : c.by_token_count) {
      byk << key << ',' << s.tokens << ',' << s.count << ',' << num(s.mean) << ',' << num(s.min) << ','
          << num(s.q1) << ',' << num(s.median) << ',' << num(s.q3) << ',' << num(s.max) << '\n';
    }
    for (const auto* sub : {&c.whole_vs_split.whole, &c.whole_vs_split.split}) {
      const char* name = sub == &c.whole_vs_split.whole ? "whole" : "split";
      for (std::size_t f = 0; f < sub->fold_delta.size(); ++f) {
        wvs << key << ',' << name << ',' << sub->folds << ',' << f << ',' << sub->rows << ','
            << num(sub->fold_delta[f]) << '\n';
      }
    }
    for (const auto& row : c.segmentation.rows) {
      seg << key << ',' << row.tokens << ',' << row.words << ',' << num(row.percent) << ',' << row.words_no_stop
          << ',' << num(row.percent_no_stop) << '\n';
    }
  }

  auto diff = open_csv(dir / "item_diff.csv");
  diff << "corpus,scheme_a,scheme_b,rank,text_id,word_index,word,tokens_a,tokens_b,bits_a,bits_b,diff,sentence\n";
  for (const auto& d : r.item_diffs) {
    for (std::size_t i = 0; i < d.items.size(); ++i) {
      const auto& it = d.items[i];
      diff << csv_field(d.corpus) << ',' << scheme_name(d.a) << ',' << scheme_name(d.b) << ',' << i + 1 << ','
           << csv_field(it.text_id) << ',' << it.word_index << ',' << csv_field(it.word) << ','
           << csv_field(it.tokens_a) << ',' << csv_field(it.tokens_b) << ',' << num(it.bits_a) << ','
           << num(it.bits_b) << ',' << num(it.diff) << ',' << csv_field(it.sentence) << '\n';
    }
  }
}

std::string summarize_report(const json& j) {
  std::ostringstream out;
  out << "seed " << j.at("seed").get<std::uint64_t>() << ", " << j.at("folds").get<std::size_t>() << " folds, alignment "
      << (j.at("alignment").get<bool>() ? "on" : "off") << ", order " << j.at("order").get<std::size_t>() << "\n\n";

  out << "corpus          scheme          rows    dLogLik     f2        mean CV dLL  U      p\n";
  for (const auto& c : j.at("cells")) {
    char line[256];
    double mean = 0.0;
    const auto& folds = c.at("fold_delta_loglik");
    for (const auto& v : folds) mean += v.get<double>();
    if (!folds.empty()) mean /= static_cast<double>(folds.size());
    const auto f2 = c.at("cohens_f2").is_null() ? std::string("inf") : fixed(c.at("cohens_f2").get<double>(), 5);
    std::string w = "-";
    std::string p = "-";
    if (!c.at("rank_sum_vs_orthographic").is_null()) {
      w = num(c.at("rank_sum_vs_orthographic").at("u").get<double>());
      p = fixed(c.at("rank_sum_vs_orthographic").at("p").get<double>(), 4);
    }
    std::snprintf(line, sizeof line, "%-15s %-15s %-7zu %-11s %-9s %-12s %-6s %s\n",
                  c.at("corpus").get<std::string>().c_str(), c.at("scheme").get<std::string>().c_str(),
                  c.at("rows").get<std::size_t>(), fixed(c.at("delta_loglik").get<double>(), 6).c_str(), f2.c_str(),
                  fixed(mean, 6).c_str(), w.c_str(), p.c_str());
    out << line;
  }

  out << "\nwords by token count (percent, percent without stopwords)\n";
  for (const auto& c : j.at("cells")) {
    out << c.at("corpus").get<std::string>() << '/' << c.at("scheme").get<std::string>() << ':';
    for (const auto& row : c.at("segmentation").at("rows")) {
      out << "  " << row.at("tokens").get<std::size_t>() << "=" << fixed(row.at("percent").get<double>(), 2) << "/"
          << fixed(row.at("percent_no_stop").get<double>(), 2);
    }
    out << '\n';
  }

  for (const auto& w : j.at("warnings")) out << "warning: " << w.get<std::string>() << '\n';
  return out.str();
}

}  // namespace segsurp
