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

#include "segsurp/pipeline.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "segsurp/error.hpp"
#include "segsurp/hash.hpp"
#include "segsurp/surprisal.hpp"
#include "segsurp/text.hpp"

namespace segsurp {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path models_dir(const RunConfig& c) { return c.out_dir / "models"; }

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

json file_entry(const fs::path& path) { return {{"file", path.filename().string()}, {"sha256", sha256_file(path)}}; }

std::vector<Tokenizer> make_tokenizers(const RunConfig& cfg, const LoadedResources& res) {
  std::vector<Tokenizer> out;
  for (Scheme s : cfg.schemes) out.emplace_back(s, res.view());
  return out;
}

json read_json(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(std::string("cannot open ") + what + " " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

TokenizerResources LoadedResources::view() const {
  TokenizerResources r;
  r.merges = merges ? &*merges : nullptr;
  r.lexicon = lexicon ? &*lexicon : nullptr;
  return r;
}

LoadedResources load_resources(const RunConfig& cfg, const fs::path& learned_merges) {
  LoadedResources res;
  if (cfg.has_scheme(Scheme::BPE)) {
    if (!cfg.merge_file.empty()) {
      res.merges = load_merge_table(cfg.merge_file);
    } else if (!learned_merges.empty() && fs::exists(learned_merges)) {
      res.merges = load_merge_table(learned_merges);
    } else {
      throw ConfigError("no merge table available for scheme bpe; run train first");
    }
  }
  if (cfg.has_scheme(Scheme::Morphological)) res.lexicon = load_segmentation_lexicon(cfg.lexicon);
  return res;
}

EvaluationReport evaluate_corpora(std::span<const CorpusInput> corpora, std::span<const SchemeInput> schemes,
                                  const FrequencyTable& frequencies, const EvaluationOptions& opt) {
  EvaluationReport report;
  report.seed = opt.seed;
  report.folds = opt.folds;
  report.alignment = opt.alignment;
  report.order = schemes.empty() ? 0 : schemes.front().model->order();
  const StopwordList empty_stopwords;
  const StopwordList& stopwords = opt.stopwords ? *opt.stopwords : empty_stopwords;
  report.stopwords_sha256 = stopwords.sha256();
  if (!opt.stopwords) report.warnings.push_back("no stopword list; stopword-free columns equal the full columns");
  if (!stopwords.sha256().empty() && stopwords.sha256() != kShippedStopwordsSha256) {
    report.warnings.push_back("stopword list differs from the shipped list (sha256 " + stopwords.sha256() + ")");
  }

  for (const auto& corpus : corpora) {
    const auto spill = static_cast<std::size_t>(corpus.spillover);
    const auto baseline = control_predictors(spill);
    const auto full = surprisal_predictors(spill);

    std::vector<std::vector<WordSurprisal>> surprisals;
    for (const auto& s : schemes) {
      surprisals.push_back(compute_surprisals(corpus.records, *s.tokenizer, *s.model, frequencies));
      apply_exclusions(corpus.records, surprisals.back());
    }
    if (opt.alignment) {
      std::vector<std::vector<WordSurprisal>*> ptrs;
      for (auto& v : surprisals) ptrs.push_back(&v);
      align_exclusions(ptrs);
    }

    std::vector<std::vector<FeatureRow>> rows;
    std::vector<RowKey> keys;
    for (const auto& ws : surprisals) {
      rows.push_back(build_feature_rows(corpus.records, ws, frequencies, corpus.spillover));
      for (const auto& r : rows.back()) keys.push_back(row_key(r));
    }
    // One assignment over the union of keys, so every scheme sees the same folds.
    const auto folds = FoldAssignment::make(std::move(keys), opt.seed, opt.folds);

    std::size_t first_cell = report.cells.size();
    std::optional<std::size_t> orth_cell;
    for (std::size_t si = 0; si < schemes.size(); ++si) {
      const Scheme scheme = schemes[si].tokenizer->scheme();
      auto& srows = rows[si];
      folds.apply(srows);
      if (!opt.feature_dir.empty()) {
        auto out = open_out(opt.feature_dir / (corpus.name + "." + std::string(scheme_name(scheme)) + ".tsv"));
        write_feature_rows(out, srows);
      }

      CellResult cell;
      cell.corpus = corpus.name;
      cell.scheme = scheme;
      cell.spillover = corpus.spillover;
      cell.words = corpus.records.size();
      std::vector<TokenizedWord> tokenized;
      for (const auto& w : surprisals[si]) {
        ++cell.exclusions[std::string(exclusion_name(w.exclusion))];
        if (w.kept()) ++cell.kept_words;
        tokenized.push_back(w.tokenized);
      }
      cell.rows = srows.size();

      const auto base_fit = fit_ols(srows, baseline);
      const auto full_fit = fit_ols(srows, full);
      cell.delta_loglik = (full_fit.loglik - base_fit.loglik) / static_cast<double>(srows.size());
      try {
        cell.cohens_f2 = cohens_f2(base_fit, full_fit);
      } catch (const InfiniteEffectError& e) {
        report.warnings.push_back(corpus.name + "/" + std::string(scheme_name(scheme)) + ": " + e.what());
      }
      cell.baseline_fit = fit_report(base_fit);
      cell.full_fit = fit_report(full_fit);
      cell.fold_delta = cross_validate(srows, opt.folds, baseline, full).fold_delta;
      cell.segmentation = segmentation_stats(tokenized, stopwords);
      cell.by_token_count = surprisal_by_token_count(surprisals[si]);
      cell.whole_vs_split = whole_vs_split_analysis(srows, baseline, full, opt.seed, opt.folds);
      if (scheme == Scheme::Orthographic) orth_cell = report.cells.size();
      report.cells.push_back(std::move(cell));
    }

    if (orth_cell) {
      const auto& ref = report.cells[*orth_cell].fold_delta;
      for (std::size_t c = first_cell; c < report.cells.size(); ++c) {
        if (c == *orth_cell) continue;
        report.cells[c].vs_orthographic = wilcoxon_rank_sum(report.cells[c].fold_delta, ref);
      }
    }

    if (opt.item_diff) {
      std::optional<std::size_t> ia;
      std::optional<std::size_t> ib;
      for (std::size_t si = 0; si < schemes.size(); ++si) {
        if (schemes[si].tokenizer->scheme() == opt.item_diff->first) ia = si;
        if (schemes[si].tokenizer->scheme() == opt.item_diff->second) ib = si;
      }
      if (ia && ib) {
        report.item_diffs.push_back({corpus.name, opt.item_diff->first, opt.item_diff->second,
                                     item_diff_report(corpus.records, surprisals[*ia], surprisals[*ib])});
      }
    }
  }
  return report;
}

json run_train(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg, Stage::Train);
  const auto mdir = models_dir(cfg);
  fs::create_directories(mdir);

  const auto corpus = load_training_corpus(cfg.train_corpus);
  log << "train: " << corpus.size() << " sentences from " << cfg.train_corpus.string() << '\n';
  {
    auto out = open_out(mdir / "frequencies.tsv");
    write_frequency_table(out, build_frequency_table(corpus));
  }

  json manifest;
  manifest["manifest_version"] = kManifestVersion;
  manifest["tool_version"] = kToolVersion;
  manifest["config_sha256"] = cfg.sha256;
  manifest["seed"] = cfg.seed;
  manifest["order"] = cfg.order;
  manifest["train_corpus"] = file_entry(cfg.train_corpus);
  manifest["train_corpus"]["sentences"] = corpus.size();
  manifest["frequencies"] = file_entry(mdir / "frequencies.tsv");

  const fs::path learned = mdir / "merges.learned.txt";
  if (cfg.has_scheme(Scheme::BPE) && cfg.merge_file.empty()) {
    const auto merges = train_bpe(corpus, cfg.bpe_merges);
    auto out = open_out(learned);
    write_merge_table(out, merges);
    out.close();
    manifest["merge_file"] = file_entry(learned);
    manifest["merge_file"]["learned_merges"] = merges.size();
    log << "train: learned " << merges.size() << " BPE merges\n";
  } else if (cfg.has_scheme(Scheme::BPE)) {
    manifest["merge_file"] = file_entry(cfg.merge_file);
  }
  if (cfg.has_scheme(Scheme::Morphological)) manifest["lexicon"] = file_entry(cfg.lexicon);

  const auto res = load_resources(cfg, learned);
  manifest["schemes"] = json::array();
  for (const auto& tok : make_tokenizers(cfg, res)) {
    const std::string name{scheme_name(tok.scheme())};
    const auto streams = symbol_streams(corpus, tok);
    {
      auto out = open_out(cfg.out_dir / "tokens" / (name + ".txt"));
      write_token_streams(out, streams);
    }
    const auto model = estimate(count_ngrams(streams, cfg.order));
    const auto arpa = mdir / (name + ".arpa");
    export_arpa(model, arpa);

    json entry = file_entry(arpa);
    entry["scheme"] = name;
    entry["ngrams"] = json::array();
    for (std::size_t n = 1; n <= model.order(); ++n) entry["ngrams"].push_back(model.count(n));
    entry["warnings"] = model.warnings();
    manifest["schemes"].push_back(std::move(entry));
    log << "train: " << name << " model, " << model.count(1) << " unigrams -> " << arpa.string() << '\n';
  }

  auto out = open_out(mdir / "manifest.json");
  out << manifest.dump(2) << '\n';
  return manifest;
}

EvaluationReport run_evaluate(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg, Stage::Evaluate);
  const auto mdir = models_dir(cfg);
  const json manifest = read_json(mdir / "manifest.json", "manifest");

  if (manifest.value("order", std::size_t{0}) != cfg.order) {
    throw ManifestError("models were trained with order " + manifest.value("order", json()).dump() +
                        ", config asks for " + std::to_string(cfg.order));
  }
  if (manifest.at("train_corpus").at("sha256") != sha256_file(cfg.train_corpus)) {
    throw ManifestError("training corpus changed since the models were trained; rerun train");
  }
  if (cfg.has_scheme(Scheme::BPE) && !cfg.merge_file.empty() &&
      (!manifest.contains("merge_file") || manifest["merge_file"].at("sha256") != sha256_file(cfg.merge_file))) {
    throw ManifestError("merge file does not match the one the bpe model was trained with");
  }
  if (cfg.has_scheme(Scheme::Morphological) &&
      (!manifest.contains("lexicon") || manifest["lexicon"].at("sha256") != sha256_file(cfg.lexicon))) {
    throw ManifestError("lexicon does not match the one the morphological model was trained with");
  }

  const auto res = load_resources(cfg, mdir / "merges.learned.txt");
  const auto tokenizers = make_tokenizers(cfg, res);
  std::vector<NGramModel> models;
  for (const auto& tok : tokenizers) {
    const std::string name{scheme_name(tok.scheme())};
    const json* entry = nullptr;
    for (const auto& e : manifest.at("schemes")) {
      if (e.at("scheme") == name) entry = &e;
    }
    if (!entry) throw ManifestError("no trained model for scheme " + name + "; rerun train with this scheme");
    const auto arpa = mdir / entry->at("file").get<std::string>();
    if (!fs::exists(arpa) || sha256_file(arpa) != entry->at("sha256")) {
      throw ManifestError("model file " + arpa.string() + " is missing or does not match the manifest");
    }
    models.push_back(import_arpa(arpa));
    log << "evaluate: loaded " << name << " model\n";
  }
  std::vector<SchemeInput> schemes;
  for (std::size_t i = 0; i < tokenizers.size(); ++i) schemes.push_back({&tokenizers[i], &models[i]});

  FrequencyTable freqs;
  {
    std::ifstream in(mdir / "frequencies.tsv", std::ios::binary);
    if (!in) throw ManifestError("missing frequencies.tsv; rerun train");
    freqs = parse_frequency_table(in);
  }

  std::vector<CorpusInput> corpora;
  for (const auto& c : cfg.rt_corpora) {
    corpora.push_back({c.name, load_rt_corpus(c.path), c.spillover});
    log << "evaluate: " << c.name << ", " << corpora.back().records.size() << " words, spillover " << c.spillover
        << '\n';
  }

  const auto stopwords = StopwordList::load(cfg.stopwords);
  EvaluationOptions opt;
  opt.seed = cfg.seed;
  opt.folds = cfg.folds;
  opt.alignment = cfg.alignment;
  opt.item_diff = cfg.item_diff;
  opt.stopwords = &stopwords;
  opt.feature_dir = cfg.out_dir / "features";
  auto report = evaluate_corpora(corpora, schemes, freqs, opt);
  for (const auto& m : models) {
    for (const auto& w : m.warnings()) report.warnings.push_back(w);
  }

  const auto problems = check_report(report);
  write_report(report, cfg.out_dir / "report");
  if (!problems.empty()) {
    std::string msg = "report failed validation:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  log << "evaluate: wrote " << (cfg.out_dir / "report").string() << '\n';
  return report;
}

void run_tokenize(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  validate_config(cfg, Stage::Tokenize);
  const auto res = load_resources(cfg, models_dir(cfg) / "merges.learned.txt");
  const auto tokenizers = make_tokenizers(cfg, res);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::is_valid_utf8(line)) throw DecodeError("<input>", line_no);
    const auto words = text::split_whitespace(line);
    if (words.empty()) continue;
    for (const auto& tok : tokenizers) {
      out << scheme_name(tok.scheme()) << '\t';
      bool first = true;
      for (const auto& w : words) {
        const auto form = text::strip_punctuation(w);
        if (form.empty()) continue;
        if (!first) out << ' ';
        first = false;
        out << tok.tokenize(form).joined();
      }
      out << '\n';
    }
    out << '\n';
  }
}

std::string run_report(const RunConfig& cfg) {
  const json report = read_json(cfg.out_dir / "report" / "report.json", "report");
  const auto problems = check_report(report);
  std::string text = summarize_report(report);
  if (!problems.empty()) {
    std::string msg = "report failed validation:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  return text;
}

}  // namespace segsurp
