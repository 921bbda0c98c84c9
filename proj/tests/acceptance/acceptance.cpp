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

// One PASS/FAIL/SKIP line per acceptance criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "segsurp/config.hpp"
#include "segsurp/corpus_io.hpp"
#include "segsurp/evaluation.hpp"
#include "segsurp/ngram_lm.hpp"
#include "segsurp/pipeline.hpp"
#include "segsurp/regression.hpp"
#include "segsurp/surprisal.hpp"
#include "segsurp/text.hpp"
#include "segsurp/tokenization.hpp"

using namespace segsurp;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SEGSURP_DATA_DIR;
const std::string kLicensedDir = SEGSURP_LICENSED_DATA_DIR;

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome = Outcome::Fail;
  std::string detail;
};

Result pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Result fail(std::string d) { return {Outcome::Fail, std::move(d)}; }
Result check(bool ok, std::string d) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(d)}; }

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Toy {
  std::vector<Sentence> corpus = load_training_corpus(kData / "fixtures/toy_train.txt");
  MergeTable merges = load_merge_table(kData / "gpt2/merges.txt");
  SegmentationLexicon lexicon = load_segmentation_lexicon(kData / "fixtures/toy_lexicon.tsv");
};

const Toy& toy() {
  static const Toy t;
  return t;
}

std::vector<std::vector<std::string>> orthographic_streams() {
  Tokenizer orth(Scheme::Orthographic, {});
  return symbol_streams(toy().corpus, orth);
}

// 1. Conditional distributions sum to one.
Result kn_normalization() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t checked = 0;
  std::mt19937_64 rng(1);
  for (Scheme s : kAllSchemes) {
    Tokenizer tok(s, TokenizerResources{&toy().merges, &toy().lexicon});
    const auto model = estimate(count_ngrams(symbol_streams(toy().corpus, tok), 5));
    auto contexts = stored_contexts(model);
    std::shuffle(contexts.begin(), contexts.end(), rng);
    contexts.resize(std::min<std::size_t>(100, contexts.size()));
    for (const auto& ctx : contexts) {
      worst = std::max(worst, std::fabs(probability_mass(model, ctx.ids()) - 1.0));
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return check(checked == 300 && worst <= 1e-6 && secs < 10.0,
               std::to_string(checked) + " contexts, max |sum-1| = " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s");
}

// 2. Agreement with the reference-toolkit ARPA.
Result reference_agreement() {
  const auto streams = orthographic_streams();
  const auto ours = estimate(count_ngrams(streams, 5));
  const auto ref = import_arpa(kData / "fixtures/toy_orthographic.kenlm.arpa");
  std::vector<std::string> vocab;
  for (TokenId id = 0; id < ours.vocabulary().size(); ++id) {
    if (id != Vocabulary::kBos) vocab.push_back(ours.vocabulary().symbol(id));
  }
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int q = 0; q < 1000; ++q) {
    std::string word;
    std::vector<std::string> ctx;
    if (q % 2 == 0) {
      // Observed position in the training stream.
      const auto& sent = streams[rng() % streams.size()];
      std::vector<std::string> padded{"<s>"};
      padded.insert(padded.end(), sent.begin(), sent.end());
      padded.push_back("</s>");
      const std::size_t pos = 1 + rng() % (padded.size() - 1);
      word = padded[pos];
      ctx.assign(padded.begin() + static_cast<std::ptrdiff_t>(pos >= 4 ? pos - 4 : 0),
                 padded.begin() + static_cast<std::ptrdiff_t>(pos));
    } else {
      // Arbitrary vocabulary sequence, mostly unseen.
      word = vocab[rng() % vocab.size()];
      const std::size_t len = rng() % 5;
      for (std::size_t i = 0; i < len; ++i) ctx.push_back(vocab[rng() % vocab.size()]);
    }
    const double diff = std::fabs(ours.logprob(word, ctx) - ref.logprob(word, ctx)) / std::numbers::ln10;
    worst = std::max(worst, diff);
  }
  return check(worst <= 1e-3, "1000 queries, max |log10 diff| = " + fmt(worst, 3));
}

// 3. Hand-derived values on {"a b", "a c"}.
Result hand_oracle() {
  const auto m = estimate(count_ngrams({{"a", "b"}, {"a", "c"}}, 2));
  auto lp = [&](const std::string& w, std::vector<std::string> ctx) { return m.logprob(w, ctx); };
  // D = 0.75 everywhere; |V| = 5 with <unk>.
  const double pa = 0.25 / 5 + 0.6 / 5;
  const std::vector<std::pair<double, double>> cases{
      {lp("a", {}), std::log(pa)},
      {lp("</s>", {}), std::log(1.25 / 5 + 0.12)},
      {lp("<unk>", {}), std::log(0.12)},
      {lp("b", {"a"}), std::log(0.25 / 2 + 0.75 * pa)},
      {lp("a", {"<s>"}), std::log(1.25 / 2 + 0.375 * pa)},
      {lp("</s>", {"c"}), std::log(0.25 + 0.75 * 0.37)},
      {lp("b", {"c"}), std::log(0.75 * pa)},
  };
  double worst = 0.0;
  for (const auto& [got, want] : cases) worst = std::max(worst, std::fabs(got - want));
  return check(worst <= 1e-12, std::to_string(cases.size()) + " values, max |diff| = " + fmt(worst, 3));
}

// 4. Tokenizer fixtures.
Result tokenizer_fixtures() {
  const auto rel = apply_bpe("relegates", toy().merges).joined();
  const auto fri = apply_bpe("fringes", toy().merges).joined();
  std::ifstream in(kData / "fixtures/example_sentence.txt");
  std::string line;
  std::getline(in, line);
  const auto words = text::split_whitespace(line);
  auto row = [&](Scheme s) {
    Tokenizer tok(s, TokenizerResources{&toy().merges, &toy().lexicon});
    std::string out;
    for (const auto& w : words) out += (out.empty() ? "" : " ") + tok.tokenize(w).joined();
    return out;
  };
  const std::string bpe_row =
      "the sporadic nature of press coverage of the court often releg ates its reporters to the fr inges of the "
      "journalistic community";
  const std::string morph_row =
      "the sporadic nature of press cover age of the court often relegate s it s re port er s to the fringe s of "
      "the journal istic commune ity";
  const bool ok = rel == "releg ates" && fri == "fr inges" && row(Scheme::BPE) == bpe_row &&
                  row(Scheme::Morphological) == morph_row;
  return check(ok, "relegates -> [" + rel + "], fringes -> [" + fri + "], BPE and morphological rows " +
                       (ok ? "match" : "differ"));
}

// Normal-equations oracle by Gauss-Jordan elimination on [A'A | I | A'y].
struct Oracle {
  std::vector<double> beta;
  std::vector<double> inverse_diag;
  double rss = 0.0;
};

Oracle normal_equations(const std::vector<std::vector<double>>& a, const std::vector<double>& y) {
  const std::size_t n = a.size();
  const std::size_t k = a[0].size();
  std::vector<std::vector<double>> m(k, std::vector<double>(2 * k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t r = 0; r < n; ++r) m[i][j] += a[r][i] * a[r][j];
    }
    m[i][k + i] = 1.0;
    for (std::size_t r = 0; r < n; ++r) m[i][2 * k] += a[r][i] * y[r];
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    const double d = m[c][c];
    for (auto& v : m[c]) v /= d;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = m[r][c];
      for (std::size_t j = 0; j <= 2 * k; ++j) m[r][j] -= f * m[c][j];
    }
  }
  Oracle o;
  for (std::size_t i = 0; i < k; ++i) {
    o.beta.push_back(m[i][2 * k]);
    o.inverse_diag.push_back(m[i][k + i]);
  }
  for (std::size_t r = 0; r < n; ++r) {
    double pred = 0.0;
    for (std::size_t j = 0; j < k; ++j) pred += a[r][j] * o.beta[j];
    o.rss += (y[r] - pred) * (y[r] - pred);
  }
  return o;
}

// 5. OLS against the oracle.
Result regression_oracle() {
  constexpr std::size_t n = 50;
  constexpr std::size_t p = 4;
  double worst = 0.0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd yv(n);
    std::vector<std::vector<double>> a(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i].push_back(1.0);
      double yi = 3.0 + z(rng);
      for (std::size_t j = 0; j < p; ++j) {
        x(i, j) = z(rng) * static_cast<double>(j + 1) + static_cast<double>(j);
        a[i].push_back(x(i, j));
        yi += (0.5 - 0.3 * static_cast<double>(j)) * x(i, j);
      }
      y[i] = yv(i) = yi;
    }
    const auto fit = fit_ols(x, yv, {"x0", "x1", "x2", "x3"});
    const auto tests = coefficient_tests(fit);
    const auto o = normal_equations(a, y);
    const double dn = static_cast<double>(n);
    double mean = 0.0;
    for (double v : y) mean += v / dn;
    double sst = 0.0;
    for (double v : y) sst += (v - mean) * (v - mean);
    const double s2 = o.rss / (dn - static_cast<double>(p) - 1.0);
    for (std::size_t j = 0; j <= p; ++j) {
      worst = std::max(worst, std::fabs(fit.coefficients(static_cast<Eigen::Index>(j)) - o.beta[j]));
      worst = std::max(worst, std::fabs(tests[j].t - o.beta[j] / std::sqrt(s2 * o.inverse_diag[j])));
    }
    worst = std::max(worst, std::fabs(fit.r2 - (1.0 - o.rss / sst)));
    worst = std::max(worst, std::fabs(fit.loglik + dn / 2.0 * (std::log(2.0 * std::numbers::pi * o.rss / dn) + 1.0)));
  }
  return check(worst <= 1e-8, "20 fixtures, max |diff| over beta, t, r2, loglik = " + fmt(worst, 3));
}

std::vector<FeatureRow> generative_rows(std::uint64_t seed, std::size_t n, std::size_t lags, double noise_sd,
                                        double beta_s = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, noise_sd);
  std::uniform_real_distribution<double> surprisal(0.5, 15.0);
  std::uniform_int_distribution<int> length(1, 12);
  std::uniform_real_distribution<double> logf(1.0, 12.0);
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow r;
    r.text_id = "text" + std::to_string(i / 200);
    r.word_index = i % 200;
    for (std::size_t l = 0; l <= lags; ++l) {
      r.surprisal.push_back(surprisal(rng));
      r.length.push_back(length(rng));
      r.log_freq.push_back(logf(rng));
    }
    r.rt_ms = 250.0 + beta_s * r.surprisal[0] + 0.5 * r.length[0] - 0.3 * r.log_freq[0] + z(rng);
    rows.push_back(std::move(r));
  }
  return rows;
}

// 6. In-sample delta loglik of nested models is never negative.
Result nesting_bound() {
  double lowest = std::numeric_limits<double>::infinity();
  std::size_t negative = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t lags = (seed % 3 == 0) ? 0 : (seed % 3 == 1 ? 1 : 3);
    const double beta = (seed % 2 == 0) ? 0.0 : 1.0;
    const auto rows = generative_rows(1000 + seed, 60 + seed * 3, lags, 5.0, beta);
    const auto d = delta_loglik(rows, control_predictors(static_cast<int>(lags)),
                                surprisal_predictors(static_cast<int>(lags)));
    lowest = std::min(lowest, d.value);
    negative += d.value < 0.0;
  }
  return check(negative == 0, "100 fixtures, min delta = " + fmt(lowest, 3));
}

// 7. Exact rank-sum test against enumeration.
Result wilcoxon_exactness() {
  std::vector<double> sums;
  std::vector<int> masks;
  for (int m = 0; m < 64; ++m) {
    if (__builtin_popcount(static_cast<unsigned>(m)) != 3) continue;
    masks.push_back(m);
    double s = 0;
    for (int i = 0; i < 6; ++i) {
      if (m & (1 << i)) s += i + 1;
    }
    sums.push_back(s);
  }
  double worst = 0.0;
  for (int m : masks) {
    std::vector<double> a;
    std::vector<double> b;
    // Values with arbitrary spacing; only their order matters.
    for (int i = 0; i < 6; ++i) ((m & (1 << i)) ? a : b).push_back(std::exp(0.7 * i) - 3.0);
    const auto r = wilcoxon_rank_sum(a, b);
    const double lower = static_cast<double>(std::count_if(sums.begin(), sums.end(), [&](double s) { return s <= r.w; }));
    const double upper = static_cast<double>(std::count_if(sums.begin(), sums.end(), [&](double s) { return s >= r.w; }));
    worst = std::max(worst, std::fabs(r.p - std::min(1.0, 2.0 * std::min(lower, upper) / 20.0)));
  }
  const auto r = wilcoxon_rank_sum(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
  const bool ok = masks.size() == 20 && worst <= 1e-12 && r.w == 6.0 && std::fabs(r.p - 0.1) <= 1e-12;
  return check(ok, "20 assignments, max |p diff| = " + fmt(worst, 3) + "; W({1,2,3},{4,5,6}) = " + fmt(r.w) +
                       ", p = " + fmt(r.p));
}

void assign_folds(std::vector<FeatureRow>& rows, std::uint64_t seed) {
  std::vector<RowKey> keys;
  for (const auto& r : rows) keys.push_back(row_key(r));
  FoldAssignment::make(keys, seed).apply(rows);
}

// 8. Generative data through cross-validation and the full fit.
Result generative_check() {
  const auto t0 = std::chrono::steady_clock::now();
  auto rows = generative_rows(8, 5000, 0, 10.0);
  assign_folds(rows, kDefaultSeed);
  const auto cv = cross_validate(rows, kDefaultFolds, control_predictors(0), surprisal_predictors(0));
  const auto fit = fit_ols(rows, surprisal_predictors(0));
  double beta = 0.0;
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    if (fit.names[j] == "s0") beta = fit.coefficients(static_cast<Eigen::Index>(j));
  }
  const double min_fold = *std::min_element(cv.fold_delta.begin(), cv.fold_delta.end());
  const double secs = seconds_since(t0);
  const bool ok = cv.fold_delta.size() == 10 && min_fold > 0.0 && std::fabs(beta - 2.0) <= 0.2 && secs < 60.0;
  return check(ok, "min fold delta = " + fmt(min_fold) + ", beta_s = " + fmt(beta) + ", " + fmt(secs, 3) + " s");
}

// 9. Split-word surprisals replaced by noise.
Result whole_vs_split() {
  auto rows = generative_rows(9, 40000, 0, 10.0);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> noise(0.5, 15.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i % 4 == 0) {
      rows[i].token_count = 2;
      rows[i].surprisal[0] = noise(rng);
    }
  }
  const auto r = whole_vs_split_analysis(rows, control_predictors(0), surprisal_predictors(0), kDefaultSeed);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
  };
  const double split = mean(r.split.fold_delta);
  const double whole = mean(r.whole.fold_delta);
  const double whole_min = r.whole.fold_delta.empty()
                               ? -1.0
                               : *std::min_element(r.whole.fold_delta.begin(), r.whole.fold_delta.end());
  const bool ok = std::fabs(split) <= 0.002 && whole > 0.0 && whole_min > 0.0;
  return check(ok, "split mean = " + fmt(split, 3) + " (" + std::to_string(r.split.rows) + " rows), whole mean = " +
                       fmt(whole, 3) + " (" + std::to_string(r.whole.rows) + " rows)");
}

// 10. Full-scale magnitudes on the licensed corpora.
//
// Expected layout under SEGSURP_LICENSED_DATA_DIR:
//   train.txt             training corpus, one sentence per line
//   lexicon.tsv           morphological segmentation lexicon
//   dundee.tsv            averaged eye-tracking reading times
//   natural_stories.tsv   averaged self-paced reading times
struct TableRow {
  std::size_t tokens;
  double percent;
  double percent_no_stop;
};

const std::map<std::pair<std::string, Scheme>, std::vector<TableRow>>& segmentation_reference() {
  static const std::map<std::pair<std::string, Scheme>, std::vector<TableRow>> ref{
      {{"dundee", Scheme::BPE}, {{1, 94.4, 88.5}, {2, 4.19, 8.68}, {3, 1.22, 2.53}, {4, 0.104, 0.217}, {5, 0.005, 0.011}}},
      {{"natural_stories", Scheme::BPE}, {{1, 95.2, 89.9}, {2, 3.85, 8.01}, {3, 0.971, 2.02}, {4, 0.016, 0.03}}},
      {{"dundee", Scheme::Morphological}, {{1, 75.7, 55}, {2, 21, 38.3}, {3, 3, 6.18}, {4, 0.218, 0.451}, {5, 0.011, 0.022}}},
      {{"natural_stories", Scheme::Morphological}, {{1, 76.9, 58.3}, {2, 20.9, 37.1}, {3, 2.05, 4.27}, {4, 0.125, 0.26}}},
  };
  return ref;
}

Result licensed_magnitudes() {
  const fs::path dir = kLicensedDir;
  const std::vector<std::string> needed{"train.txt", "lexicon.tsv", "dundee.tsv", "natural_stories.tsv"};
  if (kLicensedDir.empty()) return {Outcome::Skip, "SEGSURP_LICENSED_DATA_DIR not set"};
  for (const auto& f : needed) {
    if (!fs::exists(dir / f)) return {Outcome::Skip, (dir / f).string() + " not found"};
  }
  RunConfig cfg;
  cfg.train_corpus = dir / "train.txt";
  cfg.lexicon = dir / "lexicon.tsv";
  cfg.merge_file = kData / "gpt2/merges.txt";
  cfg.stopwords = kData / "stopwords_en.txt";
  cfg.rt_corpora = {{"dundee", dir / "dundee.tsv", 1}, {"natural_stories", dir / "natural_stories.tsv", 3}};
  cfg.out_dir = fs::temp_directory_path() / ("segsurp_licensed_" + std::to_string(::getpid()));
  std::ostringstream log;
  run_train(cfg, log);
  const auto report = run_evaluate(cfg, log);
  fs::remove_all(cfg.out_dir);

  std::vector<std::string> problems;
  for (const auto& cell : report.cells) {
    const std::string id = cell.corpus + "/" + std::string(scheme_name(cell.scheme));
    if (cell.delta_loglik < 0.005 || cell.delta_loglik > 0.02) {
      problems.push_back(id + " delta " + fmt(cell.delta_loglik));
    }
    if (!cell.cohens_f2 || *cell.cohens_f2 < 0.01 || *cell.cohens_f2 > 0.03) {
      problems.push_back(id + " f2 " + (cell.cohens_f2 ? fmt(*cell.cohens_f2) : std::string("inf")));
    }
    const auto it = segmentation_reference().find({cell.corpus, cell.scheme});
    if (it == segmentation_reference().end()) continue;
    for (const auto& want : it->second) {
      const auto got = std::find_if(cell.segmentation.rows.begin(), cell.segmentation.rows.end(),
                                    [&](const SegmentationRow& r) { return r.tokens == want.tokens; });
      const double pct = got == cell.segmentation.rows.end() ? 0.0 : got->percent;
      const double pct_ns = got == cell.segmentation.rows.end() ? 0.0 : got->percent_no_stop;
      if (std::fabs(pct - want.percent) > 1.0 || std::fabs(pct_ns - want.percent_no_stop) > 1.0) {
        problems.push_back(id + " k=" + std::to_string(want.tokens) + " " + fmt(pct) + "/" + fmt(pct_ns));
      }
    }
  }
  if (problems.empty()) return pass(std::to_string(report.cells.size()) + " cells within range");
  std::string d;
  for (const auto& p : problems) d += (d.empty() ? "" : "; ") + p;
  return fail(d);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"KN normalization", kn_normalization},
      {"reference ARPA agreement", reference_agreement},
      {"hand-derived KN values", hand_oracle},
      {"tokenizer fixtures", tokenizer_fixtures},
      {"regression oracle", regression_oracle},
      {"nesting bound", nesting_bound},
      {"rank-sum exactness", wilcoxon_exactness},
      {"generative check", generative_check},
      {"whole vs split", whole_vs_split},
      {"licensed-data magnitudes", licensed_magnitudes},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = fail(std::string("exception: ") + e.what());
    }
    const char* tag = r.outcome == Outcome::Pass ? "PASS" : (r.outcome == Outcome::Skip ? "SKIP" : "FAIL");
    failures += r.outcome == Outcome::Fail;
    std::cout << "[" << tag << "] " << std::setw(2) << (i + 1) << " " << criteria[i].first << ": " << r.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed or skipped" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
