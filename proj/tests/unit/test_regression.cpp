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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "segsurp/error.hpp"
#include "segsurp/regression.hpp"

using namespace segsurp;

namespace {

using Matrix = std::vector<std::vector<double>>;

// Solves (A'A) b = A'y by Gauss-Jordan elimination with partial pivoting
// and returns b together with (A'A)^-1.
struct Oracle {
  std::vector<double> beta;
  Matrix inverse;
  double rss = 0.0;
};

Oracle normal_equations(const Matrix& a, const std::vector<double>& y) {
  const std::size_t n = a.size();
  const std::size_t k = a[0].size();
  Matrix m(k, std::vector<double>(2 * k + 1, 0.0));
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
      for (std::size_t j = 0; j < 2 * k + 1; ++j) m[r][j] -= f * m[c][j];
    }
  }
  Oracle o;
  for (std::size_t i = 0; i < k; ++i) {
    o.beta.push_back(m[i][2 * k]);
    o.inverse.emplace_back(m[i].begin() + static_cast<std::ptrdiff_t>(k), m[i].begin() + static_cast<std::ptrdiff_t>(2 * k));
  }
  for (std::size_t r = 0; r < n; ++r) {
    double pred = 0.0;
    for (std::size_t j = 0; j < k; ++j) pred += a[r][j] * o.beta[j];
    o.rss += (y[r] - pred) * (y[r] - pred);
  }
  return o;
}

struct Fixture {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> names;
};

Fixture random_fixture(std::uint64_t seed, std::size_t n = 50, std::size_t p = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Fixture f;
  f.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  f.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < p; ++j) f.names.push_back("x" + std::to_string(j));
  for (Eigen::Index i = 0; i < f.x.rows(); ++i) {
    double y = 1.5;
    for (Eigen::Index j = 0; j < f.x.cols(); ++j) {
      f.x(i, j) = z(rng) * static_cast<double>(j + 1);
      y += 0.7 * static_cast<double>(j) * f.x(i, j);
    }
    f.y(i) = y + z(rng);
  }
  return f;
}

Matrix with_intercept(const Eigen::MatrixXd& x) {
  Matrix a(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    a[static_cast<std::size_t>(i)].push_back(1.0);
    for (Eigen::Index j = 0; j < x.cols(); ++j) a[static_cast<std::size_t>(i)].push_back(x(i, j));
  }
  return a;
}

}  // namespace

TEST_CASE("OLS matches the normal-equations oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto f = random_fixture(seed);
    const auto fit = fit_ols(f.x, f.y, f.names);
    const std::vector<double> y(f.y.data(), f.y.data() + f.y.size());
    const auto o = normal_equations(with_intercept(f.x), y);
    const double n = 50.0;
    for (std::size_t j = 0; j < o.beta.size(); ++j) CHECK(std::fabs(fit.coefficients(static_cast<Eigen::Index>(j)) - o.beta[j]) < 1e-8);
    CHECK(std::fabs(fit.rss - o.rss) < 1e-8);
    const double ll = -n / 2.0 * (std::log(2.0 * std::numbers::pi * o.rss / n) + 1.0);
    CHECK(std::fabs(fit.loglik - ll) < 1e-8);
    double mean = 0.0;
    for (double v : y) mean += v / n;
    double sst = 0.0;
    for (double v : y) sst += (v - mean) * (v - mean);
    CHECK(std::fabs(fit.r2 - (1.0 - o.rss / sst)) < 1e-8);

    const auto tests = coefficient_tests(fit);
    const double s2 = o.rss / (n - 3.0 - 1.0);
    for (std::size_t j = 0; j < o.beta.size(); ++j) {
      const double t = o.beta[j] / std::sqrt(s2 * o.inverse[j][j]);
      CHECK(std::fabs(tests[j].t - t) < 1e-8);
    }
  }
}

TEST_CASE("loglik recomputed from residuals equals the stored value") {
  const auto f = random_fixture(99, 80, 4);
  const auto fit = fit_ols(f.x, f.y, f.names);
  CHECK(std::fabs(evaluate_loglik(fit, f.x, f.y) - fit.loglik) < 1e-10);
}

TEST_CASE("residuals are orthogonal to every predictor") {
  const auto f = random_fixture(5, 200, 4);
  const auto fit = fit_ols(f.x, f.y, f.names);
  const Eigen::VectorXd resid = f.y - predict(fit, f.x);
  CHECK(std::fabs(resid.sum()) < 1e-8 * 200);
  for (Eigen::Index j = 0; j < f.x.cols(); ++j) {
    const Eigen::VectorXd col = f.x.col(j) / f.x.col(j).norm();
    CHECK(std::fabs(resid.dot(col)) < 1e-8 * 200);
  }
}

TEST_CASE("scaling a predictor leaves the fit unchanged") {
  const auto f = random_fixture(8, 60, 3);
  auto scaled = f.x;
  scaled.col(1) *= 1000.0;
  const auto a = fit_ols(f.x, f.y, f.names);
  const auto b = fit_ols(scaled, f.y, f.names);
  CHECK(b.loglik == doctest::Approx(a.loglik).epsilon(1e-12));
  CHECK(b.r2 == doctest::Approx(a.r2).epsilon(1e-12));
  CHECK(b.coefficients(2) * 1000.0 == doctest::Approx(a.coefficients(2)).epsilon(1e-9));
  CHECK((predict(b, scaled) - predict(a, f.x)).cwiseAbs().maxCoeff() < 1e-9);
  const auto ta = coefficient_tests(a);
  const auto tb = coefficient_tests(b);
  for (std::size_t j = 0; j < ta.size(); ++j) CHECK(tb[j].t == doctest::Approx(ta[j].t).epsilon(1e-9));
}

TEST_CASE("exact linear fit") {
  Eigen::MatrixXd x(6, 1);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = i;
    y(i) = 2.0 + 3.0 * i;
  }
  const auto fit = fit_ols(x, y, {"x"});
  CHECK(fit.coefficients(0) == doctest::Approx(2.0));
  CHECK(fit.coefficients(1) == doctest::Approx(3.0));
  CHECK(fit.r2 == doctest::Approx(1.0));
  CHECK(fit.exact_fit());
  CHECK(std::isfinite(fit.loglik));
  CHECK(fit.loglik == doctest::Approx(mle_loglik(6, kSigma2Floor)));
  std::vector<std::string> warnings;
  const auto tests = coefficient_tests(fit, &warnings);
  CHECK_FALSE(warnings.empty());
  CHECK(std::isinf(tests[1].t));
  CHECK(tests[1].p == 0.0);
  CHECK(fit_report(fit)["coefficients"][1]["t"].is_null());
}

TEST_CASE("constant response") {
  const auto f = random_fixture(3, 30, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 7.0);
  const auto fit = fit_ols(f.x, y, f.names);
  CHECK(fit.coefficients(0) == doctest::Approx(7.0));
  CHECK(std::fabs(fit.coefficients(1)) < 1e-10);
  CHECK(std::fabs(fit.coefficients(2)) < 1e-10);
}

TEST_CASE("design errors") {
  auto f = random_fixture(4, 40, 3);
  f.x.col(2) = 2.0 * f.x.col(0);
  CHECK_THROWS_WITH_AS(fit_ols(f.x, f.y, f.names), doctest::Contains("x"), SingularDesignError);

  Eigen::MatrixXd tiny(3, 2);
  tiny << 1, 2, 3, 4, 5, 7;
  CHECK_THROWS_AS(fit_ols(tiny, Eigen::Vector3d(1, 2, 3), {"a", "b"}), ValidationError);
}

TEST_CASE("t-test p-values are calibrated under the null") {
  // Response independent of the predictor: p-values should be uniform.
  std::size_t below_05 = 0;
  std::size_t below_50 = 0;
  const int sims = 1000;
  for (int s = 0; s < sims; ++s) {
    std::mt19937_64 rng(1000 + s);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(100, 1);
    Eigen::VectorXd y(100);
    for (int i = 0; i < 100; ++i) {
      x(i, 0) = z(rng);
      y(i) = z(rng);
    }
    const double p = coefficient_tests(fit_ols(x, y, {"x"}))[1].p;
    below_05 += p < 0.05;
    below_50 += p < 0.5;
  }
  CHECK(below_05 > 30);
  CHECK(below_05 < 72);
  CHECK(below_50 > 450);
  CHECK(below_50 < 550);
}

namespace {

std::vector<FeatureRow> synthetic_rows(std::uint64_t seed, std::size_t n, double beta_s) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(1.0, 12.0);
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow r;
    r.text_id = "t";
    r.word_index = i;
    r.surprisal = {u(rng)};
    r.length = {std::round(u(rng))};
    r.log_freq = {u(rng)};
    r.rt_ms = 200 + beta_s * r.surprisal[0] + 0.5 * r.length[0] - 0.3 * r.log_freq[0] + z(rng);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

TEST_CASE("delta loglik") {
  const auto rows = synthetic_rows(17, 300, 2.0);
  const auto base = control_predictors(0);
  const auto full = surprisal_predictors(0);
  CHECK(delta_loglik(rows, base, base).value == 0.0);
  CHECK_THROWS_AS(delta_loglik(rows, full, base), ConfigError);

  const double d = delta_loglik(rows, base, full).value;
  const auto b = fit_ols(rows, base);
  const auto f = fit_ols(rows, full);
  CHECK(std::fabs(d - (f.loglik - b.loglik) / 300.0) < 1e-10);
  CHECK(d > 0.0);

  auto noise = synthetic_rows(18, 300, 0.0);
  const double dn = delta_loglik(noise, base, full).value;
  CHECK(dn >= 0.0);
  CHECK(dn < 0.02);

  // Held out: coefficients and sigma2 come from the training rows.
  const std::vector<FeatureRow> train(rows.begin(), rows.begin() + 200);
  const std::vector<FeatureRow> test(rows.begin() + 200, rows.end());
  const auto held = delta_loglik(train, test, base, full);
  const auto bt = fit_ols(train, base);
  const auto ft = fit_ols(train, full);
  const Eigen::VectorXd y = response(test);
  const double expected =
      (evaluate_loglik(ft, design_matrix(test, full), y) - evaluate_loglik(bt, design_matrix(test, base), y)) / 100.0;
  CHECK(held.value == expected);
  CHECK(held.n == 100);
}

TEST_CASE("Cohen's f2") {
  RegressionFit base;
  RegressionFit full;
  base.n = full.n = 10;
  base.r2 = 0.10;
  full.r2 = 0.12;
  CHECK(cohens_f2(base, full) == doctest::Approx(0.02 / 0.88));
  full.r2 = 0.10;
  CHECK(cohens_f2(base, full) == 0.0);
  full.r2 = 1.0;
  CHECK_THROWS_AS(cohens_f2(base, full), InfiniteEffectError);
  full.r2 = 0.5;
  full.n = 11;
  CHECK_THROWS_AS(cohens_f2(base, full), ValidationError);
}

TEST_CASE("fit report") {
  const auto f = random_fixture(2);
  const auto j = fit_report(fit_ols(f.x, f.y, f.names));
  CHECK(j["n"] == 50);
  CHECK(j["p"] == 3);
  CHECK(j["coefficients"].size() == 4);
  CHECK(j["coefficients"][0]["name"] == "(intercept)");
  for (const char* key : {"estimate", "std_error", "t", "p"}) CHECK(j["coefficients"][1].contains(key));
}
