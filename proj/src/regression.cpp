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

#include "segsurp/regression.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "segsurp/error.hpp"

namespace segsurp {
namespace {

constexpr double kRankThreshold = 1e-10;

bool is_subset(std::span<const Predictor> small, std::span<const Predictor> big) {
  return std::all_of(small.begin(), small.end(),
                     [&](const Predictor& p) { return std::find(big.begin(), big.end(), p) != big.end(); });
}

}  // namespace

double mle_loglik(std::size_t n, double sigma2) {
  const double s2 = std::max(sigma2, kSigma2Floor);
  return -0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
}

RegressionFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  if (static_cast<std::size_t>(y.size()) != n) throw ValidationError("response length does not match design rows");
  if (names.size() != p) throw ValidationError("predictor names do not match design columns");
  if (n <= p + 1) {
    throw ValidationError("need more than " + std::to_string(p + 1) + " rows to fit " + std::to_string(p) +
                          " predictors, got " + std::to_string(n));
  }

  Eigen::MatrixXd a(n, p + 1);
  a.col(0).setOnes();
  a.rightCols(p) = x;
  names.insert(names.begin(), "(intercept)");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(kRankThreshold);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < p + 1) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (std::size_t i = rank; i < p + 1; ++i) {
      if (!cols.empty()) cols += ", ";
      cols += names[static_cast<std::size_t>(perm[static_cast<Eigen::Index>(i)])];
    }
    throw SingularDesignError("design matrix is rank deficient (rank " + std::to_string(rank) + " of " +
                              std::to_string(p + 1) + "); collinear columns: " + cols);
  }

  RegressionFit fit;
  fit.names = std::move(names);
  fit.n = n;
  fit.p = p;
  fit.coefficients = qr.solve(y);
  const Eigen::VectorXd resid = y - a * fit.coefficients;
  fit.rss = resid.squaredNorm();
  fit.sigma2 = fit.rss / static_cast<double>(n);
  fit.loglik = mle_loglik(n, fit.sigma2);

  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  if (sst <= 0.0) {
    fit.r2 = fit.rss <= kSigma2Floor ? 1.0 : 0.0;
  } else {
    fit.r2 = std::clamp(1.0 - fit.rss / sst, 0.0, 1.0);
  }

  // (A'A)^-1 = P R^-1 R^-T P'
  const auto r = qr.matrixR().topLeftCorner(p + 1, p + 1).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r.solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  fit.xtx_inverse = qr.colsPermutation() * inner * qr.colsPermutation().transpose();
  return fit;
}

Eigen::MatrixXd design_matrix(std::span<const FeatureRow> rows, std::span<const Predictor> predictors) {
  Eigen::MatrixXd x(rows.size(), predictors.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < predictors.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = predictors[j].value(rows[i]);
    }
  }
  return x;
}

Eigen::VectorXd response(std::span<const FeatureRow> rows) {
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i].rt_ms;
  return y;
}

RegressionFit fit_ols(std::span<const FeatureRow> rows, std::span<const Predictor> predictors) {
  std::vector<std::string> names;
  for (const auto& p : predictors) names.push_back(p.name());
  return fit_ols(design_matrix(rows, predictors), response(rows), std::move(names));
}

Eigen::VectorXd predict(const RegressionFit& fit, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != fit.p) throw ValidationError("design has the wrong number of columns");
  return (x * fit.coefficients.tail(static_cast<Eigen::Index>(fit.p))).array() + fit.coefficients(0);
}

double evaluate_loglik(const RegressionFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const double s2 = std::max(fit.sigma2, kSigma2Floor);
  const double rss = (y - predict(fit, x)).squaredNorm();
  const double n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * s2) - rss / (2.0 * s2);
}

DeltaLogLik delta_loglik(std::span<const FeatureRow> rows, std::span<const Predictor> baseline,
                         std::span<const Predictor> full) {
  if (!is_subset(baseline, full)) throw ConfigError("baseline predictors must be a subset of the full set");
  const auto base = fit_ols(rows, baseline);
  const auto wide = fit_ols(rows, full);
  return {(wide.loglik - base.loglik) / static_cast<double>(rows.size()), rows.size()};
}

DeltaLogLik delta_loglik(std::span<const FeatureRow> train, std::span<const FeatureRow> test,
                         std::span<const Predictor> baseline, std::span<const Predictor> full) {
  if (!is_subset(baseline, full)) throw ConfigError("baseline predictors must be a subset of the full set");
  if (test.empty()) throw ValidationError("held-out set is empty");
  const auto base = fit_ols(train, baseline);
  const auto wide = fit_ols(train, full);
  const Eigen::VectorXd y = response(test);
  const double ll_base = evaluate_loglik(base, design_matrix(test, baseline), y);
  const double ll_full = evaluate_loglik(wide, design_matrix(test, full), y);
  return {(ll_full - ll_base) / static_cast<double>(test.size()), test.size()};
}

std::vector<CoefficientTest> coefficient_tests(const RegressionFit& fit, std::vector<std::string>* warnings) {
  const double df = static_cast<double>(fit.n) - static_cast<double>(fit.p) - 1.0;
  if (df <= 0) throw ValidationError("coefficient tests need n > p + 1");
  const double s2 = fit.rss / df;
  const bool exact = fit.exact_fit();
  if (exact && warnings) warnings->push_back("exact fit: residual variance is zero, p-values reported as 0");

  boost::math::students_t dist(df);
  std::vector<CoefficientTest> out;
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    CoefficientTest t;
    t.name = fit.names[j];
    t.estimate = fit.coefficients(jj);
    t.std_error = std::sqrt(std::max(0.0, s2 * fit.xtx_inverse(jj, jj)));
    if (exact) {
      if (t.estimate == 0.0) {
        t.t = 0.0;
        t.p = 1.0;
      } else {
        t.t = std::copysign(std::numeric_limits<double>::infinity(), t.estimate);
        t.p = 0.0;
      }
    } else {
      t.t = t.estimate / t.std_error;
      t.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t.t)));
    }
    out.push_back(std::move(t));
  }
  return out;
}

double cohens_f2(const RegressionFit& baseline, const RegressionFit& full) {
  if (baseline.n != full.n) throw ValidationError("Cohen's f2 needs fits on identical rows");
  const double denom = 1.0 - full.r2;
  if (denom <= 1e-15) throw InfiniteEffectError("full model explains all variance (r2 = 1); f2 is infinite");
  return (full.r2 - baseline.r2) / denom;
}

nlohmann::json fit_report(const RegressionFit& fit) {
  nlohmann::json j;
  j["n"] = fit.n;
  j["p"] = fit.p;
  j["r2"] = fit.r2;
  j["loglik"] = fit.loglik;
  j["sigma2"] = fit.sigma2;
  std::vector<std::string> warnings;
  auto& coefs = j["coefficients"] = nlohmann::json::array();
  for (const auto& t : coefficient_tests(fit, &warnings)) {
    // JSON has no infinity; exact fits serialize t as null.
    coefs.push_back({{"name", t.name},
                     {"estimate", t.estimate},
                     {"std_error", t.std_error},
                     {"t", std::isfinite(t.t) ? nlohmann::json(t.t) : nlohmann::json()},
                     {"p", t.p}});
  }
  j["warnings"] = warnings;
  return j;
}

}  // namespace segsurp
