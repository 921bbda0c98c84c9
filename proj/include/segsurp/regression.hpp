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

// Ordinary least squares with Gaussian log-likelihoods.
//
// Fits always include an intercept. sigma2 is the maximum-likelihood
// residual variance (RSS / n); the unbiased estimate RSS / (n - p - 1) is
// used only for standard errors.

#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsurp/surprisal.hpp"

namespace segsurp {

inline constexpr double kSigma2Floor = 1e-12;

struct RegressionFit {
  std::vector<std::string> names;  // "(intercept)" followed by predictor names
  Eigen::VectorXd coefficients;
  double sigma2 = 0.0;
  double loglik = 0.0;
  double r2 = 0.0;
  double rss = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;  // predictors, excluding the intercept
  Eigen::MatrixXd xtx_inverse;  // (X'X)^-1 including the intercept column

  bool exact_fit() const { return sigma2 <= kSigma2Floor; }
};

// -n/2 (ln(2 pi max(sigma2, floor)) + 1)
double mle_loglik(std::size_t n, double sigma2);

// X excludes the intercept column. Throws SingularDesignError naming the
// collinear columns, ValidationError if n <= p + 1.
RegressionFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names);
RegressionFit fit_ols(std::span<const FeatureRow> rows, std::span<const Predictor> predictors);

Eigen::MatrixXd design_matrix(std::span<const FeatureRow> rows, std::span<const Predictor> predictors);
Eigen::VectorXd response(std::span<const FeatureRow> rows);

Eigen::VectorXd predict(const RegressionFit& fit, const Eigen::MatrixXd& x);

// Gaussian log-likelihood of (x, y) under the fit's coefficients and sigma2.
double evaluate_loglik(const RegressionFit& fit, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct DeltaLogLik {
  double value = 0.0;  // per token
  std::size_t n = 0;
};

// In sample. Throws ConfigError unless baseline is a subset of full.
DeltaLogLik delta_loglik(std::span<const FeatureRow> rows, std::span<const Predictor> baseline,
                         std::span<const Predictor> full);
// Fits on `train`, scores `test`.
DeltaLogLik delta_loglik(std::span<const FeatureRow> train, std::span<const FeatureRow> test,
                         std::span<const Predictor> baseline, std::span<const Predictor> full);

struct CoefficientTest {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double t = 0.0;
  double p = 1.0;
};

// Two-sided t tests with n - p - 1 degrees of freedom. For an exact fit,
// nonzero estimates get t = +-inf and p = 0, zero estimates t = 0 and p = 1,
// and a warning is appended.
std::vector<CoefficientTest> coefficient_tests(const RegressionFit& fit, std::vector<std::string>* warnings = nullptr);

// (r2_full - r2_base) / (1 - r2_full). Throws InfiniteEffectError when
// r2_full is 1, ValidationError when the fits cover different row counts.
double cohens_f2(const RegressionFit& baseline, const RegressionFit& full);

nlohmann::json fit_report(const RegressionFit& fit);

}  // namespace segsurp
