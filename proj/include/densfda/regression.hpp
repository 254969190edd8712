#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "densfda/density.hpp"
#include "densfda/fpca.hpp"

namespace densfda {

/// Predictors for scalar-on-density regression: ordinary FPC scores of the
/// densities, or FPC scores of their log quantile densities.
enum class ScoreMethod { fpca, lqd };

ScoreMethod parse_score_method(std::string_view name);
std::string_view to_string(ScoreMethod method);

struct FlrModel {
  double intercept = 0.0;
  std::vector<double> coefficients;  // zero for dropped columns
  double r2 = 0.0;
  // Trailing score columns removed because the design was singular.
  std::size_t dropped = 0;

  std::size_t K() const noexcept { return coefficients.size(); }
};

/// OLS of y on [1, scores]. A singular design loses trailing columns until
/// it has full rank unless allow_drop is false, which raises RankDeficient.
FlrModel fit_flr(const Eigen::MatrixXd& scores, std::span<const double> y, bool allow_drop = true);

std::vector<double> predict(const FlrModel& model, const Eigen::MatrixXd& scores);

struct ScoreBasis {
  ScoreMethod method = ScoreMethod::fpca;
  EigenSystem system;
};

ScoreBasis fit_basis(const std::vector<DensityFn>& train, ScoreMethod method, std::size_t K);

/// n x components scores of new densities against a fitted basis.
Eigen::MatrixXd project(const ScoreBasis& basis, const std::vector<DensityFn>& densities);

struct CvOptions {
  std::size_t folds = 10;
  std::size_t repeats = 50;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
};

/// Repeated K-fold prediction error. Each repeat shuffles with its own
/// stream; each fold refits the basis on its training subjects only.
double cv_mse(const std::vector<DensityFn>& densities, std::span<const double> y, ScoreMethod method,
              std::size_t K, const CvOptions& opts = {});

struct RegressionRow {
  std::size_t K = 0;
  double r2 = 0.0;
  double cv_mse = 0.0;
  std::size_t dropped = 0;
};

std::vector<RegressionRow> regression_table(const std::vector<DensityFn>& densities, std::span<const double> y,
                                            ScoreMethod method, std::span<const std::size_t> Ks,
                                            const CvOptions& opts = {});

}  // namespace densfda
