#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "densfda/density.hpp"

namespace densfda {

/// Mean, ordered eigenpairs, and per-subject scores of a functional sample.
///
/// Eigenfunctions are orthonormal in the trapezoidal L2 inner product of
/// `grid`; eigenvalues are nonincreasing and nonnegative; scores is n x K with
/// column means zero up to round-off.
struct EigenSystem {
  Grid grid;
  std::vector<double> mean;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenfunctions;
  Eigen::MatrixXd scores;

  std::size_t components() const noexcept { return eigenvalues.size(); }
  GridFn eigenfunction(std::size_t k) const { return GridFn(grid, eigenfunctions.at(k)); }
};

struct Spectrum {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenfunctions;
};

/// Relative cutoff below which components are dropped by fpca().
inline constexpr double kEigenRelativeCutoff = 1e-12;

std::vector<double> cross_sectional_mean(const std::vector<GridFn>& sample);
DensityFn cross_sectional_mean(const std::vector<DensityFn>& sample);

/// n^-1 sum X_i(s) X_i(t) - mean(s) mean(t) on the grid.
Eigen::MatrixXd covariance(const std::vector<GridFn>& sample, const std::vector<double>& mean);

/// Eigenpairs of the covariance integral operator discretized with
/// trapezoidal weights (symmetric form W^1/2 C W^1/2). Returns the leading K
/// pairs; eigenfunctions have unit L2 norm and a positive largest-magnitude
/// entry; negative eigenvalues are clipped to zero.
Spectrum eigendecompose(const Eigen::MatrixXd& cov, const Grid& grid, std::size_t K);

/// Trapezoidal inner products of (X_i - mean) with each eigenfunction.
Eigen::MatrixXd scores(const std::vector<GridFn>& sample, const std::vector<double>& mean,
                       const std::vector<std::vector<double>>& eigenfunctions);

/// Full decomposition. Solves the smaller of the m x m operator problem and
/// the n x n Gram problem; both give the same eigenpairs. Components with
/// eigenvalue below kEigenRelativeCutoff times the largest are dropped, and at
/// most max_components are kept.
EigenSystem fpca(const std::vector<GridFn>& sample, std::size_t max_components = SIZE_MAX);
EigenSystem fpca(const std::vector<DensityFn>& sample, std::size_t max_components = SIZE_MAX);

/// mean + sum_{k<K} score_ik phi_k for every subject; K = 0 gives the mean.
std::vector<GridFn> truncate(const EigenSystem& system, std::size_t K);

/// Same expansion for an arbitrary score vector.
std::vector<double> expand(const EigenSystem& system, std::span<const double> coefficients);

/// mean + alpha sqrt(lambda_k) phi_k, k counted from 1.
GridFn mode_of_variation(const EigenSystem& system, std::size_t k, double alpha);

/// Positive part, floored and renormalized.
DensityFn project_to_density(const GridFn& fn, double floor = kDefaultFloor);

}  // namespace densfda
