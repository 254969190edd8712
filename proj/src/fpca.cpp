#include "densfda/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "densfda/error.hpp"

namespace densfda {

namespace {

void require_sample(const std::vector<GridFn>& sample) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "empty sample");
  for (const auto& s : sample) require_same_grid(s.grid, sample.front().grid);
}

std::vector<GridFn> as_fns(const std::vector<DensityFn>& sample) {
  std::vector<GridFn> out;
  out.reserve(sample.size());
  for (const auto& f : sample) out.push_back(f.fn());
  return out;
}

Eigen::MatrixXd centered_rows(const std::vector<GridFn>& sample, const std::vector<double>& mean) {
  const auto n = static_cast<Eigen::Index>(sample.size());
  const auto m = static_cast<Eigen::Index>(mean.size());
  Eigen::MatrixXd z(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) z(i, j) = sample[i].values[j] - mean[j];
  }
  return z;
}

void fix_sign(std::vector<double>& phi) {
  const auto it = std::max_element(phi.begin(), phi.end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (it != phi.end() && *it < 0.0) {
    for (double& v : phi) v = -v;
  }
}

}  // namespace

std::vector<double> cross_sectional_mean(const std::vector<GridFn>& sample) {
  require_sample(sample);
  std::vector<double> mean(sample.front().values.size(), 0.0);
  for (const auto& s : sample) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += s.values[j];
  }
  for (double& v : mean) v /= static_cast<double>(sample.size());
  return mean;
}

DensityFn cross_sectional_mean(const std::vector<DensityFn>& sample) {
  const auto fns = as_fns(sample);
  return normalize(GridFn(fns.front().grid, cross_sectional_mean(fns)), 0.0);
}

Eigen::MatrixXd covariance(const std::vector<GridFn>& sample, const std::vector<double>& mean) {
  require_sample(sample);
  const Eigen::MatrixXd z = centered_rows(sample, mean);
  Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(sample.size());
  // Exact symmetry.
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

Spectrum eigendecompose(const Eigen::MatrixXd& cov, const Grid& grid, std::size_t K) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  if (cov.rows() != m || cov.cols() != m) throw Error(ErrorCode::GridMismatch, "covariance size mismatch");
  if (!cov.isApprox(cov.transpose(), 1e-12) && (cov - cov.transpose()).norm() > 1e-12) {
    throw Error(ErrorCode::NotSymmetric, "covariance surface is not symmetric");
  }
  if (K > grid.size()) throw Error(ErrorCode::KTooLarge, "more components requested than grid points");

  const std::vector<double> w = grid.trapezoid_weights();
  Eigen::VectorXd sw(m);
  for (Eigen::Index j = 0; j < m; ++j) sw(j) = std::sqrt(w[j]);
  Eigen::MatrixXd a = sw.asDiagonal() * cov * sw.asDiagonal();
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);

  Spectrum out;
  for (std::size_t k = 0; k < K; ++k) {
    const Eigen::Index col = m - 1 - static_cast<Eigen::Index>(k);
    out.eigenvalues.push_back(std::max(0.0, solver.eigenvalues()(col)));
    std::vector<double> phi(grid.size());
    for (Eigen::Index j = 0; j < m; ++j) phi[j] = solver.eigenvectors()(j, col) / sw(j);
    fix_sign(phi);
    out.eigenfunctions.push_back(std::move(phi));
  }
  return out;
}

Eigen::MatrixXd scores(const std::vector<GridFn>& sample, const std::vector<double>& mean,
                       const std::vector<std::vector<double>>& eigenfunctions) {
  require_sample(sample);
  const Grid& grid = sample.front().grid;
  if (mean.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "mean size mismatch");
  const auto n = static_cast<Eigen::Index>(sample.size());
  const auto K = static_cast<Eigen::Index>(eigenfunctions.size());
  Eigen::MatrixXd out(n, K);
  std::vector<double> centered(grid.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < centered.size(); ++j) centered[j] = sample[i].values[j] - mean[j];
    for (Eigen::Index k = 0; k < K; ++k) {
      if (eigenfunctions[k].size() != grid.size()) throw Error(ErrorCode::GridMismatch, "eigenfunction size mismatch");
      out(i, k) = quad::inner(grid, centered, eigenfunctions[k]);
    }
  }
  return out;
}

EigenSystem fpca(const std::vector<GridFn>& sample, std::size_t max_components) {
  require_sample(sample);
  const Grid grid = sample.front().grid;
  const std::size_t n = sample.size();
  const std::size_t m = grid.size();
  std::vector<double> mean = cross_sectional_mean(sample);
  const std::size_t rank_cap = std::min({max_components, m, n > 1 ? n - 1 : std::size_t{0}});

  std::vector<double> values;
  std::vector<std::vector<double>> functions;
  if (rank_cap > 0 && n < m) {
    // Gram route: G = Z W Z^T / n shares its nonzero spectrum with the
    // operator; phi = Z^T u / sqrt(n lambda).
    const Eigen::MatrixXd z = centered_rows(sample, mean);
    const std::vector<double> w = grid.trapezoid_weights();
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(m));
    Eigen::MatrixXd gram = (z * wv.asDiagonal() * z.transpose()) / static_cast<double>(n);
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const auto nn = static_cast<Eigen::Index>(n);
    for (std::size_t k = 0; k < rank_cap; ++k) {
      const Eigen::Index col = nn - 1 - static_cast<Eigen::Index>(k);
      const double lambda = solver.eigenvalues()(col);
      if (!(lambda > 0.0)) break;
      const Eigen::VectorXd phi_v = z.transpose() * solver.eigenvectors().col(col) /
                                    std::sqrt(static_cast<double>(n) * lambda);
      std::vector<double> phi(phi_v.data(), phi_v.data() + m);
      // Re-normalize against round-off in the trapezoidal norm.
      const double norm = std::sqrt(quad::inner(grid, phi, phi));
      for (double& v : phi) v /= norm;
      fix_sign(phi);
      values.push_back(lambda);
      functions.push_back(std::move(phi));
    }
  } else if (rank_cap > 0) {
    Spectrum s = eigendecompose(covariance(sample, mean), grid, rank_cap);
    values = std::move(s.eigenvalues);
    functions = std::move(s.eigenfunctions);
  }

  std::size_t keep = 0;
  const double top = values.empty() ? 0.0 : values.front();
  while (keep < values.size() && values[keep] > 0.0 && values[keep] >= kEigenRelativeCutoff * top) ++keep;
  values.resize(keep);
  functions.resize(keep);

  EigenSystem sys{grid, std::move(mean), std::move(values), std::move(functions), {}};
  sys.scores = scores(sample, sys.mean, sys.eigenfunctions);
  return sys;
}

EigenSystem fpca(const std::vector<DensityFn>& sample, std::size_t max_components) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "empty sample");
  return fpca(as_fns(sample), max_components);
}

std::vector<double> expand(const EigenSystem& system, std::span<const double> coefficients) {
  if (coefficients.size() > system.components()) {
    throw Error(ErrorCode::KTooLarge, "more coefficients than components");
  }
  std::vector<double> out(system.mean);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const auto& phi = system.eigenfunctions[k];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += coefficients[k] * phi[j];
  }
  return out;
}

std::vector<GridFn> truncate(const EigenSystem& system, std::size_t K) {
  if (K > system.components()) throw Error(ErrorCode::KTooLarge, "K exceeds stored components");
  std::vector<GridFn> out;
  const auto n = static_cast<std::size_t>(system.scores.rows());
  out.reserve(n);
  std::vector<double> coef(K);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) coef[k] = system.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    out.emplace_back(system.grid, expand(system, coef));
  }
  return out;
}

GridFn mode_of_variation(const EigenSystem& system, std::size_t k, double alpha) {
  if (k == 0 || k > system.components()) throw Error(ErrorCode::KTooLarge, "mode index out of range");
  std::vector<double> out(system.mean);
  const double scale = alpha * std::sqrt(system.eigenvalues[k - 1]);
  const auto& phi = system.eigenfunctions[k - 1];
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += scale * phi[j];
  return GridFn(system.grid, std::move(out));
}

DensityFn project_to_density(const GridFn& fn, double floor) {
  std::vector<double> pos(fn.values);
  for (double& v : pos) v = std::max(v, 0.0);
  if (!(quad::integrate(fn.grid, pos) > 0.0)) {
    throw Error(ErrorCode::AllZero, "positive part has no mass");
  }
  return normalize(GridFn(fn.grid, std::move(pos)), floor);
}

}  // namespace densfda
