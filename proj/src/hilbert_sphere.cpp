#include "densfda/hilbert_sphere.hpp"

#include <algorithm>
#include <cmath>

#include "densfda/error.hpp"

namespace densfda {

namespace {

double norm(const Grid& grid, const std::vector<double>& v) {
  return std::sqrt(std::max(0.0, quad::inner(grid, v, v)));
}

void unitize(SpherePoint& p) {
  const double n = norm(p.grid, p.values);
  for (double& v : p.values) v /= n;
}

}  // namespace

SpherePoint sqrt_embed(const DensityFn& f) {
  SpherePoint p{f.grid(), f.values()};
  for (double& v : p.values) v = std::sqrt(v);
  return p;
}

DensityFn square_back(const SpherePoint& p, double floor) {
  std::vector<double> v(p.values);
  for (double& x : v) x *= x;
  return normalize(GridFn(p.grid, std::move(v)), floor);
}

double sphere_inner(const SpherePoint& p, const SpherePoint& q) {
  require_same_grid(p.grid, q.grid);
  return quad::inner(p.grid, p.values, q.values);
}

double geodesic_distance(const SpherePoint& p, const SpherePoint& q) {
  require_same_grid(p.grid, q.grid);
  std::vector<double> d(p.values.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = p.values[j] - q.values[j];
  const double chord = norm(p.grid, d);
  return 2.0 * std::asin(std::clamp(0.5 * chord, 0.0, 1.0));
}

std::vector<double> log_map(const SpherePoint& base, const SpherePoint& p) {
  const double theta = geodesic_distance(base, p);
  const double c = std::clamp(sphere_inner(base, p), -1.0, 1.0);
  const double scale = theta < 1e-12 ? 1.0 : theta / std::sin(theta);
  std::vector<double> v(p.values.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = scale * (p.values[j] - c * base.values[j]);
  return v;
}

SpherePoint exp_map(const SpherePoint& base, const std::vector<double>& v) {
  if (v.size() != base.values.size()) throw Error(ErrorCode::GridMismatch, "tangent vector size mismatch");
  const double len = norm(base.grid, v);
  SpherePoint out{base.grid, base.values};
  if (len == 0.0) return out;
  const double c = std::cos(len);
  const double s = std::sin(len) / len;
  for (std::size_t j = 0; j < v.size(); ++j) out.values[j] = c * base.values[j] + s * v[j];
  return out;
}

SpherePoint karcher_mean(const std::vector<SpherePoint>& sample, const KarcherOptions& opts) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "empty sample");
  const Grid& grid = sample.front().grid;
  for (const auto& p : sample) require_same_grid(p.grid, grid);
  const auto n = static_cast<double>(sample.size());

  // Start from the normalized extrinsic average.
  SpherePoint mu{grid, std::vector<double>(grid.size(), 0.0)};
  for (const auto& p : sample) {
    for (std::size_t j = 0; j < grid.size(); ++j) mu.values[j] += p.values[j] / n;
  }
  unitize(mu);

  std::vector<double> step(grid.size());
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    std::fill(step.begin(), step.end(), 0.0);
    for (const auto& p : sample) {
      const std::vector<double> v = log_map(mu, p);
      for (std::size_t j = 0; j < step.size(); ++j) step[j] += v[j] / n;
    }
    if (norm(grid, step) <= opts.tol) return mu;
    mu = exp_map(mu, step);
    unitize(mu);
  }
  throw Error(ErrorCode::NoConvergence, "Karcher iteration did not converge");
}

PgaResult pga(const std::vector<SpherePoint>& sample, std::size_t K, const KarcherOptions& opts) {
  SpherePoint mean = karcher_mean(sample, opts);
  std::vector<GridFn> tangents;
  tangents.reserve(sample.size());
  for (const auto& p : sample) tangents.emplace_back(mean.grid, log_map(mean, p));
  return PgaResult{std::move(mean), fpca(tangents, K)};
}

std::vector<DensityFn> hs_represent(const PgaResult& model, std::size_t K, double floor) {
  const EigenSystem& t = model.tangent;
  const std::size_t use = std::min(K, t.components());
  const auto n = static_cast<std::size_t>(t.scores.rows());
  std::vector<DensityFn> out;
  out.reserve(n);
  std::vector<double> coef(use);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < use; ++k) coef[k] = t.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    out.push_back(square_back(exp_map(model.mean, expand(t, coef)), floor));
  }
  return out;
}

std::vector<DensityFn> hs_represent(const std::vector<DensityFn>& sample, std::size_t K, double floor) {
  std::vector<SpherePoint> pts;
  pts.reserve(sample.size());
  for (const auto& f : sample) pts.push_back(sqrt_embed(f));
  return hs_represent(pga(pts), K, floor);
}

DensityFn hs_mode(const PgaResult& model, std::size_t k, double alpha, double floor) {
  const GridFn g = mode_of_variation(model.tangent, k, alpha);
  return square_back(exp_map(model.mean, g.values), floor);
}

DensityFn hs_mode(const std::vector<DensityFn>& sample, std::size_t k, double alpha, double floor) {
  std::vector<SpherePoint> pts;
  pts.reserve(sample.size());
  for (const auto& f : sample) pts.push_back(sqrt_embed(f));
  return hs_mode(pga(pts), k, alpha, floor);
}

}  // namespace densfda
