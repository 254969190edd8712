#include "densfda/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "densfda/error.hpp"

namespace densfda {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::BadBandwidth: return "BadBandwidth";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateSigma: return "DegenerateSigma";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Grid::Grid(double lo, double hi, std::size_t m) : lo_(lo), hi_(hi), m_(m) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw Error(ErrorCode::InvalidArgument, "grid requires finite lo < hi");
  }
  if (m < 3) {
    throw Error(ErrorCode::InvalidArgument, "grid requires at least 3 points");
  }
}

std::vector<double> Grid::points() const {
  std::vector<double> out(m_);
  for (std::size_t j = 0; j < m_; ++j) out[j] = (*this)[j];
  return out;
}

std::vector<double> Grid::trapezoid_weights() const {
  std::vector<double> w(m_, spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

GridFn::GridFn(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "value count " + std::to_string(values.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid.size()));
  }
}

double GridFn::operator()(double x) const { return interp(grid, values, x); }

namespace quad {

double integrate(const Grid& grid, std::span<const double> values) {
  double inner_sum = 0.0;
  for (std::size_t j = 1; j + 1 < values.size(); ++j) inner_sum += values[j];
  return grid.spacing() * (inner_sum + 0.5 * (values.front() + values.back()));
}

std::vector<double> cumulative(const Grid& grid, std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  const double half = 0.5 * grid.spacing();
  for (std::size_t j = 1; j < values.size(); ++j) {
    out[j] = out[j - 1] + half * (values[j - 1] + values[j]);
  }
  return out;
}

double inner(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  const std::size_t m = a.size();
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < m; ++j) s += a[j] * b[j];
  return grid.spacing() * (s + 0.5 * (a[0] * b[0] + a[m - 1] * b[m - 1]));
}

}  // namespace quad

double interp(const Grid& grid, std::span<const double> values, double x) {
  const std::size_t m = grid.size();
  if (x <= grid.lo()) return values.front();
  if (x >= grid.hi()) return values.back();
  const double pos = (x - grid.lo()) / grid.spacing();
  auto j = static_cast<std::size_t>(pos);
  if (j >= m - 1) j = m - 2;
  const double frac = pos - static_cast<double>(j);
  return values[j] + frac * (values[j + 1] - values[j]);
}

double interp_knots(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double x0 = xs[j - 1];
  const double x1 = xs[j];
  if (x1 <= x0) return ys[j];
  return ys[j - 1] + (x - x0) / (x1 - x0) * (ys[j] - ys[j - 1]);
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "functions live on different grids");
}

}  // namespace densfda
