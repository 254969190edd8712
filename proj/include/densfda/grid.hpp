#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace densfda {

/// Uniform grid lo + j * (hi - lo) / (m - 1), j = 0..m-1, with m >= 3.
class Grid {
 public:
  Grid(double lo, double hi, std::size_t m);

  static Grid unit(std::size_t m) { return Grid(0.0, 1.0, m); }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t size() const noexcept { return m_; }
  double width() const noexcept { return hi_ - lo_; }
  double spacing() const noexcept { return (hi_ - lo_) / static_cast<double>(m_ - 1); }

  // The last point is pinned to hi exactly.
  double operator[](std::size_t j) const noexcept {
    return j + 1 == m_ ? hi_ : lo_ + static_cast<double>(j) * spacing();
  }

  std::vector<double> points() const;
  std::vector<double> trapezoid_weights() const;

  // Same interval, possibly a different number of points.
  bool same_support(const Grid& other) const noexcept {
    return lo_ == other.lo_ && hi_ == other.hi_;
  }

  bool operator==(const Grid&) const = default;

 private:
  double lo_;
  double hi_;
  std::size_t m_;
};

/// A real function sampled on a grid.
struct GridFn {
  GridFn(Grid g, std::vector<double> v);

  Grid grid;
  std::vector<double> values;

  double operator()(double x) const;
};

namespace quad {

double integrate(const Grid& grid, std::span<const double> values);

// Running trapezoidal integral from lo; first entry is 0.
std::vector<double> cumulative(const Grid& grid, std::span<const double> values);

double inner(const Grid& grid, std::span<const double> a, std::span<const double> b);

}  // namespace quad

// Piecewise-linear interpolation on a uniform grid; constant extrapolation.
double interp(const Grid& grid, std::span<const double> values, double x);

// Piecewise-linear interpolation through increasing knots xs; constant
// extrapolation.
double interp_knots(std::span<const double> xs, std::span<const double> ys, double x);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace densfda
