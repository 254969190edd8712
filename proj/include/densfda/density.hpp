#pragma once

#include <span>
#include <vector>

#include "densfda/grid.hpp"

namespace densfda {

inline constexpr double kDefaultFloor = 1e-6;
inline constexpr double kMassTolerance = 1e-10;

/// Density on a uniform grid: finite, nonnegative, unit trapezoidal mass.
///
/// Instances come out of normalize() (or checked construction through
/// from_values()), so every DensityFn in the library satisfies the mass
/// invariant to kMassTolerance.
class DensityFn;
DensityFn normalize(const GridFn& raw, double floor);

class DensityFn {
 public:
  // Validates without modifying; throws if the invariants do not hold.
  static DensityFn from_values(Grid grid, std::vector<double> values);

  const Grid& grid() const noexcept { return fn_.grid; }
  const std::vector<double>& values() const noexcept { return fn_.values; }
  const GridFn& fn() const noexcept { return fn_; }

  double operator()(double x) const { return fn_(x); }
  double min_value() const;

 private:
  friend DensityFn normalize(const GridFn& raw, double floor);
  explicit DensityFn(GridFn fn) : fn_(std::move(fn)) {}
  GridFn fn_;
};

/// Cumulative distribution on the density's grid; values[0] = 0, values[m-1] = 1.
struct CdfFn {
  Grid grid;
  std::vector<double> values;
};

/// Quantile function on a probability grid over [0, 1].
struct QuantileFn {
  Grid tgrid;
  double support_lo;
  double support_hi;
  std::vector<double> values;
};

struct QuantileDensityFn {
  Grid tgrid;
  std::vector<double> values;
};

struct HazardFn {
  Grid grid;
  std::vector<double> values;
};

/// Clamps below at floor, rescales to unit mass, and enforces the floor again
/// if rescaling pushed values under it. Input that is already a floored,
/// normalized density is returned unchanged.
DensityFn normalize(const GridFn& raw, double floor = kDefaultFloor);

CdfFn to_cdf(const DensityFn& f);

/// Inverts the piecewise-linear CDF. Flat spans resolve to their left end;
/// a flat span wider than one cell is NotInvertible.
QuantileFn to_quantile(const CdfFn& cdf, const Grid& tgrid);

/// Left-limit generalized inverse of piecewise-linear (xs, cdf) at level t.
double invert_cdf(std::span<const double> xs, std::span<const double> cdf, double t);

QuantileDensityFn to_quantile_density(const DensityFn& f, const Grid& tgrid);

/// f / (1 - F) on [lo, lo + (1 - delta) * width].
HazardFn to_hazard(const DensityFn& f, double delta);

double dist_l2(const GridFn& f, const GridFn& g);
double dist_l2(const DensityFn& f, const DensityFn& g);
double dist_sup(const GridFn& f, const GridFn& g);
double dist_sup(const DensityFn& f, const DensityFn& g);

/// L2 distance between quantile functions, integrated exactly for the
/// piecewise-linear CDFs of both densities. Grids must share a support but
/// may differ in resolution.
double dist_wasserstein(const DensityFn& f, const DensityFn& g);

/// Moves a density on grid [lo, hi] onto the same number of points on
/// [new_lo, new_hi], rescaling values so that mass is preserved.
DensityFn affine_map(const DensityFn& f, double new_lo, double new_hi);

}  // namespace densfda
