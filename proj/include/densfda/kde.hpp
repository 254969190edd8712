#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "densfda/density.hpp"

namespace densfda {

enum class KernelFamily { gaussian, epanechnikov, uniform };

/// Symmetric kernel with closed-form partial integrals.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;

  double operator()(double u) const;
  // Integral of the kernel over [a, b].
  double integral(double a, double b) const;

  static KernelSpec parse(std::string_view name);
  std::string_view name() const;
};

/// Bandwidth is expressed on the support mapped to [0, 1] and must lie in (0, 0.5).
struct KdeConfig {
  double bandwidth;
  KernelSpec kernel;
  Grid grid;
  double floor = kDefaultFloor;
};

/// Boundary weight w(x, h) for x in [0, 1]: the reciprocal kernel mass that
/// stays inside the unit interval near either end, 1 in the interior.
double boundary_weight(double x, double h, const KernelSpec& kernel);

/// Boundary-corrected kernel estimate on cfg.grid. Samples are mapped
/// affinely from [grid.lo, grid.hi] to [0, 1]; the normalizing integral is the
/// trapezoidal rule on the same grid, so the result has unit mass exactly.
DensityFn estimate_density(std::span<const double> samples, const KdeConfig& cfg);

/// N^(-1/3), clamped into (0, 0.49].
double default_bandwidth(std::size_t n);

}  // namespace densfda
