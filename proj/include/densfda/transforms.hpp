#pragma once

#include <string_view>
#include <vector>

#include "densfda/density.hpp"

namespace densfda {

enum class TransformKind { log_hazard, log_quantile_density };

struct TransformSpec {
  TransformKind kind = TransformKind::log_quantile_density;
  double delta = 0.1;  // log hazard only: the domain is [0, 1 - delta]

  static TransformSpec lqd() { return {TransformKind::log_quantile_density, 0.1}; }
  static TransformSpec log_hazard(double delta = 0.1) { return {TransformKind::log_hazard, delta}; }

  void validate() const;
  std::string_view name() const;
};

/// Hilbert-space representative X = psi(f).
///
/// tgrid is [0, 1] for the LQD transform and [0, 1 - delta] for log hazard;
/// xgrid records the native density grid so the inverse maps back onto it.
struct TransformedFn {
  Grid tgrid;
  std::vector<double> values;
  TransformSpec tag;
  Grid xgrid;

  TransformedFn with_values(std::vector<double> v) const;
  GridFn fn() const { return GridFn(tgrid, values); }
};

double dist_l2(const TransformedFn& a, const TransformedFn& b);
double dist_sup(const TransformedFn& a, const TransformedFn& b);

/// Log quantile density. Each grid value is the log of the quantile
/// increment over the node's dual cell divided by the cell's trapezoid
/// weight, so lqd_inverse reproduces the quantile function exactly at cell
/// boundaries even where the density sits on its floor.
TransformedFn lqd_forward(const DensityFn& f);

/// theta_X * exp(-X(F(x))) with F^-1(t) = theta_X^-1 * int_0^t exp(X),
/// theta_X the trapezoidal integral of exp(X); output floored and normalized.
DensityFn lqd_inverse(const TransformedFn& x, double floor = kDefaultFloor);

/// log f(t) - log(1 - F(t)) on [0, 1 - delta] of the unit-mapped density.
TransformedFn log_hazard_forward(const DensityFn& f, const TransformSpec& spec);

/// exp(X(x) - Lambda(x)) on [0, 1 - delta], remaining mass spread uniformly
/// over (1 - delta, 1], then floored and normalized on the native support.
DensityFn log_hazard_inverse(const TransformedFn& x, const TransformSpec& spec,
                             double floor = kDefaultFloor);

TransformedFn forward(const DensityFn& f, const TransformSpec& spec);
DensityFn inverse(const TransformedFn& x, double floor = kDefaultFloor);

}  // namespace densfda
