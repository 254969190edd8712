#include "densfda/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "densfda/error.hpp"

namespace densfda {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite function value");
  }
}

// Raises every value below floor to floor while keeping unit mass: values in
// the floored set S are pinned and the rest scaled by a common c <= 1.
void enforce_floor(std::vector<double>& v, std::span<const double> w, double floor) {
  std::vector<char> pinned(v.size(), 0);
  for (std::size_t j = 0; j < v.size(); ++j) pinned[j] = v[j] < floor ? 1 : 0;
  double c = 1.0;
  for (std::size_t iter = 0; iter <= v.size(); ++iter) {
    double fixed = 0.0;
    double free = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (pinned[j]) {
        fixed += w[j] * floor;
      } else {
        free += w[j] * v[j];
      }
    }
    if (free <= 0.0) throw Error(ErrorCode::InvalidArgument, "floor leaves no free mass");
    c = (1.0 - fixed) / free;
    bool grew = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (!pinned[j] && c * v[j] < floor) {
        pinned[j] = 1;
        grew = true;
      }
    }
    if (!grew) break;
  }
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = pinned[j] ? floor : c * v[j];
}

double quantile_right(std::span<const double> xs, std::span<const double> cdf, double t) {
  const std::size_t m = xs.size();
  const auto j = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), t) - cdf.begin());
  if (j == 0) return xs.front();
  if (j == m) return xs.back();
  return xs[j - 1] + (t - cdf[j - 1]) / (cdf[j] - cdf[j - 1]) * (xs[j] - xs[j - 1]);
}

}  // namespace

DensityFn DensityFn::from_values(Grid grid, std::vector<double> values) {
  GridFn fn(grid, std::move(values));
  require_finite(fn.values);
  for (double v : fn.values) {
    if (v < 0.0) throw Error(ErrorCode::InvalidArgument, "density has a negative value");
  }
  const double mass = quad::integrate(fn.grid, fn.values);
  if (std::abs(mass - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::InvalidArgument, "density mass " + std::to_string(mass) + " is not 1");
  }
  return DensityFn(std::move(fn));
}

double DensityFn::min_value() const {
  return *std::min_element(fn_.values.begin(), fn_.values.end());
}

DensityFn normalize(const GridFn& raw, double floor) {
  require_finite(raw.values);
  if (!std::isfinite(floor) || floor < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "floor must be finite and nonnegative");
  }
  if (floor * raw.grid.width() >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "floor times support width must be below 1");
  }
  if (std::none_of(raw.values.begin(), raw.values.end(), [](double v) { return v > 0.0; })) {
    throw Error(ErrorCode::AllZero, "function has no positive values");
  }

  std::vector<double> v(raw.values);
  bool clamped = false;
  for (double& x : v) {
    if (x < floor) {
      x = floor;
      clamped = true;
    }
  }
  const double mass = quad::integrate(raw.grid, v);
  if (!clamped && std::abs(mass - 1.0) <= 1e-12) return DensityFn(GridFn(raw.grid, std::move(v)));

  for (double& x : v) x /= mass;
  if (*std::min_element(v.begin(), v.end()) < floor) {
    enforce_floor(v, raw.grid.trapezoid_weights(), floor);
  }
  return DensityFn(GridFn(raw.grid, std::move(v)));
}

CdfFn to_cdf(const DensityFn& f) {
  std::vector<double> c = quad::cumulative(f.grid(), f.values());
  const double total = c.back();
  for (double& x : c) x /= total;
  c.front() = 0.0;
  c.back() = 1.0;
  return CdfFn{f.grid(), std::move(c)};
}

double invert_cdf(std::span<const double> xs, std::span<const double> cdf, double t) {
  if (t <= 0.0) return xs.front();
  if (t >= 1.0) return xs.back();
  const auto j = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), t) - cdf.begin());
  if (j == 0) return xs.front();
  if (j >= xs.size()) return xs.back();
  if (cdf[j] == t) return xs[j];
  return xs[j - 1] + (t - cdf[j - 1]) / (cdf[j] - cdf[j - 1]) * (xs[j] - xs[j - 1]);
}

QuantileFn to_quantile(const CdfFn& cdf, const Grid& tgrid) {
  if (tgrid.lo() != 0.0 || tgrid.hi() != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "probability grid must span [0, 1]");
  }
  const auto& F = cdf.values;
  for (std::size_t j = 0; j + 2 < F.size(); ++j) {
    if (F[j] == F[j + 1] && F[j + 1] == F[j + 2]) {
      throw Error(ErrorCode::NotInvertible, "CDF is flat over more than one grid cell");
    }
  }
  const std::vector<double> xs = cdf.grid.points();
  std::vector<double> q(tgrid.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = invert_cdf(xs, F, tgrid[i]);
  q.front() = cdf.grid.lo();
  q.back() = cdf.grid.hi();
  return QuantileFn{tgrid, cdf.grid.lo(), cdf.grid.hi(), std::move(q)};
}

QuantileDensityFn to_quantile_density(const DensityFn& f, const Grid& tgrid) {
  const QuantileFn q = to_quantile(to_cdf(f), tgrid);
  std::vector<double> out(tgrid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / f(q.values[i]);
  return QuantileDensityFn{tgrid, std::move(out)};
}

HazardFn to_hazard(const DensityFn& f, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  const Grid& g = f.grid();
  // Survival accumulated from the right keeps precision where F is near 1.
  const std::size_t m = g.size();
  std::vector<double> surv(m, 0.0);
  const double half = 0.5 * g.spacing();
  for (std::size_t j = m - 1; j-- > 0;) {
    surv[j] = surv[j + 1] + half * (f.values()[j] + f.values()[j + 1]);
  }
  const double total = surv.front();
  for (double& s : surv) s /= total;
  const Grid hg(g.lo(), g.lo() + (1.0 - delta) * g.width(), m);
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) h[i] = f(hg[i]) / interp(g, surv, hg[i]);
  return HazardFn{hg, std::move(h)};
}

double dist_l2(const GridFn& f, const GridFn& g) {
  require_same_grid(f.grid, g.grid);
  std::vector<double> d(f.values.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = (f.values[j] - g.values[j]) * (f.values[j] - g.values[j]);
  return std::sqrt(std::max(0.0, quad::integrate(f.grid, d)));
}

double dist_l2(const DensityFn& f, const DensityFn& g) { return dist_l2(f.fn(), g.fn()); }

double dist_sup(const GridFn& f, const GridFn& g) {
  require_same_grid(f.grid, g.grid);
  double out = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j) out = std::max(out, std::abs(f.values[j] - g.values[j]));
  return out;
}

double dist_sup(const DensityFn& f, const DensityFn& g) { return dist_sup(f.fn(), g.fn()); }

double dist_wasserstein(const DensityFn& f, const DensityFn& g) {
  if (!f.grid().same_support(g.grid())) {
    throw Error(ErrorCode::SupportMismatch, "Wasserstein distance needs a common support");
  }
  const std::vector<double> xf = f.grid().points();
  const std::vector<double> xg = g.grid().points();
  const std::vector<double> Ff = to_cdf(f).values;
  const std::vector<double> Fg = to_cdf(g).values;

  std::vector<double> knots;
  knots.reserve(Ff.size() + Fg.size());
  std::merge(Ff.begin(), Ff.end(), Fg.begin(), Fg.end(), std::back_inserter(knots));
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  // Both quantile functions are linear between consecutive knots.
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double t0 = knots[k];
    const double t1 = knots[k + 1];
    const double a = quantile_right(xf, Ff, t0) - quantile_right(xg, Fg, t0);
    const double b = invert_cdf(xf, Ff, t1) - invert_cdf(xg, Fg, t1);
    acc += (t1 - t0) * (a * a + a * b + b * b) / 3.0;
  }
  return std::sqrt(std::max(0.0, acc));
}

DensityFn affine_map(const DensityFn& f, double new_lo, double new_hi) {
  const Grid g(new_lo, new_hi, f.grid().size());
  const double scale = f.grid().width() / g.width();
  std::vector<double> v(f.values());
  for (double& x : v) x *= scale;
  return DensityFn::from_values(g, std::move(v));
}

}  // namespace densfda
