#include "densfda/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "densfda/error.hpp"

namespace densfda {

namespace {

constexpr double kExpLimit = 700.0;

// Boundaries of the dual cells around each node of a uniform [0, 1] grid:
// 0, dt/2, 3dt/2, ..., 1 - dt/2, 1.
std::vector<double> dual_boundaries(const Grid& tgrid) {
  const std::size_t m = tgrid.size();
  const double dt = tgrid.spacing();
  std::vector<double> b(m + 1);
  b.front() = 0.0;
  for (std::size_t k = 1; k < m; ++k) b[k] = (static_cast<double>(k) - 0.5) * dt;
  b.back() = 1.0;
  return b;
}

// Quantiles of the piecewise-linear density through (xs, f): the CDF is the
// exact running integral, quadratic on each cell.
class PiecewiseLinearQuantile {
 public:
  PiecewiseLinearQuantile(const Grid& grid, const std::vector<double>& f)
      : grid_(grid), f_(f), cum_(quad::cumulative(grid, f)) {
    const double total = cum_.back();
    for (double& c : cum_) c /= total;
    for (double& v : f_) v /= total;
  }

  double operator()(double t) const {
    if (t <= 0.0) return grid_.lo();
    if (t >= 1.0) return grid_.hi();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()) - 1, f_.size() - 2);
    const double h = grid_.spacing();
    const double a = (f_[i + 1] - f_[i]) / (2.0 * h);
    const double b = f_[i];
    const double r = t - cum_[i];
    const double disc = std::max(b * b + 4.0 * a * r, 0.0);
    const double denom = b + std::sqrt(disc);
    const double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
    return grid_[i] + std::clamp(s, 0.0, h);
  }

 private:
  const Grid& grid_;
  std::vector<double> f_;
  std::vector<double> cum_;
};

void require_tag(const TransformedFn& x, TransformKind kind) {
  if (x.tag.kind != kind) throw Error(ErrorCode::InvalidArgument, "transform kind mismatch");
  if (x.values.size() != x.tgrid.size()) throw Error(ErrorCode::GridMismatch, "value count mismatch");
  for (double v : x.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "transformed function is not finite");
  }
}

// Running integral of exp(X) from tgrid.lo with the Euler-Maclaurin end
// correction -dt^2/12 (g'(t) - g'(0)); fourth order for smooth X.
std::vector<double> cumulative_exp(const Grid& tgrid, const std::vector<double>& x) {
  const std::size_t m = x.size();
  const double dt = tgrid.spacing();
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) g[j] = std::exp(x[j]);
  std::vector<double> dg(m);
  dg[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt);
  dg[m - 1] = (3.0 * g[m - 1] - 4.0 * g[m - 2] + g[m - 3]) / (2.0 * dt);
  for (std::size_t j = 1; j + 1 < m; ++j) dg[j] = (g[j + 1] - g[j - 1]) / (2.0 * dt);
  std::vector<double> out = quad::cumulative(tgrid, g);
  for (std::size_t j = 1; j < m; ++j) {
    out[j] -= dt * dt / 12.0 * (dg[j] - dg[0]);
    out[j] = std::max(out[j], out[j - 1]);
  }
  return out;
}

// Rate r of the exponential piece f0 * exp(-r s), s in [0, len], that carries
// the given mass; negative r means the density rises away from the cell edge.
double tail_rate(double f0, double len, double mass) {
  if (!(len > 0.0) || !(f0 > 0.0)) return 0.0;
  const double target = mass / (f0 * len);  // (1 - e^-u) / u = target, u = r len
  const auto shape = [](double u) { return std::abs(u) < 1e-8 ? 1.0 - 0.5 * u : -std::expm1(-u) / u; };
  double lo = -600.0;
  double hi = 600.0;
  if (target >= shape(lo)) return lo / len;
  if (target <= shape(hi)) return 1.0 / (target * len);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (shape(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / len;
}

}  // namespace

void TransformSpec::validate() const {
  if (kind == TransformKind::log_hazard && !(delta > 0.0 && delta <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "log hazard delta must lie in (0, 0.5]");
  }
}

std::string_view TransformSpec::name() const {
  return kind == TransformKind::log_hazard ? "loghazard" : "lqd";
}

TransformedFn TransformedFn::with_values(std::vector<double> v) const {
  if (v.size() != tgrid.size()) throw Error(ErrorCode::GridMismatch, "value count mismatch");
  return TransformedFn{tgrid, std::move(v), tag, xgrid};
}

double dist_l2(const TransformedFn& a, const TransformedFn& b) { return dist_l2(a.fn(), b.fn()); }
double dist_sup(const TransformedFn& a, const TransformedFn& b) { return dist_sup(a.fn(), b.fn()); }

TransformedFn lqd_forward(const DensityFn& f) {
  const Grid unit = Grid::unit(f.grid().size());
  for (std::size_t j = 0; j + 1 < f.values().size(); ++j) {
    if (f.values()[j] == 0.0 && f.values()[j + 1] == 0.0) {
      throw Error(ErrorCode::NotInvertible, "CDF is flat over a grid cell");
    }
  }
  const PiecewiseLinearQuantile quantile(unit, f.values());

  const Grid& tgrid = unit;
  const std::vector<double> b = dual_boundaries(tgrid);
  const std::vector<double> w = tgrid.trapezoid_weights();
  std::vector<double> q(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) q[k] = quantile(b[k]);
  q.front() = 0.0;
  q.back() = 1.0;

  std::vector<double> x(tgrid.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double inc = q[j + 1] - q[j];
    if (!(inc > 0.0)) throw Error(ErrorCode::NotInvertible, "quantile function has a jump");
    x[j] = std::log(inc / w[j]);
  }
  return TransformedFn{tgrid, std::move(x), TransformSpec::lqd(), f.grid()};
}

DensityFn lqd_inverse(const TransformedFn& x, double floor) {
  require_tag(x, TransformKind::log_quantile_density);
  const auto [xmin_it, xmax_it] = std::minmax_element(x.values.begin(), x.values.end());
  const double xmax = *xmax_it;
  if (xmax > kExpLimit) throw Error(ErrorCode::Overflow, "exp(X) overflows");

  const Grid& tgrid = x.tgrid;
  const std::size_t mt = tgrid.size();
  const std::vector<double> b = dual_boundaries(tgrid);
  const std::vector<double> w = tgrid.trapezoid_weights();
  std::vector<double> cum(b.size(), 0.0);
  for (std::size_t j = 0; j < mt; ++j) cum[j + 1] = cum[j] + w[j] * std::exp(x.values[j] - xmax);
  const double scaled_theta = cum.back();
  const double log_theta = xmax + std::log(scaled_theta);
  if (log_theta - *xmin_it > kExpLimit) throw Error(ErrorCode::Overflow, "exp(-X) overflows");
  for (double& c : cum) c /= scaled_theta;
  cum.back() = 1.0;

  // End nodes stand for whole tail cells, so the interior profile uses
  // values extrapolated from their neighbours instead.
  std::vector<double> inner = x.values;
  inner.front() = 2.0 * x.values[1] - x.values[2];
  inner.back() = 2.0 * x.values[mt - 2] - x.values[mt - 3];

  const double q_left = cum[1];
  const double q_right = cum[mt - 1];
  const double f_left = std::exp(log_theta - interp(tgrid, inner, b[1]));
  const double f_right = std::exp(log_theta - interp(tgrid, inner, b[mt - 1]));
  const double rate_left = tail_rate(f_left, q_left, w.front());
  const double rate_right = tail_rate(f_right, 1.0 - q_right, w.back());

  const Grid& xgrid = x.xgrid;
  const Grid unit = Grid::unit(xgrid.size());
  std::vector<double> out(xgrid.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double u = unit[i];
    double v;
    if (u < q_left) {
      v = f_left * std::exp(-rate_left * (q_left - u));
    } else if (u > q_right) {
      v = f_right * std::exp(-rate_right * (u - q_right));
    } else {
      v = std::exp(log_theta - interp(tgrid, inner, interp_knots(cum, b, u)));
    }
    out[i] = v / xgrid.width();
  }
  return normalize(GridFn(xgrid, std::move(out)), floor);
}

TransformedFn log_hazard_forward(const DensityFn& f, const TransformSpec& spec) {
  spec.validate();
  if (spec.kind != TransformKind::log_hazard) throw Error(ErrorCode::InvalidArgument, "expected log hazard spec");
  const Grid& g = f.grid();
  const std::size_t m = g.size();
  const double width = g.width();

  std::vector<double> surv(m, 0.0);
  const double half = 0.5 * g.spacing();
  for (std::size_t j = m - 1; j-- > 0;) surv[j] = surv[j + 1] + half * (f.values()[j] + f.values()[j + 1]);
  const double total = surv.front();
  for (double& s : surv) s /= total;

  const Grid tgrid(0.0, 1.0 - spec.delta, m);
  if (interp(g, surv, g.lo() + tgrid.hi() * width) < 1e-300) {
    throw Error(ErrorCode::Overflow, "no survival mass beyond 1 - delta");
  }
  std::vector<double> x(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double xn = g.lo() + tgrid[j] * width;
    const double dens = f(xn) * width;
    if (!(dens > 0.0)) throw Error(ErrorCode::NonFinite, "log hazard needs a strictly positive density");
    x[j] = std::log(dens) - std::log(interp(g, surv, xn));
  }
  return TransformedFn{tgrid, std::move(x), spec, g};
}

DensityFn log_hazard_inverse(const TransformedFn& x, const TransformSpec& spec, double floor) {
  spec.validate();
  require_tag(x, TransformKind::log_hazard);
  if (*std::max_element(x.values.begin(), x.values.end()) > kExpLimit) {
    throw Error(ErrorCode::Overflow, "exp(X) overflows");
  }
  const Grid& tgrid = x.tgrid;
  const double end = tgrid.hi();
  const double delta = 1.0 - end;
  const std::vector<double> lambda = cumulative_exp(tgrid, x.values);
  const double tail = std::exp(-lambda.back()) / delta;

  const Grid unit = Grid::unit(x.xgrid.size());
  const std::size_t m = unit.size();
  const double du = unit.spacing();
  std::vector<double> f(m);
  std::size_t last_left = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = unit[i];
    if (u <= end + 1e-12) {
      f[i] = std::exp(interp(tgrid, x.values, u) - interp(tgrid, lambda, u));
      last_left = i;
    } else {
      f[i] = tail;
    }
  }
  // The density jumps at 1 - delta. Reset the first node after the jump so
  // that the trapezoidal mass of its two cells matches the exact two-piece
  // mass; head nodes stay exact. Fall back to the last head node when there
  // is no room on the right.
  const std::size_t J = last_left;
  const auto exact_mass = [&](std::size_t a, std::size_t b) {
    return std::exp(-interp(tgrid, lambda, unit[a])) - std::exp(-lambda.back()) + tail * (unit[b] - end);
  };
  bool fixed = false;
  if (J + 2 < m) {
    const double w = exact_mass(J, J + 2) / du - 0.5 * (f[J] + f[J + 2]);
    if (w > 0.0) {
      f[J + 1] = w;
      fixed = true;
    }
  }
  if (!fixed && J >= 1 && J + 1 < m) {
    const double v = exact_mass(J - 1, J + 1) / du - 0.5 * (f[J - 1] + f[J + 1]);
    if (v > 0.0) f[J] = v;
  }
  for (double& v : f) v /= x.xgrid.width();
  return normalize(GridFn(x.xgrid, std::move(f)), floor);
}

TransformedFn forward(const DensityFn& f, const TransformSpec& spec) {
  return spec.kind == TransformKind::log_hazard ? log_hazard_forward(f, spec) : lqd_forward(f);
}

DensityFn inverse(const TransformedFn& x, double floor) {
  return x.tag.kind == TransformKind::log_hazard ? log_hazard_inverse(x, x.tag, floor)
                                                 : lqd_inverse(x, floor);
}

}  // namespace densfda
