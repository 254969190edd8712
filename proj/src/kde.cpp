#include "densfda/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "densfda/error.hpp"

namespace densfda {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void require_bandwidth(double h) {
  if (!(h > 0.0 && h < 0.5)) {
    throw Error(ErrorCode::BadBandwidth, "bandwidth must lie in (0, 0.5) on the unit interval");
  }
}

}  // namespace

double KernelSpec::operator()(double u) const {
  switch (family) {
    case KernelFamily::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case KernelFamily::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::uniform:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

double KernelSpec::integral(double a, double b) const {
  switch (family) {
    case KernelFamily::gaussian:
      return normal_cdf(b) - normal_cdf(a);
    case KernelFamily::epanechnikov: {
      const auto prim = [](double u) {
        u = std::clamp(u, -1.0, 1.0);
        return 0.75 * (u - u * u * u / 3.0);
      };
      return prim(b) - prim(a);
    }
    case KernelFamily::uniform:
      return 0.5 * (std::clamp(b, -1.0, 1.0) - std::clamp(a, -1.0, 1.0));
  }
  return 0.0;
}

KernelSpec KernelSpec::parse(std::string_view name) {
  if (name == "gaussian") return {KernelFamily::gaussian};
  if (name == "epanechnikov") return {KernelFamily::epanechnikov};
  if (name == "uniform") return {KernelFamily::uniform};
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

std::string_view KernelSpec::name() const {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::uniform: return "uniform";
  }
  return "unknown";
}

double boundary_weight(double x, double h, const KernelSpec& kernel) {
  require_bandwidth(h);
  if (x < h) return 1.0 / kernel.integral(-x / h, 1.0);
  if (x > 1.0 - h) return 1.0 / kernel.integral(-1.0, (1.0 - x) / h);
  return 1.0;
}

DensityFn estimate_density(std::span<const double> samples, const KdeConfig& cfg) {
  require_bandwidth(cfg.bandwidth);
  if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 samples");
  const Grid& grid = cfg.grid;
  const double lo = grid.lo();
  const double width = grid.width();

  std::vector<double> mapped(samples.size());
  for (std::size_t l = 0; l < samples.size(); ++l) {
    const double s = samples[l];
    if (!std::isfinite(s)) throw Error(ErrorCode::NonFinite, "non-finite sample");
    if (s < lo || s > grid.hi()) {
      throw Error(ErrorCode::OutOfSupport, "sample " + std::to_string(s) + " outside support");
    }
    mapped[l] = (s - lo) / width;
  }

  const double h = cfg.bandwidth;
  const Grid unit = Grid::unit(grid.size());
  std::vector<double> num(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = unit[j];
    double acc = 0.0;
    for (double w : mapped) acc += cfg.kernel((x - w) / h);
    num[j] = acc * boundary_weight(x, h, cfg.kernel);
  }
  // Denominator: sum over samples of the trapezoidal integral of each weighted
  // kernel bump, which equals the trapezoidal integral of the summed numerator.
  const double denom = quad::integrate(unit, num);
  if (!(denom > 0.0)) throw Error(ErrorCode::AllZero, "kernel estimate has no mass on the grid");
  for (double& v : num) v /= denom * width;
  return normalize(GridFn(grid, std::move(num)), cfg.floor);
}

double default_bandwidth(std::size_t n) {
  const double h = std::cbrt(1.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  return std::min(h, 0.49);
}

}  // namespace densfda
