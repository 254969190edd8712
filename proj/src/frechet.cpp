#include "densfda/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "densfda/error.hpp"

namespace densfda {

Metric parse_metric(std::string_view name) {
  if (name == "l2") return Metric::l2;
  if (name == "wasserstein") return Metric::wasserstein;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) { return metric == Metric::l2 ? "l2" : "wasserstein"; }

double distance(const DensityFn& f, const DensityFn& g, Metric metric) {
  return metric == Metric::l2 ? dist_l2(f, g) : dist_wasserstein(f, g);
}

MethodKind MethodKind::parse(std::string_view name, double delta) {
  if (name == "fpca") return fpca();
  if (name == "lqd") return lqd();
  if (name == "loghazard") return log_hazard(delta);
  if (name == "hs") return hs();
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string MethodKind::name() const {
  switch (type) {
    case Type::ordinary_fpca: return "fpca";
    case Type::hilbert_sphere: return "hs";
    case Type::transform: return std::string(transform.name());
  }
  return "unknown";
}

DensityFn wasserstein_frechet_mean(const std::vector<DensityFn>& sample, double floor) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "empty sample");
  const Grid& grid = sample.front().grid();
  for (const auto& f : sample) {
    if (!f.grid().same_support(grid)) throw Error(ErrorCode::SupportMismatch, "densities have different supports");
  }

  // Every quantile function is piecewise linear with knots at its CDF values,
  // so averaging on the union of knots is exact.
  std::vector<std::vector<double>> xs;
  std::vector<std::vector<double>> cdfs;
  std::vector<double> knots;
  for (const auto& f : sample) {
    xs.push_back(f.grid().points());
    cdfs.push_back(to_cdf(f).values);
    knots.insert(knots.end(), cdfs.back().begin(), cdfs.back().end());
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::vector<double> qmean(knots.size(), 0.0);
  const auto n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t k = 0; k < knots.size(); ++k) qmean[k] += invert_cdf(xs[i], cdfs[i], knots[k]) / n;
  }
  qmean.front() = grid.lo();
  qmean.back() = grid.hi();

  // The mean quantile has derivative mean_i 1 / f_i(Q_i(t)), so the density
  // at x is the harmonic mean of the f_i at the matched quantiles.
  const std::size_t m = grid.size();
  std::vector<double> dens(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = std::clamp(interp_knots(qmean, knots, grid[j]), 0.0, 1.0);
    double inv = 0.0;
    for (std::size_t i = 0; i < sample.size() && std::isfinite(inv); ++i) {
      const double fi = interp(sample[i].grid(), sample[i].values(), invert_cdf(xs[i], cdfs[i], t));
      inv = fi > 0.0 ? inv + 1.0 / (fi * n) : std::numeric_limits<double>::infinity();
    }
    dens[j] = std::isfinite(inv) ? 1.0 / inv : 0.0;
  }
  return normalize(GridFn(grid, std::move(dens)), floor);
}

DensityFn frechet_mean(const std::vector<DensityFn>& sample, Metric metric, double floor) {
  return metric == Metric::l2 ? cross_sectional_mean(sample) : wasserstein_frechet_mean(sample, floor);
}

double frechet_variance(const std::vector<DensityFn>& sample, const DensityFn& mean, Metric metric) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "empty sample");
  double acc = 0.0;
  for (const auto& f : sample) {
    const double d = distance(f, mean, metric);
    acc += d * d;
  }
  return acc / static_cast<double>(sample.size());
}

RepresentationModel::RepresentationModel(const std::vector<DensityFn>& sample, const MethodKind& method,
                                         double floor)
    : method_(method), floor_(floor), n_(sample.size()) {
  if (sample.empty()) throw Error(ErrorCode::EmptySample, "empty sample");
  if (n_ == 1) {
    singleton_ = sample;
    return;
  }
  switch (method.type) {
    case MethodKind::Type::ordinary_fpca:
      system_ = fpca(sample);
      break;
    case MethodKind::Type::transform: {
      method.transform.validate();
      std::vector<GridFn> xs;
      xs.reserve(sample.size());
      for (const auto& f : sample) {
        TransformedFn x = forward(f, method.transform);
        if (!template_) template_ = x;
        xs.push_back(x.fn());
      }
      system_ = fpca(xs);
      break;
    }
    case MethodKind::Type::hilbert_sphere: {
      std::vector<SpherePoint> pts;
      pts.reserve(sample.size());
      for (const auto& f : sample) pts.push_back(sqrt_embed(f));
      pga_ = pga(pts);
      break;
    }
  }
}

std::size_t RepresentationModel::components() const noexcept {
  if (pga_) return pga_->tangent.components();
  if (system_) return system_->components();
  return 0;
}

const EigenSystem& RepresentationModel::system() const noexcept {
  return pga_ ? pga_->tangent : *system_;
}

std::vector<DensityFn> RepresentationModel::represent(std::size_t K) const {
  if (n_ == 1) return singleton_;
  if (pga_) return hs_represent(*pga_, K, floor_);
  const std::vector<GridFn> trunc = truncate(*system_, std::min(K, system_->components()));
  std::vector<DensityFn> out;
  out.reserve(trunc.size());
  for (const auto& g : trunc) {
    if (template_) {
      out.push_back(inverse(template_->with_values(g.values), floor_));
    } else {
      out.push_back(project_to_density(g, floor_));
    }
  }
  return out;
}

DensityFn RepresentationModel::mode(std::size_t k, double alpha) const {
  if (n_ == 1) return singleton_.front();
  if (pga_) return hs_mode(*pga_, k, alpha, floor_);
  const GridFn g = mode_of_variation(*system_, k, alpha);
  if (template_) return inverse(template_->with_values(g.values), floor_);
  return project_to_density(g, floor_);
}

DensityFn transformation_mode(const std::vector<DensityFn>& sample, const TransformSpec& spec, std::size_t k,
                              double alpha, double floor) {
  return RepresentationModel(sample, MethodKind{MethodKind::Type::transform, spec}, floor).mode(k, alpha);
}

std::vector<DensityFn> represent(const std::vector<DensityFn>& sample, const MethodKind& method, std::size_t K,
                                 double floor) {
  if (K == 0) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  if (K > std::max<std::size_t>(sample.size(), 2) - 1) {
    throw Error(ErrorCode::KTooLarge, "K exceeds the sample's component count");
  }
  return RepresentationModel(sample, method, floor).represent(K);
}

Selection select_k(const std::vector<double>& fve, double p) {
  for (std::size_t k = 0; k < fve.size(); ++k) {
    if (fve[k] > p) return {k + 1, true};
  }
  return {fve.size(), false};
}

Selection select_k(const FrechetReport& report, double p) { return select_k(report.fve, p); }

std::size_t default_k_max(const RepresentationModel& model) {
  const std::size_t cap = std::min<std::size_t>(std::max<std::size_t>(model.sample_size(), 2) - 1, 20);
  if (model.components() == 0) return 1;
  const auto& ev = model.system().eigenvalues;
  const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    acc += ev[k];
    if (acc >= (1.0 - 1e-8) * total) return std::min(k + 1, cap);
  }
  return std::min(ev.size(), cap);
}

FrechetReport fve_curve(const RepresentationModel& model, const std::vector<DensityFn>& sample, Metric metric,
                        std::size_t k_max, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1)");
  if (k_max == 0) throw Error(ErrorCode::InvalidArgument, "K_max must be at least 1");
  if (k_max > std::max<std::size_t>(sample.size(), 2) - 1) {
    throw Error(ErrorCode::KTooLarge, "K_max exceeds the sample's component count");
  }
  FrechetReport report;
  report.metric = metric;
  report.method = model.method().name();
  report.p = p;
  const DensityFn mean = frechet_mean(sample, metric);
  report.v_infinity = frechet_variance(sample, mean, metric);

  for (std::size_t K = 1; K <= k_max; ++K) {
    const std::vector<DensityFn> reps = model.represent(K);
    double err = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double d = distance(sample[i], reps[i], metric);
      err += d * d;
    }
    err /= static_cast<double>(sample.size());
    const double vk = report.v_infinity - err;
    report.v_k.push_back(vk);
    report.fve.push_back(report.v_infinity > 0.0 ? vk / report.v_infinity : 1.0);
  }
  const Selection sel = select_k(report.fve, p);
  report.selected_k = sel.k;
  report.threshold_reached = sel.reached;
  return report;
}

FrechetReport fve_curve(const std::vector<DensityFn>& sample, const MethodKind& method, Metric metric,
                        std::size_t k_max, double p, double floor) {
  const RepresentationModel model(sample, method, floor);
  return fve_curve(model, sample, metric, k_max, p);
}

}  // namespace densfda
