#include "densfda/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "densfda/error.hpp"
#include "densfda/parallel.hpp"
#include "densfda/rng.hpp"
#include "densfda/transforms.hpp"

namespace densfda {

namespace {

std::vector<GridFn> working_functions(const std::vector<DensityFn>& densities, ScoreMethod method) {
  std::vector<GridFn> out;
  out.reserve(densities.size());
  for (const auto& f : densities) {
    out.push_back(method == ScoreMethod::fpca ? f.fn() : lqd_forward(f).fn());
  }
  return out;
}

Eigen::MatrixXd design(const Eigen::MatrixXd& scores, std::size_t cols) {
  Eigen::MatrixXd x(scores.rows(), static_cast<Eigen::Index>(cols) + 1);
  x.col(0).setOnes();
  x.rightCols(static_cast<Eigen::Index>(cols)) = scores.leftCols(static_cast<Eigen::Index>(cols));
  return x;
}

}  // namespace

ScoreMethod parse_score_method(std::string_view name) {
  if (name == "fpca") return ScoreMethod::fpca;
  if (name == "lqd") return ScoreMethod::lqd;
  throw Error(ErrorCode::InvalidArgument, "unknown score method '" + std::string(name) + "'");
}

std::string_view to_string(ScoreMethod method) { return method == ScoreMethod::fpca ? "fpca" : "lqd"; }

FlrModel fit_flr(const Eigen::MatrixXd& scores, std::span<const double> y, bool allow_drop) {
  const auto n = static_cast<std::size_t>(scores.rows());
  const auto K = static_cast<std::size_t>(scores.cols());
  if (y.size() != n) throw Error(ErrorCode::InvalidArgument, "response length does not match scores");
  if (n <= K + 1) throw Error(ErrorCode::TooFewSamples, "need n > K + 1 for least squares");
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite response");
  }
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));

  std::size_t cols = K;
  Eigen::VectorXd beta;
  for (;;) {
    const Eigen::MatrixXd x = design(scores, cols);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (static_cast<std::size_t>(qr.rank()) == cols + 1) {
      beta = qr.solve(yv);
      break;
    }
    if (!allow_drop) throw Error(ErrorCode::RankDeficient, "score matrix is singular");
    if (cols == 0) throw Error(ErrorCode::RankDeficient, "intercept-only design is singular");
    --cols;
  }

  FlrModel model;
  model.intercept = beta[0];
  model.coefficients.assign(K, 0.0);
  for (std::size_t k = 0; k < cols; ++k) model.coefficients[k] = beta[static_cast<Eigen::Index>(k) + 1];
  model.dropped = K - cols;

  const double ybar = yv.mean();
  const Eigen::VectorXd fitted = design(scores, cols) * beta;
  const double rss = (yv - fitted).squaredNorm();
  const double tss = (yv.array() - ybar).square().sum();
  model.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  return model;
}

std::vector<double> predict(const FlrModel& model, const Eigen::MatrixXd& scores) {
  if (static_cast<std::size_t>(scores.cols()) < model.K()) {
    throw Error(ErrorCode::InvalidArgument, "too few score columns for the model");
  }
  std::vector<double> out(static_cast<std::size_t>(scores.rows()), model.intercept);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (std::size_t k = 0; k < model.K(); ++k) {
      out[static_cast<std::size_t>(i)] += model.coefficients[k] * scores(i, static_cast<Eigen::Index>(k));
    }
  }
  return out;
}

ScoreBasis fit_basis(const std::vector<DensityFn>& train, ScoreMethod method, std::size_t K) {
  if (K == 0) throw Error(ErrorCode::KTooLarge, "K must be at least 1");
  return ScoreBasis{method, fpca(working_functions(train, method), K)};
}

Eigen::MatrixXd project(const ScoreBasis& basis, const std::vector<DensityFn>& densities) {
  return scores(working_functions(densities, basis.method), basis.system.mean, basis.system.eigenfunctions);
}

double cv_mse(const std::vector<DensityFn>& densities, std::span<const double> y, ScoreMethod method,
              std::size_t K, const CvOptions& opts) {
  const std::size_t n = densities.size();
  if (opts.folds < 2) throw Error(ErrorCode::InvalidArgument, "folds must be at least 2");
  if (opts.repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be at least 1");
  if (y.size() != n) throw Error(ErrorCode::InvalidArgument, "response length does not match densities");
  if (opts.folds > n) throw Error(ErrorCode::TooFewSamples, "more folds than subjects");

  std::vector<double> sse(opts.repeats, 0.0);
  parallel_for(opts.repeats, resolve_threads(opts.threads), [&](std::size_t r) {
    Rng rng = Rng::stream(opts.seed, r);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double total = 0.0;
    for (std::size_t fold = 0; fold < opts.folds; ++fold) {
      std::vector<DensityFn> train, test;
      std::vector<double> ytrain, ytest;
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t i = order[pos];
        if (pos % opts.folds == fold) {
          test.push_back(densities[i]);
          ytest.push_back(y[i]);
        } else {
          train.push_back(densities[i]);
          ytrain.push_back(y[i]);
        }
      }
      const ScoreBasis basis = fit_basis(train, method, K);
      const FlrModel model = fit_flr(basis.system.scores, ytrain);
      const std::vector<double> pred = predict(model, project(basis, test));
      for (std::size_t j = 0; j < pred.size(); ++j) total += (pred[j] - ytest[j]) * (pred[j] - ytest[j]);
    }
    sse[r] = total / static_cast<double>(n);
  });
  return std::accumulate(sse.begin(), sse.end(), 0.0) / static_cast<double>(opts.repeats);
}

std::vector<RegressionRow> regression_table(const std::vector<DensityFn>& densities, std::span<const double> y,
                                            ScoreMethod method, std::span<const std::size_t> Ks,
                                            const CvOptions& opts) {
  std::size_t k_max = 0;
  for (std::size_t K : Ks) k_max = std::max(k_max, K);
  const ScoreBasis full = fit_basis(densities, method, std::max<std::size_t>(k_max, 1));
  std::vector<RegressionRow> rows;
  for (std::size_t K : Ks) {
    const std::size_t cols = std::min<std::size_t>(K, full.system.components());
    const FlrModel model = fit_flr(full.system.scores.leftCols(static_cast<Eigen::Index>(cols)), y);
    rows.push_back({K, model.r2, cv_mse(densities, y, method, K, opts), model.dropped + (K - cols)});
  }
  return rows;
}

}  // namespace densfda
