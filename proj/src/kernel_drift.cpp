#include "lookdrift/kernel_drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lookdrift/errors.hpp"

namespace lookdrift {
namespace {

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidInput("temperature must be finite and > 0, got " + std::to_string(tau));
  }
}

void check_dims(Eigen::Index query_dim, const SampleBatch& batch, const char* what) {
  if (query_dim != batch.dim()) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                       std::to_string(query_dim) + " vs " + std::to_string(batch.dim()) + ")");
  }
}

// Kernel-weighted mean of the rows of `batch` seen from `query`, written into
// `out`. Rows bitwise equal to the query are skipped when `skip_self` is set.
// `logw` is scratch space of at least batch.size() entries.
void kernel_mean(const double* query, const Matrix& batch, double tau, bool stab_shift,
                 KernelSign sign, bool skip_self, std::vector<double>& logw, double* out) {
  const Eigen::Index n = batch.rows();
  const Eigen::Index d = batch.cols();
  const double* base = batch.data();
  const double scale = (sign == KernelSign::decaying ? -1.0 : 1.0) / tau;
  constexpr double kSkipped = -std::numeric_limits<double>::infinity();

  double max_logw = kSkipped;
  Eigen::Index used = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double* y = base + j * d;
    double sq = 0.0;
    bool same = true;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double diff = y[c] - query[c];
      sq += diff * diff;
      same = same && y[c] == query[c];
    }
    if (skip_self && same) {
      logw[j] = kSkipped;
      continue;
    }
    logw[j] = scale * std::sqrt(sq);
    max_logw = std::max(max_logw, logw[j]);
    ++used;
  }
  if (used == 0) {
    throw InvalidInput("kernel mean: no samples left after excluding the query");
  }

  const double shift = stab_shift ? max_logw : 0.0;
  double z = 0.0;
  std::fill(out, out + d, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (logw[j] == kSkipped) continue;
    const double w = std::exp(logw[j] - shift);
    z += w;
    const double* y = base + j * d;
    for (Eigen::Index c = 0; c < d; ++c) out[c] += w * y[c];
  }
  for (Eigen::Index c = 0; c < d; ++c) out[c] /= z;
}

// One-temperature displacement (weighted mean minus query) for a single row.
void displacement(const double* query, const Matrix& batch, double tau, const DriftConfig& cfg,
                  bool skip_self, std::vector<double>& logw, double* out) {
  kernel_mean(query, batch, tau, cfg.stab_shift, cfg.sign, skip_self, logw, out);
  for (Eigen::Index c = 0; c < batch.cols(); ++c) out[c] -= query[c];
}

RowVector averaged_displacement(PointRef query, const SampleBatch& batch, const DriftConfig& cfg,
                                bool skip_self) {
  cfg.validate();
  check_dims(query.size(), batch, "displacement");
  require_finite(query, "query");
  const RowVector q = query;
  std::vector<double> logw(static_cast<std::size_t>(batch.size()));
  RowVector acc = RowVector::Zero(batch.dim());
  RowVector one(batch.dim());
  for (double tau : cfg.taus) {
    displacement(q.data(), batch.matrix(), tau, cfg, skip_self, logw, one.data());
    acc += one;
  }
  acc /= static_cast<double>(cfg.taus.size());
  return acc;
}

}  // namespace

void DriftConfig::validate() const {
  if (taus.empty()) throw InvalidInput("DriftConfig: at least one temperature required");
  for (double t : taus) check_tau(t);
}

DriftField::DriftField(Matrix vectors) : vectors_(std::move(vectors)) {
  require_finite(vectors_, "DriftField");
}

double DriftField::mean_norm() const {
  if (vectors_.rows() == 0) return 0.0;
  return vectors_.rowwise().norm().mean();
}

double laplace_kernel(PointRef x, PointRef y, double tau, KernelSign sign) {
  check_tau(tau);
  if (x.size() != y.size()) throw InvalidInput("laplace_kernel: dimension mismatch");
  require_finite(x, "laplace_kernel x");
  require_finite(y, "laplace_kernel y");
  const double dist = (x - y).norm();
  return std::exp((sign == KernelSign::decaying ? -dist : dist) / tau);
}

RowVector weighted_mean(PointRef query, const SampleBatch& batch, double tau, bool stab_shift,
                        KernelSign sign) {
  check_tau(tau);
  check_dims(query.size(), batch, "weighted_mean");
  require_finite(query, "weighted_mean query");
  const RowVector q = query;
  std::vector<double> logw(static_cast<std::size_t>(batch.size()));
  RowVector out(batch.dim());
  kernel_mean(q.data(), batch.matrix(), tau, stab_shift, sign, false, logw, out.data());
  return out;
}

RowVector attraction(PointRef query, const SampleBatch& positives, const DriftConfig& cfg) {
  return averaged_displacement(query, positives, cfg, false);
}

RowVector repulsion(PointRef query, const SampleBatch& negatives, const DriftConfig& cfg) {
  return averaged_displacement(query, negatives, cfg, !cfg.include_self);
}

DriftField drift(const SampleBatch& queries, const SampleBatch& positives,
                 const SampleBatch& negatives, const DriftConfig& cfg) {
  cfg.validate();
  check_dims(queries.dim(), positives, "drift positives");
  check_dims(queries.dim(), negatives, "drift negatives");

  const Eigen::Index d = queries.dim();
  const Matrix& x = queries.matrix();
  Matrix out = Matrix::Zero(queries.size(), d);
  std::vector<double> logw(static_cast<std::size_t>(std::max(positives.size(), negatives.size())));
  RowVector attr(d), rep(d);
  const double inv_count = 1.0 / static_cast<double>(cfg.taus.size());

  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double* q = x.data() + i * d;
    for (double tau : cfg.taus) {
      displacement(q, positives.matrix(), tau, cfg, false, logw, attr.data());
      displacement(q, negatives.matrix(), tau, cfg, !cfg.include_self, logw, rep.data());
      out.row(i) += attr - rep;
    }
    if (cfg.taus.size() > 1) out.row(i) *= inv_count;
  }
  if (!out.allFinite()) {
    throw InvalidInput("drift: non-finite drift (kernel weights overflowed or underflowed)");
  }
  return DriftField(std::move(out));
}

}  // namespace lookdrift
