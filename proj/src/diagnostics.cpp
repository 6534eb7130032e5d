#include "lookdrift/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lookdrift/errors.hpp"
#include "lookdrift/lookahead.hpp"
#include "lookdrift/rng.hpp"

namespace lookdrift {
namespace {

// Plain kernel sums in extended precision, no max-shift; drift() and
// weighted_mean() are not used here.
using Ext = long double;
using ExtVec = Eigen::Matrix<Ext, 1, Eigen::Dynamic>;

Ext kernel(const ExtVec& x, const ExtVec& y, double tau, KernelSign sign) {
  const Ext dist = std::sqrt((x - y).squaredNorm());
  return std::exp((sign == KernelSign::decaying ? -dist : dist) / static_cast<Ext>(tau));
}

ExtVec to_ext(const Eigen::Ref<const RowVector>& v) { return v.cast<Ext>(); }

bool same_point(const ExtVec& a, const ExtVec& b) { return (a.array() == b.array()).all(); }

struct Sums {
  ExtVec values;  // sum_j k_j * value_j
  Ext z = 0;      // sum_j k_j
};

// Weighted sums of `values` rows with weights k(at, locations_j).
Sums kernel_sums(const ExtVec& at, const std::vector<ExtVec>& locations,
                 const std::vector<ExtVec>& values, double tau, KernelSign sign, bool skip_self) {
  Sums s{ExtVec::Zero(at.size()), 0};
  for (std::size_t j = 0; j < locations.size(); ++j) {
    if (skip_self && same_point(at, locations[j])) continue;
    const Ext k = kernel(at, locations[j], tau, sign);
    s.values += k * values[j];
    s.z += k;
  }
  if (s.z == 0) throw InvalidInput("verify_rewrite: kernel normalizer vanished");
  return s;
}

std::vector<ExtVec> rows_of(const SampleBatch& b) {
  std::vector<ExtVec> out;
  out.reserve(static_cast<std::size_t>(b.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i) out.push_back(to_ext(b.row(i)));
  return out;
}

}  // namespace

DecompositionReport verify_rewrite(Eigen::Index query_index, const SampleBatch& outputs,
                                   const SampleBatch& positives, const DriftConfig& cfg) {
  cfg.validate();
  if (query_index < 0 || query_index >= outputs.size()) {
    throw InvalidInput("verify_rewrite: query index " + std::to_string(query_index) +
                       " out of range");
  }
  if (outputs.dim() != positives.dim()) {
    throw InvalidInput("verify_rewrite: dimension mismatch");
  }

  // Direct: drift the whole batch one stage, then drift again at the query.
  const DriftField stage0 = drift(outputs, positives, outputs, cfg);
  const SampleBatch batch1(outputs.matrix() + stage0.matrix());
  const SampleBatch query1(batch1.matrix().row(query_index));
  const RowVector direct = drift(query1, positives, batch1, cfg).row(0);

  // Rewritten: push each negative forward by its own inline stage-0 drift.
  const auto pos = rows_of(positives);
  const auto neg = rows_of(outputs);
  const std::size_t n = neg.size();
  const Eigen::Index d = outputs.dim();
  const Ext inv_t = Ext(1) / static_cast<Ext>(cfg.taus.size());
  const bool skip = !cfg.include_self;

  std::vector<ExtVec> shift(n, ExtVec::Zero(d));
  for (std::size_t j = 0; j < n; ++j) {
    for (double tau : cfg.taus) {
      const Sums a = kernel_sums(neg[j], pos, pos, tau, cfg.sign, false);
      const Sums r = kernel_sums(neg[j], neg, neg, tau, cfg.sign, skip);
      shift[j] += (a.values / a.z - r.values / r.z) * inv_t;
    }
  }
  std::vector<ExtVec> pushed(n);
  for (std::size_t j = 0; j < n; ++j) pushed[j] = neg[j] + shift[j];

  const ExtVec& f1 = pushed[static_cast<std::size_t>(query_index)];
  ExtVec rewritten = ExtVec::Zero(d), attr = ExtVec::Zero(d), position = ExtVec::Zero(d),
         extra = ExtVec::Zero(d);
  for (double tau : cfg.taus) {
    const Sums a = kernel_sums(f1, pos, pos, tau, cfg.sign, false);
    const Sums r = kernel_sums(f1, pushed, pushed, tau, cfg.sign, skip);
    const Sums rp = kernel_sums(f1, pushed, neg, tau, cfg.sign, skip);
    const Sums re = kernel_sums(f1, pushed, shift, tau, cfg.sign, skip);
    rewritten += (a.values / a.z - r.values / r.z) * inv_t;
    attr += a.values / a.z * inv_t;
    position += rp.values / rp.z * inv_t;
    extra += re.values / re.z * inv_t;
  }

  DecompositionReport rep;
  rep.direct = direct;
  rep.rewritten = rewritten.cast<double>();
  rep.attraction_part = attr.cast<double>();
  rep.position_part = position.cast<double>();
  rep.extra_term = extra.cast<double>();
  rep.baseline_drift = stage0.row(query_index);
  rep.max_abs_gap = (rep.direct - rep.rewritten).cwiseAbs().maxCoeff();
  return rep;
}

double extra_term_gap(const DecompositionReport& r) {
  return (r.rewritten - (r.attraction_part - r.position_part - r.extra_term))
      .cwiseAbs()
      .maxCoeff();
}

double drift_divergence(const SampleBatch& outputs, const SampleBatch& positives,
                        const DriftConfig& cfg) {
  const LookaheadTrace trace = lookahead_trace(outputs, positives, LookaheadPlan::uniform(1), cfg);
  const Matrix diff = trace.stages[1].drift.matrix() - trace.stages[0].drift.matrix();
  return diff.rowwise().norm().maxCoeff();
}

namespace {

SampleBatch gaussian_batch(Rng& rng, Eigen::Index n, Eigen::Index d, double scale, double shift) {
  Matrix m(n, d);
  rng.fill_normal(std::span<double>(m.data(), static_cast<std::size_t>(m.size())));
  m = (m.array() * scale + shift).matrix();
  return SampleBatch(std::move(m));
}

CheckResult finish(std::string name, int instances, double gap, double tol) {
  return CheckResult{std::move(name), instances, gap, tol, gap <= tol};
}

}  // namespace

DriftInstance make_instance(std::uint64_t seed, int index, Eigen::Index size, Eigen::Index dim) {
  Rng rng(seed, 1000 + static_cast<std::uint64_t>(index));
  SampleBatch x = gaussian_batch(rng, size, dim, 1.5, 0.0);
  SampleBatch p = gaussian_batch(rng, size, dim, 1.0, 0.5);
  SampleBatch n = gaussian_batch(rng, size, dim, 1.0, -0.5);
  return DriftInstance{std::move(x), std::move(p), std::move(n)};
}

std::vector<CheckResult> run_battery(const BatteryOptions& opts) {
  if (opts.sizes.empty() || opts.dims.empty() || opts.taus.empty()) {
    throw InvalidInput("diagnostic battery: sizes, dims and taus must be nonempty");
  }
  std::vector<CheckResult> out;
  auto cfg_for = [&](double tau) {
    DriftConfig c;
    c.taus = {tau};
    c.sign = opts.sign;
    return c;
  };

  // Every (dim, size, tau) combination in turn, `instances` times in total.
  {
    double gap = 0.0;
    const std::size_t combos = opts.dims.size() * opts.sizes.size() * opts.taus.size();
    for (int i = 0; i < opts.instances; ++i) {
      const std::size_t c = static_cast<std::size_t>(i) % combos;
      const Eigen::Index d = opts.dims[c % opts.dims.size()];
      const Eigen::Index b = opts.sizes[(c / opts.dims.size()) % opts.sizes.size()];
      const double tau = opts.taus[c / (opts.dims.size() * opts.sizes.size())];
      const DriftInstance inst = make_instance(opts.seed, i, b, d);
      const DriftConfig cfg = cfg_for(tau);
      const Matrix sum = drift(inst.queries, inst.positives, inst.negatives, cfg).matrix() +
                         drift(inst.queries, inst.negatives, inst.positives, cfg).matrix();
      gap = std::max(gap, sum.cwiseAbs().maxCoeff());
    }
    out.push_back(finish("anti_symmetry", opts.instances, gap, 1e-12));
  }

  int idx = 0;
  {
    double gap = 0.0;
    int count = 0;
    for (Eigen::Index d : opts.dims) {
      for (Eigen::Index b : opts.sizes) {
        const DriftInstance inst = make_instance(opts.seed, idx++, b, d);
        const DriftConfig cfg = cfg_for(1.0);
        gap = std::max(gap, drift(inst.queries, inst.positives, inst.positives, cfg)
                                .matrix()
                                .cwiseAbs()
                                .maxCoeff());
        for (int k : {0, 1, 3}) {
          const SampleBatch t =
              lookahead_target(inst.positives, inst.positives, LookaheadPlan::uniform(k), cfg);
          gap = std::max(gap, (t.matrix() - inst.positives.matrix()).cwiseAbs().maxCoeff());
        }
        ++count;
      }
    }
    out.push_back(finish("fixed_point", count, gap, 0.0));
  }

  {
    double rewrite_gap = 0.0, extra_gap = 0.0;
    int count = 0;
    for (Eigen::Index d : opts.dims) {
      for (Eigen::Index b : opts.sizes) {
        const DriftInstance inst = make_instance(opts.seed, idx++, b, d);
        const DriftConfig cfg = cfg_for(1.0);
        for (Eigen::Index q : {Eigen::Index{0}, b / 2, b - 1}) {
          const DecompositionReport r = verify_rewrite(q, inst.negatives, inst.positives, cfg);
          rewrite_gap = std::max(rewrite_gap, r.max_abs_gap);
          extra_gap = std::max(extra_gap, extra_term_gap(r));
          ++count;
        }
      }
    }
    out.push_back(finish("rewrite_identity", count, rewrite_gap, 1e-10));
    out.push_back(finish("extra_term", count, extra_gap, 1e-10));
  }

  {
    double gap = 0.0;
    int count = 0;
    for (Eigen::Index d : opts.dims) {
      for (Eigen::Index b : opts.sizes) {
        const DriftInstance inst = make_instance(opts.seed, idx++, b, d);
        const DriftConfig cfg = cfg_for(1.0);
        const SampleBatch t =
            lookahead_target(inst.negatives, inst.positives, LookaheadPlan::uniform(0), cfg);
        const Matrix expected =
            inst.negatives.matrix() +
            drift(inst.negatives, inst.positives, inst.negatives, cfg).matrix();
        gap = std::max(gap, (t.matrix() - expected).cwiseAbs().maxCoeff());
        ++count;
      }
    }
    out.push_back(finish("k0_reduction", count, gap, 1e-12));
  }

  // Locality: kernel values lie in (0, 1] and shrink with distance, and a
  // query sitting on one of two far-apart clusters has its weighted mean on
  // that cluster. The gap is the worst violation.
  {
    double gap = 0.0;
    int count = 0;
    Rng rng(opts.seed, 999);
    for (double tau : opts.taus) {
      for (Eigen::Index d : opts.dims) {
        const SampleBatch pair = gaussian_batch(rng, 3, d, 1.0, 0.0);
        const RowVector x = pair.row(0), y = pair.row(1), z = pair.row(2);
        const double kxy = laplace_kernel(x, y, tau, opts.sign);
        const double kxz = laplace_kernel(x, z, tau, opts.sign);
        gap = std::max({gap, kxy - 1.0, kxz - 1.0});
        if ((x - y).norm() < (x - z).norm()) {
          gap = std::max(gap, kxz - kxy);
        } else {
          gap = std::max(gap, kxy - kxz);
        }

        Matrix clusters(8, d);
        clusters.topRows(4) = gaussian_batch(rng, 4, d, 0.1, -5.0).matrix();
        clusters.bottomRows(4) = gaussian_batch(rng, 4, d, 0.1, 5.0).matrix();
        const SampleBatch batch(clusters);
        const RowVector query = clusters.row(0);
        const RowVector mean = weighted_mean(query, batch, tau, true, opts.sign);
        const RowVector near_centre = clusters.topRows(4).colwise().mean();
        const RowVector far_centre = clusters.bottomRows(4).colwise().mean();
        gap = std::max(gap, (mean - near_centre).norm() - (mean - far_centre).norm());
        ++count;
      }
    }
    out.push_back(finish("locality", count, std::max(gap, 0.0), 0.0));
  }
  return out;
}

}  // namespace lookdrift
