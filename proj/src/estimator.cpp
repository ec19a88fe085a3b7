#include "dffg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dffg/log_math.hpp"
#include "dffg/samplers.hpp"

namespace dffg {

void EstimateAccumulator::ShiftedSum::add(double x) {
  if (is_log_zero(x)) return;
  if (x > shift) {
    sum = sum * std::exp(shift - x) + 1.0;
    shift = x;
  } else {
    sum += std::exp(x - shift);
  }
}

void EstimateAccumulator::ShiftedSum::merge(const ShiftedSum& o) {
  if (o.sum == 0.0) return;
  if (sum == 0.0) {
    *this = o;
    return;
  }
  if (o.shift > shift) {
    sum = sum * std::exp(shift - o.shift) + o.sum;
    shift = o.shift;
  } else {
    sum += o.sum * std::exp(o.shift - shift);
  }
}

double EstimateAccumulator::ShiftedSum::log() const { return sum > 0.0 ? shift + std::log(sum) : kLogZero; }

void EstimateAccumulator::add(double log_weight) {
  ++count_;
  w_.add(log_weight);
  w2_.add(is_log_zero(log_weight) ? kLogZero : 2.0 * log_weight);
}

void EstimateAccumulator::merge(const EstimateAccumulator& other) {
  count_ += other.count_;
  w_.merge(other.w_);
  w2_.merge(other.w2_);
}

double EstimateAccumulator::log_sum() const { return w_.log(); }
double EstimateAccumulator::log_sum_sq() const { return w2_.log(); }

double EstimateAccumulator::log_mean_weight() const {
  if (count_ == 0 || w_.sum == 0.0) return kLogZero;
  // Grouped so that identical weights reproduce their value exactly.
  return w_.shift + (std::log(w_.sum) - std::log(static_cast<double>(count_)));
}

VarianceDiagnostics variance_diagnostics(const EstimateAccumulator& acc) {
  VarianceDiagnostics d;
  const double L = static_cast<double>(acc.count());
  if (acc.count() == 0 || is_log_zero(acc.log_sum())) return d;
  const double log_m1 = acc.log_sum() - std::log(L);
  const double log_m2 = acc.log_sum_sq() - std::log(L);
  // m2 / m1^2 >= 1 up to rounding.
  const double ratio = std::exp(log_m2 - 2.0 * log_m1);
  d.ess = L / ratio;
  if (acc.count() < 2) return d;
  d.defined = true;
  d.relative_variance = std::max(ratio - 1.0, 0.0);
  d.relative_se = std::sqrt(d.relative_variance / L);
  d.log_se = d.relative_variance > 0.0 ? log_m1 + std::log(d.relative_se) : kLogZero;
  return d;
}

std::vector<std::uint64_t> checkpoint_indices(std::uint64_t L, const CheckpointPlan& plan) {
  std::vector<std::uint64_t> idx;
  if (L == 0) return idx;
  if (plan.stride > 0) {
    for (std::uint64_t i = plan.stride; i < L; i += plan.stride) idx.push_back(i);
  } else if (plan.log_points > 1) {
    const double top = std::log(static_cast<double>(L));
    for (std::uint32_t p = 0; p < plan.log_points; ++p) {
      const double t = top * p / (plan.log_points - 1);
      const auto i = static_cast<std::uint64_t>(std::llround(std::exp(t)));
      if (i >= 1 && i < L && (idx.empty() || i > idx.back())) idx.push_back(i);
    }
  }
  idx.push_back(L);
  return idx;
}

EstimateAccumulator make_accumulator(const DualFactors& f, SamplerKind kind) {
  if (kind == SamplerKind::kImportance) return EstimateAccumulator(f.log_scale_sites(), f.log_Zq(), f.log_duality_C());
  const double log_states = static_cast<double>(f.num_bonds()) * std::log(static_cast<double>(f.q()));
  return EstimateAccumulator(f.log_scale_S(), log_states, f.log_duality_C());
}

double next_log_weight(const DualFactors& f, SamplerKind kind, Rng& rng, std::span<Symbol> x_A,
                       std::span<Symbol> x_B) {
  if (kind == SamplerKind::kImportance) {
    draw_is_sample(f, rng, x_A);
    dual_site_values(f.topology(), f.q(), x_A, x_B);
    return log_Lambda_scaled(f, x_B);
  }
  draw_uniform_sample(f.q(), rng, x_A);
  dual_site_values(f.topology(), f.q(), x_A, x_B);
  return log_Gamma_scaled(f, x_A) + log_Lambda_scaled(f, x_B);
}

namespace {

Checkpoint to_checkpoint(const EstimateAccumulator& acc, std::size_t num_sites) {
  const auto d = variance_diagnostics(acc);
  const double n = static_cast<double>(num_sites);
  return {acc.count(), acc.log_Z() / n, d.defined ? d.relative_se / n : std::nan("")};
}

EstimateSeries finish(const EstimateAccumulator& acc, std::vector<Checkpoint> cps, std::size_t num_sites) {
  EstimateSeries s;
  s.checkpoints = std::move(cps);
  s.samples = acc.count();
  s.ln_Zd = acc.log_Zd();
  s.ln_Z = acc.log_Z();
  s.per_site_ln_Z = free_energy_per_site(s.ln_Z, num_sites);
  s.diagnostics = variance_diagnostics(acc);
  s.se_per_site = s.diagnostics.defined ? s.diagnostics.relative_se / static_cast<double>(num_sites) : std::nan("");
  return s;
}

/// One chain; snapshots taken after each count in `at` (ascending, may repeat or be 0).
EstimateAccumulator run_one_chain(const DualFactors& f, SamplerKind kind, std::uint64_t L, Rng& rng,
                                  const std::vector<std::uint64_t>& at, std::vector<EstimateAccumulator>* snaps) {
  EstimateAccumulator acc = make_accumulator(f, kind);
  std::vector<Symbol> x_A(f.num_bonds());
  std::vector<Symbol> x_B(f.num_sites());
  std::size_t next = 0;
  auto take = [&] {
    while (snaps && next < at.size() && at[next] == acc.count()) {
      (*snaps)[next++] = acc;
    }
  };
  take();
  for (std::uint64_t l = 0; l < L; ++l) {
    acc.add(next_log_weight(f, kind, rng, x_A, x_B));
    take();
  }
  return acc;
}

EstimateSeries run_single(const ModelSpec& model, SamplerKind kind, std::uint64_t L, Rng& rng,
                          const CheckpointPlan& plan) {
  if (L < 1) throw std::invalid_argument("estimator: need at least one sample");
  const DualFactors f(model);
  const auto at = checkpoint_indices(L, plan);
  std::vector<EstimateAccumulator> snaps(at.size());
  const auto acc = run_one_chain(f, kind, L, rng, at, &snaps);
  std::vector<Checkpoint> cps;
  for (const auto& s : snaps) cps.push_back(to_checkpoint(s, f.num_sites()));
  return finish(acc, std::move(cps), f.num_sites());
}

template <bool Parallel>
EstimateSeries run_chains_impl(const ModelSpec& model, SamplerKind kind, std::uint64_t L, std::uint64_t seed,
                               std::uint32_t chains, const CheckpointPlan& plan) {
  if (L < 1) throw std::invalid_argument("estimator: need at least one sample");
  if (chains < 1) throw std::invalid_argument("estimator: need at least one chain");
  const DualFactors f(model);
  const auto global = checkpoint_indices(L, plan);

  std::vector<std::uint64_t> share(chains, L / chains);
  for (std::uint32_t c = 0; c < L % chains; ++c) ++share[c];

  std::vector<std::vector<std::uint64_t>> local(chains);
  std::vector<std::vector<EstimateAccumulator>> snaps(chains);
  std::vector<EstimateAccumulator> finals(chains);
  for (std::uint32_t c = 0; c < chains; ++c) {
    for (std::uint64_t g : global) {
      // Chain-local position proportional to the global checkpoint.
      const auto n = static_cast<std::uint64_t>((static_cast<long double>(g) * share[c]) / L);
      local[c].push_back(g == L ? share[c] : n);
    }
    snaps[c].resize(global.size());
  }

  auto body = [&](std::int64_t c) {
    Rng rng = make_rng(seed, StreamKind::kChain, static_cast<std::uint64_t>(c));
    finals[c] = run_one_chain(f, kind, share[c], rng, local[c], &snaps[c]);
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chains); ++c) body(c);
  } else {
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chains); ++c) body(c);
  }

  std::vector<Checkpoint> cps;
  for (std::size_t j = 0; j < global.size(); ++j) {
    EstimateAccumulator merged = make_accumulator(f, kind);
    for (std::uint32_t c = 0; c < chains; ++c) merged.merge(snaps[c][j]);
    if (merged.count() == 0 || (!cps.empty() && merged.count() <= cps.back().index)) continue;
    cps.push_back(to_checkpoint(merged, f.num_sites()));
  }
  EstimateAccumulator total = make_accumulator(f, kind);
  for (const auto& a : finals) total.merge(a);
  return finish(total, std::move(cps), f.num_sites());
}

}  // namespace

EstimateSeries run_is(const ModelSpec& model, std::uint64_t L, Rng& rng, const CheckpointPlan& plan) {
  return run_single(model, SamplerKind::kImportance, L, rng, plan);
}

EstimateSeries run_uniform(const ModelSpec& model, std::uint64_t L, Rng& rng, const CheckpointPlan& plan) {
  return run_single(model, SamplerKind::kUniform, L, rng, plan);
}

EstimateSeries run_chains(const ModelSpec& model, SamplerKind kind, std::uint64_t L, std::uint64_t seed,
                          std::uint32_t chains, const CheckpointPlan& plan) {
  return run_chains_impl<true>(model, kind, L, seed, chains, plan);
}

EstimateSeries run_chains_serial(const ModelSpec& model, SamplerKind kind, std::uint64_t L, std::uint64_t seed,
                                 std::uint32_t chains, const CheckpointPlan& plan) {
  return run_chains_impl<false>(model, kind, L, seed, chains, plan);
}

}  // namespace dffg
