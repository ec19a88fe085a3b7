#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dffg/dual_graph.hpp"
#include "dffg/rng.hpp"

namespace dffg {

/// Streaming log-domain sums of importance weights w and w^2.
///
/// ln Z = ln(mean w) + log_scale + log_Zq - log_duality_C, where the offsets
/// restore whatever constant factors were dropped from the streamed weights.
class EstimateAccumulator {
 public:
  EstimateAccumulator() = default;
  EstimateAccumulator(double log_scale, double log_Zq, double log_duality_C)
      : log_scale_(log_scale), log_Zq_(log_Zq), log_C_(log_duality_C) {}

  void add(double log_weight);
  void merge(const EstimateAccumulator& other);

  std::uint64_t count() const { return count_; }
  double log_sum() const;
  double log_sum_sq() const;
  double log_mean_weight() const;

  double log_scale() const { return log_scale_; }
  double log_Zq() const { return log_Zq_; }
  double log_duality_C() const { return log_C_; }

  double log_Zd() const { return log_mean_weight() + log_scale_ + log_Zq_; }
  double log_Z() const { return log_Zd() - log_C_; }

 private:
  // sum_ is relative to shift_: actual sum = exp(shift_) * sum_.
  struct ShiftedSum {
    double shift = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    void add(double x);
    void merge(const ShiftedSum& o);
    double log() const;
  };
  std::uint64_t count_ = 0;
  ShiftedSum w_;
  ShiftedSum w2_;
  double log_scale_ = 0.0;
  double log_Zq_ = 0.0;
  double log_C_ = 0.0;
};

/// EstimateAccumulator::add as a free function.
inline void stream_update(EstimateAccumulator& acc, double log_weight) { acc.add(log_weight); }

struct VarianceDiagnostics {
  bool defined = false;        // false when L < 2 or all weights are zero
  double log_se = 0.0;         // ln SE of the mean weight (in streamed units)
  double relative_se = 0.0;    // SE(mean) / mean; also the delta-method SE of ln Z
  double relative_variance = 0.0;  // m2 / m1^2 - 1, the per-sample chi-squared estimate
  double ess = 0.0;            // L m1^2 / m2
};

/// SE = sqrt((m2 - m1^2) / L) and ESS = L m1^2 / m2 from the accumulated moments.
VarianceDiagnostics variance_diagnostics(const EstimateAccumulator& acc);

inline double free_energy_per_site(double ln_Z, std::size_t num_sites) {
  return ln_Z / static_cast<double>(num_sites);
}

struct Checkpoint {
  std::uint64_t index;
  double per_site_ln_Z;
  double se_per_site;
};

struct EstimateSeries {
  std::vector<Checkpoint> checkpoints;
  std::uint64_t samples = 0;
  double ln_Z = 0.0;
  double ln_Zd = 0.0;
  double per_site_ln_Z = 0.0;
  double se_per_site = 0.0;  // delta method: SE(r)/(r N)
  VarianceDiagnostics diagnostics;
};

/// Where running estimates are recorded. stride > 0 records every stride samples;
/// otherwise log_points log-spaced indices. The final index L is always recorded.
struct CheckpointPlan {
  std::uint64_t stride = 0;
  std::uint32_t log_points = 100;
};

std::vector<std::uint64_t> checkpoint_indices(std::uint64_t L, const CheckpointPlan& plan);

enum class SamplerKind { kImportance, kUniform };

/// Accumulator with the offsets appropriate to the sampler.
EstimateAccumulator make_accumulator(const DualFactors& factors, SamplerKind kind);

/// Scaled log-weight of the next draw; x_A and x_B are scratch buffers.
double next_log_weight(const DualFactors& factors, SamplerKind kind, Rng& rng, std::span<Symbol> x_A,
                       std::span<Symbol> x_B);

/// Importance sampling: weights Lambda(x_B) with x_A ~ q.
EstimateSeries run_is(const ModelSpec& model, std::uint64_t L, Rng& rng, const CheckpointPlan& plan = {});

/// Uniform sampling: weights q^|B| Gamma(x_A) Lambda(x_B) with x_A uniform.
EstimateSeries run_uniform(const ModelSpec& model, std::uint64_t L, Rng& rng, const CheckpointPlan& plan = {});

/// L samples split across independent chains seeded by sub_seed(seed, kChain, c).
/// Chain c draws L / chains samples, plus one if c < L % chains. Chains run under
/// OpenMP; results are merged in chain order, so output depends only on
/// (seed, chains) and not on the thread count.
EstimateSeries run_chains(const ModelSpec& model, SamplerKind kind, std::uint64_t L, std::uint64_t seed,
                          std::uint32_t chains, const CheckpointPlan& plan = {});

/// Single-threaded reference for run_chains.
EstimateSeries run_chains_serial(const ModelSpec& model, SamplerKind kind, std::uint64_t L, std::uint64_t seed,
                                 std::uint32_t chains, const CheckpointPlan& plan = {});

}  // namespace dffg
