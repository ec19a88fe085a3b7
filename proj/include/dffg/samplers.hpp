#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dffg/dual_graph.hpp"
#include "dffg/rng.hpp"

namespace dffg {

/// Independent per-bond draw from the auxiliary distribution q(x_A) ∝ Gamma(x_A):
/// 0 with probability gamma(0) / sum gamma, otherwise uniform over {1, ..., q-1}.
void draw_is_sample(const DualFactors& factors, Rng& rng, std::span<Symbol> x_A);

/// floor(q * u), clamped so that u close to 1 never yields q.
Symbol symbol_from_uniform(int q, double u);

/// Each bond i.i.d. uniform on {0, ..., q-1}.
void draw_uniform_sample(int q, Rng& rng, std::span<Symbol> x_A);

/// Gibbs chain state over bond variables with site values kept in sync.
class GibbsState {
 public:
  GibbsState(const DualFactors& factors, std::vector<Symbol> x_A);

  std::span<const Symbol> x_A() const { return x_A_; }
  std::span<const Symbol> x_B() const { return x_B_; }

  /// Sum of cached per-site scaled log lambda contributions.
  double log_Lambda_scaled() const;

  /// Recompute site values and the per-site cache against new tables (same lattice).
  void rebase(const DualFactors& factors);

  /// Toggle bond k and both endpoint sites (Ising only). Applying twice is the identity.
  void flip_bond(const DualFactors& factors, std::size_t bond);

  /// True when x_B equals the linear image of x_A.
  bool consistent(const DualFactors& factors) const;

  /// When set, every sweep ends with a consistency check that throws std::logic_error.
  bool checked = false;

 private:
  friend void gibbs_sweep(GibbsState&, const DualFactors&, Rng&);
  std::vector<Symbol> x_A_;
  std::vector<Symbol> x_B_;
  std::vector<double> site_log_lambda_;
};

/// Probability that bond k is 1 given all other bonds (Ising).
double gibbs_conditional_one(const GibbsState& state, const DualFactors& factors, std::size_t bond);

/// One systematic scan over bonds 0..|B|-1, resampling each from its exact
/// conditional under p_d. Ising only.
void gibbs_sweep(GibbsState& state, const DualFactors& factors, Rng& rng);

/// Exponents 1 = alpha_0 < alpha_1 < ... < alpha_V applied to |H_m|.
struct AnnealSchedule {
  std::vector<double> exponents{1.0};
  std::uint64_t sweeps_per_level = 200;
  std::uint64_t burn_in = 20;
  std::uint64_t samples_at_top = 100000;

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
};

struct AisLevel {
  double alpha;
  double log_estimate;  // ln Z_d at the top level, ln Z_d(alpha_v)/Z_d(alpha_v+1) below
  double relative_variance;  // per-sample variance of the weights over their squared mean
  std::uint64_t samples;
};

struct AisResult {
  double log_Zd = 0.0;
  double log_Z = 0.0;
  double se_log = 0.0;  // delta-method SE of log_Zd; Gibbs levels use batch means
  std::vector<AisLevel> levels;  // top level first, then ratios walking down to alpha_0
  std::vector<std::string> warnings;
};

/// Model with every |H_m| raised to alpha, sign convention preserved.
ModelSpec anneal_fields(const ModelSpec& model, double alpha);

/// Estimates ln Z_d by plain importance sampling at alpha_V followed by
/// Gibbs-sampled ratio estimates at each level walking down to alpha_0 = 1.
AisResult ais_run(const ModelSpec& model, const AnnealSchedule& schedule, Rng& rng);

}  // namespace dffg
