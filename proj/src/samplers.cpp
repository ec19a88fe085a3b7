#include "dffg/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dffg/estimator.hpp"
#include "dffg/log_math.hpp"

namespace dffg {

void draw_is_sample(const DualFactors& factors, Rng& rng, std::span<Symbol> x_A) {
  if (x_A.size() != factors.num_bonds()) throw std::invalid_argument("draw_is_sample: length mismatch");
  const auto p0 = factors.zero_probabilities();
  const int q = factors.q();
  if (q == 2) {
    for (std::size_t k = 0; k < x_A.size(); ++k) x_A[k] = uniform01(rng) < p0[k] ? 0 : 1;
    return;
  }
  for (std::size_t k = 0; k < x_A.size(); ++k) {
    if (uniform01(rng) < p0[k])
      x_A[k] = 0;
    else
      x_A[k] = static_cast<Symbol>(1 + symbol_from_uniform(q - 1, uniform01(rng)));
  }
}

Symbol symbol_from_uniform(int q, double u) {
  const int v = static_cast<int>(std::floor(q * u));
  return static_cast<Symbol>(v >= q ? q - 1 : (v < 0 ? 0 : v));
}

void draw_uniform_sample(int q, Rng& rng, std::span<Symbol> x_A) {
  for (Symbol& v : x_A) v = symbol_from_uniform(q, uniform01(rng));
}

GibbsState::GibbsState(const DualFactors& factors, std::vector<Symbol> x_A) : x_A_(std::move(x_A)) {
  if (x_A_.size() != factors.num_bonds()) throw std::invalid_argument("GibbsState: x_A length mismatch");
  rebase(factors);
}

void GibbsState::rebase(const DualFactors& factors) {
  x_B_.assign(factors.num_sites(), 0);
  dual_site_values(factors.topology(), factors.q(), x_A_, x_B_);
  site_log_lambda_.resize(x_B_.size());
  for (std::size_t m = 0; m < x_B_.size(); ++m) site_log_lambda_[m] = factors.log_lambda_scaled(m, x_B_[m]);
}

double GibbsState::log_Lambda_scaled() const {
  double s = 0.0;
  for (double v : site_log_lambda_) s += v;
  return s;
}

void GibbsState::flip_bond(const DualFactors& factors, std::size_t bond) {
  if (factors.q() != 2) throw std::logic_error("flip_bond: Ising only");
  const Bond b = factors.topology().bond_endpoints(bond);
  x_A_[bond] ^= 1;
  x_B_[b.tail] ^= 1;
  x_B_[b.head] ^= 1;
  site_log_lambda_[b.tail] = factors.log_lambda_scaled(b.tail, x_B_[b.tail]);
  site_log_lambda_[b.head] = factors.log_lambda_scaled(b.head, x_B_[b.head]);
}

bool GibbsState::consistent(const DualFactors& factors) const {
  std::vector<Symbol> fresh(factors.num_sites());
  dual_site_values(factors.topology(), factors.q(), x_A_, fresh);
  return fresh == x_B_;
}

double gibbs_conditional_one(const GibbsState& state, const DualFactors& factors, std::size_t bond) {
  const Bond b = factors.topology().bond_endpoints(bond);
  const Symbol cur = state.x_A()[bond];
  // Site values with this bond set to 0.
  const Symbol m0 = state.x_B()[b.tail] ^ cur;
  const Symbol n0 = state.x_B()[b.head] ^ cur;
  const double w0 = factors.log_gamma_scaled(bond, 0) + factors.log_lambda_scaled(b.tail, m0) +
                    factors.log_lambda_scaled(b.head, n0);
  const double w1 = factors.log_gamma_scaled(bond, 1) + factors.log_lambda_scaled(b.tail, m0 ^ 1) +
                    factors.log_lambda_scaled(b.head, n0 ^ 1);
  if (is_log_zero(w1)) return is_log_zero(w0) ? static_cast<double>(cur) : 0.0;
  if (is_log_zero(w0)) return 1.0;
  return 1.0 / (1.0 + std::exp(w0 - w1));
}

void gibbs_sweep(GibbsState& state, const DualFactors& factors, Rng& rng) {
  if (factors.q() != 2) throw std::logic_error("gibbs_sweep: only the Ising dual graph is supported");
  if (state.x_A_.size() != factors.num_bonds()) throw std::invalid_argument("gibbs_sweep: state size mismatch");
  for (std::size_t k = 0; k < state.x_A_.size(); ++k) {
    const double p1 = gibbs_conditional_one(state, factors, k);
    const Symbol next = uniform01(rng) < p1 ? 1 : 0;
    if (next != state.x_A_[k]) state.flip_bond(factors, k);
  }
  if (state.checked && !state.consistent(factors))
    throw std::logic_error("gibbs_sweep: site values diverged from the bond assignment");
}

void AnnealSchedule::validate() const {
  if (exponents.empty() || exponents.front() != 1.0)
    throw std::invalid_argument("anneal schedule: first exponent must be exactly 1");
  for (std::size_t v = 1; v < exponents.size(); ++v)
    if (!(exponents[v] > exponents[v - 1]))
      throw std::invalid_argument("anneal schedule: exponents must be strictly increasing");
  if (sweeps_per_level == 0) throw std::invalid_argument("anneal schedule: sweeps_per_level must be positive");
  if (samples_at_top == 0) throw std::invalid_argument("anneal schedule: samples_at_top must be positive");
}

ModelSpec anneal_fields(const ModelSpec& model, double alpha) {
  std::vector<double> h(model.fields().begin(), model.fields().end());
  for (double& x : h) x = std::copysign(std::pow(std::fabs(x), alpha), x);
  return model.with_fields(std::move(h));
}

namespace {

// Squared relative SE of the mean of exp(logs) from batch means, which absorbs
// the autocorrelation of successive Gibbs sweeps.
double batch_relative_variance(const std::vector<double>& logs) {
  const std::size_t n = logs.size();
  if (n < 2) return 0.0;
  const double top = *std::max_element(logs.begin(), logs.end());
  const std::size_t batches = n >= 20 ? 10 : n;
  const std::size_t per = n / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) means[b] += std::exp(logs[i] - top);
    means[b] /= static_cast<double>(per);
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= static_cast<double>(batches);
  double v = 0.0;
  for (double x : means) v += (x - m) * (x - m);
  v /= static_cast<double>(batches - 1);
  return v / static_cast<double>(batches) / (m * m);
}

}  // namespace

AisResult ais_run(const ModelSpec& model, const AnnealSchedule& schedule, Rng& rng) {
  schedule.validate();
  if (model.family() != Family::kIsing) throw std::invalid_argument("ais_run: Ising family only");
  AisResult result;
  bool saw_one = false, saw_weak = false;
  for (double h : model.fields()) {
    if (h == 0.0) throw std::invalid_argument("ais_run: every field must be nonzero");
    saw_one |= std::fabs(h) == 1.0;
    saw_weak |= std::fabs(h) < 1.0;
  }
  const std::size_t top = schedule.exponents.size() - 1;
  if (saw_one && top > 0) result.warnings.push_back("some |H_m| = 1: annealing leaves those fields unchanged");
  if (saw_weak && top > 0)
    result.warnings.push_back("some |H_m| < 1: raising to alpha > 1 weakens those fields");

  std::vector<DualFactors> levels;
  levels.reserve(top + 1);
  for (double a : schedule.exponents) levels.emplace_back(anneal_fields(model, a));

  // Top level: plain importance sampling of Z_d(|H|^alpha_V).
  const DualFactors& f_top = levels[top];
  std::vector<Symbol> x_A(f_top.num_bonds());
  std::vector<Symbol> x_B(f_top.num_sites());
  EstimateAccumulator acc;
  for (std::uint64_t l = 0; l < schedule.samples_at_top; ++l) {
    draw_is_sample(f_top, rng, x_A);
    dual_site_values(f_top.topology(), 2, x_A, x_B);
    acc.add(log_Lambda_scaled(f_top, x_B));
  }
  const double top_log = acc.log_mean_weight() + f_top.log_scale_sites() + f_top.log_Zq();
  double rel_var_sum = acc.count() > 1 ? variance_diagnostics(acc).relative_variance / acc.count() : 0.0;
  result.levels.push_back({schedule.exponents[top], top_log, variance_diagnostics(acc).relative_variance,
                           acc.count()});
  double log_zd = top_log;

  GibbsState state(f_top, x_A);
  for (std::size_t v = top; v-- > 0;) {
    const DualFactors& target = levels[v + 1];
    const DualFactors& lower = levels[v];
    state.rebase(target);
    for (std::uint64_t s = 0; s < schedule.burn_in; ++s) gibbs_sweep(state, target, rng);
    EstimateAccumulator ratio;
    std::vector<double> logs;
    logs.reserve(schedule.sweeps_per_level);
    for (std::uint64_t s = 0; s < schedule.sweeps_per_level; ++s) {
      gibbs_sweep(state, target, rng);
      const auto xb = state.x_B();
      double w = 0.0;
      for (std::size_t m = 0; m < xb.size(); ++m) w += lower.log_lambda(m, xb[m]) - target.log_lambda(m, xb[m]);
      ratio.add(w);
      logs.push_back(w);
    }
    const double rel_var = batch_relative_variance(logs);
    result.levels.push_back({schedule.exponents[v], ratio.log_mean_weight(), variance_diagnostics(ratio).relative_variance,
                             ratio.count()});
    log_zd += ratio.log_mean_weight();
    rel_var_sum += rel_var;
  }

  result.log_Zd = log_zd;
  result.log_Z = log_zd - levels.front().log_duality_C();
  result.se_log = std::sqrt(rel_var_sum);
  return result;
}

}  // namespace dffg
