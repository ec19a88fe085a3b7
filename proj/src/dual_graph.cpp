#include "dffg/dual_graph.hpp"

#include <cmath>
#include <stdexcept>

#include "dffg/log_math.hpp"

namespace dffg {

namespace {

double safe_log(double x) { return x > 0.0 ? std::log(x) : kLogZero; }

}  // namespace

DualFactors::DualFactors(const ModelSpec& model)
    : topo_(model.shared_topology()),
      family_(model.family()),
      q_(model.q()),
      num_bonds_(model.topology().num_bonds()),
      num_sites_(model.topology().num_sites()),
      gamma_nonzero_(num_bonds_),
      lambda_nonzero_(num_sites_),
      gamma_scale_(num_bonds_),
      lambda_scale_(num_sites_),
      zero_prob_(num_bonds_) {
  const double q = q_;
  for (std::size_t k = 0; k < num_bonds_; ++k) {
    const double j = model.coupling(k);
    double ratio;  // gamma_k(nonzero) / gamma_k(0)
    if (family_ == Family::kIsing) {
      gamma_scale_[k] = std::log(4.0) + log_cosh(j);
      ratio = std::tanh(j);
    } else {
      // q(e^J + q - 1) at 0 and q(e^J - 1) elsewhere.
      gamma_scale_[k] = std::log(q) + j + std::log1p((q - 1.0) * std::exp(-j));
      ratio = -std::expm1(-j) / (1.0 + (q - 1.0) * std::exp(-j));
    }
    gamma_nonzero_[k] = safe_log(ratio);
    zero_prob_[k] = 1.0 / (1.0 + (q - 1.0) * ratio);
    log_scale_bonds_ += gamma_scale_[k];
  }

  for (std::size_t m = 0; m < num_sites_; ++m) {
    const double h = model.field(m);
    double ratio;  // lambda_m(nonzero) / lambda_m(0)
    if (family_ == Family::kIsing) {
      if (h > 0.0) throw std::logic_error("dual_factors: Ising field must be canonicalized to H <= 0");
      // 2 cosh H at 0 and -2 sinh H at 1.
      lambda_scale_[m] = std::log(2.0) + log_cosh(h);
      ratio = std::tanh(std::fabs(h));
    } else {
      // e^H + q - 1 at 0 and e^H - 1 elsewhere.
      lambda_scale_[m] = h + std::log1p((q - 1.0) * std::exp(-h));
      ratio = -std::expm1(-h) / (1.0 + (q - 1.0) * std::exp(-h));
    }
    lambda_nonzero_[m] = safe_log(ratio);
    log_scale_sites_ += lambda_scale_[m];
  }

  log_Zq_ = dffg::log_Zq(model);
  log_C_ = log_duality_constant(model);
}

Symbol dual_site_value(const LatticeTopology& topo, int q, std::span<const Symbol> x_A, std::size_t site) {
  if (x_A.size() != topo.num_bonds()) throw std::invalid_argument("dual_site_value: x_A length mismatch");
  long sum = 0;
  for (const Incidence& inc : topo.incident_bonds(site)) sum += inc.sign * static_cast<long>(x_A[inc.bond]);
  long r = (-sum) % q;
  if (r < 0) r += q;
  return static_cast<Symbol>(r);
}

void dual_site_values(const LatticeTopology& topo, int q, std::span<const Symbol> x_A, std::span<Symbol> x_B) {
  if (x_A.size() != topo.num_bonds()) throw std::invalid_argument("dual_site_values: x_A length mismatch");
  if (x_B.size() != topo.num_sites()) throw std::invalid_argument("dual_site_values: x_B length mismatch");
  const auto bonds = topo.bonds();
  if (q == 2) {
    std::fill(x_B.begin(), x_B.end(), Symbol{0});
    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const Symbol v = x_A[k];
      x_B[bonds[k].tail] ^= v;
      x_B[bonds[k].head] ^= v;
    }
    return;
  }
  // Accumulate -(signed sum) mod q: tail adds q - v, head adds v.
  std::fill(x_B.begin(), x_B.end(), Symbol{0});
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    const int v = x_A[k];
    if (v == 0) continue;
    int t = x_B[bonds[k].tail] + (q - v);
    x_B[bonds[k].tail] = static_cast<Symbol>(t >= q ? t - q : t);
    int h = x_B[bonds[k].head] + v;
    x_B[bonds[k].head] = static_cast<Symbol>(h >= q ? h - q : h);
  }
}

DualConfig make_dual_config(const LatticeTopology& topo, int q, std::vector<Symbol> x_A) {
  DualConfig c{std::move(x_A), std::vector<Symbol>(topo.num_sites())};
  dual_site_values(topo, q, c.x_A, c.x_B);
  return c;
}

double log_Zq(const ModelSpec& model) {
  double sum_j = 0.0;
  for (double j : model.couplings()) sum_j += j;
  const double nb = static_cast<double>(model.topology().num_bonds());
  if (model.family() == Family::kIsing) return nb * std::log(4.0) + sum_j;
  return 2.0 * nb * std::log(static_cast<double>(model.q())) + sum_j;
}

double log_duality_constant(const ModelSpec& model) {
  return 2.0 * static_cast<double>(model.topology().num_bonds()) * std::log(static_cast<double>(model.q()));
}

double log_Gamma(const DualFactors& factors, std::span<const Symbol> x_A) {
  if (x_A.size() != factors.num_bonds()) throw std::invalid_argument("log_Gamma: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < x_A.size(); ++k) s += factors.log_gamma(k, x_A[k]);
  return s;
}

double log_Lambda(const DualFactors& factors, std::span<const Symbol> x_B) {
  if (x_B.size() != factors.num_sites()) throw std::invalid_argument("log_Lambda: length mismatch");
  double s = 0.0;
  for (std::size_t m = 0; m < x_B.size(); ++m) s += factors.log_lambda(m, x_B[m]);
  return s;
}

double log_Gamma_scaled(const DualFactors& factors, std::span<const Symbol> x_A) {
  if (x_A.size() != factors.num_bonds()) throw std::invalid_argument("log_Gamma_scaled: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < x_A.size(); ++k)
    if (x_A[k] != 0) s += factors.log_gamma_scaled(k, x_A[k]);
  return s;
}

double log_Lambda_scaled(const DualFactors& factors, std::span<const Symbol> x_B) {
  if (x_B.size() != factors.num_sites()) throw std::invalid_argument("log_Lambda_scaled: length mismatch");
  double s = 0.0;
  for (std::size_t m = 0; m < x_B.size(); ++m)
    if (x_B[m] != 0) s += factors.log_lambda_scaled(m, x_B[m]);
  return s;
}

}  // namespace dffg
