#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dffg/lattice.hpp"
#include "dffg/spin_model.hpp"

namespace dffg {

/// Factor tables of the modified dual graph.
///
/// Each bond carries gamma_k over its dual variable and each site carries
/// lambda_m over the site value implied by the bonds. Tables are kept in the
/// log domain in two forms: raw (the transforms themselves) and scaled, where
/// each table is divided by a per-factor constant so that entry 0 is 1. For
/// Ising the scaled tables are tanh(J)^x and tanh|H|^x.
class DualFactors {
 public:
  explicit DualFactors(const ModelSpec& model);

  Family family() const { return family_; }
  int q() const { return q_; }
  const LatticeTopology& topology() const { return *topo_; }
  std::size_t num_bonds() const { return num_bonds_; }
  std::size_t num_sites() const { return num_sites_; }

  double log_gamma(std::size_t bond, Symbol v) const { return gamma_scale_[bond] + log_gamma_scaled(bond, v); }
  double log_lambda(std::size_t site, Symbol v) const { return lambda_scale_[site] + log_lambda_scaled(site, v); }
  double log_gamma_scaled(std::size_t bond, Symbol v) const { return v == 0 ? 0.0 : gamma_nonzero_[bond]; }
  double log_lambda_scaled(std::size_t site, Symbol v) const { return v == 0 ? 0.0 : lambda_nonzero_[site]; }

  /// Per-factor scales (log of the raw entry at 0).
  double log_gamma_scale(std::size_t bond) const { return gamma_scale_[bond]; }
  double log_lambda_scale(std::size_t site) const { return lambda_scale_[site]; }

  /// Probability that bond k takes value 0 under the auxiliary product distribution.
  double zero_probability(std::size_t bond) const { return zero_prob_[bond]; }
  std::span<const double> zero_probabilities() const { return zero_prob_; }

  /// ln of the product of all per-factor scales.
  double log_scale_S() const { return log_scale_bonds_ + log_scale_sites_; }
  double log_scale_bonds() const { return log_scale_bonds_; }
  double log_scale_sites() const { return log_scale_sites_; }
  double log_Zq() const { return log_Zq_; }
  double log_duality_C() const { return log_C_; }

 private:
  std::shared_ptr<const LatticeTopology> topo_;
  Family family_;
  int q_;
  std::size_t num_bonds_;
  std::size_t num_sites_;
  // All nonzero dual values share one table entry for both families.
  std::vector<double> gamma_nonzero_;
  std::vector<double> lambda_nonzero_;
  std::vector<double> gamma_scale_;
  std::vector<double> lambda_scale_;
  std::vector<double> zero_prob_;
  double log_scale_bonds_ = 0.0;
  double log_scale_sites_ = 0.0;
  double log_Zq_ = 0.0;
  double log_C_ = 0.0;
};

inline DualFactors dual_factors(const ModelSpec& model) { return DualFactors(model); }

/// Bond and site assignment of the dual graph; x_B is always the image of x_A.
struct DualConfig {
  std::vector<Symbol> x_A;
  std::vector<Symbol> x_B;
};

/// Site value forced by the site's sum-to-zero constraint:
/// x_B = -(sum over incident bonds of sign * x_A) mod q, with the sign inverter
/// at each bond's head. For q = 2 this is the XOR of the incident bonds.
Symbol dual_site_value(const LatticeTopology& topo, int q, std::span<const Symbol> x_A, std::size_t site);

/// All site values at once; x_B must have num_sites entries.
void dual_site_values(const LatticeTopology& topo, int q, std::span<const Symbol> x_A, std::span<Symbol> x_B);

DualConfig make_dual_config(const LatticeTopology& topo, int q, std::vector<Symbol> x_A);

/// |B| ln 4 + sum J (Ising), 2|B| ln q + sum J (Potts).
double log_Zq(const ModelSpec& model);

/// ln C where Z_d = C * Z; C = q^(2|B|).
double log_duality_constant(const ModelSpec& model);

/// ln Gamma(x_A) / ln Lambda(x_B) over raw tables; kLogZero if any entry is 0.
double log_Gamma(const DualFactors& factors, std::span<const Symbol> x_A);
double log_Lambda(const DualFactors& factors, std::span<const Symbol> x_B);

/// Same over scaled tables.
double log_Gamma_scaled(const DualFactors& factors, std::span<const Symbol> x_A);
double log_Lambda_scaled(const DualFactors& factors, std::span<const Symbol> x_B);

}  // namespace dffg
