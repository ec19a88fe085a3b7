#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dffg/lattice.hpp"
#include "dffg/rng.hpp"

namespace dffg {

enum class Family { kIsing, kPotts };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Spin or dual-variable value in {0, ..., q-1}.
using Symbol = std::uint8_t;
inline constexpr int kMaxAlphabet = 256;

using SpinConfig = std::vector<Symbol>;

/// Ferromagnetic Ising or q-state Potts model at beta = 1.
///
/// Ising fields are stored canonicalized to H_m <= 0 (Z is invariant under a
/// global field flip); an all-nonnegative input is negated, mixed signs are
/// rejected. Potts fields must be >= 0 and act on state 0.
class ModelSpec {
 public:
  ModelSpec(std::shared_ptr<const LatticeTopology> topo, Family family, int q,
            std::vector<double> couplings, std::vector<double> fields);

  Family family() const { return family_; }
  int q() const { return q_; }
  const LatticeTopology& topology() const { return *topo_; }
  const std::shared_ptr<const LatticeTopology>& shared_topology() const { return topo_; }
  std::span<const double> couplings() const { return couplings_; }
  std::span<const double> fields() const { return fields_; }
  double coupling(std::size_t bond) const { return couplings_[bond]; }
  double field(std::size_t site) const { return fields_[site]; }

  /// True if Ising input fields were negated during canonicalization.
  bool fields_negated() const { return fields_negated_; }

  /// Same couplings, new fields (validated and canonicalized again).
  ModelSpec with_fields(std::vector<double> fields) const;

 private:
  std::shared_ptr<const LatticeTopology> topo_;
  Family family_;
  int q_;
  std::vector<double> couplings_;
  std::vector<double> fields_;
  bool fields_negated_ = false;
};

/// Human-readable warnings about degenerate but legal parameters.
std::vector<std::string> model_warnings(const ModelSpec& model);

double hamiltonian(const ModelSpec& model, std::span<const Symbol> x);

/// ln f(x) = -H(x).
double boltzmann_log_weight(const ModelSpec& model, std::span<const Symbol> x);

struct ConstantParam {
  double value;
};
struct UniformParam {
  double low;
  double high;
};
struct ExplicitParam {
  std::vector<double> values;
};
using ParamSpec = std::variant<ConstantParam, UniformParam, ExplicitParam>;

/// Draws per-bond J and per-site H i.i.d. from the given specs (bonds first, then sites).
ModelSpec sample_params(std::shared_ptr<const LatticeTopology> topo, Family family, int q,
                        const ParamSpec& couplings, const ParamSpec& fields, Rng& rng);

}  // namespace dffg
