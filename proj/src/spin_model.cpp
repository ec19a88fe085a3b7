#include "dffg/spin_model.hpp"

#include <cmath>
#include <stdexcept>

namespace dffg {

std::string to_string(Family f) { return f == Family::kIsing ? "ising" : "potts"; }

Family family_from_string(const std::string& name) {
  if (name == "ising") return Family::kIsing;
  if (name == "potts") return Family::kPotts;
  throw std::invalid_argument("unknown model family '" + name + "'");
}

ModelSpec::ModelSpec(std::shared_ptr<const LatticeTopology> topo, Family family, int q,
                     std::vector<double> couplings, std::vector<double> fields)
    : topo_(std::move(topo)), family_(family), q_(q), couplings_(std::move(couplings)),
      fields_(std::move(fields)) {
  if (!topo_) throw std::invalid_argument("model: missing topology");
  if (family_ == Family::kIsing && q_ != 2) throw std::invalid_argument("model: Ising requires q = 2");
  if (q_ < 2 || q_ > kMaxAlphabet) throw std::invalid_argument("model: q must be in [2, 256]");
  if (couplings_.size() != topo_->num_bonds())
    throw std::invalid_argument("model: need one coupling per bond");
  if (fields_.size() != topo_->num_sites()) throw std::invalid_argument("model: need one field per site");

  for (double j : couplings_)
    if (!(j > 0.0) || !std::isfinite(j)) throw std::invalid_argument("model: couplings must be finite and > 0");

  bool any_pos = false, any_neg = false;
  for (double h : fields_) {
    if (!std::isfinite(h)) throw std::invalid_argument("model: fields must be finite");
    any_pos |= h > 0.0;
    any_neg |= h < 0.0;
  }
  if (family_ == Family::kIsing) {
    if (any_pos && any_neg) throw std::invalid_argument("model: Ising fields must have a consistent sign");
    if (any_pos) {
      for (double& h : fields_) h = -h;
      fields_negated_ = true;
    }
  } else if (any_neg) {
    throw std::invalid_argument("model: Potts fields must be >= 0");
  }
}

ModelSpec ModelSpec::with_fields(std::vector<double> fields) const {
  return ModelSpec(topo_, family_, q_, couplings_, std::move(fields));
}

std::vector<std::string> model_warnings(const ModelSpec& model) {
  std::vector<std::string> out;
  std::size_t zero = 0;
  for (double h : model.fields()) zero += h == 0.0;
  if (zero > 0)
    out.push_back(std::to_string(zero) +
                  " site(s) have zero field; dual site factors vanish off 0 and importance weights may be exactly zero");
  return out;
}

double hamiltonian(const ModelSpec& model, std::span<const Symbol> x) {
  const auto& topo = model.topology();
  if (x.size() != topo.num_sites()) throw std::invalid_argument("hamiltonian: configuration length mismatch");
  for (Symbol v : x)
    if (v >= model.q()) throw std::invalid_argument("hamiltonian: spin value out of alphabet");

  double e = 0.0;
  const auto bonds = topo.bonds();
  if (model.family() == Family::kIsing) {
    for (std::size_t k = 0; k < bonds.size(); ++k)
      e -= model.coupling(k) * (x[bonds[k].tail] == x[bonds[k].head] ? 1.0 : -1.0);
    for (std::size_t m = 0; m < x.size(); ++m) e -= model.field(m) * (x[m] == 1 ? 1.0 : -1.0);
  } else {
    for (std::size_t k = 0; k < bonds.size(); ++k)
      if (x[bonds[k].tail] == x[bonds[k].head]) e -= model.coupling(k);
    for (std::size_t m = 0; m < x.size(); ++m)
      if (x[m] == 0) e -= model.field(m);
  }
  return e;
}

double boltzmann_log_weight(const ModelSpec& model, std::span<const Symbol> x) {
  return -hamiltonian(model, x);
}

namespace {

std::vector<double> draw(const ParamSpec& spec, std::size_t n, Rng& rng, const char* what) {
  return std::visit(
      [&](const auto& s) -> std::vector<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantParam>) {
          return std::vector<double>(n, s.value);
        } else if constexpr (std::is_same_v<T, UniformParam>) {
          if (!(s.low <= s.high))
            throw std::invalid_argument(std::string("sample_params: empty range for ") + what);
          std::vector<double> v(n);
          for (double& x : v) x = s.low + (s.high - s.low) * uniform01(rng);
          return v;
        } else {
          if (s.values.size() != n)
            throw std::invalid_argument(std::string("sample_params: wrong number of explicit ") + what);
          return s.values;
        }
      },
      spec);
}

}  // namespace

ModelSpec sample_params(std::shared_ptr<const LatticeTopology> topo, Family family, int q,
                        const ParamSpec& couplings, const ParamSpec& fields, Rng& rng) {
  if (!topo) throw std::invalid_argument("sample_params: missing topology");
  if (const auto* u = std::get_if<UniformParam>(&couplings); u && !(u->low > 0.0))
    throw std::invalid_argument("sample_params: coupling range must be strictly positive");
  if (const auto* u = std::get_if<UniformParam>(&fields)) {
    if (family == Family::kIsing && u->low < 0.0 && u->high > 0.0)
      throw std::invalid_argument("sample_params: Ising field range straddles zero");
    if (family == Family::kPotts && u->low < 0.0)
      throw std::invalid_argument("sample_params: Potts field range must be >= 0");
  }
  auto j = draw(couplings, topo->num_bonds(), rng, "couplings");
  auto h = draw(fields, topo->num_sites(), rng, "fields");
  return ModelSpec(std::move(topo), family, q, std::move(j), std::move(h));
}

}  // namespace dffg
