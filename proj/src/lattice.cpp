#include "dffg/lattice.hpp"

#include <stdexcept>
#include <string>

namespace dffg {

LatticeTopology::LatticeTopology(std::vector<std::size_t> dims, std::vector<bool> periodic)
    : dims_(std::move(dims)), periodic_(std::move(periodic)) {
  if (dims_.empty()) throw std::invalid_argument("lattice: dims must not be empty");
  if (dims_.size() > 3) throw std::invalid_argument("lattice: at most 3 dimensions are supported");
  if (periodic_.size() != dims_.size())
    throw std::invalid_argument("lattice: periodic flags must match the number of dims");
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (dims_[d] < 1) throw std::invalid_argument("lattice: every extent must be >= 1");
    if (periodic_[d] && dims_[d] < 2)
      throw std::invalid_argument("lattice: periodic dimension " + std::to_string(d) +
                                  " of extent 1 would create a self-loop");
  }

  strides_.assign(dims_.size(), 1);
  for (std::size_t d = dims_.size() - 1; d > 0; --d) strides_[d - 1] = strides_[d] * dims_[d];
  num_sites_ = strides_[0] * dims_[0];

  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const std::size_t extent = dims_[d];
    const std::size_t stride = strides_[d];
    for (std::size_t s = 0; s < num_sites_; ++s) {
      const std::size_t c = (s / stride) % extent;
      if (c + 1 < extent)
        bonds_.push_back({s, s + stride});
      else if (periodic_[d])
        bonds_.push_back({s, s - c * stride});
    }
  }

  std::vector<std::size_t> degree(num_sites_, 0);
  for (const Bond& b : bonds_) {
    ++degree[b.tail];
    ++degree[b.head];
  }
  offsets_.assign(num_sites_ + 1, 0);
  for (std::size_t s = 0; s < num_sites_; ++s) offsets_[s + 1] = offsets_[s] + degree[s];
  incidence_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < bonds_.size(); ++k) {
    incidence_[fill[bonds_[k].tail]++] = {k, +1};
    incidence_[fill[bonds_[k].head]++] = {k, -1};
  }
}

Bond LatticeTopology::bond_endpoints(std::size_t bond) const {
  if (bond >= bonds_.size())
    throw std::out_of_range("lattice: bond index " + std::to_string(bond) + " out of range");
  return bonds_[bond];
}

std::span<const Incidence> LatticeTopology::incident_bonds(std::size_t site) const {
  if (site >= num_sites_)
    throw std::out_of_range("lattice: site index " + std::to_string(site) + " out of range");
  return std::span<const Incidence>(incidence_).subspan(offsets_[site], offsets_[site + 1] - offsets_[site]);
}

std::vector<std::size_t> LatticeTopology::coordinates(std::size_t site) const {
  if (site >= num_sites_)
    throw std::out_of_range("lattice: site index " + std::to_string(site) + " out of range");
  std::vector<std::size_t> c(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) c[d] = (site / strides_[d]) % dims_[d];
  return c;
}

std::size_t LatticeTopology::site_index(std::span<const std::size_t> coords) const {
  if (coords.size() != dims_.size()) throw std::invalid_argument("lattice: coordinate rank mismatch");
  std::size_t s = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (coords[d] >= dims_[d]) throw std::out_of_range("lattice: coordinate out of range");
    s += coords[d] * strides_[d];
  }
  return s;
}

LatticeTopology build_lattice(std::vector<std::size_t> dims, std::vector<bool> periodic) {
  return LatticeTopology(std::move(dims), std::move(periodic));
}

}  // namespace dffg
