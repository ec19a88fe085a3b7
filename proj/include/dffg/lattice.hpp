#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dffg {

struct Bond {
  std::size_t tail;
  std::size_t head;
  bool operator==(const Bond&) const = default;
};

/// One bond touching a site. sign is +1 when the site is the bond's tail, -1 at the head.
struct Incidence {
  std::size_t bond;
  int sign;
  bool operator==(const Incidence&) const = default;
};

/// Hypercubic lattice (1 to 3 dimensions, each open or periodic).
///
/// Sites are row-major over dims: the last dimension varies fastest.
/// Bonds are ordered dimension-major, then by the site at their lower coordinate.
/// The tail of an interior bond is its lower-index site; a wraparound bond
/// runs from the site at coordinate L-1 (tail) to the site at 0 (head).
/// A periodic extent of 2 yields two parallel bonds between the same sites.
class LatticeTopology {
 public:
  LatticeTopology(std::vector<std::size_t> dims, std::vector<bool> periodic);

  std::size_t dimension() const { return dims_.size(); }
  std::size_t num_sites() const { return num_sites_; }
  std::size_t num_bonds() const { return bonds_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<bool>& periodic() const { return periodic_; }

  std::span<const Bond> bonds() const { return bonds_; }
  Bond bond_endpoints(std::size_t bond) const;
  std::span<const Incidence> incident_bonds(std::size_t site) const;

  std::vector<std::size_t> coordinates(std::size_t site) const;
  std::size_t site_index(std::span<const std::size_t> coords) const;

  bool operator==(const LatticeTopology& other) const {
    return dims_ == other.dims_ && periodic_ == other.periodic_;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<bool> periodic_;
  std::vector<std::size_t> strides_;
  std::size_t num_sites_ = 0;
  std::vector<Bond> bonds_;
  // CSR incidence: incidence_[offsets_[s] .. offsets_[s+1]) belongs to site s.
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidence_;
};

/// Validating factory; throws std::invalid_argument on bad shapes.
LatticeTopology build_lattice(std::vector<std::size_t> dims, std::vector<bool> periodic);

}  // namespace dffg
