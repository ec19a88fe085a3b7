#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dffg/spin_model.hpp"

namespace dffg {

/// Raised when an enumeration would exceed its hard size limit.
class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration i is decoded as a mixed-radix number with digit j (base q) the
// value of site j (primal) or bond j (dual); digit 0 is least significant.
inline constexpr std::uint64_t kMaxPrimalStates = 1ULL << 24;
inline constexpr std::uint64_t kMaxDualStates = 1ULL << 20;
inline constexpr std::uint64_t kMaxTableStates = 1ULL << 16;

/// q^n, or nullopt on overflow past 2^62.
std::optional<std::uint64_t> state_count(int q, std::size_t n);

void decode_config(std::uint64_t index, int q, std::span<Symbol> out);

/// ln Z by enumerating all q^N spin configurations. OpenMP over fixed index
/// blocks with an ordered reduction, so the result is thread-count independent.
double exact_log_Z(const ModelSpec& model);
double exact_log_Z_serial(const ModelSpec& model);

/// ln Z_d = ln sum over x_A of Gamma(x_A) Lambda(x_B(x_A)).
double exact_log_Zd(const ModelSpec& model);
double exact_log_Zd_serial(const ModelSpec& model);

/// Normalized p_d over all x_A, indexed by mixed-radix bond configuration.
std::vector<double> exact_dual_distribution(const ModelSpec& model);

/// The auxiliary product distribution q(x_A) in the same indexing.
std::vector<double> auxiliary_distribution(const ModelSpec& model);

/// sum p^2 / q - 1.
double chi_squared_divergence(std::span<const double> p, std::span<const double> q);

/// chi^2(p_d, q) for the model's dual graph.
double chi_squared(const ModelSpec& model);

struct ExactResult {
  double ln_Z = 0.0;
  double ln_Z_d = 0.0;
  std::optional<std::vector<double>> p_d;
  std::optional<double> chi_squared;
};

/// ln Z and ln Z_d; the table and chi^2 too when the dual space fits kMaxTableStates.
ExactResult exact(const ModelSpec& model, bool with_table);

/// CSV columns: config_index, x_A (digits, bond 0 first), probability.
void write_distribution_csv(std::ostream& os, const ModelSpec& model, std::span<const double> p_d);

}  // namespace dffg

namespace dffg {

struct GoodnessOfFit {
  double statistic = 0.0;
  std::size_t dof = 0;
  std::size_t cells = 0;  // after pooling
};

/// Pearson chi-square of observed counts against probabilities. Cells with
/// expected count below min_expected are pooled into one cell.
GoodnessOfFit pearson_gof(std::span<const std::uint64_t> counts, std::span<const double> probs,
                          double min_expected = 5.0);

/// Upper critical value of the chi-square distribution at the given quantile.
double chi_square_quantile(std::size_t dof, double quantile);

}  // namespace dffg
