#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dffg/config.hpp"
#include "dffg/estimator.hpp"

namespace dffg {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSizeGuard = 3;
inline constexpr int kExitIo = 4;

/// Model for a config. Parameters are drawn from sub_seed(seed, kParameters, 0).
ModelSpec build_model(const ExperimentConfig& config, std::uint64_t seed);

/// Config with J and H replaced by the model's explicit values.
ExperimentConfig resolve_config(const ExperimentConfig& config, const ModelSpec& model);

struct RealizationResult {
  std::uint32_t index = 0;
  double ln_Z = 0.0;
  double per_site_ln_Z = 0.0;
  double se_per_site = 0.0;
  double ess = 0.0;
};

/// One histogram realization: base seed sub_seed(seed, kRealization, r) drives
/// the parameters (when redrawn) and the chains. Depends only on (config, r).
RealizationResult run_realization(const ExperimentConfig& config, std::uint32_t r);

/// CSV text: sample_index, per_site_lnZ_running, se_running (9 significant digits).
std::string series_csv(const EstimateSeries& series);

std::string histogram_csv(std::span<const RealizationResult> rows);

/// Runs the configured experiment and writes its files under config.output_dir.
/// Throws ConfigError, SizeGuardError or IoError.
void run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Histogram mode: R realizations, histogram.csv plus summary.json.
void run_histogram(const ExperimentConfig& config, std::ostream& log);

/// Dispatches on config.realizations and maps failures to exit codes.
int run_and_report(const ExperimentConfig& config, std::ostream& log);

}  // namespace dffg
