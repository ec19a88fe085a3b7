#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dffg/estimator.hpp"
#include "dffg/samplers.hpp"
#include "dffg/spin_model.hpp"

namespace dffg {

/// Invalid experiment configuration. line is 1-based, 0 when no location is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error("config:" + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class RunMode { kImportance, kUniform, kGibbsDiagnostic, kAis, kOracle };

std::string to_string(RunMode m);
RunMode run_mode_from_string(const std::string& name);

struct ExperimentConfig {
  std::vector<std::size_t> dims;
  std::vector<bool> periodic;
  Family family = Family::kIsing;
  int q = 2;
  ParamSpec couplings = ConstantParam{1.0};
  ParamSpec fields = ConstantParam{-1.0};
  RunMode mode = RunMode::kImportance;
  std::uint64_t samples = 1000;
  std::uint32_t chains = 1;
  std::uint64_t seed = 1;
  CheckpointPlan checkpoints;
  AnnealSchedule ais;
  std::uint32_t realizations = 0;  // >= 2 selects histogram mode
  bool redraw_parameters = true;   // histogram: redraw J, H per realization
  bool dump_distribution = false;  // oracle: also write p_d.csv
  std::string output_dir = "out";
};

/// Parses a JSON document; ConfigError carries the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// JSON text that parse_config reads back to an equal config.
std::string serialize_config(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace dffg
