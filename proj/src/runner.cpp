#include "dffg/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dffg/dual_graph.hpp"
#include "dffg/oracle.hpp"
#include "dffg/samplers.hpp"
#include "json.hpp"

namespace dffg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt9(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json common_summary(const ExperimentConfig& config, const ModelSpec& model) {
  json s;
  s["mode"] = to_string(config.mode);
  s["rng"] = std::string(kRngName);
  s["sub_seed"] = std::string(kSubSeedName);
  s["seed"] = config.seed;
  s["num_sites"] = model.topology().num_sites();
  s["num_bonds"] = model.topology().num_bonds();
  s["log_Zq"] = log_Zq(model);
  s["log_duality_C"] = log_duality_constant(model);
  s["warnings"] = model_warnings(model);
  s["resolved_config"] = json::parse(serialize_config(resolve_config(config, model)));
  return s;
}

SamplerKind sampler_for(RunMode m) {
  return m == RunMode::kUniform ? SamplerKind::kUniform : SamplerKind::kImportance;
}

void run_gibbs_diagnostic(const ExperimentConfig& config, const ModelSpec& model, json& summary) {
  if (model.family() != Family::kIsing)
    throw ConfigError(0, "gibbs-diagnostic mode supports the Ising family only");
  const DualFactors f(model);
  Rng rng = make_rng(config.seed, StreamKind::kChain, 0);
  GibbsState state(f, std::vector<Symbol>(f.num_bonds(), 0));
  for (std::uint64_t s = 0; s < config.ais.burn_in; ++s) gibbs_sweep(state, f, rng);

  const auto table_states = state_count(model.q(), f.num_bonds());
  const bool tabulate = table_states && *table_states <= kMaxTableStates;
  std::vector<std::uint64_t> counts(tabulate ? *table_states : 0, 0);

  const auto at = checkpoint_indices(config.samples, config.checkpoints);
  std::string csv = "sample_index,mean_bond_occupancy,mean_site_occupancy\n";
  double bond_sum = 0.0, site_sum = 0.0;
  std::size_t next = 0;
  for (std::uint64_t l = 1; l <= config.samples; ++l) {
    gibbs_sweep(state, f, rng);
    std::uint64_t index = 0, radix = 1;
    std::uint64_t ones = 0;
    for (Symbol v : state.x_A()) {
      ones += v;
      index += v * radix;
      radix *= 2;
    }
    if (tabulate) ++counts[index];
    bond_sum += static_cast<double>(ones) / f.num_bonds();
    std::uint64_t site_ones = 0;
    for (Symbol v : state.x_B()) site_ones += v;
    site_sum += static_cast<double>(site_ones) / f.num_sites();
    if (next < at.size() && at[next] == l) {
      csv += std::to_string(l) + ',' + fmt9(bond_sum / l) + ',' + fmt9(site_sum / l) + '\n';
      ++next;
    }
  }
  write_file(config.output_dir, "gibbs.csv", csv);
  summary["sweeps"] = config.samples;
  summary["burn_in"] = config.ais.burn_in;
  summary["mean_bond_occupancy"] = bond_sum / config.samples;
  summary["mean_site_occupancy"] = site_sum / config.samples;
  summary["consistent"] = state.consistent(f);
  if (tabulate) {
    const auto pd = exact_dual_distribution(model);
    const auto g = pearson_gof(counts, pd);
    summary["gof_statistic"] = g.statistic;
    summary["gof_dof"] = g.dof;
    summary["gof_critical_0999"] = g.dof > 0 ? chi_square_quantile(g.dof, 0.999) : 0.0;
  }
}

}  // namespace

ModelSpec build_model(const ExperimentConfig& config, std::uint64_t seed) {
  auto topo = std::make_shared<const LatticeTopology>(build_lattice(config.dims, config.periodic));
  Rng rng = make_rng(seed, StreamKind::kParameters, 0);
  try {
    return sample_params(std::move(topo), config.family, config.q, config.couplings, config.fields, rng);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

ExperimentConfig resolve_config(const ExperimentConfig& config, const ModelSpec& model) {
  ExperimentConfig c = config;
  c.couplings = ExplicitParam{{model.couplings().begin(), model.couplings().end()}};
  c.fields = ExplicitParam{{model.fields().begin(), model.fields().end()}};
  return c;
}

std::string series_csv(const EstimateSeries& series) {
  std::string out = "sample_index,per_site_lnZ_running,se_running\n";
  for (const auto& c : series.checkpoints)
    out += std::to_string(c.index) + ',' + fmt9(c.per_site_ln_Z) + ',' + fmt9(c.se_per_site) + '\n';
  return out;
}

std::string histogram_csv(std::span<const RealizationResult> rows) {
  std::string out = "realization,per_site_lnZ,se,lnZ,ess\n";
  for (const auto& r : rows)
    out += std::to_string(r.index) + ',' + fmt9(r.per_site_ln_Z) + ',' + fmt9(r.se_per_site) + ',' + fmt9(r.ln_Z) +
           ',' + fmt9(r.ess) + '\n';
  return out;
}

RealizationResult run_realization(const ExperimentConfig& config, std::uint32_t r) {
  const std::uint64_t base = sub_seed(config.seed, StreamKind::kRealization, r);
  const ModelSpec model = build_model(config, config.redraw_parameters ? base : config.seed);
  const auto series = run_chains(model, SamplerKind::kImportance, config.samples, base, config.chains,
                                 CheckpointPlan{0, 0});
  return {r, series.ln_Z, series.per_site_ln_Z, series.se_per_site, series.diagnostics.ess};
}

void run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec model = build_model(config, config.seed);
  for (const auto& w : model_warnings(model)) log << "warning: " << w << '\n';
  json summary = common_summary(config, model);

  switch (config.mode) {
    case RunMode::kImportance:
    case RunMode::kUniform: {
      const auto series =
          run_chains(model, sampler_for(config.mode), config.samples, config.seed, config.chains, config.checkpoints);
      write_file(config.output_dir, "series.csv", series_csv(series));
      summary["samples"] = series.samples;
      summary["chains"] = config.chains;
      summary["ln_Z"] = series.ln_Z;
      summary["ln_Zd"] = series.ln_Zd;
      summary["per_site_ln_Z"] = series.per_site_ln_Z;
      summary["se_per_site"] = number_or_null(series.se_per_site);
      summary["relative_se"] = number_or_null(series.diagnostics.relative_se);
      summary["ess"] = series.diagnostics.ess;
      log << to_string(config.mode) << ": per-site ln Z = " << fmt9(series.per_site_ln_Z) << " +/- "
          << fmt9(series.se_per_site) << '\n';
      break;
    }
    case RunMode::kAis: {
      Rng rng = make_rng(config.seed, StreamKind::kChain, 0);
      AisResult r;
      try {
        r = ais_run(model, config.ais, rng);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
      }
      for (const auto& w : r.warnings) log << "warning: " << w << '\n';
      std::string csv = "level,alpha,log_estimate,relative_variance,samples\n";
      for (std::size_t i = 0; i < r.levels.size(); ++i)
        csv += std::to_string(i) + ',' + fmt9(r.levels[i].alpha) + ',' + fmt9(r.levels[i].log_estimate) + ',' +
               fmt9(r.levels[i].relative_variance) + ',' + std::to_string(r.levels[i].samples) + '\n';
      write_file(config.output_dir, "ais_levels.csv", csv);
      summary["ln_Z"] = r.log_Z;
      summary["ln_Zd"] = r.log_Zd;
      summary["per_site_ln_Z"] = free_energy_per_site(r.log_Z, model.topology().num_sites());
      summary["se_ln_Z"] = r.se_log;
      summary["se_per_site"] = r.se_log / model.topology().num_sites();
      for (const auto& w : r.warnings) summary["warnings"].push_back(w);
      log << "ais: per-site ln Z = " << fmt9(free_energy_per_site(r.log_Z, model.topology().num_sites())) << '\n';
      break;
    }
    case RunMode::kOracle: {
      const auto r = exact(model, true);
      const double expected = log_duality_constant(model);
      const double diff = r.ln_Z_d - r.ln_Z;
      summary["ln_Z"] = r.ln_Z;
      summary["ln_Zd"] = r.ln_Z_d;
      summary["per_site_ln_Z"] = free_energy_per_site(r.ln_Z, model.topology().num_sites());
      summary["ln_Zd_minus_ln_Z"] = diff;
      summary["duality_check_passed"] = std::fabs(diff - expected) <= 1e-9 * std::max(1.0, std::fabs(expected));
      if (r.chi_squared) summary["chi_squared"] = *r.chi_squared;
      if (config.dump_distribution && !r.p_d)
        throw SizeGuardError("dump_distribution: dual table exceeds " + std::to_string(kMaxTableStates) + " states");
      if (config.dump_distribution) {
        std::ostringstream os;
        write_distribution_csv(os, model, *r.p_d);
        write_file(config.output_dir, "p_d.csv", os.str());
      }
      log << "oracle: ln Z = " << fmt9(r.ln_Z) << ", ln Z_d = " << fmt9(r.ln_Z_d) << '\n';
      break;
    }
    case RunMode::kGibbsDiagnostic:
      run_gibbs_diagnostic(config, model, summary);
      break;
  }

  summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(config.output_dir, "summary.json", summary.dump(2) + '\n');
}

void run_histogram(const ExperimentConfig& config, std::ostream& log) {
  if (config.realizations < 2) throw ConfigError(0, "histogram mode needs realizations >= 2");
  if (config.mode != RunMode::kImportance) throw ConfigError(0, "histogram mode requires mode 'is'");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<RealizationResult> rows;
  rows.reserve(config.realizations);
  for (std::uint32_t r = 0; r < config.realizations; ++r) {
    rows.push_back(run_realization(config, r));
    log << "realization " << r << ": per-site ln Z = " << fmt9(rows.back().per_site_ln_Z) << '\n';
  }
  double mean = 0.0;
  for (const auto& r : rows) mean += r.per_site_ln_Z;
  mean /= rows.size();
  double var = 0.0;
  for (const auto& r : rows) var += (r.per_site_ln_Z - mean) * (r.per_site_ln_Z - mean);
  const double sd = std::sqrt(var / (rows.size() - 1));
  write_file(config.output_dir, "histogram.csv", histogram_csv(rows));

  json summary;
  summary["mode"] = "histogram";
  summary["rng"] = std::string(kRngName);
  summary["sub_seed"] = std::string(kSubSeedName);
  summary["seed"] = config.seed;
  summary["realizations"] = config.realizations;
  summary["redraw_parameters"] = config.redraw_parameters;
  summary["mean_per_site_ln_Z"] = mean;
  summary["std_per_site_ln_Z"] = sd;
  summary["config"] = json::parse(serialize_config(config));
  summary["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(config.output_dir, "summary.json", summary.dump(2) + '\n');
  log << "histogram: mean = " << fmt9(mean) << ", std = " << fmt9(sd) << '\n';
}

int run_and_report(const ExperimentConfig& config, std::ostream& log) {
  try {
    if (config.realizations >= 2)
      run_histogram(config, log);
    else
      run_experiment(config, log);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SizeGuardError& e) {
    log << "error: " << e.what() << '\n';
    return kExitSizeGuard;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace dffg
