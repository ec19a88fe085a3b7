#include "dffg/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dffg {

using nlohmann::json;

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::kImportance: return "is";
    case RunMode::kUniform: return "uniform";
    case RunMode::kGibbsDiagnostic: return "gibbs-diagnostic";
    case RunMode::kAis: return "ais";
    case RunMode::kOracle: return "oracle";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& name) {
  for (RunMode m : {RunMode::kImportance, RunMode::kUniform, RunMode::kGibbsDiagnostic, RunMode::kAis,
                    RunMode::kOracle})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

namespace {

// Locates the line of the first occurrence of "key" in the raw text.
class LineFinder {
 public:
  explicit LineFinder(const std::string& text) : text_(text) {}
  std::size_t line_of(const std::string& key) const {
    const auto pos = text_.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + pos, '\n'));
  }

 private:
  const std::string& text_;
};

template <class T>
T get(const json& obj, const char* key, const LineFinder& lines) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(lines.line_of(key), std::string("field '") + key + "': " + e.what());
  }
}

ParamSpec param_from_json(const json& j, const char* key, const LineFinder& lines) {
  const std::size_t line = lines.line_of(key);
  if (!j.is_object() || j.size() != 1)
    throw ConfigError(line, std::string("'") + key + "' must be {\"constant\": x}, {\"uniform\": [a, b]} or {\"values\": [...]}");
  try {
    if (j.contains("constant")) return ConstantParam{j.at("constant").get<double>()};
    if (j.contains("uniform")) {
      const auto r = j.at("uniform").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError(line, std::string("'") + key + ".uniform' needs [low, high]");
      if (!(r[0] <= r[1])) throw ConfigError(line, std::string("'") + key + ".uniform' has low > high");
      return UniformParam{r[0], r[1]};
    }
    if (j.contains("values")) return ExplicitParam{j.at("values").get<std::vector<double>>()};
  } catch (const json::exception& e) {
    throw ConfigError(line, std::string("'") + key + "': " + e.what());
  }
  throw ConfigError(line, std::string("'") + key + "' has an unknown parameter form");
}

json param_to_json(const ParamSpec& p) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantParam>) return {{"constant", s.value}};
        else if constexpr (std::is_same_v<T, UniformParam>) return {{"uniform", {s.low, s.high}}};
        else return {{"values", s.values}};
      },
      p);
}

bool param_equal(const ParamSpec& a, const ParamSpec& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        const auto& o = std::get<T>(b);
        if constexpr (std::is_same_v<T, ConstantParam>) return s.value == o.value;
        else if constexpr (std::is_same_v<T, UniformParam>) return s.low == o.low && s.high == o.high;
        else return s.values == o.values;
      },
      a);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t off = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + off, '\n'));
    throw ConfigError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError(1, "top level must be a JSON object");
  const LineFinder lines(text);
  ExperimentConfig c;

  static const char* known[] = {"lattice", "model", "mode", "samples", "chains", "seed", "checkpoints",
                                "ais", "realizations", "redraw_parameters", "dump_distribution", "output_dir"};
  for (const auto& [k, v] : root.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known))
      throw ConfigError(lines.line_of(k), "unknown field '" + k + "'");
  }

  if (!root.contains("lattice")) throw ConfigError(1, "missing required field 'lattice'");
  const json& lat = root["lattice"];
  c.dims = get<std::vector<std::size_t>>(lat, "dims", lines);
  if (!lat.contains("periodic"))
    c.periodic.assign(c.dims.size(), false);
  else if (lat["periodic"].is_boolean())
    c.periodic.assign(c.dims.size(), lat["periodic"].get<bool>());
  else
    c.periodic = get<std::vector<bool>>(lat, "periodic", lines);
  try {
    (void)build_lattice(c.dims, c.periodic);
  } catch (const std::exception& e) {
    throw ConfigError(lines.line_of("lattice"), e.what());
  }

  if (!root.contains("model")) throw ConfigError(1, "missing required field 'model'");
  const json& model = root["model"];
  try {
    c.family = family_from_string(get<std::string>(model, "family", lines));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(lines.line_of("family"), e.what());
  }
  c.q = model.contains("q") ? get<int>(model, "q", lines) : 2;
  if (c.family == Family::kIsing && c.q != 2) throw ConfigError(lines.line_of("q"), "Ising requires q = 2");
  if (c.q < 2 || c.q > kMaxAlphabet) throw ConfigError(lines.line_of("q"), "q must be in [2, 256]");
  if (!model.contains("J")) throw ConfigError(lines.line_of("model"), "missing required field 'J'");
  if (!model.contains("H")) throw ConfigError(lines.line_of("model"), "missing required field 'H'");
  c.couplings = param_from_json(model["J"], "J", lines);
  c.fields = param_from_json(model["H"], "H", lines);
  try {
    Rng probe(0);
    (void)sample_params(std::make_shared<const LatticeTopology>(build_lattice(c.dims, c.periodic)), c.family, c.q,
                        c.couplings, c.fields, probe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(lines.line_of("model"), e.what());
  }

  if (root.contains("mode")) {
    try {
      c.mode = run_mode_from_string(get<std::string>(root, "mode", lines));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(lines.line_of("mode"), e.what());
    }
  }
  if (root.contains("samples")) c.samples = get<std::uint64_t>(root, "samples", lines);
  if (c.samples < 1) throw ConfigError(lines.line_of("samples"), "samples must be >= 1");
  if (root.contains("chains")) c.chains = get<std::uint32_t>(root, "chains", lines);
  if (c.chains < 1) throw ConfigError(lines.line_of("chains"), "chains must be >= 1");
  if (root.contains("seed")) c.seed = get<std::uint64_t>(root, "seed", lines);
  if (root.contains("checkpoints")) {
    const json& cp = root["checkpoints"];
    if (cp.contains("stride")) c.checkpoints.stride = get<std::uint64_t>(cp, "stride", lines);
    if (cp.contains("log_points")) c.checkpoints.log_points = get<std::uint32_t>(cp, "log_points", lines);
  }
  if (root.contains("ais")) {
    const json& a = root["ais"];
    if (a.contains("exponents")) c.ais.exponents = get<std::vector<double>>(a, "exponents", lines);
    if (a.contains("sweeps_per_level")) c.ais.sweeps_per_level = get<std::uint64_t>(a, "sweeps_per_level", lines);
    if (a.contains("burn_in")) c.ais.burn_in = get<std::uint64_t>(a, "burn_in", lines);
    if (a.contains("samples_at_top")) c.ais.samples_at_top = get<std::uint64_t>(a, "samples_at_top", lines);
    try {
      c.ais.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(lines.line_of("ais"), e.what());
    }
  }
  if (root.contains("realizations")) c.realizations = get<std::uint32_t>(root, "realizations", lines);
  if (c.realizations == 1) throw ConfigError(lines.line_of("realizations"), "histogram mode needs realizations >= 2");
  if (c.realizations >= 2 && c.mode != RunMode::kImportance)
    throw ConfigError(lines.line_of("realizations"), "histogram mode requires mode 'is'");
  if (root.contains("redraw_parameters")) c.redraw_parameters = get<bool>(root, "redraw_parameters", lines);
  if (root.contains("dump_distribution")) c.dump_distribution = get<bool>(root, "dump_distribution", lines);
  if (root.contains("output_dir")) c.output_dir = get<std::string>(root, "output_dir", lines);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["lattice"] = {{"dims", c.dims}, {"periodic", c.periodic}};
  j["model"] = {{"family", to_string(c.family)}, {"q", c.q}, {"J", param_to_json(c.couplings)},
                {"H", param_to_json(c.fields)}};
  j["mode"] = to_string(c.mode);
  j["samples"] = c.samples;
  j["chains"] = c.chains;
  j["seed"] = c.seed;
  j["checkpoints"] = {{"stride", c.checkpoints.stride}, {"log_points", c.checkpoints.log_points}};
  j["ais"] = {{"exponents", c.ais.exponents},
              {"sweeps_per_level", c.ais.sweeps_per_level},
              {"burn_in", c.ais.burn_in},
              {"samples_at_top", c.ais.samples_at_top}};
  j["realizations"] = c.realizations;
  j["redraw_parameters"] = c.redraw_parameters;
  j["dump_distribution"] = c.dump_distribution;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.dims == b.dims && a.periodic == b.periodic && a.family == b.family && a.q == b.q &&
         param_equal(a.couplings, b.couplings) && param_equal(a.fields, b.fields) && a.mode == b.mode &&
         a.samples == b.samples && a.chains == b.chains && a.seed == b.seed &&
         a.checkpoints.stride == b.checkpoints.stride && a.checkpoints.log_points == b.checkpoints.log_points &&
         a.ais.exponents == b.ais.exponents && a.ais.sweeps_per_level == b.ais.sweeps_per_level &&
         a.ais.burn_in == b.ais.burn_in && a.ais.samples_at_top == b.ais.samples_at_top &&
         a.realizations == b.realizations && a.redraw_parameters == b.redraw_parameters &&
         a.dump_distribution == b.dump_distribution && a.output_dir == b.output_dir;
}

}  // namespace dffg
