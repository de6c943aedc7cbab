#include "chl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace chl {

std::uint64_t RunConfig::steps() const {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) * t));
}

std::vector<double> RunConfig::effective_t_grid() const {
  if (!t_grid.empty()) return t_grid;
  const double logn = std::log(static_cast<double>(n));
  double t_min = std::max(std::pow(logn, 9) / static_cast<double>(n), 1e-3);
  if (t_min >= t) t_min = std::min(1e-3, t / 20.0);
  constexpr int kPoints = 20;
  std::vector<double> grid(kPoints);
  const double ratio = std::log(t / t_min) / (kPoints - 1);
  for (int i = 0; i < kPoints; ++i) grid[i] = t_min * std::exp(ratio * i);
  grid.back() = t;
  return grid;
}

void RunConfig::validate() const {
  if (n == 0) throw ConfigError("config: n must be >= 1");
  if (!(t > 0.0)) throw ConfigError("config: t must be > 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("config: delta must lie in (0, 1]");
  if (!(eps_window > 0.0)) throw ConfigError("config: eps-window must be > 0");
  if (replicas == 0) throw ConfigError("config: replicas must be >= 1");
  if (!(envelope_eps > 0.0)) throw ConfigError("config: envelope-eps must be > 0");
  if (envelope_points < 2) throw ConfigError("config: grid-points must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
  if (dt < 0.0) throw ConfigError("config: dt must be >= 0");
  for (double g : t_grid) {
    if (!(g > 0.0 && g <= t)) throw ConfigError("config: t-grid entries must lie in (0, t]");
  }
}

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad type for key '") + key + "'");
  }
}

}  // namespace

void apply_config_json(RunConfig& config, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    if (key == "n") config.n = get_as<std::uint64_t>(value, "n");
    else if (key == "t") config.t = get_as<double>(value, "t");
    else if (key == "delta") config.delta = get_as<double>(value, "delta");
    else if (key == "eps-window") config.eps_window = get_as<double>(value, "eps-window");
    else if (key == "seed") config.seed = get_as<std::uint64_t>(value, "seed");
    else if (key == "replicas") config.replicas = get_as<std::uint32_t>(value, "replicas");
    else if (key == "envelope-eps") config.envelope_eps = get_as<double>(value, "envelope-eps");
    else if (key == "grid-points") config.envelope_points = get_as<int>(value, "grid-points");
    else if (key == "alpha") config.alpha = get_as<double>(value, "alpha");
    else if (key == "out") config.out_dir = get_as<std::string>(value, "out");
    else if (key == "stride") config.trace_stride = get_as<std::uint64_t>(value, "stride");
    else if (key == "dt") config.dt = get_as<double>(value, "dt");
    else if (key == "t-grid") config.t_grid = get_as<std::vector<double>>(value, "t-grid");
    else throw ConfigError("config: unknown key '" + key + "'");
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  apply_config_json(config, buf.str());
  config.validate();
  return config;
}

}  // namespace chl
