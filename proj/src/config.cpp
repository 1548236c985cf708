#include "acgeo/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace acgeo {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not a number: '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': not an integer: '" + v + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw config_error("config key '" + key + "': empty list entry");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw config_error("config key '" + key + "': empty list");
  return out;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "family") {
    cfg.family = value;
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "a") {
    cfg.a = parse_double(key, value);
  } else if (key == "mu") {
    cfg.mu = parse_double(key, value);
  } else if (key == "amplitudes") {
    auto v = parse_list(key, value);
    if (v.size() != 3)
      throw config_error("config key 'amplitudes': needs exactly three values");
    cfg.amplitudes = {v[0], v[1], v[2]};
  } else if (key == "N") {
    cfg.N = (int)parse_int(key, value);
  } else if (key == "M") {
    cfg.M = (int)parse_int(key, value);
  } else if (key == "rounds") {
    cfg.rounds = (int)parse_int(key, value);
  } else if (key == "flow_iters_per_round") {
    cfg.flow_iters_per_round = (int)parse_int(key, value);
  } else if (key == "flow_max_iters") {
    cfg.flow_max_iters = (int)parse_int(key, value);
  } else if (key == "flow_grad_tol") {
    cfg.flow_grad_tol = parse_double(key, value);
  } else if (key == "eigen_tol") {
    cfg.eigen_tol = parse_double(key, value);
  } else if (key == "polish_iters") {
    cfg.polish_iters = (int)parse_int(key, value);
  } else if (key == "continuity_factor") {
    cfg.continuity_factor = parse_double(key, value);
  } else if (key == "rho_minus") {
    cfg.rho_minus = parse_double(key, value);
  } else if (key == "r0") {
    cfg.r0 = parse_double(key, value);
  } else if (key == "phi0") {
    cfg.phi0 = parse_double(key, value);
  } else if (key == "r0_list") {
    cfg.r0_list = parse_list(key, value);
  } else if (key == "phi0_list") {
    cfg.phi0_list = parse_list(key, value);
  } else if (key == "r_a" || key == "phi_a" || key == "r_b" || key == "phi_b") {
    double x = parse_double(key, value);
    if (key == "r_a") cfg.r_a = x;
    if (key == "phi_a") cfg.phi_a = x;
    if (key == "r_b") cfg.r_b = x;
    if (key == "phi_b") cfg.phi_b = x;
    cfg.have_endpoints = true;
  } else if (key == "nr") {
    cfg.nr = (int)parse_int(key, value);
  } else if (key == "nphi") {
    cfg.nphi = (int)parse_int(key, value);
  } else if (key == "workers") {
    cfg.workers = (int)parse_int(key, value);
  } else if (key == "seed") {
    cfg.seed = (std::uint64_t)parse_int(key, value);
  } else {
    throw config_error("unknown config key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error("config line " + std::to_string(lineno) +
                         ": empty key or value");
    if (!seen.insert(key).second)
      throw config_error("duplicate config key '" + key + "'");
    apply_override(cfg, key, value);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const RunConfig& cfg) {
  if (cfg.family != "cone" && cfg.family != "flat" && cfg.family != "profile" &&
      cfg.family != "perturbed")
    throw config_error("unknown metric family '" + cfg.family + "'");
  if (!(cfg.alpha > 0.0) || cfg.alpha > kPi / 2)
    throw config_error("alpha must lie in (0, pi/2]");
  if (!(cfg.a > 0.0)) throw config_error("smoothing scale a must be positive");
  if (!(cfg.mu > 0.0)) throw config_error("decay rate mu must be positive");
  if (cfg.N < 8) throw config_error("N must be at least 8");
  if (cfg.M < 4) throw config_error("M must be at least 4");
  if (cfg.rounds < 1) throw config_error("rounds must be positive");
  if (cfg.flow_iters_per_round < 1)
    throw config_error("flow_iters_per_round must be positive");
  if (cfg.flow_max_iters < 1) throw config_error("flow_max_iters must be positive");
  if (cfg.flow_grad_tol < 0.0) throw config_error("flow_grad_tol must be positive");
  if (cfg.eigen_tol < 0.0) throw config_error("eigen_tol must be positive");
  if (cfg.polish_iters < 0) throw config_error("polish_iters must be nonnegative");
  if (!(cfg.continuity_factor > 0.0))
    throw config_error("continuity_factor must be positive");
  if (cfg.rho_minus < 0.0) throw config_error("rho_minus must be nonnegative");
  if (!(cfg.r0 > 0.0)) throw config_error("r0 must be positive");
  for (size_t i = 0; i + 1 < cfg.r0_list.size(); ++i)
    if (!(cfg.r0_list[i] < cfg.r0_list[i + 1]))
      throw config_error("r0_list must be strictly increasing");
  for (double r : cfg.r0_list)
    if (!(r > 0.0)) throw config_error("r0_list entries must be positive");
  if (cfg.have_endpoints && (!(cfg.r_a > 0.0) || !(cfg.r_b > 0.0)))
    throw config_error("endpoint radii must be positive");
  if (cfg.nr < 2 || cfg.nphi < 4)
    throw config_error("quadrature grid needs nr >= 2 and nphi >= 4");
  if (cfg.workers < 1) throw config_error("workers must be positive");
}

SurfaceMetric metric_from(const RunConfig& cfg) {
  if (cfg.family == "cone") return SurfaceMetric::cone(cfg.alpha);
  if (cfg.family == "flat") return SurfaceMetric::flat();
  if (cfg.family == "profile") return SurfaceMetric::profile(cfg.alpha, cfg.a);
  if (cfg.family == "perturbed")
    return SurfaceMetric::perturbed(cfg.alpha, cfg.mu, cfg.amplitudes);
  throw config_error("unknown metric family '" + cfg.family + "'");
}

FlowConfig flow_from(const RunConfig& cfg) {
  FlowConfig fc;
  fc.max_iters = cfg.flow_max_iters;
  fc.grad_tol = cfg.flow_grad_tol;
  return fc;
}

MinMaxConfig minmax_from(const RunConfig& cfg) {
  MinMaxConfig mc;
  mc.r0 = cfg.r0;
  mc.phi0 = cfg.phi0;
  mc.N = cfg.N;
  mc.M = cfg.M;
  mc.rounds = cfg.rounds;
  mc.flow_iters_per_round = cfg.flow_iters_per_round;
  mc.rho_minus = cfg.rho_minus;
  mc.continuity_factor = cfg.continuity_factor;
  mc.polish_iters = cfg.polish_iters;
  mc.flow = flow_from(cfg);
  mc.workers = cfg.workers;
  return mc;
}

}  // namespace acgeo
