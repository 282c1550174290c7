#include "pblab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace pblab {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value == "true") return 1.0;
  if (value == "false") return 0.0;
  size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
  return d;
}

int parse_int(const std::string& key, const std::string& value) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
  return v;
}

bool sphere_param_allowed(const std::string& name, const std::string& key) {
  if (name == "unit-sphere") return key == "radius";
  if (name == "ellipse") {
    if (key.rfind("axis", 0) != 0 || key.size() == 4) return false;
    return std::all_of(key.begin() + 4, key.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }
  if (name == "star-3-lobe")
    return key == "base_radius" || key == "lobe_amplitude" || key == "lobes";
  return false;
}

}  // namespace

int RunConfig::n_dof() const {
  auto it = system_params.find("n");
  return it == system_params.end() ? 2 : static_cast<int>(it->second);
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  // deferred so the family names are known when the params are checked
  std::map<std::string, std::string> system_raw, sphere_raw;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");

    if (key == "system.name") cfg.system_name = value;
    else if (key.rfind("system.", 0) == 0) system_raw[key.substr(7)] = value;
    else if (key == "sphere.name") cfg.sphere_name = value;
    else if (key.rfind("sphere.", 0) == 0) sphere_raw[key.substr(7)] = value;
    else if (key == "rays.side") cfg.rays_side = value;
    else if (key == "rays.n_boundary") cfg.rays_n_boundary = parse_int(key, value);
    else if (key == "rays.n_angles") cfg.rays_n_angles = parse_int(key, value);
    else if (key == "rays.n_interior") cfg.rays_n_interior = parse_int(key, value);
    else if (key == "rays.margin_tol") cfg.rays_margin_tol = parse_double(key, value);
    else if (key == "search.fourier_cutoff") cfg.search_fourier_cutoff = parse_int(key, value);
    else if (key == "search.reduced_cutoff") cfg.search_reduced_cutoff = parse_int(key, value);
    else if (key == "search.budget") cfg.search_budget = parse_int(key, value);
    else if (key == "search.seed_scale") cfg.search_seed_scale = parse_double(key, value);
    else if (key == "oracle.grid_per_dim") cfg.oracle_grid_per_dim = parse_int(key, value);
    else if (key == "oracle.budget") cfg.oracle_budget = parse_int(key, value);
    else if (key == "oracle.refine_top") cfg.oracle_refine_top = parse_int(key, value);
    else if (key == "degree.resolution") cfg.degree_resolution = parse_int(key, value);
    else if (key == "basket.levels") cfg.basket_levels = parse_int(key, value);
    else if (key == "basket.directions") cfg.basket_directions = parse_int(key, value);
    else if (key == "basket.safety") cfg.basket_safety = parse_double(key, value);
    else if (key == "profile.tau") cfg.profile_tau = parse_double(key, value);
    else if (key == "profile.big_r") cfg.profile_big_r = parse_double(key, value);
    else if (key == "profile.r0") cfg.profile_r0 = parse_double(key, value);
    else if (key == "tol.integrator") cfg.tol_integrator = parse_double(key, value);
    else if (key == "tol.newton") cfg.tol_newton = parse_double(key, value);
    else if (key == "tol.metric") cfg.tol_metric = parse_double(key, value);
    else if (key == "tol.nondegeneracy") cfg.tol_nondegeneracy = parse_double(key, value);
    else if (key == "tol.admissibility") cfg.tol_admissibility = parse_double(key, value);
    else if (key == "tol.basket") cfg.tol_basket = parse_double(key, value);
    else if (key == "tol.basket_tail") cfg.tol_basket_tail = parse_double(key, value);
    else if (key == "tol.profile") cfg.tol_profile = parse_double(key, value);
    else if (key == "rng_seed") cfg.rng_seed = parse_u64(key, value);
    else if (key == "output.dir") cfg.output_dir = value;
    else throw ConfigError("unknown key '" + key + "'");
  }

  static const char* system_keys[] = {"n",        "period", "epsilon", "reversed",
                                      "coupling", "r0",     "ell",     "c"};
  for (const auto& [k, v] : system_raw) {
    if (std::find_if(std::begin(system_keys), std::end(system_keys),
                     [&](const char* s) { return k == s; }) == std::end(system_keys))
      throw ConfigError("unknown key 'system." + k + "'");
    cfg.system_params[k] = parse_double("system." + k, v);
  }
  for (const auto& [k, v] : sphere_raw) {
    if (!sphere_param_allowed(cfg.sphere_name, k))
      throw ConfigError("unknown key 'sphere." + k + "' for sphere '" + cfg.sphere_name + "'");
    cfg.sphere_params[k] = parse_double("sphere." + k, v);
  }

  if (cfg.rays_side != "inward" && cfg.rays_side != "outward")
    throw ConfigError("rays.side must be 'inward' or 'outward'");
  for (auto [name, v] : std::initializer_list<std::pair<const char*, double>>{
           {"tol.integrator", cfg.tol_integrator},
           {"tol.newton", cfg.tol_newton},
           {"tol.metric", cfg.tol_metric},
           {"tol.nondegeneracy", cfg.tol_nondegeneracy},
           {"tol.admissibility", cfg.tol_admissibility},
           {"tol.basket", cfg.tol_basket},
           {"tol.basket_tail", cfg.tol_basket_tail},
           {"tol.profile", cfg.tol_profile},
           {"rays.margin_tol", cfg.rays_margin_tol}})
    if (!(v > 0)) throw ConfigError(std::string(name) + " must be positive");
  if (cfg.n_dof() < 1) throw ConfigError("system.n must be >= 1");
  if (cfg.search_fourier_cutoff < 1) throw ConfigError("search.fourier_cutoff must be >= 1");
  if (cfg.search_reduced_cutoff < 1 || cfg.search_reduced_cutoff > cfg.search_fourier_cutoff)
    throw ConfigError("search.reduced_cutoff must lie in [1, search.fourier_cutoff]");
  if (cfg.search_budget < 1) throw ConfigError("search.budget must be >= 1");
  if (cfg.oracle_grid_per_dim < 4) throw ConfigError("oracle.grid_per_dim must be >= 4");
  if (cfg.oracle_budget < 1 || cfg.oracle_refine_top < 1)
    throw ConfigError("oracle budgets must be >= 1");
  if (cfg.rays_n_boundary < 1 || cfg.rays_n_angles < 1 || cfg.rays_n_interior < 0)
    throw ConfigError("rays sample counts out of range");
  if (cfg.degree_resolution < 8) throw ConfigError("degree.resolution must be >= 8");
  if (cfg.basket_levels < 4 || cfg.basket_directions < 4)
    throw ConfigError("basket grid sizes must be >= 4");
  if (cfg.basket_safety <= 1.0) throw ConfigError("basket.safety must be > 1");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace pblab
