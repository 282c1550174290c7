#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace pblab {

// Schema violation in a configuration file (unknown key, bad type, bad value).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat, typed `key = value` configuration with dotted sections.  `#` starts a
// comment.  Every key is checked against the schema below; anything else is a
// ConfigError, never silently ignored.
struct RunConfig {
  std::string system_name = "decoupled-pendulum";
  std::map<std::string, double> system_params;  // forwarded to builtin_system

  std::string sphere_name = "unit-sphere";
  std::map<std::string, double> sphere_params;  // forwarded to builtin_sphere

  std::string rays_side = "inward";  // or "outward"
  int rays_n_boundary = 256;
  int rays_n_angles = 8;
  int rays_n_interior = 64;
  double rays_margin_tol = 1e-2;

  int search_fourier_cutoff = 8;   // K
  int search_reduced_cutoff = 4;   // K' for the tail reduction
  int search_budget = 200;         // seed count
  double search_seed_scale = 0.3;

  int oracle_grid_per_dim = 6;
  int oracle_budget = 20000;
  int oracle_refine_top = 48;

  int degree_resolution = 256;

  int basket_levels = 48;
  int basket_directions = 64;
  double basket_safety = 1.5;

  double profile_tau = 0.0;    // 0 = auto: period / 4
  double profile_big_r = 0.0;  // 0 = auto: 1.1 * bounding radius
  double profile_r0 = 0.0;     // 0 = auto: 2 * big_r

  double tol_integrator = 1e-10;
  double tol_newton = 1e-10;
  double tol_metric = 1e-4;
  double tol_nondegeneracy = 1e-6;
  double tol_admissibility = 1e-8;
  double tol_basket = 1e-3;
  double tol_basket_tail = 1e-2;
  double tol_profile = 1e-8;

  std::uint64_t rng_seed = 42;
  std::string output_dir = ".";

  int n_dof() const;  // system_params["n"], default 2
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace pblab
