#include "pblab/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pblab/basket.hpp"
#include "pblab/census.hpp"
#include "pblab/critical_search.hpp"
#include "pblab/degree.hpp"
#include "pblab/rays.hpp"
#include "pblab/rng.hpp"
#include "pblab/time_profile.hpp"

namespace pblab {

namespace {

using nlohmann::json;

std::string iso_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json ivec_json(const Eigen::VectorXi& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

HamiltonianSystem make_system(const RunConfig& cfg) {
  try {
    return builtin_system(cfg.system_name, cfg.system_params);
  } catch (const ConstructionError& e) {
    throw ConfigError(e.what());
  }
}

EmbeddedSphere make_sphere(const RunConfig& cfg, int n) {
  auto params = cfg.sphere_params;
  params["n"] = n;
  try {
    return builtin_sphere(cfg.sphere_name, params);
  } catch (const ConstructionError& e) {
    throw ConfigError(e.what());
  }
}

RaysOptions rays_options(const RunConfig& cfg) {
  RaysOptions opt;
  opt.n_boundary = cfg.rays_n_boundary;
  opt.n_angles = cfg.rays_n_angles;
  opt.n_interior = cfg.rays_n_interior;
  opt.margin_tol = cfg.rays_margin_tol;
  opt.integrator_tol = cfg.tol_integrator;
  opt.seed = cfg.rng_seed;
  return opt;
}

json rays_json(const RaysReport& rep) {
  json j;
  j["side"] = rep.side == RaySide::Inward ? "inward" : "outward";
  j["verdict"] = rep.verdict;
  j["verifiable"] = rep.verifiable;
  if (!rep.failure_note.empty()) j["failure_note"] = rep.failure_note;
  j["min_margin"] = rep.min_margin;
  j["max_margin"] = rep.max_margin;
  j["n_boundary"] = rep.n_boundary;
  j["n_angles"] = rep.n_angles;
  j["n_interior"] = rep.n_interior;
  json worst = json::array();
  for (const auto& s : rep.worst)
    worst.push_back({{"x0", vec_json(s.x0)},
                     {"y0", vec_json(s.y0)},
                     {"theta", vec_json(s.theta)},
                     {"margin", s.margin}});
  j["worst_samples"] = worst;
  return j;
}

json orbit_json(const OrbitRecord& rec) {
  const int n = static_cast<int>(rec.z0.size()) / 2;
  json j;
  j["x0"] = vec_json(rec.z0.head(n));
  j["y0"] = vec_json(rec.z0.tail(n));
  j["winding"] = ivec_json(rec.winding);
  j["residual"] = rec.residual;
  if (std::isfinite(rec.action)) j["action"] = rec.action;
  json mult = json::array();
  for (const auto& mu : rec.multipliers) mult.push_back({mu.real(), mu.imag()});
  j["multipliers"] = mult;
  j["stability_margin"] = rec.stability_margin;
  j["nondegenerate"] = rec.nondegenerate;
  j["interior"] = rec.interior;
  j["degenerate_flag"] = rec.degenerate_flag;
  j["source"] = rec.source;
  return j;
}

json verdict_json(const CensusVerdict& v) {
  json j;
  j["n_classes"] = v.n_classes;
  j["n_interior"] = v.n_interior;
  j["cuplength_bound"] = v.cuplength_bound;
  j["betti_bound"] = v.betti_bound;
  j["meets_cuplength"] = v.meets_cuplength;
  j["meets_betti"] = v.meets_betti;
  j["all_nondegenerate"] = v.all_nondegenerate;
  j["degenerate_family"] = v.degenerate_family;
  j["ambiguous_clusters"] = v.ambiguous_clusters;
  return j;
}

struct CensusOutcome {
  std::vector<OrbitRecord> records;
  std::vector<OrbitClass> classes;
  CensusVerdict verdict;
  int n_critical_points = 0;
  std::vector<std::string> failures;  // per-seed problems; the batch never aborts
};

CensusOutcome run_variational_census(const HamiltonianSystem& sys, const EmbeddedSphere& S,
                                     const RunConfig& cfg) {
  CensusOutcome out;
  const TruncatedLoopSpace space(sys.n_dof, cfg.search_fourier_cutoff);
  const SpectralSplitting split = build_splitting(space);
  const ActionFunctional af(sys, space, split);

  SearchOptions sopt;
  sopt.budget = cfg.search_budget;
  sopt.newton_tol = cfg.tol_newton;
  sopt.seed_scale = cfg.search_seed_scale;
  sopt.seed = cfg.rng_seed;
  const auto points = find_critical_points(af, sopt);
  out.n_critical_points = static_cast<int>(points.size());

  const int n = sys.n_dof;
  for (size_t i = 0; i < points.size(); ++i) {
    try {
      const Vec z0 = af.loop_start(points[i].p);
      const ShootingResult sr = refine_periodic(sys, z0, cfg.tol_newton, 40, cfg.tol_integrator);
      if (!sr.converged) {
        out.failures.push_back("critical point " + std::to_string(i) +
                               ": shooting stalled at residual " + fmt(sr.residual));
        continue;
      }
      OrbitRecord rec =
          make_orbit_record(sys, sr.z0, "variational", cfg.tol_integrator, cfg.tol_nondegeneracy);
      rec.action = points[i].value;
      if (sr.singular_jacobian) rec.degenerate_flag = true;
      rec.interior = S.inside(rec.z0.tail(n));
      out.records.push_back(std::move(rec));
    } catch (const IntegrationError& e) {
      out.failures.push_back("critical point " + std::to_string(i) + ": " + e.what());
    }
  }
  out.classes = cluster_distinct(out.records, cfg.tol_metric);
  out.verdict = verify_counts(out.records, out.classes, n, sys.smoothness == Smoothness::C2);
  return out;
}

json classes_json(const std::vector<OrbitRecord>& records, const std::vector<OrbitClass>& classes) {
  json arr = json::array();
  for (const auto& cls : classes) {
    json j = orbit_json(records[cls.representative]);
    j["n_members"] = static_cast<int>(cls.members.size());
    j["ambiguous"] = cls.ambiguous;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string orbit_table(const std::vector<OrbitRecord>& records,
                        const std::vector<OrbitClass>& classes) {
  std::ostringstream os;
  const int n = records.empty() ? 0 : static_cast<int>(records[0].z0.size()) / 2;
  os << "class\tsource\tinterior\tnondegenerate\tresidual\taction\tstability_margin";
  for (int i = 0; i < n; ++i) os << "\twinding" << i;
  for (int i = 0; i < n; ++i) os << "\tx" << i;
  for (int i = 0; i < n; ++i) os << "\ty" << i;
  os << "\n";
  for (size_t c = 0; c < classes.size(); ++c) {
    const OrbitRecord& rec = records[classes[c].representative];
    os << c << "\t" << rec.source << "\t" << rec.interior << "\t" << rec.nondegenerate << "\t"
       << fmt(rec.residual) << "\t" << fmt(rec.action) << "\t" << fmt(rec.stability_margin);
    for (int i = 0; i < n; ++i) os << "\t" << rec.winding[i];
    for (int i = 0; i < n; ++i) os << "\t" << fmt(rec.z0[i]);
    for (int i = 0; i < n; ++i) os << "\t" << fmt(rec.z0[n + i]);
    os << "\n";
  }
  return os.str();
}

std::vector<OrbitRecord> interior_representatives(const std::vector<OrbitRecord>& records,
                                                  const std::vector<OrbitClass>& classes) {
  std::vector<OrbitRecord> reps;
  for (const auto& cls : classes)
    if (records[cls.representative].interior) reps.push_back(records[cls.representative]);
  return reps;
}

OracleOptions oracle_options(const RunConfig& cfg) {
  OracleOptions opt;
  opt.grid_per_dim = cfg.oracle_grid_per_dim;
  opt.budget = cfg.oracle_budget;
  opt.refine_top = cfg.oracle_refine_top;
  opt.newton_tol = cfg.tol_newton;
  opt.integrator_tol = cfg.tol_integrator;
  opt.nondeg_threshold = cfg.tol_nondegeneracy;
  opt.metric_tol = cfg.tol_metric;
  opt.seed = cfg.rng_seed;
  return opt;
}

}  // namespace

CommandResult run_check_rays(const RunConfig& cfg) {
  CommandResult out;
  const HamiltonianSystem sys = make_system(cfg);
  const EmbeddedSphere S = make_sphere(cfg, sys.n_dof);
  const RaySide side = cfg.rays_side == "inward" ? RaySide::Inward : RaySide::Outward;
  const RaysReport rep = check_avoiding_rays(sys, S, side, rays_options(cfg));

  out.report["command"] = "check-rays";
  out.report["timestamp"] = iso_timestamp();
  out.report["system"] = cfg.system_name;
  out.report["sphere"] = cfg.sphere_name;
  out.report["rays"] = rays_json(rep);
  out.report["verdict"] = rep.verifiable && rep.verdict;
  out.exit_code = !rep.verifiable ? 2 : (rep.verdict ? 0 : 1);
  return out;
}

CommandResult run_find_orbits(const RunConfig& cfg) {
  CommandResult out;
  const HamiltonianSystem sys = make_system(cfg);
  const EmbeddedSphere S = make_sphere(cfg, sys.n_dof);
  const CensusOutcome res = run_variational_census(sys, S, cfg);

  out.report["command"] = "find-orbits";
  out.report["timestamp"] = iso_timestamp();
  out.report["system"] = cfg.system_name;
  out.report["sphere"] = cfg.sphere_name;
  out.report["search"] = {{"n_critical_points", res.n_critical_points},
                          {"n_refined", static_cast<int>(res.records.size())},
                          {"failures", res.failures}};
  out.report["classes"] = classes_json(res.records, res.classes);
  out.report["census"] = verdict_json(res.verdict);
  out.report["verdict"] = res.verdict.meets_cuplength;
  out.tables.emplace_back("orbits.tsv", orbit_table(res.records, res.classes));
  out.exit_code = res.verdict.meets_cuplength ? 0 : 1;
  return out;
}

CommandResult run_certify(const RunConfig& cfg) {
  CommandResult out;
  const HamiltonianSystem sys = make_system(cfg);
  const EmbeddedSphere S = make_sphere(cfg, sys.n_dof);
  json& rep = out.report;
  rep["command"] = "certify";
  rep["timestamp"] = iso_timestamp();
  rep["system"] = cfg.system_name;
  rep["sphere"] = cfg.sphere_name;

  const AdmissibilityReport adm = check_admissible(sys, 1000, cfg.tol_admissibility, cfg.rng_seed);
  rep["admissibility"] = {{"pass", adm.pass},
                          {"periodicity_defect", adm.periodicity_defect},
                          {"gradient_defect", adm.gradient_defect},
                          {"hessian_defect", adm.hessian_defect},
                          {"n_samples", adm.n_samples}};

  const RaySide side = cfg.rays_side == "inward" ? RaySide::Inward : RaySide::Outward;
  const RaysReport rays = check_avoiding_rays(sys, S, side, rays_options(cfg));
  rep["rays"] = rays_json(rays);

  bool not_verifiable = !rays.verifiable;
  const bool rays_ok = rays.verifiable && rays.verdict;

  // Brouwer degree of the displacement y -> x(T) - x(0) at fixed base points.
  // Only meaningful when the rays check passed (boundary-nonvanishing).
  bool degree_consistent = false;
  if (rays_ok) {
    degree_consistent = true;
    const int expected = side == RaySide::Inward ? 1 : (sys.n_dof % 2 == 0 ? 1 : -1);
    Rng base = Rng(cfg.rng_seed).fork(17);
    json samples = json::array();
    try {
      for (int a = 0; a < cfg.rays_n_angles; ++a) {
        const Vec x0 = base.uniform_vec(sys.n_dof, 0.0, two_pi);
        const VectorMap disp = [&sys, &cfg, x0](const Vec& y) {
          Vec z0(2 * sys.n_dof);
          z0 << x0, y;
          return Vec(poincare_map(sys, z0, cfg.tol_integrator).theta);
        };
        const int deg = brouwer_degree(disp, S, cfg.degree_resolution, cfg.rng_seed + 1000 + a);
        samples.push_back({{"x0", vec_json(x0)}, {"degree", deg}});
        degree_consistent = degree_consistent && deg == expected;
      }
      rep["degree"] = {{"expected", expected},
                       {"samples", samples},
                       {"consistent", degree_consistent}};
    } catch (const UnreliableResultError& e) {
      rep["degree"] = {{"error", e.what()}};
      not_verifiable = true;
    } catch (const IntegrationError& e) {
      rep["degree"] = {{"error", e.what()}};
      not_verifiable = true;
    }
  } else {
    rep["degree"] = {{"skipped", true}, {"reason", "avoiding-rays check did not pass"}};
  }

  // Census and oracle cross-check are gated on the rays verdict: without it
  // the multiplicity bounds make no prediction for this configuration.
  bool counts_ok = false;
  bool oracle_ok = false;
  if (rays_ok) {
    const CensusOutcome res = run_variational_census(sys, S, cfg);
    rep["search"] = {{"n_critical_points", res.n_critical_points},
                     {"n_refined", static_cast<int>(res.records.size())},
                     {"failures", res.failures}};
    rep["classes"] = classes_json(res.records, res.classes);
    rep["census"] = verdict_json(res.verdict);
    counts_ok = res.verdict.meets_cuplength;

    const std::vector<OrbitRecord> oracle = oracle_fixed_points(sys, S, oracle_options(cfg));
    std::vector<OrbitRecord> oracle_interior;
    for (const auto& rec : oracle)
      if (rec.interior) oracle_interior.push_back(rec);
    const std::vector<OrbitRecord> reps = interior_representatives(res.records, res.classes);
    const AgreementReport agree = compare_class_sets(reps, oracle_interior, cfg.tol_metric);
    json oj;
    oj["n_variational"] = agree.n_a;
    oj["n_oracle"] = agree.n_b;
    oj["n_matched"] = agree.n_matched;
    oj["agree"] = agree.agree;
    json ajson = json::array();
    for (const auto& rec : oracle_interior) ajson.push_back(orbit_json(rec));
    oj["classes"] = ajson;
    rep["oracle"] = oj;
    oracle_ok = agree.agree;

    std::vector<OrbitRecord> merged = res.records;
    merged.insert(merged.end(), oracle.begin(), oracle.end());
    out.tables.emplace_back("orbits.tsv",
                            orbit_table(merged, cluster_distinct(merged, cfg.tol_metric)));
  } else {
    rep["census"] = {{"skipped", true}, {"reason", "avoiding-rays check did not pass"}};
    rep["oracle"] = {{"skipped", true}, {"reason", "avoiding-rays check did not pass"}};
  }

  const bool verdict = adm.pass && rays_ok && degree_consistent && counts_ok && oracle_ok;
  rep["verdict"] = verdict;
  out.exit_code = not_verifiable ? 2 : (verdict ? 0 : 1);
  return out;
}

CommandResult run_basket(const RunConfig& cfg) {
  CommandResult out;
  const int n = cfg.n_dof();
  const EmbeddedSphere S = make_sphere(cfg, n);
  json& rep = out.report;
  rep["command"] = "basket";
  rep["timestamp"] = iso_timestamp();
  rep["sphere"] = cfg.sphere_name;

  BasketBuildOptions bopt;
  bopt.n_levels = cfg.basket_levels;
  bopt.n_directions = cfg.basket_directions;
  bopt.safety = cfg.basket_safety;
  bopt.seed = cfg.rng_seed;

  BasketFunction basket;
  try {
    basket = build_basket(S, bopt);
  } catch (const ConstructionError& e) {
    rep["construction"] = {{"pass", false}, {"error", e.what()}};
    rep["verdict"] = false;
    out.exit_code = 1;
    return out;
  }
  rep["construction"] = {{"pass", true},
                         {"kappa", basket.profile.kappa},
                         {"q", basket.profile.q},
                         {"envelope_a", basket.profile.env_a},
                         {"envelope_p", basket.profile.env_p}};

  BasketVerifyOptions vopt;
  vopt.tol = cfg.tol_basket;
  vopt.tail_tol = cfg.tol_basket_tail;
  vopt.seed = cfg.rng_seed;
  const BasketReport brep = verify_basket(basket, vopt);
  auto axiom_json = [](const AxiomCheck& a) {
    json j;
    j["pass"] = a.pass;
    j["worst"] = a.worst;
    if (!a.pass && a.witness.size() > 0) j["witness"] = vec_json(a.witness);
    if (!a.note.empty()) j["note"] = a.note;
    return j;
  };
  rep["axioms"] = {{"vanish_inside", axiom_json(brep.vanish_inside)},
                   {"grad_nonzero", axiom_json(brep.grad_nonzero)},
                   {"collar_normal", axiom_json(brep.collar_normal)},
                   {"saturates", axiom_json(brep.saturates)},
                   {"derivative_budget", brep.derivative_budget},
                   {"budget_worst_slack", brep.budget_worst_slack},
                   {"verdict", brep.verdict}};

  // time-localised profile over the same basket
  auto pit = cfg.system_params.find("period");
  const double period = pit == cfg.system_params.end() ? 1.0 : pit->second;
  const double tau = cfg.profile_tau > 0 ? cfg.profile_tau : period / 4.0;
  const double need = S.bounding_radius + S.center_hint.norm();
  const double big_r = cfg.profile_big_r > 0 ? cfg.profile_big_r : 1.1 * need;
  const double r0 = cfg.profile_r0 > 0 ? cfg.profile_r0 : 2.0 * big_r;
  bool profile_ok = false;
  try {
    const TimeProfile prof = build_time_profile(basket, period, tau, big_r, r0);
    const TimeProfileReport prep = verify_time_profile(prof, 64, 64, cfg.tol_profile, 16, cfg.rng_seed);
    rep["time_profile"] = {{"tau", tau},
                           {"big_r", big_r},
                           {"r0", r0},
                           {"support_defect", prep.support_defect},
                           {"average_defect", prep.average_defect},
                           {"saturation_defect", prep.saturation_defect},
                           {"pass", prep.pass}};
    profile_ok = prep.pass;
  } catch (const ConstructionError& e) {
    rep["time_profile"] = {{"pass", false}, {"error", e.what()}};
  }

  // construction grid table
  {
    std::ostringstream os;
    os << "r\tm_sampled\tm_env\tg\tg1\tg2\n";
    for (const auto& row : basket.grid)
      os << fmt(row.r) << "\t" << fmt(row.m_sampled) << "\t" << fmt(row.m_env) << "\t"
         << fmt(row.g) << "\t" << fmt(row.g1) << "\t" << fmt(row.g2) << "\n";
    out.tables.emplace_back("basket_grid.tsv", os.str());
  }
  // h on a rectilinear grid through the first two coordinates
  {
    std::ostringstream os;
    const double span = 2.5 * S.bounding_radius;
    const int m = 81;
    Vec y = S.center_hint;
    if (n == 1) {
      os << "y0\th\n";
      for (int i = 0; i < m; ++i) {
        y[0] = S.center_hint[0] + span * (2.0 * i / (m - 1) - 1.0);
        os << fmt(y[0]) << "\t" << fmt(basket.eval(y)) << "\n";
      }
    } else {
      os << "y0\ty1\th\n";
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          y = S.center_hint;
          y[0] += span * (2.0 * i / (m - 1) - 1.0);
          y[1] += span * (2.0 * j / (m - 1) - 1.0);
          os << fmt(y[0]) << "\t" << fmt(y[1]) << "\t" << fmt(basket.eval(y)) << "\n";
        }
    }
    out.tables.emplace_back("basket_field.tsv", os.str());
  }

  const bool verdict = brep.verdict && profile_ok;
  rep["verdict"] = verdict;
  out.exit_code = verdict ? 0 : 1;
  return out;
}

std::vector<std::string> write_outputs(const CommandResult& result, const RunConfig& cfg,
                                       const std::string& command) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  const fs::path report_path = dir / (command + "_report.json");
  std::ofstream rep(report_path);
  rep << result.report.dump(2) << "\n";
  paths.push_back(report_path.string());

  for (const auto& [name, body] : result.tables) {
    const fs::path p = dir / name;
    std::ofstream os(p);
    os << body;
    paths.push_back(p.string());
  }
  return paths;
}

}  // namespace pblab
