// Command-line driver: configuration, experiment orchestration, and emission
// of result tables (CSV) and reports (JSON).  One experiment per invocation;
// identical configuration implies byte-identical output files regardless of
// the worker count.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acgeo/asymptotics.hpp"
#include "acgeo/config.hpp"
#include "acgeo/io.hpp"

using namespace acgeo;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 0;      // 0: take the config value
  long long seed = -1;  // < 0: take the config value
  bool snapshots = false;
  std::vector<std::string> sets;
  bool inject_gradient_fault = false;
};

std::string trim_ws(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

RunConfig load_config(const CliOptions& opt) {
  RunConfig cfg;
  if (!opt.config_path.empty()) cfg = parse_config_file(opt.config_path);
  for (const std::string& s : opt.sets) {
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error("--set expects key=value, got '" + s + "'");
    apply_override(cfg, trim_ws(s.substr(0, eq)), trim_ws(s.substr(eq + 1)));
  }
  if (opt.workers > 0) cfg.workers = opt.workers;
  if (opt.seed >= 0) cfg.seed = (std::uint64_t)opt.seed;
  validate_config(cfg);
  return cfg;
}

// Echoed into every report; deliberately excludes workers and output paths so
// that reruns with different execution settings stay byte-identical.
Json config_echo(const RunConfig& cfg) {
  Json j;
  j["family"] = cfg.family;
  j["alpha"] = cfg.alpha;
  if (cfg.family == "profile") j["a"] = cfg.a;
  if (cfg.family == "perturbed") {
    j["mu"] = cfg.mu;
    j["amplitudes"] = cfg.amplitudes;
  }
  j["N"] = cfg.N;
  j["M"] = cfg.M;
  j["r0"] = cfg.r0;
  j["phi0"] = cfg.phi0;
  return j;
}

fs::path ensure_out(const CliOptions& opt) {
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

double min_node_radius(const DiscreteCurve& c) {
  double r = std::numeric_limits<double>::infinity();
  for (const ChartPoint& n : c.nodes) r = std::min(r, n.radius());
  return r;
}

const char* model_name(ConeModel m) {
  switch (m) {
    case ConeModel::SmoothUpper: return "upper";
    case ConeModel::SmoothLower: return "lower";
    case ConeModel::Singular: return "singular";
  }
  return "?";
}

Json ray_json(const RayAsymptote& r) {
  Json j;
  j["theta_inf"] = r.theta_inf;
  j["intercept"] = r.intercept;
  j["growth_c"] = r.growth_c;
  j["nodes_used"] = r.nodes_used;
  return j;
}

// ---------------------------------------------------------------------------
// geodesic
// ---------------------------------------------------------------------------

int cmd_geodesic(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  double r_a = cfg.have_endpoints ? cfg.r_a : cfg.r0;
  double phi_a = cfg.have_endpoints ? cfg.phi_a : cfg.phi0;
  double r_b = cfg.have_endpoints ? cfg.r_b : cfg.r0;
  double phi_b = cfg.have_endpoints ? cfg.phi_b : cfg.phi0 + kPi;

  // linear interpolation in polar coordinates as the initializer
  DiscreteCurve init;
  init.nodes.reserve(cfg.N + 1);
  for (int i = 0; i <= cfg.N; ++i) {
    double t = (double)i / cfg.N;
    init.nodes.push_back(
        ChartPoint::polar(r_a + t * (r_b - r_a), phi_a + t * (phi_b - phi_a)));
  }

  GeodesicReport rep = find_geodesic(m, init, flow_from(cfg));
  if (!rep.converged)
    throw convergence_error(std::string("geodesic flow did not converge (") +
                            flow_stop_name(rep.stop) + ")");
  int index = morse_index(m, rep.curve, cfg.eigen_tol);
  EmbedReport emb = is_embedded(m, rep.curve);

  fs::path out = ensure_out(opt);
  write_text_file((out / "geodesic_curve.csv").string(), curve_to_csv(rep.curve));

  Json j;
  j["command"] = "geodesic";
  j["config"] = config_echo(cfg);
  Json ep;
  ep["r_a"] = r_a;
  ep["phi_a"] = phi_a;
  ep["r_b"] = r_b;
  ep["phi_b"] = phi_b;
  j["endpoints"] = std::move(ep);
  j["energy"] = rep.energy;
  j["length"] = rep.length;
  j["grad_norm"] = rep.grad_norm;
  j["iters"] = rep.iters;
  j["converged"] = rep.converged;
  j["stop"] = flow_stop_name(rep.stop);
  j["index"] = index;
  j["embedded"] = emb.embedded;
  j["min_separation"] = emb.min_separation;
  j["files"] = Json{{"curve_csv", "geodesic_curve.csv"}};
  write_json_file((out / "geodesic_report.json").string(), j);

  std::printf("geodesic: length=%s index=%d -> %s\n", format_g17(rep.length).c_str(),
              index, out.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// minmax
// ---------------------------------------------------------------------------

void write_sweepout_csv(const std::string& path, const Sweepout& H) {
  CsvWriter csv({"slice", "s", "t", "chart", "r_or_u", "phi_or_v"});
  for (int j = 0; j < H.count(); ++j) {
    const DiscreteCurve& c = H.slices[j];
    int N = c.segments();
    for (int i = 0; i <= N; ++i) {
      const ChartPoint& p = c.nodes[i];
      csv.row({std::to_string(j), format_g17(H.s[j]), format_g17((double)i / N),
               p.is_polar() ? "polar" : "patch", format_g17(p.x1),
               format_g17(p.x2)});
    }
  }
  csv.write_file(path);
}

int cmd_minmax(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  MinMaxConfig mc = minmax_from(cfg);
  fs::path out = ensure_out(opt);

  int snapshot_count = 0;
  if (opt.snapshots) {
    mc.on_round = [&](int round, const Sweepout& H) {
      char name[64];
      std::snprintf(name, sizeof name, "sweepout_round_%03d.csv", round);
      write_sweepout_csv((out / name).string(), H);
      ++snapshot_count;
    };
  }

  PipelineResult res = run_minmax_pipeline(m, mc);
  const MinMaxResult& mm = res.minmax;

  CsvWriter trace({"round", "lambda", "argmax", "slices"});
  for (const LambdaTracePoint& p : mm.trace)
    trace.row({std::to_string(p.round), format_g17(p.lambda),
               std::to_string(p.argmax), std::to_string(p.slices)});
  trace.write_file((out / "lambda_trace.csv").string());

  write_text_file((out / "gamma1_curve.csv").string(),
                  curve_to_csv(res.minimizers.upper.curve));
  write_text_file((out / "gamma2_curve.csv").string(),
                  curve_to_csv(res.minimizers.lower.curve));
  write_text_file((out / "gamma3_curve.csv").string(),
                  curve_to_csv(mm.gamma3.curve));

  Json j;
  j["command"] = "minmax";
  j["config"] = config_echo(cfg);
  j["lambda"] = mm.lambda;
  j["ratio"] = mm.ratio;
  j["e1"] = mm.e1;
  j["e2"] = mm.e2;
  j["gap_margin"] = mm.gap_margin;
  j["gap_rel"] = mm.gap_rel;
  j["gap"] = mm.gap;
  j["argmax"] = mm.argmax;
  j["indices"] = Json{{"gamma1", res.minimizers.index_upper},
                      {"gamma2", res.minimizers.index_lower},
                      {"gamma3", mm.index_gamma3}};
  j["lengths"] = Json{{"gamma1", res.minimizers.upper.length},
                      {"gamma2", res.minimizers.lower.length},
                      {"gamma3", mm.gamma3.length}};
  j["embedded"] = Json{{"gamma1", res.minimizers.embedded_upper},
                       {"gamma2", res.minimizers.embedded_lower},
                       {"gamma3", mm.gamma3_embedded}};
  j["disjoint_minimizers"] = res.minimizers.disjoint;
  j["separation"] = Json{{"minimizers", res.minimizers.separation},
                         {"gamma3_upper", mm.sep_upper},
                         {"gamma3_lower", mm.sep_lower}};
  j["rounds"] = (int)mm.trace.size();
  if (opt.snapshots) j["snapshots"] = snapshot_count;
  j["files"] = Json{{"lambda_trace_csv", "lambda_trace.csv"},
                    {"gamma1_csv", "gamma1_curve.csv"},
                    {"gamma2_csv", "gamma2_curve.csv"},
                    {"gamma3_csv", "gamma3_curve.csv"}};
  write_json_file((out / "minmax_result.json").string(), j);

  std::printf("minmax: lambda=%s ratio=%s index=%d -> %s\n",
              format_g17(mm.lambda).c_str(), format_g17(mm.ratio).c_str(),
              mm.index_gamma3, out.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

std::vector<double> radii_of(const RunConfig& cfg) {
  return cfg.r0_list.empty() ? std::vector<double>{cfg.r0} : cfg.r0_list;
}

int verify_gauss_bonnet(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  const double tol = 1e-3;
  CsvWriter csv({"kind", "r_lo", "r_hi", "curvature_integral", "boundary_integral",
                 "total", "expected", "defect", "expected_defect", "residual"});
  Json rows = Json::array();
  double max_residual = 0.0;
  for (double r : radii_of(cfg)) {
    bool disk = m.rotational();
    double r_lo = disk ? 0.0 : r / 3.0;
    GaussBonnetReport rep = disk ? gauss_bonnet_disk(m, r, cfg.nr, cfg.nphi)
                                 : gauss_bonnet_annulus(m, r_lo, r, cfg.nr, cfg.nphi);
    // a disk around a cone point encloses exactly the mass; smooth regions
    // and annuli enclose nothing
    double expected_defect = (disk && !m.has_patch()) ? mass_formula(m) : 0.0;
    double residual = std::fabs(rep.defect - expected_defect);
    max_residual = std::max(max_residual, residual);
    csv.row({disk ? "disk" : "annulus", format_g17(r_lo), format_g17(r),
             format_g17(rep.curvature_integral), format_g17(rep.boundary_integral),
             format_g17(rep.total), format_g17(rep.expected), format_g17(rep.defect),
             format_g17(expected_defect), format_g17(residual)});
    Json row;
    row["kind"] = disk ? "disk" : "annulus";
    row["r_lo"] = r_lo;
    row["r_hi"] = r;
    row["curvature_integral"] = rep.curvature_integral;
    row["boundary_integral"] = rep.boundary_integral;
    row["total"] = rep.total;
    row["expected"] = rep.expected;
    row["defect"] = rep.defect;
    row["expected_defect"] = expected_defect;
    row["residual"] = residual;
    rows.push_back(std::move(row));
  }
  fs::path out = ensure_out(opt);
  csv.write_file((out / "gauss_bonnet.csv").string());
  Json j;
  j["command"] = "verify";
  j["check"] = "gauss-bonnet";
  j["config"] = config_echo(cfg);
  j["rows"] = std::move(rows);
  j["max_residual"] = max_residual;
  j["tolerance"] = tol;
  j["pass"] = max_residual <= tol;
  j["files"] = Json{{"table_csv", "gauss_bonnet.csv"}};
  write_json_file((out / "verify_gauss_bonnet.json").string(), j);
  std::printf("verify gauss-bonnet: max residual=%s pass=%s\n",
              format_g17(max_residual).c_str(), j["pass"].get<bool>() ? "yes" : "no");
  return 0;
}

int verify_mass(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  const double tol = 0.02;
  double formula = mass_formula(m);
  CsvWriter csv({"r0", "formula", "measured", "abs_error"});
  Json rows = Json::array();
  std::vector<double> errs;
  for (double r : radii_of(cfg)) {
    double measured = mass_measured(m, r, cfg.nphi);
    double err = std::fabs(measured - formula);
    errs.push_back(err);
    csv.row_numeric({r, formula, measured, err});
    Json row;
    row["r0"] = r;
    row["measured"] = measured;
    row["abs_error"] = err;
    rows.push_back(std::move(row));
  }
  fs::path out = ensure_out(opt);
  csv.write_file((out / "mass.csv").string());
  Json j;
  j["command"] = "verify";
  j["check"] = "mass";
  j["config"] = config_echo(cfg);
  j["formula"] = formula;
  j["rows"] = std::move(rows);
  j["final_error"] = errs.back();
  j["converging"] = errs.back() <= errs.front();
  j["tolerance"] = tol;
  j["pass"] = errs.back() <= tol && errs.back() <= errs.front();
  j["files"] = Json{{"table_csv", "mass.csv"}};
  write_json_file((out / "verify_mass.json").string(), j);
  std::printf("verify mass: formula=%s final error=%s pass=%s\n",
              format_g17(formula).c_str(), format_g17(errs.back()).c_str(),
              j["pass"].get<bool>() ? "yes" : "no");
  return 0;
}

int verify_blow_down(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  CsvWriter csv({"r0", "curve", "window_lo", "window_hi", "dist_upper",
                 "dist_lower", "dist_singular", "best", "best_dist"});
  Json rows = Json::array();
  auto add_row = [&](double r0, const char* which, double lo, double hi,
                     const BlowDownReport& bd) {
    csv.row({format_g17(r0), which, format_g17(lo), format_g17(hi),
             format_g17(bd.dist_upper), format_g17(bd.dist_lower),
             format_g17(bd.dist_singular), model_name(bd.best),
             format_g17(bd.best_dist)});
    Json row;
    row["r0"] = r0;
    row["curve"] = which;
    row["window_lo"] = lo;
    row["window_hi"] = hi;
    row["dist_upper"] = bd.dist_upper;
    row["dist_lower"] = bd.dist_lower;
    row["dist_singular"] = bd.dist_singular;
    row["best"] = model_name(bd.best);
    row["best_dist"] = bd.best_dist;
    rows.push_back(std::move(row));
  };

  std::vector<double> minimizer_dists;
  bool gamma3_all_singular = true;
  for (double r0 : radii_of(cfg)) {
    MinimizerPair pair =
        two_minimizers(m, r0, cfg.phi0, cfg.N, flow_from(cfg), false);
    BlowDownReport bd = blow_down_compare(m, pair.upper.curve, r0, cfg.phi0);
    minimizer_dists.push_back(bd.best_dist);
    add_row(r0, "minimizer", 0.0, 0.0, bd);

    MinMaxConfig mc = minmax_from(cfg);
    mc.r0 = r0;
    PipelineResult res = run_minmax_pipeline(m, mc);
    // the cap region is excluded: the blow-down comparison lives on the
    // annulus window where the geometry is already conical
    BlowDownReport g3 = blow_down_compare(m, res.minmax.gamma3.curve, r0,
                                          cfg.phi0, 0, 1.0 / 3.0, 1.0 + 1e-9);
    if (g3.best != ConeModel::Singular) gamma3_all_singular = false;
    add_row(r0, "gamma3", 1.0 / 3.0, 1.0, g3);
  }
  bool decreasing = true;
  for (size_t i = 0; i + 1 < minimizer_dists.size(); ++i)
    if (!(minimizer_dists[i + 1] < minimizer_dists[i])) decreasing = false;

  fs::path out = ensure_out(opt);
  csv.write_file((out / "blow_down.csv").string());
  Json j;
  j["command"] = "verify";
  j["check"] = "blow-down";
  j["config"] = config_echo(cfg);
  j["rows"] = std::move(rows);
  j["minimizer_distances_decreasing"] = decreasing;
  j["gamma3_all_singular"] = gamma3_all_singular;
  j["pass"] = decreasing && gamma3_all_singular;
  j["files"] = Json{{"table_csv", "blow_down.csv"}};
  write_json_file((out / "verify_blow_down.json").string(), j);
  std::printf("verify blow-down: decreasing=%s gamma3 singular=%s pass=%s\n",
              decreasing ? "yes" : "no", gamma3_all_singular ? "yes" : "no",
              j["pass"].get<bool>() ? "yes" : "no");
  return 0;
}

int verify_no_drift(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  double bound = 5.0 * m.smoothing_scale();
  auto trace = no_drift_trace(m, radii_of(cfg), minmax_from(cfg));
  CsvWriter csv({"r0", "closest_approach", "lambda", "ratio", "concentration"});
  Json rows = Json::array();
  double max_closest = 0.0;
  for (const NoDriftPoint& p : trace) {
    max_closest = std::max(max_closest, p.closest_approach);
    csv.row_numeric({p.r0, p.closest_approach, p.lambda, p.ratio, p.concentration});
    Json row;
    row["r0"] = p.r0;
    row["closest_approach"] = p.closest_approach;
    row["lambda"] = p.lambda;
    row["ratio"] = p.ratio;
    row["concentration"] = p.concentration;
    rows.push_back(std::move(row));
  }
  fs::path out = ensure_out(opt);
  csv.write_file((out / "no_drift.csv").string());
  Json j;
  j["command"] = "verify";
  j["check"] = "no-drift";
  j["config"] = config_echo(cfg);
  j["bound"] = bound;
  j["rows"] = std::move(rows);
  j["max_closest_approach"] = max_closest;
  j["bounded"] = max_closest <= bound;
  j["pass"] = max_closest <= bound;
  j["files"] = Json{{"table_csv", "no_drift.csv"}};
  write_json_file((out / "verify_no_drift.json").string(), j);
  std::printf("verify no-drift: max closest approach=%s bound=%s pass=%s\n",
              format_g17(max_closest).c_str(), format_g17(bound).c_str(),
              j["pass"].get<bool>() ? "yes" : "no");
  return 0;
}

int verify_distinctness(const RunConfig& cfg, const CliOptions& opt) {
  SurfaceMetric m = metric_from(cfg);
  double phi_a = 0.0, phi_b = kPi / 4;
  if (!cfg.phi0_list.empty()) {
    if (cfg.phi0_list.size() != 2)
      throw config_error("distinctness needs exactly two phi0_list angles");
    phi_a = cfg.phi0_list[0];
    phi_b = cfg.phi0_list[1];
  }
  DistinctnessReport rep = distinctness_experiment(m, phi_a, phi_b, minmax_from(cfg));
  double window_dist = support_distance_window(
      rep.run_a.minmax.gamma3.curve, rep.run_b.minmax.gamma3.curve, m.alpha(),
      cfg.r0 / 3.0, cfg.r0 * (1.0 + 1e-9));
  double support_threshold = 0.01 * cfg.r0;

  CsvWriter csv({"label", "phi0", "theta_front", "theta_back", "lambda", "ratio"});
  csv.row({"a", format_g17(phi_a), format_g17(rep.a_front.theta_inf),
           format_g17(rep.a_back.theta_inf), format_g17(rep.run_a.minmax.lambda),
           format_g17(rep.run_a.minmax.ratio)});
  csv.row({"b", format_g17(phi_b), format_g17(rep.b_front.theta_inf),
           format_g17(rep.b_back.theta_inf), format_g17(rep.run_b.minmax.lambda),
           format_g17(rep.run_b.minmax.ratio)});

  fs::path out = ensure_out(opt);
  csv.write_file((out / "distinctness.csv").string());
  Json j;
  j["command"] = "verify";
  j["check"] = "distinctness";
  j["config"] = config_echo(cfg);
  j["phi0_a"] = phi_a;
  j["phi0_b"] = phi_b;
  j["separation"] = rep.separation;
  j["expected"] = rep.expected;
  j["rel_error"] = rep.rel_error;
  j["window_support_distance"] = window_dist;
  j["support_threshold"] = support_threshold;
  j["rays"] = Json{{"a_front", ray_json(rep.a_front)},
                   {"a_back", ray_json(rep.a_back)},
                   {"b_front", ray_json(rep.b_front)},
                   {"b_back", ray_json(rep.b_back)}};
  j["pass"] = rep.rel_error <= 0.05 && window_dist > support_threshold;
  j["files"] = Json{{"table_csv", "distinctness.csv"}};
  write_json_file((out / "verify_distinctness.json").string(), j);
  std::printf("verify distinctness: separation=%s expected=%s rel=%s pass=%s\n",
              format_g17(rep.separation).c_str(), format_g17(rep.expected).c_str(),
              format_g17(rep.rel_error).c_str(),
              j["pass"].get<bool>() ? "yes" : "no");
  return 0;
}

// ---------------------------------------------------------------------------
// sweep-lambda
// ---------------------------------------------------------------------------

int cmd_sweep_lambda(const RunConfig& cfg, const CliOptions& opt) {
  if (cfg.r0_list.size() < 2)
    throw config_error("sweep-lambda needs r0_list with at least two radii");
  SurfaceMetric m = metric_from(cfg);
  CsvWriter csv({"r0", "e1", "e2", "lambda", "ratio", "gap_margin",
                 "index_gamma3", "closest_approach"});
  Json rows = Json::array();
  std::vector<double> ratios;
  for (double r0 : cfg.r0_list) {
    MinMaxConfig mc = minmax_from(cfg);
    mc.r0 = r0;
    PipelineResult res = run_minmax_pipeline(m, mc);
    const MinMaxResult& mm = res.minmax;
    double closest = min_node_radius(mm.gamma3.curve);
    ratios.push_back(mm.ratio);
    csv.row({format_g17(r0), format_g17(mm.e1), format_g17(mm.e2),
             format_g17(mm.lambda), format_g17(mm.ratio),
             format_g17(mm.gap_margin), std::to_string(mm.index_gamma3),
             format_g17(closest)});
    Json row;
    row["r0"] = r0;
    row["e1"] = mm.e1;
    row["e2"] = mm.e2;
    row["lambda"] = mm.lambda;
    row["ratio"] = mm.ratio;
    row["gap_margin"] = mm.gap_margin;
    row["index_gamma3"] = mm.index_gamma3;
    row["closest_approach"] = closest;
    rows.push_back(std::move(row));
  }
  bool trend = true;
  for (size_t i = 0; i + 1 < ratios.size(); ++i)
    if (std::fabs(ratios[i + 1] - 4.0) > std::fabs(ratios[i] - 4.0) + 1e-9)
      trend = false;
  bool within = std::fabs(ratios.back() - 4.0) <= 0.6;

  fs::path out = ensure_out(opt);
  csv.write_file((out / "sweep_lambda.csv").string());
  Json j;
  j["command"] = "sweep-lambda";
  j["config"] = config_echo(cfg);
  j["rows"] = std::move(rows);
  j["final_ratio"] = ratios.back();
  j["ratio_trend_toward_4"] = trend;
  j["final_within_15_percent"] = within;
  j["pass"] = trend && within;
  j["files"] = Json{{"table_csv", "sweep_lambda.csv"}};
  write_json_file((out / "sweep_lambda.json").string(), j);
  std::printf("sweep-lambda: final ratio=%s trend=%s pass=%s\n",
              format_g17(ratios.back()).c_str(), trend ? "yes" : "no",
              j["pass"].get<bool>() ? "yes" : "no");
  return 0;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  // fixed bit recipe: identical streams on every platform
  double uni() { return (double)(gen() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * uni(); }
};

std::vector<SurfaceMetric> selftest_families() {
  return {SurfaceMetric::cone(kPi / 6), SurfaceMetric::flat(),
          SurfaceMetric::profile(kPi / 6, 1.0),
          SurfaceMetric::perturbed(kPi / 6, 1.0, {0.05, 0.04, 0.03})};
}

// random polar curve with fixed endpoints, radii in a band away from the pole
DiscreteCurve random_curve(Rng& rng, int N) {
  double r1 = rng.range(0.9, 1.8), r2 = rng.range(0.9, 1.8);
  double phi1 = rng.range(0.0, 2.0 * kPi);
  double dphi = rng.range(0.6, 2.2);
  DiscreteCurve c;
  c.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = (double)i / N;
    double bump = 4.0 * t * (1.0 - t);
    double r = r1 + t * (r2 - r1) + 0.15 * (rng.uni() - 0.5) * bump;
    double phi = phi1 + t * dphi + 0.1 * (rng.uni() - 0.5) * bump;
    c.nodes.push_back(ChartPoint::polar(r, phi));
  }
  return c;
}

struct Suite {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string detail_num(const char* label, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.3e", label, v);
  return buf;
}

Suite suite_gradient_fd(Rng& rng, bool fault) {
  double worst = 0.0;
  for (const SurfaceMetric& m : selftest_families()) {
    for (int k = 0; k < 50; ++k) {
      DiscreteCurve c = random_curve(rng, 16);
      Variation g = energy_gradient(m, c);
      if (fault) g[1].x1 += 1e-3;  // test hook: corrupted gradient
      double scale = 1.0;
      for (const Vec2& v : g) scale = std::max({scale, std::fabs(v.x1), std::fabs(v.x2)});
      for (size_t i = 1; i + 1 < c.nodes.size(); ++i) {
        for (int coord = 0; coord < 2; ++coord) {
          double h = 1e-6;
          DiscreteCurve cp = c, cm = c;
          (coord == 0 ? cp.nodes[i].x1 : cp.nodes[i].x2) += h;
          (coord == 0 ? cm.nodes[i].x1 : cm.nodes[i].x2) -= h;
          double fd = (energy(m, cp) - energy(m, cm)) / (2.0 * h);
          double an = coord == 0 ? g[i].x1 : g[i].x2;
          worst = std::max(worst, std::fabs(an - fd) / scale);
        }
      }
    }
  }
  return {"gradient-vs-finite-differences", worst <= 1e-6,
          detail_num("max rel err", worst)};
}

Suite suite_energy_drop(Rng& rng) {
  double worst = 0.0;
  for (const SurfaceMetric& m : selftest_families()) {
    DiscreteCurve c = random_curve(rng, 24);
    FlowConfig fc;
    fc.max_iters = 120;
    FlowResult res = gradient_flow(m, c, fc);
    worst = std::max(worst, res.max_drop_residual);
  }
  return {"flow-energy-drop-identity", worst <= 0.05,
          detail_num("max residual", worst)};
}

Suite suite_precondition(Rng& rng) {
  double worst = 0.0;
  for (const SurfaceMetric& m : selftest_families()) {
    for (int k = 0; k < 5; ++k) {
      DiscreteCurve c = random_curve(rng, 20);
      Variation g = energy_gradient(m, c);
      Variation w = h1_precondition(m, c, g);
      for (int t = 0; t < 5; ++t) {
        Variation v(c.nodes.size(), Vec2{0, 0});
        for (size_t i = 1; i + 1 < v.size(); ++i)
          v[i] = {rng.range(-1, 1), rng.range(-1, 1)};
        double lhs = h1_inner(m, c, w, v);
        double rhs = pair_covector(g, v);
        worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)));
      }
    }
  }
  return {"preconditioner-pairing", worst <= 1e-10, detail_num("max rel err", worst)};
}

Suite suite_reparametrize(Rng& rng) {
  double worst_ineq = 0.0, worst_eq = 0.0;
  for (const SurfaceMetric& m : selftest_families()) {
    for (int k = 0; k < 10; ++k) {
      DiscreteCurve c = random_curve(rng, 24);
      double E = energy(m, c), L = length(m, c);
      worst_ineq = std::max(worst_ineq, (L * L - E) / E);
      DiscreteCurve u = reparametrize_constant_speed(m, c);
      double Eu = energy(m, u), Lu = length(m, u);
      worst_eq = std::max(worst_eq, std::fabs(Eu - Lu * Lu) / Eu);
    }
  }
  bool ok = worst_ineq <= 1e-12 && worst_eq <= 1e-10;
  return {"length-energy-identity", ok, detail_num("max |E-L^2|/E", worst_eq)};
}

Suite suite_cone_length() {
  auto m = SurfaceMetric::cone(kPi / 6);
  GeodesicReport rep = find_geodesic(m, coordinate_arc(1.0, 0.2, 0.2 + kPi, 64));
  double expect = 2.0 * std::sin(kPi / 2 * std::sin(kPi / 6));
  double err = std::fabs(rep.length - expect);
  return {"cone-antipodal-length", rep.converged && err <= 1e-3,
          detail_num("length err", err)};
}

Suite suite_shoot_distance(Rng& rng) {
  auto m = SurfaceMetric::cone(kPi / 6);
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    ChartPoint p = ChartPoint::polar(rng.range(1.0, 2.0), rng.range(0.0, 4.0));
    double ang = rng.range(0.0, 2.0 * kPi);
    Metric2 g = m.metric_at(p);
    Vec2 v{std::cos(ang), std::sin(ang) / std::sqrt(g.g22)};
    v = v * (1.0 / g.norm(v));
    ShotGeodesic shot = geodesic_shoot(m, p, v, 0.3, 1e-3);
    const ChartPoint& q = shot.back().pos;
    double d = cone_distance(p, q, m.alpha());
    worst = std::max(worst, std::fabs(d - 0.3));
  }
  return {"shoot-vs-exact-distance", worst <= 1e-6, detail_num("max err", worst)};
}

Suite suite_minmax_tiny(const RunConfig& cfg) {
  auto m = SurfaceMetric::cone(kPi / 6);
  MinMaxConfig mc;
  mc.r0 = 1.0;
  mc.phi0 = 0.25;
  mc.N = 48;
  mc.M = 12;
  mc.rounds = 6;
  mc.flow_iters_per_round = 10;
  mc.polish_iters = 150;
  mc.workers = cfg.workers;
  PipelineResult res = run_minmax_pipeline(m, mc);
  bool ok = res.minmax.gap && res.minmax.lambda > 3.0 && res.minmax.lambda < 4.8;
  return {"minmax-width-band", ok, detail_num("lambda", res.minmax.lambda)};
}

Suite suite_gauss_bonnet() {
  auto cone = SurfaceMetric::cone(kPi / 6);
  auto prof = SurfaceMetric::profile(kPi / 6, 1.0);
  double cone_resid =
      std::fabs(gauss_bonnet_disk(cone, 1.5).defect - mass_formula(cone));
  double prof_resid = std::fabs(gauss_bonnet_disk(prof, 8.0, 256, 64).defect);
  bool ok = cone_resid <= 1e-10 && prof_resid <= 1e-3;
  return {"gauss-bonnet-closure", ok, detail_num("profile defect", prof_resid)};
}

std::string schema_directory() {
  if (const char* env = std::getenv("ACGEO_SCHEMAS")) return env;
#ifdef ACGEO_SCHEMA_DIR
  return ACGEO_SCHEMA_DIR;
#else
  return "schemas";
#endif
}

Suite suite_schemas() {
  try {
    Json schema = read_json_file(schema_directory() + "/error.schema.json");
    Json good = Json{{"error", Json{{"type", "config"},
                                    {"message", "x"},
                                    {"exit_code", 4}}}};
    Json bad = Json{{"error", Json{{"type", "config"}}}};
    bool ok = schema_violations(good, schema).empty() &&
              !schema_violations(bad, schema).empty();
    return {"schema-validator", ok, ok ? "round-trip ok" : "validator broken"};
  } catch (const std::exception& e) {
    return {"schema-validator", false, e.what()};
  }
}

int cmd_selftest(const RunConfig& cfg, const CliOptions& opt) {
  Rng rng(cfg.seed);
  std::vector<Suite> suites;
  suites.push_back(suite_gradient_fd(rng, opt.inject_gradient_fault));
  suites.push_back(suite_energy_drop(rng));
  suites.push_back(suite_precondition(rng));
  suites.push_back(suite_reparametrize(rng));
  suites.push_back(suite_cone_length());
  suites.push_back(suite_shoot_distance(rng));
  suites.push_back(suite_minmax_tiny(cfg));
  suites.push_back(suite_gauss_bonnet());
  suites.push_back(suite_schemas());

  int passed = 0;
  std::printf("selftest seed=%" PRIu64 "\n", cfg.seed);
  for (const Suite& s : suites) {
    if (s.pass) ++passed;
    std::printf("  %-32s %s  (%s)\n", s.name.c_str(), s.pass ? "pass" : "FAIL",
                s.detail.c_str());
  }
  bool all = passed == (int)suites.size();
  std::printf("result: %s (%d/%d)\n", all ? "PASS" : "FAIL", passed,
              (int)suites.size());

  fs::path out = ensure_out(opt);
  Json j;
  j["command"] = "selftest";
  j["seed"] = cfg.seed;
  Json arr = Json::array();
  for (const Suite& s : suites) {
    Json e;
    e["name"] = s.name;
    e["pass"] = s.pass;
    e["detail"] = s.detail;
    arr.push_back(std::move(e));
  }
  j["suites"] = std::move(arr);
  j["passed"] = passed;
  j["total"] = (int)suites.size();
  j["pass"] = all;
  write_json_file((out / "selftest_report.json").string(), j);
  return all ? 0 : 1;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

void emit_error_json(const std::string& type, const std::string& message, int code) {
  Json j;
  j["error"] = Json{{"type", type}, {"message", message}, {"exit_code", code}};
  std::printf("%s\n", j.dump().c_str());
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const config_error& e) {
    emit_error_json("config", e.what(), 4);
    return 4;
  } catch (const coincidence_error& e) {
    emit_error_json("coincidence", e.what(), 3);
    return 3;
  } catch (const collapse_error& e) {
    emit_error_json("collapse", e.what(), 3);
    return 3;
  } catch (const convergence_error& e) {
    emit_error_json("convergence", e.what(), 2);
    return 2;
  } catch (const chart_error& e) {
    emit_error_json("chart", e.what(), 2);
    return 2;
  } catch (const regime_error& e) {
    emit_error_json("regime", e.what(), 2);
    return 2;
  } catch (const std::exception& e) {
    emit_error_json("internal", e.what(), 2);
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "min-max geodesics on asymptotically conical surfaces: minimizing pairs, "
      "sweepout widths, Morse indices, and asymptotic verification"};
  app.fallthrough();
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "key = value configuration file");
  app.add_option("--out", opt.out_dir, "output directory (default: out)");
  app.add_option("--workers", opt.workers, "parallel worker count override");
  app.add_option("--seed", opt.seed, "seed for the selftest random curves");
  app.add_flag("--snapshots", opt.snapshots, "write per-round sweepout CSVs");
  app.add_option("--set", opt.sets, "override one config key (key=value)")
      ->type_size(1);
  app.add_flag("--inject-gradient-fault", opt.inject_gradient_fault)->group("");

  CLI::App* c_geo = app.add_subcommand("geodesic", "flow one curve to a geodesic");
  CLI::App* c_mm =
      app.add_subcommand("minmax", "run the full two-endpoint min-max pipeline");
  CLI::App* c_verify =
      app.add_subcommand("verify", "asymptotic and conservation checks");
  std::string check;
  c_verify->add_option("check", check, "what to verify")
      ->required()
      ->check(CLI::IsMember(
          {"gauss-bonnet", "mass", "blow-down", "no-drift", "distinctness"}));
  CLI::App* c_sweep = app.add_subcommand(
      "sweep-lambda", "min-max width across the r0_list radii");
  CLI::App* c_self = app.add_subcommand("selftest", "module invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    if (rc == 0) return 0;  // --help and friends
    emit_error_json("config", e.what(), 4);
    return 4;
  }

  return guarded([&]() -> int {
    RunConfig cfg = load_config(opt);
    if (c_geo->parsed()) return cmd_geodesic(cfg, opt);
    if (c_mm->parsed()) return cmd_minmax(cfg, opt);
    if (c_verify->parsed()) {
      if (check == "gauss-bonnet") return verify_gauss_bonnet(cfg, opt);
      if (check == "mass") return verify_mass(cfg, opt);
      if (check == "blow-down") return verify_blow_down(cfg, opt);
      if (check == "no-drift") return verify_no_drift(cfg, opt);
      return verify_distinctness(cfg, opt);
    }
    if (c_sweep->parsed()) return cmd_sweep_lambda(cfg, opt);
    if (c_self->parsed()) return cmd_selftest(cfg, opt);
    throw config_error("no subcommand given");
  });
}
