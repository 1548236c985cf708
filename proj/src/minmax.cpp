#include "acgeo/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "acgeo/parallel.hpp"

namespace acgeo {

namespace {

double nearest_lift(double phi, double hint) {
  return phi + 2.0 * kPi * std::round((hint - phi) / (2.0 * kPi));
}

// angle of a chart point, lifted next to `hint`
double node_angle(const ChartPoint& p, double hint) {
  double phi;
  if (p.is_polar())
    phi = p.x2;
  else if (p.x1 == 0.0 && p.x2 == 0.0)
    return hint;
  else
    phi = std::atan2(p.x2, p.x1);
  return nearest_lift(phi, hint);
}

// smallest admissible polar radius for constructed slice nodes
double slice_clamp(const SurfaceMetric& m, double rho_minus) {
  if (m.has_patch()) return 0.0;
  return std::max(2.0 * m.min_radius(), 1e-6 * rho_minus);
}

// canonical chart point at global coordinates (x, y)
ChartPoint from_xy(const SurfaceMetric& m, double x, double y, double phi_hint,
                   double clamp_r) {
  double r = std::hypot(x, y);
  if (m.has_patch() && r < m.patch_radius()) return ChartPoint::patch(x, y);
  if (r < clamp_r) r = clamp_r;
  double phi = (x == 0.0 && y == 0.0) ? phi_hint : std::atan2(y, x);
  return ChartPoint::polar(r, nearest_lift(phi, phi_hint));
}

// polar radius/angle of a node, converting patch points as needed
void polar_of(const SurfaceMetric& m, const ChartPoint& p, double hint,
              double& r, double& phi) {
  if (p.is_polar()) {
    r = p.x1;
    phi = nearest_lift(p.x2, hint);
  } else {
    ChartPoint q = m.to_polar(p, hint);
    r = q.x1;
    phi = nearest_lift(q.x2, hint);
  }
}

// node-wise linear interpolation in polar coordinates (away from the pole)
DiscreteCurve polar_blend(const SurfaceMetric& m, const DiscreteCurve& a,
                          const DiscreteCurve& b, double w, double clamp_r) {
  DiscreteCurve out;
  out.nodes.resize(a.nodes.size());
  out.nodes.front() = w < 1.0 ? a.nodes.front() : b.nodes.front();
  out.nodes.back() = w < 1.0 ? a.nodes.back() : b.nodes.back();
  double ha = node_angle(a.nodes.front(), 0.0);
  double hb = nearest_lift(node_angle(b.nodes.front(), ha), ha);
  double hm = ha;
  for (size_t i = 1; i + 1 < a.nodes.size(); ++i) {
    double ra, pa, rb, pb;
    polar_of(m, a.nodes[i], ha, ra, pa);
    polar_of(m, b.nodes[i], hb, rb, pb);
    ha = pa;
    hb = pb;
    pb = nearest_lift(pb, pa);
    double r = std::max((1.0 - w) * ra + w * rb, clamp_r);
    double phi = (1.0 - w) * pa + w * pb;
    out.nodes[i] = ChartPoint::polar(r, nearest_lift(phi, hm));
    hm = out.nodes[i].x2;
  }
  normalize_curve(m, out);
  return out;
}

// node-wise linear interpolation in global coordinates (pole-safe)
DiscreteCurve cart_blend(const SurfaceMetric& m, const DiscreteCurve& a,
                         const DiscreteCurve& b, double w, double clamp_r) {
  DiscreteCurve out;
  out.nodes.resize(a.nodes.size());
  out.nodes.front() = w < 1.0 ? a.nodes.front() : b.nodes.front();
  out.nodes.back() = w < 1.0 ? a.nodes.back() : b.nodes.back();
  double hint = node_angle(a.nodes.front(), 0.0);
  for (size_t i = 1; i + 1 < a.nodes.size(); ++i) {
    Vec2 ga = global_xy(a.nodes[i]);
    Vec2 gb = global_xy(b.nodes[i]);
    double x = (1.0 - w) * ga.x1 + w * gb.x1;
    double y = (1.0 - w) * ga.x2 + w * gb.x2;
    out.nodes[i] = from_xy(m, x, y, hint, clamp_r);
    hint = node_angle(out.nodes[i], hint);
  }
  normalize_curve(m, out);
  return out;
}

// one [1, 2, 1]/4 pass on interior nodes in global coordinates
DiscreteCurve smooth_121(const SurfaceMetric& m, const DiscreteCurve& c,
                         double clamp_r) {
  if (c.segments() < 4) return c;
  DiscreteCurve out = c;
  std::vector<Vec2> g(c.nodes.size());
  for (size_t i = 0; i < c.nodes.size(); ++i) g[i] = global_xy(c.nodes[i]);
  double hint = node_angle(c.nodes.front(), 0.0);
  for (size_t i = 1; i + 1 < c.nodes.size(); ++i) {
    double x = 0.25 * (g[i - 1].x1 + 2.0 * g[i].x1 + g[i + 1].x1);
    double y = 0.25 * (g[i - 1].x2 + 2.0 * g[i].x2 + g[i + 1].x2);
    out.nodes[i] = from_xy(m, x, y, hint, clamp_r);
    hint = node_angle(out.nodes[i], hint);
  }
  normalize_curve(m, out);
  return out;
}

void append_node(std::vector<ChartPoint>& out, const ChartPoint& p, bool first) {
  if (!first || out.empty()) out.push_back(p);
}

void append_radial(std::vector<ChartPoint>& out, double r_from, double r_to,
                   double phi, int nseg) {
  for (int i = 0; i <= nseg; ++i) {
    double t = (double)i / nseg;
    append_node(out, ChartPoint::polar(r_from + t * (r_to - r_from), phi), i == 0);
  }
}

void append_nodes(std::vector<ChartPoint>& out, const std::vector<ChartPoint>& more) {
  for (size_t i = 0; i < more.size(); ++i) append_node(out, more[i], i == 0);
}

// context shared by the five stage constructors
struct SweepCtx {
  const SurfaceMetric& m;
  double alpha, sa;
  double rp, rm;  // rho_plus, rho_minus
  double phi0;
  int N;
  double clamp_r;
  const DiscreteCurve& g1;
  const DiscreteCurve& g2;
  DiscreteCurve chord_up;  // full-scale model chords, N segments
  DiscreteCurve chord_lo;
};

DiscreteCurve finish_slice(const SweepCtx& cx, std::vector<ChartPoint> nodes) {
  DiscreteCurve c = curve_from_nodes(std::move(nodes));
  normalize_curve(cx.m, c);
  c = resample(cx.m, c, cx.N);
  c = smooth_121(cx.m, c, cx.clamp_r);
  c = reparametrize_constant_speed(cx.m, c);
  // pin the shared endpoints bit-for-bit (constructions agree to 1 ulp)
  c.nodes.front() = cx.g1.nodes.front();
  ChartPoint qb = cx.g1.nodes.back();
  if (qb.is_polar() && c.nodes.back().is_polar())
    qb.x2 = nearest_lift(qb.x2, c.nodes.back().x2);
  c.nodes.back() = qb;
  return c;
}

// legs + chord assembled at neck radius ru on the given side
DiscreteCurve leg_chord_slice(const SweepCtx& cx, double ru, bool upper) {
  std::vector<ChartPoint> nodes;
  double len_leg = cx.rp - ru;
  int n_leg = std::max(2, (int)std::lround((double)cx.N * len_leg / (2.0 * cx.rp)));
  bool with_legs = len_leg > 1e-12 * cx.rp;
  if (with_legs) append_radial(nodes, cx.rp, ru, cx.phi0, n_leg);
  append_nodes(nodes, cone_model_nodes(upper ? ConeModel::SmoothUpper
                                             : ConeModel::SmoothLower,
                                       ru, cx.phi0, cx.alpha, cx.N));
  if (with_legs)
    append_radial(nodes, ru, cx.rp, cx.phi0 + (upper ? kPi : -kPi), n_leg);
  return finish_slice(cx, std::move(nodes));
}

// legs + transverse squash of the inner chord across the pole/vertex
DiscreteCurve squash_slice(const SweepCtx& cx, double sigma) {
  auto up = curve_from_nodes(
      cone_model_nodes(ConeModel::SmoothUpper, cx.rm, cx.phi0, cx.alpha, cx.N));
  auto lo = curve_from_nodes(
      cone_model_nodes(ConeModel::SmoothLower, cx.rm, cx.phi0, cx.alpha, cx.N));
  DiscreteCurve inner = cart_blend(cx.m, up, lo, sigma, cx.clamp_r);
  std::vector<ChartPoint> nodes;
  int n_leg =
      std::max(2, (int)std::lround((double)cx.N * (cx.rp - cx.rm) / (2.0 * cx.rp)));
  append_radial(nodes, cx.rp, cx.rm, cx.phi0, n_leg);
  append_nodes(nodes, inner.nodes);
  append_radial(nodes, cx.rm, cx.rp, cx.phi0 + (sigma < 0.5 ? kPi : -kPi), n_leg);
  return finish_slice(cx, std::move(nodes));
}

DiscreteCurve slice_at(const SweepCtx& cx, double s) {
  if (s <= 0.0) return cx.g1;
  if (s >= 1.0) return cx.g2;
  if (s < 0.125) {
    // (i) minimizer -> full-scale upper chord
    return finish_slice(cx, polar_blend(cx.m, cx.g1, cx.chord_up, 8.0 * s,
                                        cx.clamp_r)
                                .nodes);
  }
  if (s < 0.25) {
    // (ii) pull the upper chord down to the neck scale
    double u = 8.0 * (s - 0.125);
    return leg_chord_slice(cx, (1.0 - u) * cx.rp + u * cx.rm, true);
  }
  if (s < 0.75) {
    // (iii) swap the inner chord across the pole/vertex
    return squash_slice(cx, 2.0 * (s - 0.25));
  }
  if (s < 0.875) {
    // (iv) push the lower chord back out to full scale
    double u = 8.0 * (0.875 - s);
    return leg_chord_slice(cx, (1.0 - u) * cx.rp + u * cx.rm, false);
  }
  // (v) full-scale lower chord -> minimizer
  return finish_slice(
      cx, polar_blend(cx.m, cx.chord_lo, cx.g2, 8.0 * (s - 0.875), cx.clamp_r)
              .nodes);
}

double max_gap(const Sweepout& H) {
  double g = 0.0;
  for (int j = 0; j + 1 < H.count(); ++j)
    g = std::max(g, slice_distance(H.slices[j], H.slices[j + 1]));
  return g;
}

struct ArgMax {
  double lambda = -std::numeric_limits<double>::infinity();
  int index = 0;
};

ArgMax widest_slice(const SurfaceMetric& m, const Sweepout& H) {
  ArgMax a;
  for (int j = 0; j < H.count(); ++j) {
    double E = energy(m, H.slices[j]);
    if (E > a.lambda) {
      a.lambda = E;
      a.index = j;
    }
  }
  return a;
}

FlowConfig slice_flow_config(const SurfaceMetric& m, const MinMaxConfig& cfg,
                             double rho_minus, double clamp_r) {
  FlowConfig sf = cfg.flow;
  sf.max_iters = cfg.flow_iters_per_round;
  sf.record_trace = false;
  sf.embed_check_stride = 0;
  if (!m.has_patch())
    sf.r_floor = std::max(cfg.r_floor_factor * rho_minus, clamp_r);
  return sf;
}

void flow_slices(const SurfaceMetric& m, Sweepout& H, const FlowConfig& sf,
                 const std::vector<int>& which, int workers) {
  parallel_for((int)which.size(), workers, [&](int k) {
    int j = which[k];
    H.slices[j] = gradient_flow(m, H.slices[j], sf).curve;
  });
}

void flow_interior(const SurfaceMetric& m, Sweepout& H, const FlowConfig& sf,
                   int workers) {
  std::vector<int> idx;
  for (int j = 1; j + 1 < H.count(); ++j) idx.push_back(j);
  flow_slices(m, H, sf, idx, workers);
}

// insert flowed midpoint slices until consecutive gaps fit the budget
// Inserted slices are pure midpoint blends and are NOT flowed here.  The
// blend halves the gap exactly in the slice metric, so the repair always
// terminates, and across the crossing of the two sweep basins the midpoint
// of near-mirror-image slices is itself the near-crossing curve, which is
// exactly the high slice the width estimate must retain.  Flowing a fresh
// blend -- even a little -- slides it down one side of the energy ridge and
// tunnels the family under the obstruction.  Fresh slices join the common
// flow on the next round instead.
void repair_continuity(const SurfaceMetric& m, Sweepout& H,
                       double budget, int cap, double clamp_r) {
  for (int pass = 0; pass < 64; ++pass) {
    std::vector<int> bad;
    for (int j = 0; j + 1 < H.count(); ++j)
      if (slice_distance(H.slices[j], H.slices[j + 1]) > budget) bad.push_back(j);
#ifdef ACGEO_REPAIR_TRACE
    std::fprintf(stderr, "[repair] pass=%d count=%d bad=%zu budget=%.4f", pass,
                 H.count(), bad.size(), budget);
    for (int j : bad)
      std::fprintf(stderr, " (%d:%.3f,E=%.3f/%.3f)", j,
                   slice_distance(H.slices[j], H.slices[j + 1]),
                   energy(m, H.slices[j]), energy(m, H.slices[j + 1]));
    std::fprintf(stderr, "\n");
#endif
    if (bad.empty()) return;
    if (H.count() + (int)bad.size() > cap)
      throw convergence_error(
          "sweepout continuity repair exceeded the slice budget");
    // insert from the back so earlier indices stay valid
    for (auto it = bad.rbegin(); it != bad.rend(); ++it) {
      int j = *it;
      // the raw node average halves the gap exactly; any mollification here
      // would break that guarantee and with it the termination proof
      DiscreteCurve mid =
          cart_blend(m, H.slices[j], H.slices[j + 1], 0.5, clamp_r);
      H.slices.insert(H.slices.begin() + j + 1, std::move(mid));
      H.s.insert(H.s.begin() + j + 1, 0.5 * (H.s[j] + H.s[j + 1]));
    }
  }
  throw convergence_error("sweepout continuity budget unreachable");
}

// Drop interior slices whose removal still leaves the neighbour gap well
// under budget.  Flowed slices pile up on top of each other inside the two
// sweep basins; without pruning the family grows by a few slices every
// round and eventually hits the slice cap.  Removing a slice can only lower
// the width estimate of the remaining family, and the threshold (half the
// insertion budget) leaves hysteresis so repair and prune never oscillate.
void prune_redundant(Sweepout& H, double threshold) {
  int j = 1;
  while (j + 1 < H.count()) {
    if (slice_distance(H.slices[j - 1], H.slices[j + 1]) <= threshold) {
      H.slices.erase(H.slices.begin() + j);
      H.s.erase(H.s.begin() + j);
      if (j > 1) --j;  // the junction behind us changed; re-examine it
    } else {
      ++j;
    }
  }
}

}  // namespace

MinimizerPair two_minimizers(const SurfaceMetric& m, double r0, double phi0,
                             int N, const FlowConfig& fc, bool with_indices) {
  if (!(r0 > 0.0)) throw config_error("two_minimizers needs r0 > 0");
  if (N < 8) throw config_error("two_minimizers needs N >= 8");
  MinimizerPair P;
  P.upper = find_geodesic(m, coordinate_arc(r0, phi0, phi0 + kPi, N), fc);
  P.lower = find_geodesic(m, coordinate_arc(r0, phi0, phi0 - kPi, N), fc);
  if (!P.upper.converged || !P.lower.converged)
    throw convergence_error("minimizing arc flow did not converge");
  P.separation = support_distance(P.upper.curve, P.lower.curve, m.alpha());
  if (P.separation < 1e-3 * r0)
    throw coincidence_error(
        "the two minimizing arcs share support: the metric has no width to "
        "sweep between them");
  P.embedded_upper = is_embedded(m, P.upper.curve).embedded;
  P.embedded_lower = is_embedded(m, P.lower.curve).embedded;
  if (!P.embedded_upper || !P.embedded_lower)
    throw convergence_error("a minimizing arc lost embeddedness");
  P.disjoint = curves_disjoint(m, P.upper.curve, P.lower.curve);
  if (!P.disjoint)
    throw convergence_error("minimizing arcs intersect away from the endpoints");
  if (with_indices) {
    P.index_upper = morse_index(m, P.upper.curve);
    P.index_lower = morse_index(m, P.lower.curve);
  }
  return P;
}

WedgePoint sweepout_chord_point(double rho, double alpha, double t, bool upper) {
  double sa = std::sin(alpha);
  if (!(sa > 0.0) || sa >= 1.0 - 1e-9)
    throw regime_error("model chord parametrization needs an angle deficit");
  double den = std::sin(0.5 * kPi * (1.0 + (1.0 - 2.0 * t) * sa));
  if (!(den > 0.0))
    throw regime_error("model chord parametrization needs sin(alpha) < 1");
  double r = rho * std::sin(0.5 * kPi * (1.0 - sa)) / den;
  double theta = (upper ? 1.0 + t : 1.0 - t) * kPi * sa;
  return {r, theta};
}

Sweepout explicit_sweepout(const SurfaceMetric& m, const DiscreteCurve& g_upper,
                           const DiscreteCurve& g_lower, double rho_minus,
                           int M) {
  if (!g_upper.valid() || !g_lower.valid() ||
      g_upper.segments() != g_lower.segments())
    throw config_error("sweepout needs two minimizers with equal node counts");
  int N = g_upper.segments();
  if (N < 16) throw config_error("sweepout slices need at least 16 segments");
  if (M < 8) throw config_error("sweepout needs at least 8 slices");
  if (m.sin_alpha() > 1.0 - 1e-9)
    throw regime_error("sweepout needs an angle deficit (sin alpha < 1)");

  Vec2 pf = global_xy(g_upper.nodes.front());
  Vec2 pb = global_xy(g_upper.nodes.back());
  Vec2 qf = global_xy(g_lower.nodes.front());
  Vec2 qb = global_xy(g_lower.nodes.back());
  double rp = std::hypot(pf.x1, pf.x2);
  auto near = [&](Vec2 u, Vec2 v) {
    return std::hypot(u.x1 - v.x1, u.x2 - v.x2) <= 1e-6 * rp;
  };
  if (!near(pf, qf) || !near(pb, qb))
    throw config_error("sweepout minimizers must share both endpoints");
  if (!near(pb, {-pf.x1, -pf.x2}))
    throw config_error("sweepout endpoints must be antipodal (q = -p)");
  if (!(rho_minus > 0.0) || !(rp > 2.0 * rho_minus))
    throw regime_error("sweepout needs rho_plus > 2 rho_minus > 0");

  double phi0 = std::atan2(pf.x2, pf.x1);
  SweepCtx cx{m,    m.alpha(), std::sin(m.alpha()), rp, rho_minus, phi0,
              N,    slice_clamp(m, rho_minus),      g_upper, g_lower,
              {},   {}};
  cx.chord_up = curve_from_nodes(
      cone_model_nodes(ConeModel::SmoothUpper, rp, phi0, cx.alpha, N));
  cx.chord_lo = curve_from_nodes(
      cone_model_nodes(ConeModel::SmoothLower, rp, phi0, cx.alpha, N));

  Sweepout H;
  H.rho_plus = rp;
  H.rho_minus = rho_minus;
  H.phi0 = phi0;
  H.s.resize(M + 1);
  H.slices.resize(M + 1);
  for (int j = 0; j <= M; ++j) {
    H.s[j] = (double)j / M;
    H.slices[j] = slice_at(cx, H.s[j]);
  }
  return H;
}

double slice_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  if (a.nodes.size() != b.nodes.size())
    throw config_error("slice distance needs equal node counts");
  int N = a.segments();
  std::vector<double> dx(N + 1), dy(N + 1);
  for (int i = 0; i <= N; ++i) {
    Vec2 ga = global_xy(a.nodes[i]);
    Vec2 gb = global_xy(b.nodes[i]);
    dx[i] = ga.x1 - gb.x1;
    dy[i] = ga.x2 - gb.x2;
  }
  double mass = 0.0, stiff = 0.0;
  for (int i = 0; i < N; ++i) {
    double m0 = dx[i] * dx[i] + dy[i] * dy[i];
    double m1 = dx[i + 1] * dx[i + 1] + dy[i + 1] * dy[i + 1];
    mass += 0.5 * (m0 + m1) / N;
    double ex = dx[i + 1] - dx[i], ey = dy[i + 1] - dy[i];
    stiff += N * (ex * ex + ey * ey);
  }
  return std::sqrt(mass + stiff);
}

std::vector<LambdaTracePoint> minimize_sweepout(const SurfaceMetric& m,
                                                Sweepout& H,
                                                const MinMaxConfig& cfg) {
  if (H.count() < 3) throw config_error("sweepout needs at least 3 slices");
  double rm = H.rho_minus > 0.0 ? H.rho_minus : 0.25 * H.rho_plus;
  double clamp_r = slice_clamp(m, rm);
  FlowConfig sf = slice_flow_config(m, cfg, rm, clamp_r);
  int cap = cfg.max_slices > 0 ? cfg.max_slices : 4 * H.count() + 1;
  double budget = cfg.continuity_factor * max_gap(H);
  if (!(budget > 0.0)) throw config_error("degenerate sweepout (zero gaps)");

  std::vector<LambdaTracePoint> trace;
  for (int round = 0; round < cfg.rounds; ++round) {
    flow_interior(m, H, sf, cfg.workers);
    // quotient out tangential node drift before measuring gaps: slices on a
    // shared support should compare as equal, and resampling the polyline at
    // constant speed never raises its energy
    for (int j = 1; j + 1 < H.count(); ++j)
      H.slices[j] = reparametrize_constant_speed(m, H.slices[j]);
    repair_continuity(m, H, budget, cap, clamp_r);
    prune_redundant(H, 0.5 * budget);
    ArgMax a = widest_slice(m, H);
    trace.push_back({round, a.lambda, a.index, H.count()});
    if (cfg.on_round) cfg.on_round(round, H);
  }
  return trace;
}

namespace {

// unit normal field scaled by the scalar mode, as a nodal variation
Variation lift_normal_mode(const SurfaceMetric& m, const DiscreteCurve& c,
                           const std::vector<double>& mode) {
  int N = c.segments();
  Variation v(N + 1, Vec2{0.0, 0.0});
  if ((int)mode.size() != N - 1) return v;
  for (int j = 1; j < N; ++j) {
    Vec2 gm = global_xy(c.nodes[j - 1]);
    Vec2 gp = global_xy(c.nodes[j + 1]);
    double tx = gp.x1 - gm.x1, ty = gp.x2 - gm.x2;
    const ChartPoint& p = c.nodes[j];
    Vec2 T;
    if (p.is_patch()) {
      T = {tx, ty};
    } else {
      double cph = std::cos(p.x2), sph = std::sin(p.x2);
      T = {cph * tx + sph * ty, (-sph * tx + cph * ty) / p.x1};
    }
    Metric2 g = m.metric_at(p);
    double sq = std::sqrt(std::max(g.det(), 0.0));
    if (!(sq > 0.0)) continue;
    Vec2 n = {(-g.g12 * T.x1 - g.g22 * T.x2) / sq,
              (g.g11 * T.x1 + g.g12 * T.x2) / sq};
    double nn = g.norm(n);
    if (nn > 0.0) v[j] = n * (mode[j - 1] / nn);
  }
  return v;
}

DiscreteCurve polish_step(const SurfaceMetric& m, const DiscreteCurve& c,
                          const Variation& w, double h, double r_floor) {
  DiscreteCurve t = c;
  for (size_t i = 1; i + 1 < t.nodes.size(); ++i) {
    t.nodes[i].x1 -= h * w[i].x1;
    t.nodes[i].x2 -= h * w[i].x2;
    if (t.nodes[i].is_polar() && t.nodes[i].x1 < r_floor)
      t.nodes[i].x1 = r_floor;
  }
  normalize_curve(m, t);
  return t;
}

struct PolishOutcome {
  DiscreteCurve curve;
  double grad_norm = 0.0;
  bool converged = false;
  int iters = 0;
  FlowStop stop = FlowStop::MaxIters;
};

// descent projected off the unstable direction, keeping the best iterate
PolishOutcome polish_saddle(const SurfaceMetric& m, const DiscreteCurve& start,
                            double floor_energy, double r_floor,
                            const MinMaxConfig& cfg) {
  const double eps = std::numeric_limits<double>::epsilon();
  DiscreteCurve cur = reparametrize_constant_speed(m, start);
  double E = energy(m, cur);
  double tol = 1e-8 * E / std::max(length(m, cur), eps);
  if (cfg.flow.grad_tol > 0.0) tol = cfg.flow.grad_tol;

  PolishOutcome out;
  out.curve = cur;
  double best_gn = std::numeric_limits<double>::infinity();
  Variation vu;
  bool have_mode = false;
  double h = cfg.flow.step0;

  for (int it = 0; it < cfg.polish_iters; ++it) {
    out.iters = it + 1;
    if (it % std::max(1, cfg.mode_refresh) == 0) {
      cur = reparametrize_constant_speed(m, cur);
      E = energy(m, cur);
      SpectrumReport sv = second_variation(m, cur);
      have_mode = !sv.eigenvalues.empty() && sv.eigenvalues[0] < 0.0;
      vu = have_mode ? lift_normal_mode(m, cur, sv.lowest_mode) : Variation{};
    }
    Variation grad = energy_gradient(m, cur);
    Variation w = h1_precondition(m, cur, grad);
    double gn = std::sqrt(std::max(0.0, pair_covector(grad, w)));
    if (gn < best_gn && (E >= floor_energy || !std::isfinite(best_gn))) {
      best_gn = gn;
      out.curve = cur;
    }
    if (gn <= tol) {
      out.stop = FlowStop::Converged;
      break;
    }
    if (have_mode && !vu.empty()) {
      double vv = h1_inner(m, cur, vu, vu);
      if (vv > 0.0) {
        double cproj = h1_inner(m, cur, w, vu) / vv;
        for (size_t i = 0; i < w.size(); ++i)
          w[i] = w[i] - vu[i] * cproj;
      }
    }
    double pd2 = pair_covector(grad, w);
    if (!(pd2 > 0.0)) break;  // nothing left to descend in the complement

    bool moved = false;
    while (h >= cfg.flow.min_step) {
      DiscreteCurve trial = polish_step(m, cur, w, h, r_floor);
      double Et;
      try {
        Et = energy(m, trial);
      } catch (const std::runtime_error&) {
        h *= 0.5;
        continue;
      }
      double pred = h * pd2;
      double noise = 64.0 * eps * (std::abs(E) + 1.0);
      bool ok;
      if (pred <= noise)
        ok = Et <= E + noise;
      else {
        double ratio = (E - Et) / pred;
        ok = ratio >= cfg.flow.band_lo && ratio <= cfg.flow.band_hi;
      }
      if (ok) {
        cur = std::move(trial);
        E = Et;
        moved = true;
        break;
      }
      h *= 0.5;
    }
    if (!moved) {
      out.stop = FlowStop::StepUnderflow;
      break;
    }
    h = std::min(h * cfg.flow.step_growth, 1e6);
    if (E < floor_energy) break;  // slid off the ridge; keep the best iterate
  }
  out.grad_norm = best_gn;
  out.converged = best_gn <= tol;
  if (out.converged) out.stop = FlowStop::Converged;
  return out;
}

}  // namespace

MinMaxResult extract_minmax(const SurfaceMetric& m, Sweepout& H,
                            const MinimizerPair& pair, const MinMaxConfig& cfg) {
  if (H.count() < 3) throw config_error("sweepout needs at least 3 slices");
  double rp = H.rho_plus;
  double rm = H.rho_minus > 0.0 ? H.rho_minus : 0.25 * rp;
  double clamp_r = slice_clamp(m, rm);
  FlowConfig sf = slice_flow_config(m, cfg, rm, clamp_r);

  ArgMax a = widest_slice(m, H);
  // local re-discretization: 3x slice density around the widest slice
  for (int rr = 0; rr < cfg.refine_rounds; ++rr) {
    int j = a.index;
    bool right = j + 1 < H.count();
    bool left = j > 0;
    auto wedge_in = [&](int at, const DiscreteCurve& A, const DiscreteCurve& B,
                        double sA, double sB) {
      DiscreteCurve c13 = cart_blend(m, A, B, 1.0 / 3.0, clamp_r);
      DiscreteCurve c23 = cart_blend(m, A, B, 2.0 / 3.0, clamp_r);
      H.slices.insert(H.slices.begin() + at, {c13, c23});
      H.s.insert(H.s.begin() + at,
                 {sA + (sB - sA) / 3.0, sA + 2.0 * (sB - sA) / 3.0});
    };
    if (right) wedge_in(j + 1, H.slices[j], H.slices[j + 1], H.s[j], H.s[j + 1]);
    if (left) wedge_in(j, H.slices[j - 1], H.slices[j], H.s[j - 1], H.s[j]);
    std::vector<int> fresh;
    if (left) fresh.insert(fresh.end(), {j, j + 1});
    if (right) {
      int base = left ? j + 3 : j + 1;
      fresh.insert(fresh.end(), {base, base + 1});
    }
    flow_slices(m, H, sf, fresh, cfg.workers);
    a = widest_slice(m, H);
  }

  MinMaxResult res;
  res.lambda = a.lambda;
  res.argmax = a.index;
  res.e1 = pair.upper.energy;
  res.e2 = pair.lower.energy;
  double emax = std::max(res.e1, res.e2);
  res.gap_margin = res.lambda - emax;
  res.gap_rel = res.gap_margin / (rp * rp);
  res.gap = res.gap_margin > 0.0;
  res.ratio = res.lambda / (rp * rp);

  // Keep the polish inside a narrow band under the width estimate: near a
  // cone point the landscape falls away linearly from the ridge, and a looser
  // floor would let the descent unwrap the vertex before the gradient norm
  // bottoms out.
  double floor_energy = std::max(emax + 0.3 * std::max(0.0, res.gap_margin),
                                 (1.0 - cfg.polish_drop) * res.lambda);
  PolishOutcome po =
      polish_saddle(m, H.slices[a.index], floor_energy, sf.r_floor, cfg);

  res.gamma3.curve = po.curve;
  res.gamma3.energy = energy(m, po.curve);
  res.gamma3.length = length(m, po.curve);
  res.gamma3.grad_norm = po.grad_norm;
  res.gamma3.converged = po.converged;
  res.gamma3.iters = po.iters;
  res.gamma3.stop = po.stop;
  res.index_gamma3 = second_variation(m, po.curve).negative_count;
  res.gamma3_embedded = is_embedded(m, po.curve).embedded;
  res.sep_upper = support_distance(po.curve, pair.upper.curve, m.alpha());
  res.sep_lower = support_distance(po.curve, pair.lower.curve, m.alpha());
  double ctol = cfg.collapse_tol_factor * rp;
  if (res.sep_upper < ctol || res.sep_lower < ctol)
    throw collapse_error("min-max slice collapsed onto a minimizing arc");
  return res;
}

PipelineResult run_minmax_pipeline(const SurfaceMetric& m,
                                   const MinMaxConfig& cfg) {
  if (!(cfg.r0 > 0.0)) throw config_error("pipeline needs r0 > 0");
  if (cfg.N < 16 || cfg.M < 8)
    throw config_error("pipeline needs N >= 16 and M >= 8");
  FlowConfig mf = cfg.flow;
  mf.max_iters = std::max(cfg.flow.max_iters, 5000);
  PipelineResult R;
  R.minimizers = two_minimizers(m, cfg.r0, cfg.phi0, cfg.N, mf, true);
  double rm = cfg.rho_minus > 0.0 ? cfg.rho_minus : cfg.rho_minus_factor * cfg.r0;
  R.sweepout = explicit_sweepout(m, R.minimizers.upper.curve,
                                 R.minimizers.lower.curve, rm, cfg.M);
  auto trace = minimize_sweepout(m, R.sweepout, cfg);
  R.minmax = extract_minmax(m, R.sweepout, R.minimizers, cfg);
  R.minmax.trace = std::move(trace);
  return R;
}

}  // namespace acgeo
