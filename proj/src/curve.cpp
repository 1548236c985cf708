#include "acgeo/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acgeo {

namespace {

double nearest_lift(double phi, double target) {
  return phi + 2.0 * kPi * std::round((target - phi) / (2.0 * kPi));
}

}  // namespace

Vec2 global_xy(const ChartPoint& p) {
  if (p.is_patch()) return {p.x1, p.x2};
  return {p.x1 * std::cos(p.x2), p.x1 * std::sin(p.x2)};
}

SegmentGeom segment_geometry(const SurfaceMetric& m, const ChartPoint& left,
                             const ChartPoint& right) {
  SegmentGeom s;
  bool patch_frame = m.has_patch() && (left.radius() < m.patch_radius() ||
                                       right.radius() < m.patch_radius());
  if (patch_frame) {
    ChartPoint a = left.is_patch() ? left : m.to_patch(left);
    ChartPoint b = right.is_patch() ? right : m.to_patch(right);
    s.chart = Chart::Patch;
    s.a = {a.x1, a.x2};
    s.b = {b.x1, b.x2};
    return s;
  }
  ChartPoint a = left;
  if (a.is_patch()) a = m.to_polar(a, right.is_polar() ? right.x2 : 0.0);
  ChartPoint b = right;
  if (b.is_patch()) b = m.to_polar(b, a.x2);
  s.chart = Chart::Polar;
  s.a = {a.x1, a.x2};
  s.b = {b.x1, nearest_lift(b.x2, a.x2)};
  return s;
}

Jac2 node_to_frame_jacobian(const SurfaceMetric& m, const ChartPoint& node,
                            Chart frame) {
  if (node.chart == frame) return Jac2::identity();
  return m.transition_jacobian(node, frame);
}

double energy(const SurfaceMetric& m, const DiscreteCurve& c) {
  if (!c.valid()) throw config_error("curve needs at least two nodes");
  int N = c.segments();
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    SegmentGeom s = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    acc += m.metric_at(s.mid()).norm2(s.delta());
  }
  return N * acc;
}

double length(const SurfaceMetric& m, const DiscreteCurve& c) {
  if (!c.valid()) throw config_error("curve needs at least two nodes");
  int N = c.segments();
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    SegmentGeom s = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    acc += m.metric_at(s.mid()).norm(s.delta());
  }
  return acc;
}

DiscreteCurve resample(const SurfaceMetric& m, const DiscreteCurve& c, int n2) {
  if (!c.valid()) throw config_error("curve needs at least two nodes");
  if (n2 < 2) throw config_error("resample needs at least two segments");
  int N = c.segments();
  std::vector<SegmentGeom> segs(N);
  std::vector<double> cum(N + 1, 0.0);
  for (int i = 0; i < N; ++i) {
    segs[i] = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    cum[i + 1] = cum[i] + m.metric_at(segs[i].mid()).norm(segs[i].delta());
  }
  double L = cum[N];
  if (!(L > 0.0)) throw collapse_error("cannot resample a totally degenerate curve");

  DiscreteCurve out;
  out.nodes.resize(n2 + 1);
  out.nodes.front() = c.nodes.front();
  out.nodes.back() = c.nodes.back();
  int seg = 0;
  double hint = c.nodes.front().is_polar() ? c.nodes.front().x2 : 0.0;
  for (int k = 1; k < n2; ++k) {
    double target = L * (double)k / (double)n2;
    while (seg < N - 1 && cum[seg + 1] < target) ++seg;
    double len_i = cum[seg + 1] - cum[seg];
    double u = len_i > 0.0 ? (target - cum[seg]) / len_i : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const SegmentGeom& s = segs[seg];
    ChartPoint p{s.chart, s.a.x1 + u * (s.b.x1 - s.a.x1),
                 s.a.x2 + u * (s.b.x2 - s.a.x2)};
    ChartPoint q = m.has_patch() ? m.canonical(p, hint) : p;
    if (q.is_polar()) {
      q.x2 = nearest_lift(q.x2, hint);
      hint = q.x2;
    }
    out.nodes[k] = q;
  }
  normalize_curve(m, out);
  return out;
}

DiscreteCurve reparametrize_constant_speed(const SurfaceMetric& m,
                                           const DiscreteCurve& c) {
  // One resample equalizes segment lengths only against the *old* midpoint
  // metric samples, so iterate to the fixed point, where every segment has
  // the same measured length and hence E = L^2 exactly.  Already-uniform
  // curves break out immediately; jagged ones can take a long meandering
  // transient (the node support slides while lengths equalize), hence the
  // generous pass cap.
  DiscreteCurve r = resample(m, c, c.segments());
  for (int pass = 0; pass < 200; ++pass) {
    double E = energy(m, r), L = length(m, r);
    if (std::fabs(E - L * L) <= 1e-13 * std::max(1.0, E)) break;
    r = resample(m, r, r.segments());
  }
  return r;
}

double h1_inner(const SurfaceMetric& m, const DiscreteCurve& c, const Variation& v1,
                const Variation& v2) {
  if (v1.size() != c.nodes.size() || v2.size() != c.nodes.size())
    throw config_error("variation size must match curve nodes");
  int N = c.segments();
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    SegmentGeom s = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    Metric2 g = m.metric_at(s.mid());
    Jac2 JL = node_to_frame_jacobian(m, c.nodes[i], s.chart);
    Jac2 JR = node_to_frame_jacobian(m, c.nodes[i + 1], s.chart);
    Vec2 a1 = JL.apply(v1[i]), b1 = JR.apply(v1[i + 1]);
    Vec2 a2 = JL.apply(v2[i]), b2 = JR.apply(v2[i + 1]);
    // exact integrals of the P1 interpolants with g frozen at the midpoint
    double mass = (g.dot(a1, a2) + g.dot(b1, b2)) / 3.0 +
                  (g.dot(a1, b2) + g.dot(b1, a2)) / 6.0;
    double stiff = g.dot(b1 - a1, b2 - a2);
    acc += mass / N + stiff * N;
  }
  return acc;
}

namespace {

double seg_seg_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  // minimum Euclidean distance between 2d segments [p1,p2] and [q1,q2]
  auto sub = [](Vec2 a, Vec2 b) { return Vec2{a.x1 - b.x1, a.x2 - b.x2}; };
  auto cross = [](Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; };
  auto dot = [](Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; };
  Vec2 d1 = sub(p2, p1), d2 = sub(q2, q1), r = sub(q1, p1);
  double c1 = cross(d1, sub(q1, p1)), c2 = cross(d1, sub(q2, p1));
  double c3 = cross(d2, sub(p1, q1)), c4 = cross(d2, sub(p2, q1));
  if (((c1 > 0) != (c2 > 0)) && ((c3 > 0) != (c4 > 0)) && c1 != c2 && c3 != c4)
    return 0.0;  // proper crossing
  auto point_seg = [&](Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = sub(b, a), ap = sub(p, a);
    double t = dot(ab, ab) > 0 ? std::clamp(dot(ap, ab) / dot(ab, ab), 0.0, 1.0) : 0.0;
    Vec2 c{a.x1 + t * ab.x1, a.x2 + t * ab.x2};
    return std::hypot(p.x1 - c.x1, p.x2 - c.x2);
  };
  (void)r;
  return std::min(std::min(point_seg(p1, q1, q2), point_seg(p2, q1, q2)),
                  std::min(point_seg(q1, p1, p2), point_seg(q2, p1, p2)));
}

}  // namespace

EmbedReport is_embedded(const SurfaceMetric& m, const DiscreteCurve& c, double tol) {
  int N = c.segments();
  if (tol <= 0.0) tol = 1e-6 * length(m, c) / N;
  std::vector<Vec2> xy(N + 1);
  for (int i = 0; i <= N; ++i) xy[i] = global_xy(c.nodes[i]);
  EmbedReport rep;
  rep.min_separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    double ilo1 = std::min(xy[i].x1, xy[i + 1].x1), ihi1 = std::max(xy[i].x1, xy[i + 1].x1);
    double ilo2 = std::min(xy[i].x2, xy[i + 1].x2), ihi2 = std::max(xy[i].x2, xy[i + 1].x2);
    for (int j = i + 2; j < N; ++j) {
      // bounding box prefilter
      if (std::min(xy[j].x1, xy[j + 1].x1) > ihi1 + rep.min_separation ||
          std::max(xy[j].x1, xy[j + 1].x1) < ilo1 - rep.min_separation ||
          std::min(xy[j].x2, xy[j + 1].x2) > ihi2 + rep.min_separation ||
          std::max(xy[j].x2, xy[j + 1].x2) < ilo2 - rep.min_separation)
        continue;
      double d = seg_seg_distance(xy[i], xy[i + 1], xy[j], xy[j + 1]);
      if (d < rep.min_separation) {
        rep.min_separation = d;
        if (d < tol) {
          rep.embedded = false;
          rep.seg_i = i;
          rep.seg_j = j;
          return rep;
        }
      }
    }
  }
  return rep;
}

bool curves_disjoint(const SurfaceMetric& m, const DiscreteCurve& a,
                     const DiscreteCurve& b, double tol) {
  int Na = a.segments(), Nb = b.segments();
  if (tol <= 0.0) tol = 1e-6 * (length(m, a) / Na + length(m, b) / Nb) / 2.0;
  std::vector<Vec2> xa(Na + 1), xb(Nb + 1);
  for (int i = 0; i <= Na; ++i) xa[i] = global_xy(a.nodes[i]);
  for (int j = 0; j <= Nb; ++j) xb[j] = global_xy(b.nodes[j]);
  auto close = [&](Vec2 p, Vec2 q) {
    return std::hypot(p.x1 - q.x1, p.x2 - q.x2) < 1e-9 * (1.0 + std::abs(p.x1) + std::abs(p.x2));
  };
  bool share_ff = close(xa[0], xb[0]), share_fb = close(xa[0], xb[Nb]);
  bool share_bf = close(xa[Na], xb[0]), share_bb = close(xa[Na], xb[Nb]);
  for (int i = 0; i < Na; ++i)
    for (int j = 0; j < Nb; ++j) {
      if (share_ff && i == 0 && j == 0) continue;
      if (share_fb && i == 0 && j == Nb - 1) continue;
      if (share_bf && i == Na - 1 && j == 0) continue;
      if (share_bb && i == Na - 1 && j == Nb - 1) continue;
      if (seg_seg_distance(xa[i], xa[i + 1], xb[j], xb[j + 1]) < tol) return false;
    }
  return true;
}

namespace {

std::vector<WedgePoint> wedge_nodes(const DiscreteCurve& c, double alpha,
                                    double r_lo, double r_hi) {
  double sa = std::sin(alpha);
  std::vector<WedgePoint> out;
  out.reserve(c.nodes.size());
  for (const auto& n : c.nodes) {
    double r, phi;
    if (n.is_polar()) {
      r = n.x1;
      phi = n.x2;
    } else {
      r = n.radius();
      phi = r > 0 ? std::atan2(n.x2, n.x1) : 0.0;
    }
    if (r < r_lo || r > r_hi) continue;
    out.push_back({r, phi * sa});
  }
  return out;
}

double hausdorff(const std::vector<WedgePoint>& A, const std::vector<WedgePoint>& B,
                 double alpha) {
  if (A.empty() || B.empty())
    throw regime_error("support distance window selected no nodes");
  double h = 0.0;
  for (const auto& x : A) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& y : B) dmin = std::min(dmin, cone_point_distance(x, y, alpha));
    h = std::max(h, dmin);
  }
  return h;
}

}  // namespace

double support_distance(const DiscreteCurve& a, const DiscreteCurve& b, double alpha) {
  return support_distance_window(a, b, alpha, 0.0,
                                 std::numeric_limits<double>::infinity());
}

double support_distance_window(const DiscreteCurve& a, const DiscreteCurve& b,
                               double alpha, double r_lo, double r_hi) {
  auto A = wedge_nodes(a, alpha, r_lo, r_hi);
  auto B = wedge_nodes(b, alpha, r_lo, r_hi);
  return std::max(hausdorff(A, B, alpha), hausdorff(B, A, alpha));
}

DiscreteCurve coordinate_arc(double r0, double phi_from, double phi_to, int N) {
  if (N < 2) throw config_error("coordinate_arc needs N >= 2");
  DiscreteCurve c;
  c.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = (double)i / N;
    c.nodes.push_back(ChartPoint::polar(r0, phi_from + t * (phi_to - phi_from)));
  }
  return c;
}

DiscreteCurve curve_from_nodes(std::vector<ChartPoint> nodes) {
  DiscreteCurve c;
  c.nodes = std::move(nodes);
  if (!c.valid()) throw config_error("curve needs at least two nodes");
  return c;
}

void normalize_curve(const SurfaceMetric& m, DiscreteCurve& c) {
  // interior nodes: canonical chart + continuous polar lifts; endpoints fixed
  double hint = c.nodes.front().is_polar() ? c.nodes.front().x2 : 0.0;
  bool hint_set = c.nodes.front().is_polar();
  for (size_t i = 1; i + 1 < c.nodes.size(); ++i) {
    ChartPoint& n = c.nodes[i];
    if (m.has_patch()) n = m.canonical(n, hint);
    if (n.is_polar()) {
      if (hint_set) n.x2 = nearest_lift(n.x2, hint);
      hint = n.x2;
      hint_set = true;
    }
  }
}

}  // namespace acgeo
