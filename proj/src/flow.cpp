#include "acgeo/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace acgeo {

Variation energy_gradient(const SurfaceMetric& m, const DiscreteCurve& c) {
  if (!c.valid()) throw config_error("curve needs at least two nodes");
  int N = c.segments();
  Variation grad(N + 1, Vec2{0.0, 0.0});
  for (int i = 0; i < N; ++i) {
    SegmentGeom s = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    MetricJet jet = m.metric_jet(s.mid());
    Vec2 d = s.delta();
    // d/da of N * g((a+b)/2)(b-a, b-a) and the mirrored d/db
    Vec2 gd{jet.g.g11 * d.x1 + jet.g.g12 * d.x2,
            jet.g.g12 * d.x1 + jet.g.g22 * d.x2};
    double q1 = jet.d1.norm2(d), q2 = jet.d2.norm2(d);
    Vec2 fa{N * (-2.0 * gd.x1 + 0.5 * q1), N * (-2.0 * gd.x2 + 0.5 * q2)};
    Vec2 fb{N * (2.0 * gd.x1 + 0.5 * q1), N * (2.0 * gd.x2 + 0.5 * q2)};
    Jac2 JL = node_to_frame_jacobian(m, c.nodes[i], s.chart);
    Jac2 JR = node_to_frame_jacobian(m, c.nodes[i + 1], s.chart);
    grad[i] = grad[i] + JL.apply_transpose(fa);
    grad[i + 1] = grad[i + 1] + JR.apply_transpose(fb);
  }
  grad.front() = {0.0, 0.0};
  grad.back() = {0.0, 0.0};
  return grad;
}

double pair_covector(const Variation& grad, const Variation& v) {
  if (grad.size() != v.size())
    throw config_error("pairing requires fields of equal size");
  double acc = 0.0;
  for (size_t i = 0; i < grad.size(); ++i)
    acc += grad[i].x1 * v[i].x1 + grad[i].x2 * v[i].x2;
  return acc;
}

Variation h1_precondition(const SurfaceMetric& m, const DiscreteCurve& c,
                          const Variation& grad) {
  int N = c.segments();
  if ((int)grad.size() != N + 1)
    throw config_error("gradient size must match curve nodes");
  if (N < 2) throw config_error("preconditioning needs an interior node");
  using M2 = Eigen::Matrix2d;
  using V2 = Eigen::Vector2d;
  std::vector<M2> D(N + 1, M2::Zero());
  std::vector<M2> U(N, M2::Zero());  // couples node i with node i+1
  const double cD = 1.0 / (3.0 * N) + (double)N;
  const double cU = 1.0 / (6.0 * N) - (double)N;
  for (int i = 0; i < N; ++i) {
    SegmentGeom s = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    Metric2 g = m.metric_at(s.mid());
    M2 G;
    G << g.g11, g.g12, g.g12, g.g22;
    Jac2 jl = node_to_frame_jacobian(m, c.nodes[i], s.chart);
    Jac2 jr = node_to_frame_jacobian(m, c.nodes[i + 1], s.chart);
    M2 JL, JR;
    JL << jl.a11, jl.a12, jl.a21, jl.a22;
    JR << jr.a11, jr.a12, jr.a21, jr.a22;
    D[i] += cD * JL.transpose() * G * JL;
    D[i + 1] += cD * JR.transpose() * G * JR;
    U[i] += cU * JL.transpose() * G * JR;
  }
  // block-tridiagonal solve on interior nodes 1..N-1
  int M = N - 1;
  std::vector<M2> Sinv(M);
  std::vector<V2> y(M);
  for (int k = 0; k < M; ++k) {
    int node = k + 1;
    M2 S = D[node];
    V2 b(grad[node].x1, grad[node].x2);
    if (k > 0) {
      const M2& Uprev = U[node - 1];  // couples node-1 <-> node
      S -= Uprev.transpose() * Sinv[k - 1] * Uprev;
      b -= Uprev.transpose() * (Sinv[k - 1] * y[k - 1]);
    }
    Sinv[k] = S.inverse();
    y[k] = b;
  }
  Variation w(N + 1, Vec2{0.0, 0.0});
  V2 prev = V2::Zero();
  for (int k = M - 1; k >= 0; --k) {
    int node = k + 1;
    V2 rhs = y[k];
    if (k < M - 1) rhs -= U[node] * prev;
    V2 x = Sinv[k] * rhs;
    w[node] = {x(0), x(1)};
    prev = x;
  }
  return w;
}

double h1_norm(const SurfaceMetric& m, const DiscreteCurve& c, const Variation& v) {
  return std::sqrt(std::max(0.0, h1_inner(m, c, v, v)));
}

const char* flow_stop_name(FlowStop s) {
  switch (s) {
    case FlowStop::Converged: return "converged";
    case FlowStop::MaxIters: return "max_iters";
    case FlowStop::StepUnderflow: return "step_underflow";
    case FlowStop::EmbeddingLost: return "embedding_lost";
  }
  return "unknown";
}

namespace {

void clamp_radii(DiscreteCurve& c, double r_floor) {
  if (r_floor <= 0.0) return;
  for (size_t i = 1; i + 1 < c.nodes.size(); ++i) {
    ChartPoint& n = c.nodes[i];
    if (n.is_polar() && n.x1 < r_floor) n.x1 = r_floor;
  }
}

DiscreteCurve step_curve(const SurfaceMetric& m, const DiscreteCurve& c,
                         const Variation& w, double h, double r_floor) {
  DiscreteCurve t = c;
  for (size_t i = 1; i + 1 < t.nodes.size(); ++i) {
    t.nodes[i].x1 -= h * w[i].x1;
    t.nodes[i].x2 -= h * w[i].x2;
  }
  clamp_radii(t, r_floor);
  normalize_curve(m, t);
  return t;
}

}  // namespace

FlowResult gradient_flow(const SurfaceMetric& m, DiscreteCurve c,
                         const FlowConfig& cfg) {
  if (!c.valid() || c.segments() < 2)
    throw config_error("gradient flow needs at least one interior node");
  normalize_curve(m, c);
  clamp_radii(c, cfg.r_floor);

  FlowResult res;
  double E = energy(m, c);
  double h = cfg.step0;
  const double eps = std::numeric_limits<double>::epsilon();
  double grad_tol = cfg.grad_tol;
  if (grad_tol <= 0.0) {
    double L0 = length(m, c);
    grad_tol = 1e-8 * E / std::max(L0, eps);
  }

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    res.iters = iter + 1;
    Variation grad = energy_gradient(m, c);
    Variation w = h1_precondition(m, c, grad);
    double gn2 = std::max(0.0, pair_covector(grad, w));
    res.grad_norm = std::sqrt(gn2);
    if (cfg.record_trace)
      res.trace.push_back({iter, E, res.grad_norm, h});
    if (res.grad_norm <= grad_tol) {
      res.stop = FlowStop::Converged;
      break;
    }

    bool moved = false;
    while (h >= cfg.min_step) {
      DiscreteCurve trial = step_curve(m, c, w, h, cfg.r_floor);
      double Et;
      try {
        Et = energy(m, trial);
      } catch (const std::runtime_error&) {
        h *= 0.5;  // stepped outside the chart domain
        continue;
      }
      double pred = h * gn2;
      double noise = 64.0 * eps * (std::abs(E) + 1.0);
      if (pred <= noise) {
        // the predicted drop is below floating-point resolution: take the
        // step if it does not measurably increase the energy
        if (Et <= E + noise) {
          c = std::move(trial);
          E = Et;
          moved = true;
        } else {
          h *= 0.5;
          continue;
        }
        break;
      }
      double ratio = (E - Et) / pred;
      if (ratio >= cfg.band_lo && ratio <= cfg.band_hi) {
        res.max_drop_residual = std::max(res.max_drop_residual, std::abs(ratio - 1.0));
        c = std::move(trial);
        E = Et;
        moved = true;
        break;
      }
      h *= 0.5;
    }
    if (!moved) {
      res.stop = FlowStop::StepUnderflow;
      break;
    }
    ++res.accepted;
    h *= cfg.step_growth;
    if (cfg.embed_check_stride > 0 && res.accepted % cfg.embed_check_stride == 0) {
      if (!is_embedded(m, c).embedded) {
        res.stop = FlowStop::EmbeddingLost;
        break;
      }
    }
  }

  res.curve = std::move(c);
  res.energy = E;
  if (cfg.record_trace)
    res.trace.push_back({res.iters, E, res.grad_norm, h});
  return res;
}

GeodesicReport find_geodesic(const SurfaceMetric& m, const DiscreteCurve& init,
                             const FlowConfig& cfg) {
  FlowResult fr = gradient_flow(m, init, cfg);
  GeodesicReport rep;
  rep.energy = fr.energy;
  rep.length = length(m, fr.curve);
  rep.grad_norm = fr.grad_norm;
  rep.converged = fr.stop == FlowStop::Converged;
  rep.iters = fr.iters;
  rep.max_drop_residual = fr.max_drop_residual;
  rep.stop = fr.stop;
  rep.curve = std::move(fr.curve);
  return rep;
}

SpectrumReport second_variation(const SurfaceMetric& m, const DiscreteCurve& c,
                                double neg_tol) {
  if (!c.valid() || c.segments() < 2)
    throw config_error("second variation needs at least one interior node");
  SpectrumReport rep;
  {
    Variation grad = energy_gradient(m, c);
    Variation w = h1_precondition(m, c, grad);
    rep.geodesic_residual = std::sqrt(std::max(0.0, pair_covector(grad, w)));
  }
  DiscreteCurve cc = reparametrize_constant_speed(m, c);
  int N = cc.segments();
  double L = length(m, cc);
  if (!(L > 0.0)) throw collapse_error("second variation of a collapsed curve");
  rep.arclength = L;
  double h = L / N;

  std::vector<double> K(N + 1);
  for (int j = 0; j <= N; ++j) K[j] = m.gauss_curvature(cc.nodes[j]);

  // P1 discretization of Q(u) = int u'^2 - K u^2 ds on interior nodes,
  // with K frozen at segment midpoints, against the consistent mass matrix.
  int M = N - 1;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(M, M);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);
  auto kmid = [&](int seg) { return 0.5 * (K[seg] + K[seg + 1]); };
  for (int j = 0; j < M; ++j) {
    double kl = kmid(j), kr = kmid(j + 1);
    S(j, j) = 2.0 / h - h * (kl + kr) / 3.0;
    B(j, j) = 2.0 * h / 3.0;
    if (j + 1 < M) {
      S(j, j + 1) = -1.0 / h - h * kr / 6.0;
      S(j + 1, j) = S(j, j + 1);
      B(j, j + 1) = h / 6.0;
      B(j + 1, j) = h / 6.0;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, B);
  if (es.info() != Eigen::Success)
    throw convergence_error("second-variation eigensolve failed");
  rep.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + M);
  {
    // B-orthonormal columns; rescale the lowest to unit L^2 norm for lifting
    Eigen::VectorXd u0 = es.eigenvectors().col(0);
    double l2 = std::sqrt(u0.transpose() * (B * u0));
    if (l2 > 0.0) u0 /= l2;
    if (u0(0) < 0.0) u0 = -u0;  // fix the sign for determinism
    rep.lowest_mode.assign(u0.data(), u0.data() + M);
  }
  double scale = std::max(1.0, std::abs(rep.eigenvalues.back()));
  rep.neg_tol = neg_tol > 0.0 ? neg_tol : 1e-9 * scale;
  rep.negative_count = 0;
  for (double lam : rep.eigenvalues)
    if (lam < -rep.neg_tol) ++rep.negative_count;
  return rep;
}

int morse_index(const SurfaceMetric& m, const DiscreteCurve& c, double neg_tol) {
  return second_variation(m, c, neg_tol).negative_count;
}

}  // namespace acgeo
