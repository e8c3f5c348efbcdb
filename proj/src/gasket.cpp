#include "loopmaps/gasket.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "loopmaps/detail/quadrature.hpp"

namespace loopmaps::gasket {

using mapcount::FormalWeights;
using mapcount::WeightProfile;
using qseries::Axis;
using qseries::TruncatedSeries;

namespace {

// Disk values F_{k'} for k' = 0..kp_max at the given weights, sharing the
// (R,S) solves across all k' on a composite Gauss-Kronrod grid.
std::vector<double> disk_values_all(const WeightProfile& w, int kp_max, int panels = 8) {
  std::vector<double> f(static_cast<std::size_t>(kp_max) + 1, 0.0);
  for (int p = 0; p < panels; ++p) {
    double a = static_cast<double>(p) / panels;
    double b = static_cast<double>(p + 1) / panels;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < 15; ++i) {
      double node, weight;
      if (i < 7) {
        node = c - h * detail::gk::nodes[i];
        weight = detail::gk::wk[i];
      } else if (i == 7) {
        node = c;
        weight = detail::gk::wk[7];
      } else {
        node = c + h * detail::gk::nodes[14 - i];
        weight = detail::gk::wk[14 - i];
      }
      mapcount::RSState st = mapcount::solve_rs(w, node);
      double scale = weight * h;
      for (int kp = 0; kp <= kp_max; ++kp)
        f[static_cast<std::size_t>(kp)] += scale * mapcount::motzkin_poly(kp, st.R, st.S);
    }
  }
  return f;
}

double infinity_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> fixed_point_map(const LoopModel& m,
                                    const std::vector<std::vector<double>>& A, int K,
                                    const std::vector<double>& g) {
  WeightProfile w(g);
  std::vector<double> f = disk_values_all(w, K);
  std::vector<double> out(static_cast<std::size_t>(K), 0.0);
  for (int k = 1; k <= K; ++k) {
    double acc = m.bare.weight(k);
    for (int kp = 0; kp <= K; ++kp)
      acc += m.n * A[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)] *
             f[static_cast<std::size_t>(kp)];
    out[static_cast<std::size_t>(k - 1)] = acc;
  }
  return out;
}

// Certified bound on what the truncation at K drops, assuming the effective
// model is subcritical: F_{k'} <= gamma_+^{k'} (unit-mass moments) and the
// exponentiation identity sum_{k'} A_{k,k'} Y^{k'} = s(Y)^{-k} for Y below
// the convergence radius s(0).
double tail_certificate(const LoopModel& m, const std::vector<double>& g, int K) {
  if (m.n == 0) return 0.0;
  if (m.rings.tag == ringgen::FamilyTag::quadrangular && m.rings.h1 != 0 &&
      m.rings.h2 != 0)
    throw std::domain_error(
        "no truncation certificate for two-pole quadrangular rings");
  ringgen::Homography s = ringgen::involution_of(m.rings);
  mapcount::Cut cut = mapcount::cut_endpoints(WeightProfile(g));
  // The twisting involution acts on the bipartite variable X = x^2; run the
  // same geometry there with half the index range.
  bool bip = m.rings.tag == ringgen::FamilyTag::twisting;
  double gp = bip ? cut.gamma_plus * cut.gamma_plus : cut.gamma_plus;
  int Keff = bip ? K / 2 : K;
  double radius = s.beta == 0 ? std::numeric_limits<double>::infinity()
                              : std::abs(s.alpha / s.beta);
  if (!(gp < radius))
    throw std::domain_error(
        "beyond critical surface: cut endpoint reaches the ring convergence radius");
  double Y = std::isfinite(radius) ? 0.5 * (gp + radius) : 2 * gp + 1;
  // Inner sums dropped beyond k' = K, maximized over k (worst at k = 1).
  double rin = gp / Y;
  double inner = std::pow(rin, Keff + 1) / (1 - rin) / std::abs(s(Y));
  // Effective weights dropped beyond k = K: g_k <= n s(gamma_+)^{-k}; their
  // effect on the (R,S) equations is bounded by sum_{k>K} g_k gamma_+^{k-1}.
  double sgp = s(gp);
  double tail_k = 0;
  if (sgp > gp) {
    double q = gp / sgp;
    tail_k = std::pow(q, Keff + 1) / (1 - q) * (m.n / cut.gamma_plus);
  } else {
    tail_k = std::numeric_limits<double>::infinity();
  }
  return m.n * inner + tail_k;
}

}  // namespace

EffectiveWeights fixed_point_weights(const LoopModel& m, FixedPointOptions opt) {
  const int K = opt.K;
  if (K < m.bare.max_degree())
    throw std::invalid_argument("K must cover the bare degrees");
  auto A = ringgen::ring_matrix(m.rings, K, K);

  std::vector<double> g(static_cast<std::size_t>(K), 0.0);
  for (int k = 1; k <= K; ++k) g[static_cast<std::size_t>(k - 1)] = m.bare.weight(k);

  EffectiveWeights out;
  if (m.n == 0) {
    // the loop term vanishes identically: one application settles it
    out.g = g;
    out.iterations = 1;
    out.residual = 0;
    out.tail_estimate = 0;
    return out;
  }

  double damp = 1.0;
  double prev_move = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_picard; ++it) {
    std::vector<double> gn;
    try {
      gn = fixed_point_map(m, A, K, g);
    } catch (const std::domain_error&) {
      throw std::domain_error(
          "beyond critical surface: effective weights left the admissible region");
    }
    double move = infinity_norm_diff(gn, g);
    residual = move;
    if (move > prev_move) damp = 0.5;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += damp * (gn[i] - g[i]);
    prev_move = move;
    if (move < opt.tol) break;
  }

  if (residual >= opt.tol) {
    // Picard stalled: Newton on Phi(g) = g0 + n A F(g) - g with a
    // finite-difference Jacobian.
    const double fd = 1e-7;
    for (int nit = 0; nit < opt.max_newton && residual >= opt.tol; ++nit) {
      std::vector<double> phi = fixed_point_map(m, A, K, g);
      Eigen::VectorXd F(K);
      for (int i = 0; i < K; ++i)
        F(i) = phi[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
      Eigen::MatrixXd J(K, K);
      for (int j = 0; j < K; ++j) {
        std::vector<double> gp = g;
        double step = fd * (1 + std::abs(g[static_cast<std::size_t>(j)]));
        gp[static_cast<std::size_t>(j)] += step;
        std::vector<double> phip = fixed_point_map(m, A, K, gp);
        for (int i = 0; i < K; ++i)
          J(i, j) = (phip[static_cast<std::size_t>(i)] - phi[static_cast<std::size_t>(i)]) / step -
                    (i == j ? 1.0 : 0.0);
      }
      Eigen::VectorXd dg = J.partialPivLu().solve(-F);
      for (int i = 0; i < K; ++i) g[static_cast<std::size_t>(i)] += dg(i);
      for (double v : g)
        if (!(v >= -1e-12) || !std::isfinite(v))
          throw std::domain_error("beyond critical surface: Newton fallback diverged");
      for (double& v : g) v = std::max(v, 0.0);
      std::vector<double> phin = fixed_point_map(m, A, K, g);
      residual = infinity_norm_diff(phin, g);
      ++it;
    }
  }

  if (!(residual < opt.tol))
    throw std::domain_error("beyond critical surface: fixed point did not converge");

  out.g = g;
  out.iterations = it + 1;
  out.residual = infinity_norm_diff(fixed_point_map(m, A, K, g), g);
  out.tail_estimate = tail_certificate(m, g, K);
  if (!(out.tail_estimate < std::sqrt(opt.tol)))
    throw std::domain_error("hole-degree truncation K too small for this model");
  return out;
}

namespace {

// Minimum face count of a ring with outer length k: one face per unit of
// contour for triangle rings, one per square for the quadrangular ones.
int min_ring_faces(const ringgen::RingFamily& f, int k) {
  switch (f.tag) {
    case ringgen::FamilyTag::triangular:
    case ringgen::FamilyTag::bending:
    case ringgen::FamilyTag::rigid:
      return k;
    case ringgen::FamilyTag::quadrangular:
    case ringgen::FamilyTag::twisting:
      return (k + 1) / 2;
  }
  return k;
}

int max_hole_degree(const ringgen::RingFamily& f, int t_order) {
  int k = 1;
  while (min_ring_faces(f, k + 1) <= t_order) ++k;
  return k;
}

}  // namespace

mapcount::FormalWeights fixed_point_weights_formal(const FormalLoopModel& m) {
  const std::vector<Axis>& axes = m.bare.axes();
  int t_order = -1;
  for (const Axis& a : axes)
    if (a.label == 't') t_order = a.order;
  if (t_order < 0) throw std::invalid_argument("formal model needs a 't' axis");
  // Hole degrees beyond these bounds cannot appear within the truncation:
  // every ring carries at least min_ring_faces(k) powers of the marker.
  const int K = std::max(m.bare.max_degree(), max_hole_degree(m.rings, t_order));
  const int kp_max = max_hole_degree(m.rings, t_order);

  FormalWeights g;
  g.g.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k)
    g.g.push_back(k <= m.bare.max_degree() ? m.bare.g[static_cast<std::size_t>(k - 1)]
                                           : TruncatedSeries(axes));

  TruncatedSeries nf = lift(m.n_factor, axes);

  // Graded ring coefficients, zero rows skipped.
  std::vector<std::vector<TruncatedSeries>> A(
      static_cast<std::size_t>(K) + 1,
      std::vector<TruncatedSeries>());
  for (int k = 1; k <= K; ++k)
    for (int kp = 0; kp <= kp_max; ++kp)
      A[static_cast<std::size_t>(k)].push_back(
          lift(ringgen::ring_coeff_graded(m.rings, k, kp, t_order), axes));

  int m_floor = std::max(1, K / 2);
  int u_solver = m_floor * t_order + 1;

  for (int sweep = 0; sweep <= t_order + 1; ++sweep) {
    mapcount::FormalRS rs = mapcount::solve_rs_formal(g, u_solver);
    // F_{k'} for all k' needed by the graded ring sums.
    std::vector<Axis> wide = rs.R.axes();
    for (Axis& a : wide)
      if (a.label == 'u') a.order = u_solver + kp_max / 2 + 1;
    TruncatedSeries Rw = lift(rs.R, wide), Sw = lift(rs.S, wide);
    std::vector<TruncatedSeries> F;
    for (int kp = 0; kp <= kp_max; ++kp)
      F.push_back(integrate_unit(mapcount::motzkin_poly(kp, Rw, Sw), 'u'));

    bool settled = true;
    for (int k = 1; k <= K; ++k) {
      TruncatedSeries acc = k <= m.bare.max_degree()
                                ? m.bare.g[static_cast<std::size_t>(k - 1)]
                                : TruncatedSeries(axes);
      TruncatedSeries loop_sum(axes);
      for (int kp = 0; kp <= kp_max; ++kp) {
        const TruncatedSeries& a = A[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)];
        if (a.is_zero()) continue;
        loop_sum += a * F[static_cast<std::size_t>(kp)];
      }
      acc += nf * loop_sum;
      if (!(acc == g.g[static_cast<std::size_t>(k - 1)])) settled = false;
      g.g[static_cast<std::size_t>(k - 1)] = acc;
    }
    if (settled) break;
  }
  return g;
}

qseries::TruncatedSeries loop_disk_series(const FormalLoopModel& m, int p) {
  FormalWeights g = fixed_point_weights_formal(m);
  return mapcount::disk_series(g, p, mapcount::DiskMethod::rs_integration);
}

namespace {

void require_one_pole_in_x(const ringgen::RingFamily& f) {
  using ringgen::FamilyTag;
  bool ok = f.tag == FamilyTag::triangular || f.tag == FamilyTag::rigid ||
            f.tag == FamilyTag::bending ||
            (f.tag == FamilyTag::quadrangular && f.h2 == 0);
  if (!ok)
    throw std::domain_error(
        "residue evaluation needs a one-pole ring family in the x variable "
        "(twisting is handled through its bipartite reduction)");
}

}  // namespace

PotentialParts loop_potential(const LoopModel& m, const EffectiveWeights& ew, double x) {
  require_one_pole_in_x(m.rings);
  ringgen::Homography s = ringgen::involution_of(m.rings);
  if (s.has_pole() && std::abs(x - s.pole()) < 1e-12)
    throw std::domain_error("x at the pole of the involution");
  PotentialParts out;
  out.v0_prime = mapcount::potential_derivative(m.bare, x);
  WeightProfile eff = ew.profile();
  out.v_prime = mapcount::potential_derivative(eff, x);
  double sx = s(x);
  mapcount::Cut c = mapcount::cut_endpoints(eff);
  if (sx > c.gamma_minus && sx < c.gamma_plus)
    throw std::domain_error("geometry violation: s(x) inside the cut");
  double wsx = mapcount::resolvent(eff, sx).real();
  out.ring_term = -x * s.deriv(x) * wsx + x * s.deriv2(x) / (2 * s.deriv(x));
  return out;
}

double one_pole_residual(const LoopModel& m, const EffectiveWeights& ew, double x,
                         double tol) {
  require_one_pole_in_x(m.rings);
  ringgen::Homography s = ringgen::involution_of(m.rings);
  WeightProfile eff = ew.profile();
  mapcount::Cut c = mapcount::cut_endpoints(eff);
  if (!(x > c.gamma_minus && x < c.gamma_plus))
    throw std::domain_error("x must lie strictly inside the cut");
  double sx = s(x);
  if (sx > c.gamma_minus && sx < c.gamma_plus)
    throw std::domain_error("geometry violation: s(x) inside the cut");
  double lhs = mapcount::boundary_sum(eff, x, tol) -
               m.n * s.deriv(x) * mapcount::resolvent(eff, sx, tol).real();
  double rhs = mapcount::potential_derivative(m.bare, x) -
               m.n * s.deriv2(x) / (2 * s.deriv(x));
  return std::abs(lhs - rhs);
}

}  // namespace loopmaps::gasket
