#include "loopmaps/mapcount.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "loopmaps/detail/quadrature.hpp"

namespace loopmaps::mapcount {

using qseries::Axis;
using qseries::TruncatedSeries;

WeightProfile::WeightProfile(std::vector<double> weights) : g(std::move(weights)) {
  for (double w : g)
    if (!(w >= 0)) throw std::invalid_argument("face weights must be non-negative");
  while (!g.empty() && g.back() == 0.0) g.pop_back();
}

bool WeightProfile::all_odd_vanish() const {
  for (int k = 1; k <= max_degree(); k += 2)
    if (weight(k) != 0.0) return false;
  return true;
}

const std::vector<Axis>& FormalWeights::axes() const {
  if (g.empty()) throw std::logic_error("empty formal profile");
  return g.front().axes();
}

FormalWeights FormalWeights::monomial(int k, const Rational& c, int t_order) {
  if (k < 1) throw std::invalid_argument("degree must be positive");
  std::vector<Axis> ax{{'t', t_order}};
  FormalWeights w;
  for (int i = 1; i <= k; ++i) w.g.emplace_back(TruncatedSeries(ax));
  if (c != 0) w.g.back() = c * TruncatedSeries::variable(ax, 't');
  return w;
}

double motzkin_poly(int p, double R, double S) {
  if (p < 0) throw std::invalid_argument("negative path length");
  double sum = 0;
  double c = 1.0;  // p!/(i!^2 (p-2i)!), updated by the ratio between terms
  for (int i = 0; 2 * i <= p; ++i) {
    int sp = p - 2 * i;
    sum += c * std::pow(R, i) * std::pow(S, sp);  // pow(0,0) == 1
    c *= static_cast<double>(sp) * (sp - 1) / ((i + 1.0) * (i + 1.0));
  }
  return sum;
}

Rational motzkin_poly(int p, const Rational& R, const Rational& S) {
  if (p < 0) throw std::invalid_argument("negative path length");
  Rational sum = 0;
  for (int i = 0; 2 * i <= p; ++i) {
    Rational c(factorial(static_cast<unsigned>(p)),
               factorial(static_cast<unsigned>(i)) * factorial(static_cast<unsigned>(i)) *
                   factorial(static_cast<unsigned>(p - 2 * i)));
    Rational term = c;
    for (int j = 0; j < i; ++j) term *= R;
    for (int j = 0; j < p - 2 * i; ++j) term *= S;
    sum += term;
  }
  return sum;
}

TruncatedSeries motzkin_poly(int p, const TruncatedSeries& R, const TruncatedSeries& S) {
  TruncatedSeries sum(R.axes());
  TruncatedSeries rpow = TruncatedSeries::constant(R.axes(), Rational(1));
  // Accumulate over i with cached powers of R; powers of S recomputed by a
  // running product over p-2i (descending), cached similarly.
  std::vector<TruncatedSeries> spow;
  spow.reserve(static_cast<std::size_t>(p) + 1);
  spow.push_back(TruncatedSeries::constant(S.axes(), Rational(1)));
  for (int j = 1; j <= p; ++j) spow.push_back(spow.back() * S);
  for (int i = 0; 2 * i <= p; ++i) {
    Rational c(factorial(static_cast<unsigned>(p)),
               factorial(static_cast<unsigned>(i)) * factorial(static_cast<unsigned>(i)) *
                   factorial(static_cast<unsigned>(p - 2 * i)));
    sum += c * (rpow * spow[static_cast<std::size_t>(p - 2 * i)]);
    if (2 * (i + 1) <= p) rpow = rpow * R;
  }
  return sum;
}

namespace {

struct RSEval {
  double F1, F2;        // residuals of the two equations
  double J11, J12, J21, J22;  // Jacobian d(F1,F2)/d(S,R)
};

// P_{k-1}, P_k and their partial derivatives enter both equations; evaluate
// everything in one pass over the weights.
RSEval evaluate_system(const WeightProfile& w, double u, double S, double R) {
  double sumS = 0, sumR = 0;
  double dS_sumS = 0, dR_sumS = 0, dS_sumR = 0, dR_sumR = 0;
  const int D = w.max_degree();
  for (int k = 1; k <= D; ++k) {
    double gk = w.weight(k);
    if (gk == 0) continue;
    // P_{k-1} and derivatives
    for (int i = 0; 2 * i <= k - 1; ++i) {
      double c = 1.0;
      for (int j = 1; j <= i; ++j)
        c *= static_cast<double>(k - 1 - 2 * j + 2) * (k - 1 - 2 * j + 1) / (static_cast<double>(j) * j);
      int sp = k - 1 - 2 * i;
      double Ri = std::pow(R, i), Ssp = std::pow(S, sp);
      sumS += gk * c * Ri * Ssp;
      if (sp >= 1) dS_sumS += gk * c * Ri * sp * std::pow(S, sp - 1);
      if (i >= 1) dR_sumS += gk * c * i * std::pow(R, i - 1) * Ssp;
    }
    // P_k and derivatives
    for (int i = 0; 2 * i <= k; ++i) {
      double c = 1.0;
      for (int j = 1; j <= i; ++j)
        c *= static_cast<double>(k - 2 * j + 2) * (k - 2 * j + 1) / (static_cast<double>(j) * j);
      int sp = k - 2 * i;
      double Ri = std::pow(R, i), Ssp = std::pow(S, sp);
      sumR += gk * c * Ri * Ssp;
      if (sp >= 1) dS_sumR += gk * c * Ri * sp * std::pow(S, sp - 1);
      if (i >= 1) dR_sumR += gk * c * i * std::pow(R, i - 1) * Ssp;
    }
  }
  RSEval e{};
  e.F1 = S - sumS;
  e.F2 = R - u + S * S / 2 - sumR / 2;
  e.J11 = 1 - dS_sumS;
  e.J12 = -dR_sumS;
  e.J21 = S - dS_sumR / 2;
  e.J22 = 1 - dR_sumR / 2;
  return e;
}

double picard_S(const WeightProfile& w, double S, double R) {
  double v = 0;
  for (int k = 1; k <= w.max_degree(); ++k)
    if (w.weight(k) != 0) v += w.weight(k) * motzkin_poly(k - 1, R, S);
  return v;
}

double picard_R(const WeightProfile& w, double u, double S, double R) {
  double v = u - S * S / 2;
  for (int k = 1; k <= w.max_degree(); ++k)
    if (w.weight(k) != 0) v += 0.5 * w.weight(k) * motzkin_poly(k, R, S);
  return v;
}

}  // namespace

RSState solve_rs(const WeightProfile& w, double u) {
  if (u < 0 || u > 1) throw std::invalid_argument("u must lie in [0,1]");
  RSState st;
  st.u = u;
  double S = 0, R = u;
  double damp = 1.0;
  double prev_move = std::numeric_limits<double>::infinity();
  const double blowup = 1e8;
  int it = 0;
  for (; it < 4000; ++it) {
    double Sn = picard_S(w, S, R);
    double Rn = picard_R(w, u, S, R);
    if (!std::isfinite(Sn) || !std::isfinite(Rn) || std::abs(Sn) > blowup || std::abs(Rn) > blowup)
      throw std::domain_error("inadmissible weights: the map generating function diverges");
    double move = std::abs(Sn - S) + std::abs(Rn - R);
    if (move > prev_move) damp = 0.5;  // oscillation or slow blow-up: damp
    S += damp * (Sn - S);
    R += damp * (Rn - R);
    prev_move = move;
    if (move < 1e-13 * (1 + std::abs(S) + std::abs(R))) break;
  }
  // Newton polish on the residual form. Near a critical point the root is a
  // fold, Newton converges linearly and bottoms out at the rounding floor;
  // keep the best iterate seen and stop once progress stalls.
  double best_res = std::numeric_limits<double>::infinity();
  double best_S = S, best_R = R;
  int stall = 0;
  for (int n = 0; n < 200 && stall < 4; ++n) {
    RSEval e = evaluate_system(w, u, S, R);
    double residual = std::max(std::abs(e.F1), std::abs(e.F2));
    if (residual < best_res) {
      best_res = residual;
      best_S = S;
      best_R = R;
      stall = 0;
    } else {
      ++stall;
    }
    if (residual < 1e-15 * (1 + std::abs(S) + std::abs(R))) break;
    double det = e.J11 * e.J22 - e.J12 * e.J21;
    if (det == 0) break;
    double dS = (-e.F1 * e.J22 + e.F2 * e.J12) / det;
    double dR = (-e.J11 * e.F2 + e.J21 * e.F1) / det;
    S += dS;
    R += dR;
    if (!std::isfinite(S) || !std::isfinite(R))
      throw std::domain_error("inadmissible weights: Newton polish diverged");
  }
  S = best_S;
  R = best_R;
  RSEval e = evaluate_system(w, u, S, R);
  st.residual = std::max(std::abs(e.F1), std::abs(e.F2));
  if (st.residual > 1e-9 * (1 + std::abs(S) + std::abs(R)))
    throw std::domain_error("inadmissible weights: fixed point not reached");
  st.S = S;
  st.R = R;
  st.iterations = it;
  // Criticality diagnostics: J * (dS/du, dR/du) = (0, 1).
  double det = e.J11 * e.J22 - e.J12 * e.J21;
  double norm1 = std::max(std::abs(e.J11) + std::abs(e.J12), std::abs(e.J21) + std::abs(e.J22));
  if (det != 0) {
    double i11 = e.J22 / det, i12 = -e.J12 / det, i21 = -e.J21 / det, i22 = e.J11 / det;
    double normi = std::max(std::abs(i11) + std::abs(i12), std::abs(i21) + std::abs(i22));
    st.jacobian_condition = norm1 * normi;
    st.dR_du = i22;  // second component of J^{-1} (0,1)^T
  } else {
    st.jacobian_condition = std::numeric_limits<double>::infinity();
    st.dR_du = std::numeric_limits<double>::infinity();
  }
  // Double-precision Newton at a fold stops at |delta| ~ sqrt(eps), which
  // caps the observable dR/du near 1/sqrt(eps); thresholds sit safely below
  // that cap and far above anything a genuinely subcritical profile shows.
  st.critical = st.jacobian_condition > 1e8 || std::abs(st.dR_du) > 1e6;
  return st;
}

int default_u_order(const FormalWeights& w) {
  int t_order = 0;
  for (const Axis& a : w.axes())
    if (a.label == 't') t_order = a.order;
  int m = std::max(1, w.max_degree() / 2);
  return m * t_order + 1;
}

FormalRS solve_rs_formal(const FormalWeights& w, int u_order) {
  if (w.g.empty()) throw std::invalid_argument("empty formal profile");
  std::vector<Axis> axes = w.axes();
  int t_order = -1;
  for (const Axis& a : axes)
    if (a.label == 't') t_order = a.order;
  if (t_order < 0) throw std::invalid_argument("formal weights need a 't' axis");
  for (const auto& gk : w.g)
    if (gk.constant_term() != 0)
      throw std::invalid_argument("formal weights must vanish at t = 0");
  std::vector<Axis> ax = axes;
  ax.push_back(Axis{'u', u_order});

  TruncatedSeries u = TruncatedSeries::variable(ax, 'u');
  TruncatedSeries S(ax), R = u;
  std::vector<TruncatedSeries> g;
  g.reserve(w.g.size());
  for (const auto& gk : w.g) g.push_back(lift(gk, ax));

  Rational half(1, 2);
  for (int sweep = 0; sweep <= t_order + 1; ++sweep) {
    TruncatedSeries Sn(ax), Rn = u - half * (S * S);
    for (int k = 1; k <= w.max_degree(); ++k) {
      const TruncatedSeries& gk = g[static_cast<std::size_t>(k - 1)];
      if (gk.is_zero()) continue;
      Sn += gk * motzkin_poly(k - 1, R, S);
      Rn += half * (gk * motzkin_poly(k, R, S));
    }
    bool settled = (Sn == S) && (Rn == R);
    S = Sn;
    R = Rn;
    if (settled) break;
  }
  return FormalRS{R, S};
}

namespace {

TruncatedSeries disk_series_rs(const FormalWeights& w, int p) {
  // u-degree control: with m = floor(D/2), t-order j terms of S (resp. R)
  // have u-degree at most m j (resp. m j + 1), and P_p adds at most floor(p/2).
  int t_order = 0;
  for (const Axis& a : w.axes())
    if (a.label == 't') t_order = a.order;
  int m = std::max(1, w.max_degree() / 2);
  int u_solver = m * t_order + 1;
  int u_full = u_solver + p / 2 + 1;
  FormalRS rs = solve_rs_formal(w, u_solver);
  std::vector<Axis> wide = rs.R.axes();
  for (Axis& a : wide)
    if (a.label == 'u') a.order = u_full;
  TruncatedSeries P = motzkin_poly(p, lift(rs.R, wide), lift(rs.S, wide));
  return integrate_unit(P, 'u');
}

TruncatedSeries disk_series_tutte(const FormalWeights& w, int p) {
  std::vector<Axis> axes = w.axes();
  int t_order = 0;
  for (const Axis& a : axes)
    if (a.label == 't') t_order = a.order;
  const int D = w.max_degree();
  const int m_top = p + (t_order + 1) * std::max(D - 2, 1) + 2;
  std::vector<TruncatedSeries> F(static_cast<std::size_t>(m_top) + 1, TruncatedSeries(axes));
  F[0] = TruncatedSeries::constant(axes, Rational(1));
  const int sweeps = t_order + 3;
  for (int s = 0; s < sweeps; ++s) {
    bool settled = true;
    for (int mm = 1; mm <= m_top; ++mm) {
      TruncatedSeries v(axes);
      for (int k = 0; k <= mm - 2; ++k) v += F[static_cast<std::size_t>(k)] * F[static_cast<std::size_t>(mm - 2 - k)];
      for (int k = 1; k <= D; ++k) {
        if (w.g[static_cast<std::size_t>(k - 1)].is_zero()) continue;
        if (mm + k - 2 <= m_top)
          v += w.g[static_cast<std::size_t>(k - 1)] * F[static_cast<std::size_t>(mm + k - 2)];
      }
      if (!(v == F[static_cast<std::size_t>(mm)])) settled = false;
      F[static_cast<std::size_t>(mm)] = v;
    }
    if (settled) break;
  }
  return F[static_cast<std::size_t>(p)];
}

}  // namespace

TruncatedSeries disk_series(const FormalWeights& w, int p, DiskMethod method) {
  if (p < 0) throw std::invalid_argument("negative boundary length");
  if (p == 0) {
    // F_0 = 1 by convention.
    return TruncatedSeries::constant(w.axes(), Rational(1));
  }
  return method == DiskMethod::rs_integration ? disk_series_rs(w, p)
                                              : disk_series_tutte(w, p);
}

double disk_value(const WeightProfile& w, int p, double tol) {
  return detail::integrate(
      [&](double u) {
        RSState st = solve_rs(w, u);
        return motzkin_poly(p, st.R, st.S);
      },
      0.0, 1.0, tol);
}

Cut cut_endpoints(const WeightProfile& w) {
  RSState st = solve_rs(w, 1.0);
  double T = std::sqrt(st.R);
  return Cut{st.S - 2 * T, st.S + 2 * T};
}

double cut_plus_at(const WeightProfile& w, double u) {
  RSState st = solve_rs(w, u);
  return st.S + 2 * std::sqrt(st.R);
}

double cut_minus_at(const WeightProfile& w, double u) {
  RSState st = solve_rs(w, u);
  return st.S - 2 * std::sqrt(st.R);
}

double u_of_x(const WeightProfile& w, double x) {
  Cut c = cut_endpoints(w);
  if (!(x > c.gamma_minus && x < c.gamma_plus))
    throw std::domain_error("x outside the open cut");
  if (x == 0.0) return 0.0;
  // gamma_+ is strictly increasing, gamma_- strictly decreasing (when odd
  // weights are present); both start at 0.
  auto f = [&](double u) { return x >= 0 ? cut_plus_at(w, u) - x : x - cut_minus_at(w, u); };
  if (f(0.0) >= 0) return 0.0;
  return detail::bisect(f, 0.0, 1.0, 100);
}

namespace {

std::complex<double> sqrt_cut_factor(const WeightProfile& w, std::complex<double> x,
                                     double u) {
  // sqrt(x - gamma_+(u)) * sqrt(x - gamma_-(u)) with principal branches per
  // factor: analytic off the real cut, ~ x at infinity.
  using std::sqrt;
  auto st = solve_rs(w, u);
  double T = std::sqrt(st.R);
  return sqrt(x - (st.S + 2 * T)) * sqrt(x - (st.S - 2 * T));
}

}  // namespace

std::complex<double> resolvent(const WeightProfile& w, std::complex<double> x,
                               double tol) {
  return detail::integrate(
      [&](double u) { return 1.0 / sqrt_cut_factor(w, x, u); }, 0.0, 1.0, tol);
}

double density(const WeightProfile& w, double x, double tol) {
  Cut c = cut_endpoints(w);
  if (!(x > c.gamma_minus && x < c.gamma_plus))
    throw std::domain_error("x outside the open cut");
  double ux = u_of_x(w, x);
  double span = std::sqrt(1.0 - ux);
  // u = ux + s^2 removes the inverse-square-root edge at u = ux.
  double val = detail::integrate(
      [&](double s) {
        double u = std::min(1.0, ux + s * s);
        RSState st = solve_rs(w, u);
        double T = std::sqrt(st.R);
        double q = (st.S + 2 * T - x) * (x - (st.S - 2 * T));
        if (q <= 0) {
          // only possible by rounding right at the edge
          return 0.0;
        }
        return 2 * s / std::sqrt(q);
      },
      0.0, span, tol);
  return val / std::numbers::pi;
}

double boundary_sum(const WeightProfile& w, double x, double tol) {
  Cut c = cut_endpoints(w);
  if (!(x > c.gamma_minus && x < c.gamma_plus))
    throw std::domain_error("x outside the open cut");
  double ux = u_of_x(w, x);
  if (ux <= 0) return 0.0;
  double span = std::sqrt(ux);
  // For u < u(x) the point lies right of the u-cut when x >= 0 and left of
  // it when x < 0; the branch with W ~ 1/x makes the left side negative.
  double sign = x >= 0 ? 1.0 : -1.0;
  // u = ux - s^2; the integrand has the inverse-square-root edge at u = ux.
  double val = detail::integrate(
      [&](double s) {
        double u = std::max(0.0, ux - s * s);
        RSState st = solve_rs(w, u);
        double T = std::sqrt(st.R);
        double q = (x - (st.S + 2 * T)) * (x - (st.S - 2 * T));
        if (q <= 0) return 0.0;
        return 2 * s / std::sqrt(q);
      },
      0.0, span, tol);
  return 2 * sign * val;
}

double potential_derivative(const WeightProfile& w, double x) {
  double v = x;
  for (int k = 1; k <= w.max_degree(); ++k)
    if (w.weight(k) != 0) v -= w.weight(k) * std::pow(x, k - 1);
  return v;
}

ResolventPoint resolvent_and_density(const WeightProfile& w, std::complex<double> x,
                                     double tol) {
  ResolventPoint out;
  Cut c = cut_endpoints(w);
  bool on_axis = x.imag() == 0.0;
  bool inside = on_axis && x.real() > c.gamma_minus && x.real() < c.gamma_plus;
  out.inside_cut = inside;
  if (!inside) {
    out.W = resolvent(w, x, tol);
    return out;
  }
  double xr = x.real();
  out.rho = density(w, xr, tol);
  double bsum = boundary_sum(w, xr, tol);
  out.W = std::complex<double>(bsum / 2, -std::numbers::pi * out.rho);  // W(x+i0)
  out.functional_residual = std::abs(bsum - potential_derivative(w, xr));
  return out;
}

RSDerivatives rs_derivatives(const WeightProfile& w, double u, double tol) {
  if (!(u > 0 && u <= 1)) throw std::invalid_argument("u must lie in (0,1]");
  RSState st = solve_rs(w, u);
  double S = st.S, T = std::sqrt(st.R);
  auto uprime = [&](double xi) {
    double v = 0;
    for (int k = 2; k <= w.max_degree(); ++k)
      if (w.weight(k) != 0) v += w.weight(k) * (k - 1) * std::pow(xi, k - 2);
    return v;
  };
  double L0 = detail::integrate([&](double phi) { return uprime(S + 2 * T * std::cos(phi)); },
                                0.0, std::numbers::pi, tol) /
              std::numbers::pi;
  double L1 = detail::integrate(
                  [&](double phi) { return std::cos(phi) * uprime(S + 2 * T * std::cos(phi)); },
                  0.0, std::numbers::pi, tol) /
              std::numbers::pi;
  // (1-L0) dS - 2 L1 dT = 0 ; -T L1 dS + 2T(1-L0) dT = 1.
  double det = 2 * T * ((1 - L0) * (1 - L0) - L1 * L1);
  if (det == 0 || !std::isfinite(det))
    throw std::domain_error("singular derivative system: critical point at this u");
  RSDerivatives d;
  d.L0 = L0;
  d.L1 = L1;
  d.dS = 2 * L1 / det;
  d.dT = (1 - L0) / det;
  d.dR = 2 * T * d.dT;
  if (L1 != 0 && T > 0)
    d.identity_residual =
        std::abs((2 * d.dT) * (2 * d.dT) - d.dS * d.dS - d.dS / (T * L1));
  return d;
}

}  // namespace loopmaps::mapcount
