#include "loopmaps/critline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "loopmaps/detail/quadrature.hpp"

namespace loopmaps::critline {

namespace {

constexpr double kPi = std::numbers::pi;
const cdouble kI{0.0, 1.0};

double b_of_n(double n) {
  if (!(n >= 0 && n < 2)) throw std::invalid_argument("need 0 <= n < 2");
  return std::acos(n / 2) / kPi;
}

}  // namespace

const char* to_string(Phase p) { return p == Phase::dense ? "dense" : "dilute"; }

namespace {

// Exponential-series form for Re v >> 0, where the closed form loses the
// e^{-b v} tail to cancellation between e^{+b v} sized terms:
// zeta^{(d)}(v) = (-1)^d [ b^d e^{-b v}
//   + sum_{m>=1} ((2m-b)^d e^{-(2m-b) v} + (2m+b)^d e^{-(2m+b) v}) ].
cdouble zeta_tail_series(double b, cdouble v, int d) {
  cdouble acc = std::pow(b, d) * std::exp(-b * v);
  for (int m = 1; m <= 40; ++m) {
    double r1 = 2 * m - b, r2 = 2 * m + b;
    cdouble t = std::pow(r1, d) * std::exp(-r1 * v) + std::pow(r2, d) * std::exp(-r2 * v);
    acc += t;
    if (std::abs(t) < 1e-20 * (1 + std::abs(acc))) break;
  }
  return d % 2 == 0 ? acc : -acc;
}

}  // namespace

cdouble zeta(double b, cdouble v, int d) {
  using std::cosh;
  using std::sinh;
  if (d < 0 || d > 4) throw std::invalid_argument("zeta derivative order must be 0..4");
  if (v.real() > 2.0) return zeta_tail_series(b, v, d);
  if (v.real() < -2.0) {
    double sgn = d % 2 == 0 ? -1.0 : 1.0;
    return sgn * zeta_tail_series(b, -v, d);
  }
  cdouble sh = sinh(v);
  if (std::abs(sh) < 1e-12) throw std::domain_error("zeta evaluated at a pole");
  cdouble cth = cosh(v) / sh;
  cdouble is2 = 1.0 / (sh * sh);
  cdouble chb = cosh(b * v), shb = sinh(b * v);
  switch (d) {
    case 0:
      return chb * cth - shb;
    case 1:
      return b * shb * cth - chb * is2 - b * chb;
    case 2:
      return b * b * chb * cth - 2.0 * b * shb * is2 + 2.0 * chb * is2 * cth -
             b * b * shb;
    case 3:
      return b * b * b * shb * cth - 3.0 * b * b * chb * is2 +
             6.0 * b * shb * is2 * cth - 4.0 * chb * is2 * cth * cth -
             2.0 * chb * is2 * is2 - b * b * b * chb;
    case 4:
      return b * b * b * b * chb * cth - 4.0 * b * b * b * shb * is2 +
             12.0 * b * b * chb * is2 * cth - 16.0 * b * shb * is2 * cth * cth -
             8.0 * b * shb * is2 * is2 + 8.0 * chb * is2 * cth * cth * cth +
             16.0 * chb * is2 * is2 * cth - b * b * b * b * shb;
    default:
      throw std::invalid_argument("zeta derivative order must be 0..4");
  }
}

// ---------------------------------------------------------------------------
// Trigonometric parametrization

bool TrigMap::a_is_one() const { return a == 1.0; }

cdouble TrigMap::c() const { return std::cosh(v_inf); }

TrigMap TrigMap::make(double a, double h, double gamma_minus) {
  if (!(h > 0)) throw std::invalid_argument("need h > 0");
  TrigMap m;
  m.a = a;
  m.h = h;
  m.gamma_minus = gamma_minus;
  m.v_inf = a == 1.0 ? cdouble(0.0, kPi / 2) : v_infinity(a, h, gamma_minus);
  return m;
}

double TrigMap::gamma_plus() const { return 1.0 / ((a + 1) * h); }

cdouble TrigMap::x(cdouble v) const {
  if (a_is_one()) {
    double gp = gamma_plus();
    return gp + (gp - gamma_minus) / std::cosh(v);
  }
  double C = 1.0 / ((1 - a * a) * h);
  cdouble cc = c();
  return C * ((1.0 - a) + 2.0 * cc / (std::cosh(v) - cc));
}

cdouble TrigMap::x_prime(cdouble v) const {
  if (a_is_one()) {
    double gp = gamma_plus();
    cdouble ch = std::cosh(v);
    return -(gp - gamma_minus) * std::sinh(v) / (ch * ch);
  }
  double C = 1.0 / ((1 - a * a) * h);
  cdouble cc = c();
  cdouble den = std::cosh(v) - cc;
  return -2.0 * C * cc * std::sinh(v) / (den * den);
}

cdouble TrigMap::v_of_x(cdouble xx) const {
  cdouble ch;
  if (a_is_one()) {
    double gp = gamma_plus();
    ch = (gp - gamma_minus) / (xx - gp);
  } else {
    double C = 1.0 / ((1 - a * a) * h);
    cdouble cc = c();
    ch = cc + 2.0 * cc * C / (xx - C * (1.0 - a));
  }
  return std::acosh(ch);
}

cdouble v_infinity(double a, double h, double gamma_minus) {
  if (a == 1.0) throw std::invalid_argument("a = 1 is served by the closed forms");
  double c = (1 - a) * (1 - (1 + a) * h * gamma_minus) /
             ((1 + a) * (1 + (1 - a) * h * gamma_minus));
  // cosh v_inf is real, so v_inf lies on [0,inf) u i[0,pi] u ([0,inf)+i pi).
  if (c >= 1.0) return cdouble(std::acosh(c), 0.0);
  if (c <= -1.0) return cdouble(std::acosh(-c), kPi);
  return cdouble(0.0, std::acos(c));
}

double gamma_minus_from_v_inf(double a, double h, cdouble v_inf) {
  double c = std::cosh(v_inf).real();
  double num = (1 - a) - c * (1 + a);
  double den = (1 - a * a) * (1 + c) * h;
  if (den == 0) throw std::domain_error("degenerate v_inf");
  return num / den;
}

// ---------------------------------------------------------------------------
// omega

cdouble OmegaFunction::operator()(cdouble v) const {
  return eval_offset(v - v_inf);
}

cdouble OmegaFunction::eval_offset(cdouble w) const {
  cdouble out = 0;
  for (int d = 0; d < 4; ++d) {
    if (c[static_cast<std::size_t>(d)] == 0.0) continue;
    out += c[static_cast<std::size_t>(d)] *
           (zeta(b, w, d) - zeta(b, -w - 2.0 * v_inf, d));
  }
  return out;
}

cdouble OmegaFunction::derivative(cdouble v) const {
  cdouble out = 0;
  for (int d = 0; d < 4; ++d) {
    if (c[static_cast<std::size_t>(d)] == 0.0) continue;
    out += c[static_cast<std::size_t>(d)] *
           (zeta(b, v - v_inf, d + 1) + zeta(b, -v - v_inf, d + 1));
  }
  return out;
}

cdouble OmegaFunction::at_ipi() const { return (*this)(cdouble(0.0, kPi)); }

cdouble OmegaFunction::kappa(double beta) const {
  // e^{-beta v} coefficient: zeta^{(d)}(v - v_inf) contributes
  // (-beta)^d e^{beta v_inf}, the mirror term beta^d e^{-beta v_inf}.
  cdouble out = 0;
  for (int d = 0; d < 4; ++d) {
    double bd = std::pow(beta, d);
    cdouble basis = d % 2 == 0 ? 2.0 * std::cosh(beta * v_inf)
                               : -2.0 * std::sinh(beta * v_inf);
    out += c[static_cast<std::size_t>(d)] * bd * basis;
  }
  return out;
}

EndpointConditions endpoint_conditions(const OmegaFunction& w) {
  EndpointConditions e;
  e.omega_ipi = std::abs(w.at_ipi());
  e.kappa_b = w.kappa(w.b).real();
  e.kappa_2mb = w.kappa(2 - w.b).real();
  e.kappa_2pb = w.kappa(2 + w.b).real();
  return e;
}

namespace {

struct CoeffBlock {
  cdouble A3, A2, B2, A1, B1, C0;
};

CoeffBlock coeff_block(double a, double n, cdouble v_inf) {
  cdouble sh = std::sinh(v_inf);
  cdouble cth = std::cosh(v_inf) / sh;
  cdouble is2 = 1.0 / (sh * sh);
  CoeffBlock cb;
  cb.A3 = 8.0 / 3.0 * cth * cth * cth;
  cb.A2 = 8.0 * cth * cth * (a + is2);
  cb.B2 = 4.0 * cth * cth * (1 - a * a);
  cb.A1 = 4.0 / 3.0 * cth *
          (6.0 * cth * cth * cth * cth + (6 * a - 8) * cth * cth +
           3.0 * (1 - a) * (1 - a));
  cb.B1 = 4.0 * cth * (1 - a * a) * (cth * cth - (1.0 - a));
  cb.C0 = 2.0 * std::pow(1 - a * a, 3) * (n - 2);
  return cb;
}

// e^{-beta v} coefficient carried by basis element d at this v_inf.
cdouble kappa_basis(cdouble v_inf, double beta, int d) {
  double bd = std::pow(beta, d);
  return d % 2 == 0 ? bd * 2.0 * std::cosh(beta * v_inf)
                    : -bd * 2.0 * std::sinh(beta * v_inf);
}

}  // namespace

OmegaFunction omega_build(double a, double n, double g, double h, double gamma_minus) {
  if (a == 1.0)
    throw std::invalid_argument("omega_build requires a != 1 (use omega_build_a1)");
  OmegaFunction w;
  w.b = b_of_n(n);
  w.n = n;
  w.v_inf = v_infinity(a, h, gamma_minus);
  CoeffBlock cb = coeff_block(a, n, w.v_inf);
  double G = g / (h * h * h);
  double H = 1.0 / (h * h);
  cdouble Z = (4.0 - n * n) * std::pow(1 - a * a, 3);
  w.c[3] = cb.A3 * G / Z;
  w.c[2] = (cb.A2 * G + cb.B2 * H) / Z;
  w.c[1] = (cb.A1 * G + cb.B1 * H) / Z;
  w.c[0] = cb.C0 / Z;
  return w;
}

OmegaFunction omega_build_a1(double n, double g, double h, double gamma_minus) {
  OmegaFunction w;
  w.b = b_of_n(n);
  w.n = n;
  w.v_inf = cdouble(0.0, kPi / 2);
  double gp = 1.0 / (2 * h);
  double delta = gp - gamma_minus;
  auto v0p = [&](cdouble x) { return x - g * x * x; };
  auto wpart = [&](cdouble x) {
    return (2.0 * v0p(x) - n * v0p(1.0 / h - x)) / (4.0 - n * n);
  };
  auto phi = [&](cdouble v) {
    cdouble ch = std::cosh(v);
    cdouble x = gp + delta / ch;
    cdouble xp = -delta * std::sinh(v) / (ch * ch);
    return xp * (-wpart(x) + 1.0 / x);
  };
  // Laurent coefficients phi_{-j} at i pi/2 by contour integration; the
  // nearest other singularities (zero of x, poles of sech) stay outside.
  const double r = 0.6;
  const int M = 512;
  std::array<cdouble, 5> lc{};  // lc[j] = phi_{-j}
  for (int m = 0; m < M; ++m) {
    double th = 2 * kPi * m / M;
    cdouble ww = r * std::exp(cdouble(0, th));
    cdouble val = phi(w.v_inf + ww) * (ww / static_cast<double>(M));
    cdouble wp = 1.0;
    for (int j = 1; j <= 4; ++j) {
      lc[static_cast<std::size_t>(j)] += val * wp;
      wp *= ww;
    }
  }
  // Matching with the overlapping mirror pole: the zeta combination carries
  // d! ((-1)^d + n/2) / w^{d+1} per unit coefficient.
  double fact = 1;
  for (int d = 0; d < 4; ++d) {
    if (d > 0) fact *= d;
    double sgn = d % 2 == 0 ? 1.0 : -1.0;
    w.c[static_cast<std::size_t>(d)] =
        lc[static_cast<std::size_t>(d + 1)] / (fact * (sgn + n / 2));
  }
  return w;
}

namespace {

CriticalSolution assemble_solution(double a, double n, double g, double h,
                                   cdouble v_inf, double gamma_minus,
                                   const OmegaFunction& w) {
  CriticalSolution s;
  s.a = a;
  s.n = n;
  s.b = w.b;
  s.g = g;
  s.h = h;
  s.v_inf = v_inf;
  s.gamma_minus = gamma_minus;
  if (a != 1.0) {
    CoeffBlock cb = coeff_block(a, n, v_inf);
    s.A3 = cb.A3;
    s.A2 = cb.A2;
    s.B2 = cb.B2;
    s.A1 = cb.A1;
    s.B1 = cb.B1;
    s.C0 = cb.C0;
  }
  s.omega = w;
  s.map = TrigMap::make(a, h, gamma_minus);
  s.kappa_b = w.kappa(w.b).real();
  s.kappa_2mb = w.kappa(2 - w.b).real();
  s.kappa_2pb = w.kappa(2 + w.b).real();
  double scale = std::abs(w.kappa(2 - w.b)) + std::abs(w.kappa(2 + w.b)) + 1e-30;
  s.phase = std::abs(s.kappa_2mb) < 1e-7 * scale ? Phase::dilute : Phase::dense;
  return s;
}

struct RawSolve {
  bool ok = false;
  double g = 0, h = 0, gamma_minus = 0;
  double kappa_2mb = 0;
  OmegaFunction omega;
};

// Linear solve for (g/h^3, 1/h^2); g may come out negative (used by the
// endpoint and threshold searches). Physicality is checked by the caller.
RawSolve solve_raw(double a, double n, cdouble v_inf) {
  RawSolve out;
  double b = b_of_n(n);
  CoeffBlock cb = coeff_block(a, n, v_inf);
  std::array<cdouble, 4> D{};
  for (int d = 0; d < 4; ++d) {
    D[static_cast<std::size_t>(d)] =
        zeta(b, cdouble(0, kPi) - v_inf, d) - zeta(b, cdouble(0, -kPi) - v_inf, d);
  }
  cdouble P1 = cb.A3 * D[3] + cb.A2 * D[2] + cb.A1 * D[1];
  cdouble Q1 = cb.B2 * D[2] + cb.B1 * D[1];
  cdouble R1 = cb.C0 * D[0];
  cdouble P2 = cb.A3 * kappa_basis(v_inf, b, 3) + cb.A2 * kappa_basis(v_inf, b, 2) +
               cb.A1 * kappa_basis(v_inf, b, 1);
  cdouble Q2 = cb.B2 * kappa_basis(v_inf, b, 2) + cb.B1 * kappa_basis(v_inf, b, 1);
  cdouble R2 = cb.C0 * kappa_basis(v_inf, b, 0);

  // Normalize each complex equation as a whole (rows that vanish
  // identically must stay negligible, not get amplified), then solve the
  // stacked 4x2 real system by normal equations.
  double s1 = std::abs(P1) + std::abs(Q1) + std::abs(R1);
  double s2 = std::abs(P2) + std::abs(Q2) + std::abs(R2);
  if (s1 == 0 || s2 == 0) return out;
  P1 /= s1; Q1 /= s1; R1 /= s1;
  P2 /= s2; Q2 /= s2; R2 /= s2;
  double rows[4][3] = {
      {P1.real(), Q1.real(), -R1.real()},
      {P1.imag(), Q1.imag(), -R1.imag()},
      {P2.real(), Q2.real(), -R2.real()},
      {P2.imag(), Q2.imag(), -R2.imag()},
  };
  double m11 = 0, m12 = 0, m22 = 0, b1 = 0, b2 = 0;
  for (auto& r : rows) {
    m11 += r[0] * r[0];
    m12 += r[0] * r[1];
    m22 += r[1] * r[1];
    b1 += r[0] * r[2];
    b2 += r[1] * r[2];
  }
  double det = m11 * m22 - m12 * m12;
  if (det == 0 || !std::isfinite(det)) return out;
  double G = (b1 * m22 - b2 * m12) / det;
  double H = (m11 * b2 - m12 * b1) / det;
  // consistency of the stacked system
  double resid = 0;
  for (auto& r : rows) resid = std::max(resid, std::abs(r[0] * G + r[1] * H - r[2]));
  if (resid > 1e-7 * (1 + std::abs(G) + std::abs(H))) return out;
  if (!(H > 0)) return out;

  out.h = 1.0 / std::sqrt(H);
  out.g = G * out.h * out.h * out.h;
  out.gamma_minus = gamma_minus_from_v_inf(a, out.h, v_inf);
  // one-cut geometry: |gamma_-| <= gamma_+ always (odd face weights are
  // present on the whole line); branches violating it are spurious roots of
  // the two conditions, not critical points.
  double gp = 1.0 / ((a + 1) * out.h);
  if (!(std::abs(out.gamma_minus) <= gp * (1 + 1e-9))) return out;
  OmegaFunction w;
  w.b = b;
  w.n = n;
  w.v_inf = v_inf;
  cdouble Z = (4.0 - n * n) * std::pow(1 - a * a, 3);
  w.c[3] = cb.A3 * G / Z;
  w.c[2] = (cb.A2 * G + cb.B2 * H) / Z;
  w.c[1] = (cb.A1 * G + cb.B1 * H) / Z;
  w.c[0] = cb.C0 / Z;
  out.omega = w;
  out.kappa_2mb = w.kappa(2 - b).real();
  out.ok = true;
  return out;
}

}  // namespace

CriticalSolution solve_critical_point(double a, double n, cdouble v_inf) {
  if (a == 1.0)
    throw std::invalid_argument("a = 1 is served by the closed-form line");
  RawSolve r = solve_raw(a, n, v_inf);
  if (!r.ok) throw std::domain_error("no solution at this v_inf (system degenerate)");
  if (!(r.g >= 0))
    throw std::domain_error("parameter out of physical range: negative g");
  return assemble_solution(a, n, r.g, r.h, v_inf, r.gamma_minus, r.omega);
}

// ---------------------------------------------------------------------------
// a = 1 closed forms

std::pair<double, double> critical_line_a1(double n, double rho) {
  double b = b_of_n(n);
  double sp = std::sqrt(2 + n), sm = std::sqrt(2 - n);
  double den = 2 * b * sp * rho - sm * (1 + (1 - b * b) / 2 * rho * rho);
  double goverh = (2 * b * sp * rho - 2 * sm) / den;
  double h2 = b * rho * rho / (48 * std::sqrt(4.0 - n * n)) *
              (b * sp * (6 + (1 - b * b) * rho * rho) - 4 * (1 - b * b) * sm * rho) /
              den;
  if (!(h2 > 0)) throw std::domain_error("rho outside the physical range");
  double h = std::sqrt(h2);
  double g = goverh * h;
  if (!(g >= 0)) throw std::domain_error("rho outside the physical range");
  return {g, h};
}

double a1_rho_at_g0(double n) {
  double b = b_of_n(n);
  return std::sqrt(2 - n) / (b * std::sqrt(2 + n));
}

std::pair<double, double> dilute_point_a1(double n) {
  double b = b_of_n(n);
  double ratio = 1 + std::sqrt((2 - n) / (6 + n));
  double h2 = (2 - b) * b / (12 * (1 - b) * (1 - b)) *
              (4 - std::sqrt((2 - n) * (6 + n))) /
              ((2 + n) * std::sqrt((2 - n) * (6 + n)));
  double h = std::sqrt(h2);
  return {ratio * h, h};
}

double a1_rho_dilute(double n) {
  double target = 1 + std::sqrt((2 - n) / (6 + n));
  double b = b_of_n(n);
  double sp = std::sqrt(2 + n), sm = std::sqrt(2 - n);
  auto ratio = [&](double rho) {
    double den = 2 * b * sp * rho - sm * (1 + (1 - b * b) / 2 * rho * rho);
    return (2 * b * sp * rho - 2 * sm) / den - target;
  };
  return detail::bisect(ratio, 1e-6, a1_rho_at_g0(n) - 1e-12);
}

CriticalSolution solution_a1(double n, double rho) {
  auto [g, h] = critical_line_a1(n, rho);
  double gamma_minus = (1 - rho) / (2 * h);
  OmegaFunction w = omega_build_a1(n, g, h, gamma_minus);
  return assemble_solution(1.0, n, g, h, cdouble(0, kPi / 2), gamma_minus, w);
}

// ---------------------------------------------------------------------------
// dilute point and threshold

namespace {

// kappa(2-b) = 0 along the theta parametrization v_inf = i theta, allowing
// negative g (needed beyond the threshold). Returns the solution or throws.
RawSolve dilute_raw(double a, double n) {
  const int M = a > 3 ? 4000 : 700;
  double lo_th = 0, hi_th = 0;
  bool have = false;
  RawSolve prev;
  double prev_th = 0;
  // Near a = 1 the physical window collapses onto theta = pi/2; refine there.
  std::vector<double> grid;
  for (int i = 1; i < M; ++i) grid.push_back(kPi * i / M);
  if (std::abs(a - 1) < 0.15) {
    double w = std::max(4.0 * std::abs(a - 1), 1e-6);
    for (int i = -400; i <= 400; ++i)
      grid.push_back(kPi / 2 + w * i / 400.0);
    std::sort(grid.begin(), grid.end());
  }
  for (double th : grid) {
    RawSolve r = solve_raw(a, n, cdouble(0, th));
    if (!r.ok) {
      prev = RawSolve{};
      continue;
    }
    if (prev.ok && (prev.kappa_2mb > 0) != (r.kappa_2mb > 0)) {
      lo_th = prev_th;
      hi_th = th;
      have = true;
      break;
    }
    prev = r;
    prev_th = th;
  }
  if (!have) throw std::domain_error("no dilute point found on the line");
  double flo = solve_raw(a, n, cdouble(0, lo_th)).kappa_2mb;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo_th + hi_th);
    RawSolve rm = solve_raw(a, n, cdouble(0, mid));
    if (!rm.ok) break;
    if ((rm.kappa_2mb > 0) == (flo > 0))
      lo_th = mid;
    else
      hi_th = mid;
    if (hi_th - lo_th < 1e-15) break;
  }
  return solve_raw(a, n, cdouble(0, 0.5 * (lo_th + hi_th)));
}

}  // namespace

CriticalSolution dilute_point(double a, double n) {
  if (std::abs(a - 1) < 1e-9) {
    CriticalSolution s = solution_a1(n, a1_rho_dilute(n));
    s.phase = Phase::dilute;
    return s;
  }
  RawSolve r = dilute_raw(a, n);
  if (!r.ok) throw std::domain_error("no dilute point found on the line");
  if (!(r.g >= 0))
    throw std::domain_error(
        "the non-generic critical line is absent at this a (a >= a_c)");
  CriticalSolution s =
      assemble_solution(a, n, r.g, r.h, r.omega.v_inf, r.gamma_minus, r.omega);
  s.phase = Phase::dilute;
  return s;
}

namespace {

// Whether the physical line still carries a dilute endpoint: a kappa(2-b)
// sign change bracketed by admissible points with g >= 0. Beyond a_c the
// sign change leaves the physical window.
bool dilute_exists(double a, double n) {
  RawSolve r;
  try {
    r = dilute_raw(a, n);
  } catch (const std::domain_error&) {
    return false;
  }
  return r.ok && r.g >= -1e-9;
}

}  // namespace

double a_c_threshold(double n) {
  double lo = 1.0 + 1e-6, hi = 2.0;
  while (dilute_exists(hi, n) && hi < 512) hi *= 1.5;
  if (hi >= 512) throw std::domain_error("a_c out of search range");
  while (!dilute_exists(lo, n)) lo *= 0.7;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (dilute_exists(mid, n))
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-6 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// n -> 0 closed forms

NZeroPoint nzero_from_cinf(double a, double c_inf) {
  NZeroPoint p;
  double goverh, h2;
  if (a == 1.0) {
    // scaled limit c_inf = (a-1) w with w the retained parameter
    double w = c_inf;
    double den = 2 + 4 * w + 3 * w * w;
    goverh = 4 * (w + 1) / den;
    h2 = -w * w * (2 + 4 * w + w * w) / (16 * den);
    p.sigma = 2 * (w + 1) * (w + 1) / den;
  } else {
    double c = c_inf;
    double den = 2 * (a - 1) * (a - 1) + 4 * a * (a - 1) * c + (2 * a * a + 1) * c * c;
    goverh = 2 * (a * a - 1) * (c + 1) * (a * c + a - 1) / den;
    h2 = -c * c / (4 * (a * a - 1) * (a * a - 1) * (c + 1) * (c + 1)) *
         (2 * (a - 1) * (a - 1) + 4 * a * (a - 1) * c + (2 * a * a - 1) * c * c) / den;
    p.sigma = 2 * (a * c + a - 1) * (a * c + a - 1) / den;
  }
  if (!(h2 > 0) || !(goverh >= 0))
    throw std::domain_error("c_inf outside the physical range");
  p.h = std::sqrt(h2);
  p.g = goverh * p.h;
  NZeroPoint q = nzero_from_sigma(a, p.sigma);
  p.equivalence_residual = std::abs(p.g - q.g) + std::abs(p.h - q.h);
  return p;
}

NZeroPoint nzero_from_sigma(double a, double sigma) {
  // The parametric curve exists for sigma in (0, 1/2); the physical line
  // stops at sigma* = (3-sqrt(3))/6, where the dilute endpoint sits.
  if (!(sigma > 0 && sigma < 0.5))
    throw std::domain_error("sigma outside (0, 1/2)");
  NZeroPoint p;
  p.sigma = sigma;
  double g2 = sigma * (1 - sigma) * (1 - 2 * sigma) / 2;
  p.g = std::sqrt(g2);
  double ratio = (1 + a) * (std::sqrt(2 * sigma * (1 - sigma)) + sigma);
  p.h = p.g / ratio;
  return p;
}

double nzero_sigma_star() { return (3 - std::sqrt(3.0)) / 6.0; }

std::pair<double, double> nzero_dilute(double a) {
  double g = 1.0 / (2 * std::pow(3.0, 0.75));
  double h = 1.0 / ((1 + a) * (std::pow(3.0, 0.75) + std::pow(3.0, 0.25)));
  return {g, h};
}

// ---------------------------------------------------------------------------
// density and resolvent on the line

std::pair<double, double> density_on_line(const CriticalSolution& sol, double v) {
  if (!(v > 0)) throw std::invalid_argument("need v > 0");
  cdouble vp = cdouble(v, kPi);
  cdouble xp = sol.map.x_prime(vp);
  if (std::abs(xp) < 1e-300) throw std::domain_error("v too large: x at gamma_+");
  cdouble num = sol.omega(vp) - sol.omega(cdouble(v, -kPi));
  cdouble rho = num / (2.0 * kI * kPi * xp);
  double x = sol.map.x(vp).real();
  return {x, rho.real()};
}

double density_mass(const CriticalSolution& sol, double v_max, int grid) {
  // integral of rho dx = integral of (omega(v+i pi)-omega(v-i pi))/(2 i pi) dv
  double mass = 0;
  double prev = 0;
  bool first = true;
  double dv = v_max / grid;
  for (int i = 0; i <= grid; ++i) {
    double v = std::max(1e-9, i * dv);
    cdouble num = sol.omega(cdouble(v, kPi)) - sol.omega(cdouble(v, -kPi));
    double f = (num / (2.0 * kI * kPi)).real();
    if (!first) mass += 0.5 * (prev + f) * dv;
    prev = f;
    first = false;
  }
  return mass;
}

cdouble resolvent_on_line(const CriticalSolution& sol, cdouble x) {
  double a = sol.a, h = sol.h, n = sol.n, g = sol.g;
  ringgen::Homography s{1.0, a * h, (a * a - 1) * h * h};
  auto v0p = [&](cdouble z) { return z - g * z * z; };
  cdouble sx = s(x);
  cdouble q = s.beta - s.delta * x;
  cdouble sp = (s.alpha * s.delta - s.beta * s.beta) / (q * q);
  cdouble spp = 2.0 * s.delta * (s.alpha * s.delta - s.beta * s.beta) / (q * q * q);
  cdouble wpart = (2.0 * v0p(x) + n * sp * v0p(sx)) / (4.0 - n * n);
  if (s.delta != 0) wpart -= n * spp / (2.0 * (n + 2) * sp);

  // Homogeneous part. Near v_inf (large |x|) the offset w = v - v_inf must
  // be obtained directly; acosh followed by subtraction would round it away
  // and spoil the pole cancellations against wpart.
  cdouble whom;
  if (a == 1.0) {
    double gp = sol.map.gamma_plus();
    double delta = gp - sol.gamma_minus;
    cdouble chi = delta / (x - gp);  // cosh v
    cdouble w = std::asinh(-kI * chi);
    cdouble xp = -delta * kI * std::cosh(w) / (chi * chi);
    whom = sol.omega.eval_offset(w) / xp;
  } else {
    double C = 1.0 / ((1 - a * a) * h);
    cdouble c = std::cosh(sol.v_inf);
    cdouble shv = std::sinh(sol.v_inf);
    cdouble eps = 2.0 * C * c / (x - C * (1.0 - a));  // cosh v - cosh v_inf
    if (std::abs(eps) < 0.5 * std::abs(shv)) {
      cdouble w = eps / shv;
      for (int i = 0; i < 4; ++i) {
        cdouble f = shv * std::sinh(w) + c * (std::cosh(w) - 1.0) - eps;
        cdouble fp = shv * std::cosh(w) + c * std::sinh(w);
        w -= f / fp;
      }
      cdouble xp = -2.0 * C * c * (shv * std::cosh(w) + c * std::sinh(w)) / (eps * eps);
      whom = sol.omega.eval_offset(w) / xp;
    } else {
      cdouble v = sol.map.v_of_x(x);
      whom = sol.omega(v) / sol.map.x_prime(v);
    }
  }
  return wpart + whom;
}

// ---------------------------------------------------------------------------
// line tracing

std::vector<CriticalSolution> trace_critical_line(double a, double n, int npoints) {
  if (npoints < 2) throw std::invalid_argument("need at least two points");
  std::vector<CriticalSolution> out;
  if (std::abs(a - 1) < 1e-9) {
    double rho0 = a1_rho_at_g0(n);
    double rho1 = a1_rho_dilute(n);
    for (int i = 0; i < npoints; ++i) {
      double rho = rho0 + (rho1 - rho0) * i / (npoints - 1);
      CriticalSolution s = solution_a1(n, rho);
      if (i == npoints - 1) s.phase = Phase::dilute;
      out.push_back(std::move(s));
    }
    return out;
  }

  // locate the dilute end, then walk toward g = 0
  RawSolve dil = dilute_raw(a, n);
  if (!dil.ok || !(dil.g >= 0))
    throw std::domain_error("the non-generic critical line is absent at this a");
  double th_dil = dil.omega.v_inf.imag();

  // find the g = 0 end by scanning away from the dilute point on the side
  // where kappa(2-b) > 0 (the physical, dense side)
  auto k2mb_at = [&](double th) {
    RawSolve r = solve_raw(a, n, cdouble(0, th));
    return r;
  };
  double step = 1e-4;
  double dir = 0;
  for (double trial : {th_dil + step, th_dil - step}) {
    RawSolve r = k2mb_at(trial);
    if (r.ok && r.kappa_2mb > 0) dir = trial > th_dil ? 1.0 : -1.0;
  }
  if (dir == 0) throw std::domain_error("could not orient the critical line");

  double th = th_dil, g_prev = dil.g;
  double th_g0 = th_dil;
  bool found = false;
  double span = dir > 0 ? kPi - th_dil : th_dil;
  for (int i = 1; i <= 4000; ++i) {
    double t = th_dil + dir * span * i / 4000.0;
    if (t <= 1e-6 || t >= kPi - 1e-6) break;
    RawSolve r = k2mb_at(t);
    if (!r.ok) break;
    if (r.g <= 0) {
      // bisect g = 0 between th and t
      double lo = th, hi = t;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        RawSolve rm = k2mb_at(mid);
        if (!rm.ok) break;
        if (rm.g > 0)
          lo = mid;
        else
          hi = mid;
      }
      th_g0 = 0.5 * (lo + hi);
      found = true;
      break;
    }
    th = t;
    g_prev = r.g;
  }
  (void)g_prev;
  if (!found) throw std::domain_error("could not locate the g = 0 end of the line");

  // emit npoints from the g = 0 end to the dilute endpoint, densified where
  // (g, h) moves fast
  std::vector<double> thetas;
  double t0 = th_g0, t1 = th_dil;
  int coarse = std::max(4 * npoints, 256);
  RawSolve prev = k2mb_at(t0 + (t1 - t0) * 1e-9);
  thetas.push_back(t0);
  for (int i = 1; i <= coarse; ++i) {
    double t = t0 + (t1 - t0) * i / coarse;
    thetas.push_back(t);
  }
  // arc-length resampling in the (g, h) plane
  std::vector<CriticalSolution> dense_pts;
  std::vector<double> arclen{0.0};
  for (double t : thetas) {
    RawSolve r = k2mb_at(t);
    if (!r.ok) continue;
    CriticalSolution s =
        assemble_solution(a, n, std::max(r.g, 0.0), r.h, r.omega.v_inf,
                          r.gamma_minus, r.omega);
    if (!dense_pts.empty()) {
      double dg = s.g - dense_pts.back().g, dh = s.h - dense_pts.back().h;
      arclen.push_back(arclen.back() + std::hypot(dg, dh));
    }
    dense_pts.push_back(std::move(s));
  }
  if (dense_pts.size() < 2) throw std::domain_error("critical line collapsed");
  double total = arclen.back();
  std::size_t j = 0;
  for (int i = 0; i < npoints; ++i) {
    double target = total * i / (npoints - 1);
    while (j + 1 < arclen.size() && arclen[j + 1] < target) ++j;
    out.push_back(dense_pts[std::min(j, dense_pts.size() - 1)]);
  }
  out.back() = assemble_solution(a, n, dil.g, dil.h, dil.omega.v_inf,
                                 dil.gamma_minus, dil.omega);
  out.back().phase = Phase::dilute;
  (void)prev;
  return out;
}

}  // namespace loopmaps::critline
