#include "loopmaps/twistline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "loopmaps/detail/quadrature.hpp"

namespace loopmaps::twistline {

namespace {
constexpr double kPi = std::numbers::pi;
const cdouble kI{0.0, 1.0};
}  // namespace

double twist_b(double n) {
  if (!(n >= 0 && n < 1)) throw std::invalid_argument("need 0 <= n < 1");
  return std::acos(n) / kPi;
}

cdouble x_of_v(double h2, cdouble v) {
  return (1.0 + 1.0 / std::cosh(v)) / (2 * h2);
}

cdouble x_prime_of_v(double h2, cdouble v) {
  cdouble ch = std::cosh(v);
  return -std::sinh(v) / (ch * ch) / (2 * h2);
}

critline::OmegaFunction omega_build(double n, double g, double h2) {
  critline::OmegaFunction w;
  w.b = twist_b(n);
  w.n = n;
  w.v_inf = cdouble(0, kPi / 2);
  double denom = 8 * h2 * h2 * (1 - n * n);
  w.c[3] = 0.0;
  w.c[2] = g / (2 * denom);
  w.c[1] = -kI * (g - 2 * h2) / denom;
  w.c[0] = -1.0 / (1 + n);
  return w;
}

double kappa(double n, double g, double h2, double beta) {
  double b = twist_b(n);
  (void)b;
  return ((g * beta * beta + 16 * h2 * h2 * (n - 1)) * std::cos(kPi * beta / 2) -
          2 * beta * (g - 2 * h2) * std::sin(kPi * beta / 2)) /
         (8 * h2 * h2 * (1 - n * n));
}

double parabola_g(double n, double h2) {
  double b = twist_b(n);
  return (4 * b * h2 - 16 * std::sqrt(1 - n * n) * h2 * h2) /
         (b * (2 - b * std::sqrt((1 + n) / (1 - n))));
}

double positivity_bound_g(double n, double h2) {
  double b = twist_b(n);
  return (4 * (2 - b) * h2 + 16 * std::sqrt(1 - n * n) * h2 * h2) /
         ((2 - b) * (2 + (2 - b) * std::sqrt((1 + n) / (1 - n))));
}

TwistSolution solution_at(double n, double h2) {
  if (!(h2 > 0)) throw std::invalid_argument("need h2 > 0");
  TwistSolution s;
  s.n = n;
  s.b = twist_b(n);
  s.h2 = h2;
  s.g = parabola_g(n, h2);
  if (!(s.g >= 0)) throw std::domain_error("h2 outside the physical line (g < 0)");
  s.gamma_bipartite = 1.0 / (2 * h2);
  s.kappa_b = kappa(n, s.g, h2, s.b);
  s.kappa_2mb = kappa(n, s.g, h2, 2 - s.b);
  if (s.kappa_2mb < -1e-12 * (1 + std::abs(s.kappa_2mb)))
    throw std::domain_error("h2 outside the physical line (kappa(2-b) < 0)");
  s.phase = std::abs(s.kappa_2mb) < 1e-9 ? Phase::dilute : Phase::dense;
  s.omega = omega_build(n, s.g, h2);
  return s;
}

TwistSolution dilute_point(double n) {
  double b = twist_b(n);
  double sm = std::sqrt(1 - n), sp = std::sqrt(1 + n);
  double gstar = b * (2 - b) / (4 * (sm + (1 - b) * sp) * (sm + (1 - b) * sp));
  double h2star = b * (2 - b) / (8 * (1 - n + (1 - b) * std::sqrt(1 - n * n)));
  TwistSolution s;
  s.n = n;
  s.b = b;
  s.g = gstar;
  s.h2 = h2star;
  s.gamma_bipartite = 1.0 / (2 * h2star);
  s.kappa_b = kappa(n, gstar, h2star, b);
  s.kappa_2mb = kappa(n, gstar, h2star, 2 - b);
  s.phase = Phase::dilute;
  s.omega = omega_build(n, gstar, h2star);
  return s;
}

double h2_at_g0(double n) {
  double b = twist_b(n);
  return b / (4 * std::sqrt(1 - n * n));
}

std::vector<TwistSolution> critical_line(double n, int npoints) {
  if (npoints < 2) throw std::invalid_argument("need at least two points");
  double h2_hi = h2_at_g0(n);
  TwistSolution dil = dilute_point(n);
  std::vector<TwistSolution> out;
  for (int i = 0; i < npoints - 1; ++i) {
    double h2 = h2_hi + (dil.h2 - h2_hi) * i / (npoints - 1);
    out.push_back(solution_at(n, h2));
  }
  out.push_back(dil);
  return out;
}

double w_part(double n, double g, double h2, double X) {
  return ((1 - g * X) - n * (1 - g * (1.0 / h2 - X))) / (2 * (1 - n * n));
}

namespace {

cdouble w_part_c(double n, double g, double h2, cdouble X) {
  return ((1.0 - g * X) - n * (1.0 - g * (1.0 / h2 - X))) / (2 * (1 - n * n));
}

}  // namespace

cdouble resolvent_bipartite(const TwistSolution& s, cdouble X) {
  // cosh v = 1/(2 h2 X - 1); near the pole of X at i pi/2 work with the
  // offset w via sinh w = -i cosh v, as in the bending case.
  cdouble chv = 1.0 / (2.0 * s.h2 * X - 1.0);
  cdouble w = std::asinh(-kI * chv);
  cdouble xp = -kI * std::cosh(w) / (chv * chv) / (2 * s.h2);
  return w_part_c(s.n, s.g, s.h2, X) + s.omega.eval_offset(w) / xp;
}

std::pair<double, double> density(const TwistSolution& s, double v) {
  if (!(v > 0)) throw std::invalid_argument("need v > 0");
  cdouble vp(v, kPi);
  cdouble X = x_of_v(s.h2, vp);
  cdouble num = s.omega(vp) - s.omega(cdouble(v, -kPi));
  cdouble rho = std::sqrt(X) / x_prime_of_v(s.h2, vp) * num / (2.0 * kI * kPi);
  return {std::sqrt(X).real(), rho.real()};
}

double density_mass(const TwistSolution& s, double v_max, int grid) {
  // rho(x) dx over both halves of the cut: with x = sqrt(X(v+i pi)),
  // rho dx = (omega(v+i pi) - omega(v-i pi))/(2 i pi) * dv/2 per half
  // (dX = 2 x dx), doubled for x < 0 by evenness.
  double mass = 0, prev = 0;
  bool first = true;
  double dv = v_max / grid;
  for (int i = 0; i <= grid; ++i) {
    double v = std::max(1e-9, i * dv);
    cdouble num = s.omega(cdouble(v, kPi)) - s.omega(cdouble(v, -kPi));
    double f = (num / (2.0 * kI * kPi)).real();
    if (!first) mass += 0.5 * (prev + f) * dv;
    prev = f;
    first = false;
  }
  return mass;
}

double functional_residual(const TwistSolution& s, double v) {
  if (!(v > 0)) throw std::invalid_argument("need v > 0");
  cdouble vp(v, kPi), vm(v, -kPi);
  double X = x_of_v(s.h2, vp).real();
  cdouble xp = x_prime_of_v(s.h2, vp);
  cdouble boundary = 2.0 * w_part_c(s.n, s.g, s.h2, X) +
                     (s.omega(vp) + s.omega(vm)) / xp;
  // s(X) = 1/h2 - X = X(v), a regular point outside the cut
  cdouble Xmir = x_of_v(s.h2, cdouble(v, 0));
  cdouble wmir = w_part_c(s.n, s.g, s.h2, Xmir) +
                 s.omega(cdouble(v, 0)) / x_prime_of_v(s.h2, cdouble(v, 0));
  cdouble lhs = boundary + 2.0 * s.n * wmir;
  cdouble rhs = 1.0 - s.g * X;
  return std::abs(lhs - rhs);
}

}  // namespace loopmaps::twistline
