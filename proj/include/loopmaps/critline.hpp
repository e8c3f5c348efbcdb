#pragma once

#include <array>
#include <complex>
#include <vector>

#include "loopmaps/ringgen.hpp"

namespace loopmaps::critline {

using cdouble = std::complex<double>;

enum class Phase { dense, dilute };
const char* to_string(Phase p);

// zeta(v) = cosh(b v) coth(v) - sinh(b v): the building block of every
// solution of f(v+i pi) + f(v-i pi) = 2 cos(pi b) f(v). Simple poles at
// v = i k pi with residue cos(k pi b); asymptotically
// e^{-b v} + e^{-(2-b) v} + e^{-(2+b) v} + ... as Re v -> +infinity.
// Derivative orders d = 0..4 in closed form.
cdouble zeta(double b, cdouble v, int d = 0);

// Trigonometric uniformization of the spectral curve at a non-generic
// critical point of the bending model: x(i pi) = gamma_-, x(v) -> gamma_+ =
// 1/((a+1)h) as Re v -> infinity, x(v +- i pi) = s(x(v)), pole at +-v_inf.
struct TrigMap {
  double a = 0, h = 0, gamma_minus = 0;
  cdouble v_inf;

  static TrigMap make(double a, double h, double gamma_minus);

  double gamma_plus() const;
  cdouble x(cdouble v) const;
  cdouble x_prime(cdouble v) const;
  // Preimage with Im v in [0, pi] (principal branch).
  cdouble v_of_x(cdouble x) const;

 private:
  bool a_is_one() const;
  cdouble c() const;  // cosh v_inf for a != 1
};

// v_inf on the boundary path [0,inf) u i[0,pi] u ([0,inf)+i pi) with
// cosh v_inf = (1-a)(1-(1+a) h gamma_-) / ((1+a)(1+(1-a) h gamma_-)).
cdouble v_infinity(double a, double h, double gamma_minus);
double gamma_minus_from_v_inf(double a, double h, cdouble v_inf);

// omega(v) = x'(v) W_hom(x(v)): odd, satisfies
// omega(v+i pi) + omega(v-i pi) = n omega(v), built as a combination of
// translated zeta derivatives.
struct OmegaFunction {
  double b = 0;
  double n = 0;
  cdouble v_inf;
  std::array<cdouble, 4> c{};  // c[d] multiplies zeta^(d)(v-v_inf) - zeta^(d)(-v-v_inf)

  cdouble operator()(cdouble v) const;
  // Evaluation from the offset w = v - v_inf; keeps full precision when w
  // is far smaller than |v_inf| (resolvent evaluations at large |x|).
  cdouble eval_offset(cdouble w) const;
  cdouble derivative(cdouble v) const;
  cdouble at_ipi() const;
  // Coefficient of e^{-beta v} in the large-v expansion; real on the
  // physical branch (imaginary part is a numerical check).
  cdouble kappa(double beta) const;
};

struct EndpointConditions {
  double omega_ipi = 0;  // magnitude |omega(i pi)|
  double kappa_b = 0;
  double kappa_2mb = 0;
  double kappa_2pb = 0;
};

EndpointConditions endpoint_conditions(const OmegaFunction& w);

// Everything needed to evaluate omega, W and rho on the critical manifold.
struct CriticalSolution {
  double a = 0, n = 0, b = 0;
  double g = 0, h = 0;
  cdouble v_inf;
  double gamma_minus = 0;
  cdouble A3, A2, B2, A1, B1, C0;
  double kappa_b = 0, kappa_2mb = 0, kappa_2pb = 0;
  Phase phase = Phase::dense;
  OmegaFunction omega;
  TrigMap map;
};

// Builds omega from the explicit coefficient block (a != 1).
OmegaFunction omega_build(double a, double n, double g, double h, double gamma_minus);

// a = 1 construction: v_inf = i pi/2, coefficients matched to the Laurent
// expansion of x'(v)(-W_part(x(v)) + 1/x(v)) extracted by contour
// integration; the pole of zeta(v - i pi/2) at -i pi/2 overlaps the mirror
// term, which rescales the matching by ((-1)^d + n/2).
OmegaFunction omega_build_a1(double n, double g, double h, double gamma_minus);

// Solves the 2x2 linear system {omega(i pi) = 0, kappa(b) = 0} for
// (g/h^3, 1/h^2) at the given v_inf. Throws std::domain_error when the
// solution leaves the physical range (h^2 <= 0 or g < 0) or the stacked
// real system is inconsistent. Requires a != 1 and 0 <= n < 2.
CriticalSolution solve_critical_point(double a, double n, cdouble v_inf);

// Closed-form critical line at a = 1, parametrized by
// rho = 1 - 2 h gamma_- = 1 - gamma_-/gamma_+ >= 0.
std::pair<double, double> critical_line_a1(double n, double rho);
double a1_rho_at_g0(double n);
double a1_rho_dilute(double n);
std::pair<double, double> dilute_point_a1(double n);
CriticalSolution solution_a1(double n, double rho);

// Root-finds kappa(2-b) = 0 along the line. Throws when the line is absent
// (a >= a_c(n)). Dispatches to the a = 1 closed forms when |a-1| < 1e-9.
CriticalSolution dilute_point(double a, double n);

// Threshold value where the dilute g* reaches 0.
double a_c_threshold(double n);

// n -> 0 closed forms: the c_inf-parametrized line, the
// pure-triangulation sigma-parametrization, and their equivalence.
struct NZeroPoint {
  double g = 0, h = 0;
  double sigma = 0;
  double equivalence_residual = 0;
};
NZeroPoint nzero_from_cinf(double a, double c_inf);  // a = 1: c_inf is the scaled limit parameter
NZeroPoint nzero_from_sigma(double a, double sigma);
double nzero_sigma_star();
std::pair<double, double> nzero_dilute(double a);

// Spectral density along the cut, parametrized by v > 0:
// x = x(v + i pi), rho = (omega(v+i pi) - omega(v-i pi)) / (2 i pi x'(v+i pi)).
std::pair<double, double> density_on_line(const CriticalSolution& sol, double v);
double density_mass(const CriticalSolution& sol, double v_max = 18.0, int grid = 4000);

// Full resolvent W = W_part + omega(v(x))/x'(v(x)) off the cut.
cdouble resolvent_on_line(const CriticalSolution& sol, cdouble x);

// The non-generic critical line from its g = 0 end to the dilute endpoint;
// exactly npoints entries, the last one the dilute point.
std::vector<CriticalSolution> trace_critical_line(double a, double n, int npoints);

}  // namespace loopmaps::critline
