#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "loopmaps/critline.hpp"

namespace loopmaps::twistline {

using cdouble = std::complex<double>;
using critline::Phase;

// Loops on quadrangulations forced to turn in every visited square; all
// contour lengths are even, so the model reduces to bipartite variables
// X = x^2 with the involution s(X) = 1/h2 - X and loop weight 2n. The
// convention b = arccos(n)/pi (not arccos(n/2)) is carried in the values
// produced here and never in shared state.
double twist_b(double n);

// X(v) = (1/(2 h2)) (1 + 1/cosh v): X(i pi) = 0, X(v) -> Gamma = 1/(2 h2).
cdouble x_of_v(double h2, cdouble v);
cdouble x_prime_of_v(double h2, cdouble v);

// Odd solution of omega(v+i pi) + omega(v-i pi) = 2n omega(v) with the
// Laurent data of the one-pole condition at i pi/2.
critline::OmegaFunction omega_build(double n, double g, double h2);

// kappa~(beta): coefficient of e^{-beta v}, closed form.
double kappa(double n, double g, double h2, double beta);

// Critical parabola g(h2) from kappa~(b) = 0, and the positivity bound on g
// from kappa~(2-b) >= 0.
double parabola_g(double n, double h2);
double positivity_bound_g(double n, double h2);

struct TwistSolution {
  double n = 0, b = 0;
  double g = 0, h2 = 0;
  double gamma_bipartite = 0;  // Gamma = 1/(2 h2), fixed point of s
  double kappa_b = 0, kappa_2mb = 0;
  Phase phase = Phase::dense;
  critline::OmegaFunction omega;
};

// Point of the critical line at the given h2 (g from the parabola).
TwistSolution solution_at(double n, double h2);
TwistSolution dilute_point(double n);
double h2_at_g0(double n);

// The line from its g = 0 end to the dilute endpoint; last entry dilute.
std::vector<TwistSolution> critical_line(double n, int npoints);

// W~_part(X) = ((1-gX) - n(1 - g(1/h2 - X))) / (2(1-n^2)).
double w_part(double n, double g, double h2, double X);

// Full bipartite resolvent W~ = W~_part + omega(v(X))/X'(v(X)) off [0, Gamma].
cdouble resolvent_bipartite(const TwistSolution& s, cdouble X);

// Density in the original variable: x = sqrt(X(v + i pi)), even in x,
// rho(0) need not vanish.
std::pair<double, double> density(const TwistSolution& s, double v);
double density_mass(const TwistSolution& s, double v_max = 18.0, int grid = 4000);

// Residual of W~(X+i0) + W~(X-i0) + 2n W~(1/h2 - X) - (1 - g X) at the cut
// point X = X(v + i pi), v > 0.
double functional_residual(const TwistSolution& s, double v);

}  // namespace loopmaps::twistline
