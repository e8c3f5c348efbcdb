#pragma once

#include <complex>
#include <vector>

#include "loopmaps/qseries.hpp"
#include "loopmaps/rational.hpp"

namespace loopmaps::ringgen {

// The five ring models. A ring is the annulus of faces visited by one loop;
// A_{k,k'} is the total weight of rings with outer length k and inner length
// k', rooted on the outer contour. Parameters are kept as exact rationals so
// the coefficient/brute-force comparison can be performed exactly; numeric
// consumers convert on the way out.
enum class FamilyTag { triangular, quadrangular, rigid, twisting, bending };

struct RingFamily {
  FamilyTag tag;
  Rational h{0};   // triangular / bending: weight per visited triangle
  Rational h1{0};  // quadrangular / rigid: squares crossed on opposite sides
  Rational h2{0};  // quadrangular / twisting: squares crossed on adjacent sides
  Rational a{0};   // bending: weight per equally-oriented pair of triangles

  static RingFamily triangular(Rational h);
  static RingFamily quadrangular(Rational h1, Rational h2);
  static RingFamily rigid(Rational h1);
  static RingFamily twisting(Rational h2);
  static RingFamily bending(Rational a, Rational h);
};

// Exact coefficient of x^k y^{k'} in the grand generating function A(x,y).
Rational ring_coeff(const RingFamily& f, int k, int kp);

// Same coefficient graded by face count: a polynomial in the size marker 't'
// where t^m collects the rings made of m faces.
qseries::TruncatedSeries ring_coeff_graded(const RingFamily& f, int k, int kp,
                                           int t_order);

// Independent oracle: explicit enumeration of rooted rings as face sequences
// read from the face carrying the root edge; the root multiplicity is the
// number of outer edges of that face. Bending adds a weight a per equal
// cyclically-adjacent pair. Throws when k + k' exceeds the bound.
Rational ring_bruteforce(const RingFamily& f, int k, int kp, int bound = 14);

// Dense numeric table A_{k,k'} for 1 <= k <= kmax, 0 <= k' <= kpmax.
std::vector<std::vector<double>> ring_matrix(const RingFamily& f, int kmax,
                                             int kpmax);

// Grand generating functions as exact bivariate series in (x, y).
qseries::TruncatedSeries grand_h(const RingFamily& f, int order);
qseries::TruncatedSeries grand_a(const RingFamily& f, int order);

// Homographic involution s(x) = (alpha - beta x) / (beta - delta x) with
// s(s(x)) = x; decreasing branch iff beta^2 - alpha*delta > 0.
struct Homography {
  double alpha = 0, beta = 0, delta = 0;

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  bool decreasing() const { return beta * beta - alpha * delta > 0; }
  bool has_pole() const { return delta != 0; }
  double pole() const;              // beta/delta
  double image_of_infinity() const; // s(infinity) = beta/delta as well
  // Fixed points (beta -+ sqrt(beta^2-alpha*delta))/delta, smaller magnitude
  // first; for delta == 0 the single fixed point alpha/(2 beta) is returned
  // twice.
  std::pair<double, double> fixed_points() const;
};

// One-pole families only. Triangular -> 1/h - x, Rigid -> 1/(h1 x),
// Bending -> (1 - a h x)/(a h + (1-a^2) h^2 x). Twisting answers with the
// involution acting on the bipartite variable X = x^2, s(X) = 1/h2 - X.
// Quadrangular with h1*h2 != 0 is not one-pole and is rejected.
Homography involution_of(const RingFamily& f);

struct ExponentiationCheck {
  double partial_sum = 0;  // sum_{k' <= K} A_{k,k'} y^{k'}
  double closed_form = 0;  // s(y)^{-k}
  double tail_bound = 0;   // certified geometric bound on the dropped tail
  double error = 0;        // |partial_sum - closed_form|
};

// Checks sum_{k'} A_{k,k'} y^{k'} = s(y)^{-k}. Requires |y| strictly inside
// the convergence disk. The tail bound is exact for non-negative weights:
// sum_{k'>K} A_{k,k'} y^{k'} <= (y/Y)^{K+1} s(Y)^{-k} for any y < Y < radius.
ExponentiationCheck exponentiation_check(const RingFamily& f, int k, double y,
                                         int K);

// Appendix-style classification of the relative position of the cut I and
// its image s(I): 1 (image right of I), 2 (left), 3 (pole of s inside I),
// signed by the monotonicity of s.
enum class ConfigurationCase {
  one_minus,
  two_minus,
  three_minus,
  one_plus,
  two_plus,
  three_plus
};

const char* to_string(ConfigurationCase c);

ConfigurationCase classify_configuration(const Homography& s, double gamma_minus,
                                         double gamma_plus);

}  // namespace loopmaps::ringgen
