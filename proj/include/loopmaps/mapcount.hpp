#pragma once

#include <complex>
#include <vector>

#include "loopmaps/qseries.hpp"
#include "loopmaps/rational.hpp"

namespace loopmaps::mapcount {

// Face weights g_k, k = 1..D, for maps with controlled face degrees.
// Admissibility (finiteness of the pointed rooted generating function) is a
// runtime outcome of solve_rs, not a stored flag.
struct WeightProfile {
  std::vector<double> g;  // g[k-1] is the weight of an inner face of degree k

  explicit WeightProfile(std::vector<double> weights);
  int max_degree() const { return static_cast<int>(g.size()); }
  double weight(int k) const {
    return (k >= 1 && k <= max_degree()) ? g[static_cast<std::size_t>(k - 1)] : 0.0;
  }
  bool all_odd_vanish() const;
};

// Formal counterpart: each g_k is an exact series in the size marker 't'
// (optionally carrying further axes), with zero constant term so that the
// map enumeration is graded by total face weight.
struct FormalWeights {
  std::vector<qseries::TruncatedSeries> g;

  int max_degree() const { return static_cast<int>(g.size()); }
  const std::vector<qseries::Axis>& axes() const;
  // g_k = c_k t for a single degree k.
  static FormalWeights monomial(int k, const Rational& c, int t_order);
};

// Weighted Motzkin paths from (0,0) to (p,0): level steps S, up/down steps
// sqrt(R) each, so P_p = sum_i p!/(i!^2 (p-2i)!) R^i S^{p-2i}.
double motzkin_poly(int p, double R, double S);
Rational motzkin_poly(int p, const Rational& R, const Rational& S);
qseries::TruncatedSeries motzkin_poly(int p, const qseries::TruncatedSeries& R,
                                      const qseries::TruncatedSeries& S);

struct RSState {
  double u = 0;
  double R = 0;
  double S = 0;
  int iterations = 0;
  double residual = 0;
  // Generic-criticality diagnostics at this u: ill-conditioned Jacobian or a
  // blowing-up derivative of R; reported, never fatal.
  bool critical = false;
  double jacobian_condition = 0;
  double dR_du = 0;
};

// Solves S = sum_k g_k P_{k-1}(R,S), R = u - S^2/2 + (1/2) sum_k g_k P_k(R,S)
// by damped Picard iteration followed by a Newton polish. Throws
// std::domain_error("inadmissible weights...") when the iteration diverges.
RSState solve_rs(const WeightProfile& w, double u);

struct FormalRS {
  qseries::TruncatedSeries R, S;  // axes: weight axes + ('u', u_order)
};

// Exact order-by-order solution in the size marker; every order of (R, S)
// depends only on strictly lower orders because each face weight carries at
// least one power of t.
FormalRS solve_rs_formal(const FormalWeights& w, int u_order);
int default_u_order(const FormalWeights& w);

enum class DiskMethod { rs_integration, tutte };

// Disk generating function F_p as an exact series in the size marker.
// rs_integration: F_p = int_0^1 P_p(R[u],S[u]) du, integrating monomials
// u^m term by term as 1/(m+1). tutte: the rooted-map recursion
// F_m = sum F_k F_{m-2-k} + sum_k g_k F_{m+k-2}, ordered by face count.
qseries::TruncatedSeries disk_series(const FormalWeights& w, int p, DiskMethod method);

// Numeric F_p = int_0^1 P_p(R[u],S[u]) du.
double disk_value(const WeightProfile& w, int p, double tol = 1e-10);

struct Cut {
  double gamma_minus = 0;
  double gamma_plus = 0;
};

Cut cut_endpoints(const WeightProfile& w);

// gamma_-(u) = S[u] - 2 sqrt(R[u]), gamma_+(u) = S[u] + 2 sqrt(R[u]).
double cut_plus_at(const WeightProfile& w, double u);
double cut_minus_at(const WeightProfile& w, double u);

// Inverse of the monotone endpoint maps: u(x) with gamma_+(u) = x for
// x >= 0 and gamma_-(u) = x for x < 0; requires x inside the cut.
double u_of_x(const WeightProfile& w, double x);

// Resolvent W(x) = int_0^1 du / sqrt((x - gamma_+(u))(x - gamma_-(u))),
// analytic off the cut; per-factor principal square roots give the branch
// with W(x) ~ 1/x at infinity.
std::complex<double> resolvent(const WeightProfile& w, std::complex<double> x,
                               double tol = 1e-10);

// Spectral density on the open cut.
double density(const WeightProfile& w, double x, double tol = 1e-10);

// W(x+i0) + W(x-i0) for x strictly inside the cut.
double boundary_sum(const WeightProfile& w, double x, double tol = 1e-10);

// V'(x) = x - sum_k g_k x^{k-1}.
double potential_derivative(const WeightProfile& w, double x);

struct ResolventPoint {
  std::complex<double> W;
  double rho = 0;                 // set when x is real and inside the open cut
  bool inside_cut = false;
  double functional_residual = 0; // |W(x+i0)+W(x-i0) - V'(x)| inside the cut
};

ResolventPoint resolvent_and_density(const WeightProfile& w, std::complex<double> x,
                                     double tol = 1e-10);

struct RSDerivatives {
  double dS = 0;
  double dT = 0;  // T = sqrt(R)
  double dR = 0;
  double L0 = 0;
  double L1 = 0;
  // |(2 dT)^2 - dS^2 - dS/(T L1)|; meaningful when some odd weight is nonzero.
  double identity_residual = 0;
};

// L0, L1 by quadrature of U'(S + 2T cos(phi)) over [0, pi], then the 2x2
// linear system for (dS, dT). Throws on a singular system (criticality).
RSDerivatives rs_derivatives(const WeightProfile& w, double u, double tol = 1e-11);

}  // namespace loopmaps::mapcount
