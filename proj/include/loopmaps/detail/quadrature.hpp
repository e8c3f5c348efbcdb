#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace loopmaps::detail {

// Adaptive Gauss(7)-Kronrod(15) quadrature. Works for double or
// std::complex<double> integrands; the error estimate uses abs().
namespace gk {

inline constexpr double nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};

inline constexpr double wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace gk

template <typename F>
auto gk15(F&& f, double a, double b, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  using V = decltype(f(c));
  V resk = gk::wk[7] * f(c);
  V resg = gk::wg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    double dx = h * gk::nodes[i];
    V fsum = f(c - dx) + f(c + dx);
    resk += gk::wk[i] * fsum;
    if (i % 2 == 1) resg += gk::wg[i / 2] * fsum;
  }
  resk *= h;
  resg *= h;
  err = std::abs(resk - resg);
  return resk;
}

// Bisection-adaptive refinement to an absolute tolerance. Throws if the
// requested tolerance is unreachable within the depth limit.
template <typename F>
auto integrate(F&& f, double a, double b, double tol, int max_depth = 36) {
  using V = decltype(f(a));
  struct Seg {
    double a, b;
    int depth;
  };
  V total = V(0);
  double achieved = 0.0;
  std::vector<Seg> stack{{a, b, 0}};
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    double err = 0.0;
    V val = gk15(f, s.a, s.b, err);
    double local_tol = tol * (s.b - s.a) / (b - a);
    if (err <= local_tol || err <= 1e-17 * std::abs(val)) {
      total += val;
      achieved += err;
    } else if (s.depth >= max_depth) {
      total += val;
      achieved += err;
      if (achieved > 64 * tol)
        throw std::runtime_error("quadrature did not reach the requested tolerance");
    } else {
      double m = 0.5 * (s.a + s.b);
      stack.push_back({s.a, m, s.depth + 1});
      stack.push_back({m, s.b, s.depth + 1});
    }
  }
  return total;
}

// Same, but reports the achieved error estimate instead of throwing.
template <typename F>
auto integrate_reporting(F&& f, double a, double b, double tol, double& achieved,
                         int max_depth = 36) {
  using V = decltype(f(a));
  struct Seg {
    double a, b;
    int depth;
  };
  V total = V(0);
  achieved = 0.0;
  std::vector<Seg> stack{{a, b, 0}};
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    double err = 0.0;
    V val = gk15(f, s.a, s.b, err);
    double local_tol = tol * (s.b - s.a) / (b - a);
    if (err <= local_tol || err <= 1e-17 * std::abs(val) || s.depth >= max_depth) {
      total += val;
      achieved += err;
    } else {
      double m = 0.5 * (s.a + s.b);
      stack.push_back({s.a, m, s.depth + 1});
      stack.push_back({m, s.b, s.depth + 1});
    }
  }
  return total;
}

template <typename F>
double bisect(F&& f, double lo, double hi, int iters = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * (std::abs(lo) + std::abs(hi) + 1e-300)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace loopmaps::detail
