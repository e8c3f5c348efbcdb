#include <doctest.h>

#include <cmath>
#include <random>

#include "loopmaps/mapcount.hpp"
#include "loopmaps/ringgen.hpp"
#include "loopmaps/twistline.hpp"

using namespace loopmaps;
using namespace loopmaps::twistline;

namespace {

constexpr double kPi = std::numbers::pi;
const cdouble kI{0.0, 1.0};

double fitted_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(t.size());
  for (int i = 0; i < n; ++i) {
    double X = std::log(std::abs(t[static_cast<std::size_t>(i)]));
    double Y = std::log(std::abs(y[static_cast<std::size_t>(i)]));
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("bipartite map X(v): endpoints and involution lift") {
  double h2 = 0.05;
  // X(i pi) = 0
  CHECK(std::abs(x_of_v(h2, cdouble(0, kPi))) < 1e-14);
  // X -> Gamma = 1/(2 h2)
  CHECK(x_of_v(h2, 40.0).real() == doctest::Approx(10.0).epsilon(1e-10));
  // X(v + i pi) = 1/h2 - X(v)
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> re(0.2, 2.0), im(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    cdouble v(re(rng), im(rng));
    cdouble lhs = x_of_v(h2, v + cdouble(0, kPi));
    cdouble rhs = 1.0 / h2 - x_of_v(h2, v);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("omega: oddness, twisted shift identity, Laurent data") {
  double n = std::cos(0.3 * kPi);  // b = 0.3 in the twist convention
  double h2 = 0.075, g = parabola_g(n, h2);
  critline::OmegaFunction w = omega_build(n, g, h2);
  CHECK(w.b == doctest::Approx(0.3).epsilon(1e-14));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> re(0.2, 2.0), im(-0.8, 0.8);
  for (int i = 0; i < 25; ++i) {
    cdouble v(re(rng), im(rng));
    CHECK(std::abs(w(-v) + w(v)) < 1e-12 * (1 + std::abs(w(v))));
    cdouble shift = w(v + cdouble(0, kPi)) + w(v - cdouble(0, kPi)) - 2 * n * w(v);
    CHECK(std::abs(shift) < 1e-10 * (1 + std::abs(w(v))));
  }

  // Laurent coefficients at i pi/2 by contour extraction:
  // phi_{-3} = g/(8 h2^2 (1-n)), phi_{-2} = i (g-2h2)/(8 h2^2 (1+n)),
  // phi_{-1} = -1.
  auto contour = [&](int j) {
    const int M = 512;
    const double r = 0.5;
    cdouble acc = 0;
    for (int q = 0; q < M; ++q) {
      double th = 2 * kPi * q / M;
      cdouble ww = r * std::exp(cdouble(0, th));
      acc += w(cdouble(0, kPi / 2) + ww) * std::pow(ww, j - 1) * ww /
             static_cast<double>(M);
    }
    return acc;
  };
  double den = 8 * h2 * h2;
  CHECK(std::abs(contour(3) - g / (den * (1 - n))) < 1e-8);
  CHECK(std::abs(contour(2) - kI * (g - 2 * h2) / (den * (1 + n))) < 1e-8);
  CHECK(std::abs(contour(1) - (-1.0)) < 1e-8);

  // independent construction from the one-pole condition function:
  // X'(v)(-W_part(X(v)) + 1/X(v)), matched with the mirror-pole factor
  // ((-1)^d + n).
  auto phi = [&](cdouble v) {
    cdouble X = x_of_v(h2, v);
    cdouble wpart = ((1.0 - g * X) - n * (1.0 - g * (1.0 / h2 - X))) / (2 * (1 - n * n));
    return x_prime_of_v(h2, v) * (-wpart + 1.0 / X);
  };
  auto contour_phi = [&](int j) {
    const int M = 512;
    const double r = 0.5;
    cdouble acc = 0;
    for (int q = 0; q < M; ++q) {
      double th = 2 * kPi * q / M;
      cdouble ww = r * std::exp(cdouble(0, th));
      acc += phi(cdouble(0, kPi / 2) + ww) * std::pow(ww, j - 1) * ww /
             static_cast<double>(M);
    }
    return acc;
  };
  double fact = 1;
  for (int d = 0; d <= 2; ++d) {
    if (d > 0) fact *= d;
    double sgn = d % 2 == 0 ? 1.0 : -1.0;
    cdouble cd = contour_phi(d + 1) / (fact * (sgn + n));
    CHECK(std::abs(cd - w.c[static_cast<std::size_t>(d)]) <
          1e-8 * (1 + std::abs(w.c[static_cast<std::size_t>(d)])));
  }
}

TEST_CASE("kappa: defining condition, closed form, asymptotic fit") {
  double n = std::cos(0.3 * kPi), b = 0.3;
  double h2 = 0.075, g = parabola_g(n, h2);
  CHECK(std::abs(kappa(n, g, h2, b)) < 1e-12);

  // closed form equals the coefficient extracted from the omega combination
  critline::OmegaFunction w = omega_build(n, g, h2);
  for (double beta : {b, 2 - b}) {
    CHECK(w.kappa(beta).real() == doctest::Approx(kappa(n, g, h2, beta)).epsilon(1e-10));
    CHECK(std::abs(w.kappa(beta).imag()) < 1e-12);
  }

  // decay-rate fit of omega recovers kappa(2-b) (kappa(b) = 0 on the line);
  // after subtracting that term the remainder decays at rate 2+b with
  // amplitude kappa(2+b).
  std::vector<double> ts, ys, rem;
  double k2mb = kappa(n, g, h2, 2 - b);
  for (double v : {10.0, 12.0, 14.0}) {
    ts.push_back(std::exp(-v));
    double om = w(v).real();
    ys.push_back(om);
    rem.push_back(om - k2mb * std::exp(-(2 - b) * v));
  }
  CHECK(fitted_slope(ts, ys) == doctest::Approx(2 - b).epsilon(1e-3));
  double amp = rem[1] / std::exp(-(2 + b) * 12.0);
  CHECK(amp == doctest::Approx(w.kappa(2 + b).real()).epsilon(1e-3));
  CHECK(fitted_slope(ts, rem) == doctest::Approx(2 + b).epsilon(1e-2));
}

TEST_CASE("critical parabola: n -> 0 form and dilute endpoint") {
  // at n = 0 the parabola is g = (8/3)(h2 - 8 h2^2)
  for (double h2 : {0.02, 0.04, 0.0625, 0.09}) {
    CHECK(parabola_g(0.0, h2) ==
          doctest::Approx(8.0 / 3.0 * (h2 - 8 * h2 * h2)).epsilon(1e-12));
  }
  TwistSolution d0 = dilute_point(0.0);
  CHECK(d0.g == doctest::Approx(1.0 / 12).epsilon(1e-10));
  CHECK(d0.h2 == doctest::Approx(1.0 / 16).epsilon(1e-10));

  double n = std::cos(0.3 * kPi);
  TwistSolution d = dilute_point(n);
  CHECK(std::abs(kappa(n, d.g, d.h2, d.b)) < 1e-12);
  CHECK(std::abs(d.kappa_2mb) < 1e-10);
  CHECK(d.gamma_bipartite == doctest::Approx(1.0 / (2 * d.h2)).epsilon(1e-15));

  // the n = 0 line agrees with the plain-map derivation: 4R = 1/(2 h2)
  // with R = 1 + 3 g R^2
  for (double h2 : {0.07, 0.08, 0.1, 0.12}) {
    double g = parabola_g(0.0, h2);
    double R = 1.0 / (8 * h2);
    CHECK(std::abs(R - 1 - 3 * g * R * R) < 1e-12);
    mapcount::WeightProfile w({0, 0, 0, g});
    mapcount::RSState st = mapcount::solve_rs(w, 1.0);
    CHECK(st.R == doctest::Approx(R).epsilon(1e-8));
    CHECK(4 * st.R == doctest::Approx(1.0 / (2 * h2)).epsilon(1e-8));
  }
}

TEST_CASE("critical line: positivity window and endpoint ordering") {
  double n = std::cos(0.3 * kPi);
  auto line = critical_line(n, 50);
  CHECK(line.front().g < 1e-10);
  CHECK(line.back().phase == Phase::dilute);
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    CHECK(line[i].phase == Phase::dense);
    CHECK(line[i].kappa_2mb > 0);
    CHECK(line[i].g <= positivity_bound_g(n, line[i].h2) + 1e-12);
  }
}

TEST_CASE("particular solution and full functional equation") {
  double n = std::cos(0.3 * kPi);
  double h2 = 0.075, g = parabola_g(n, h2);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> xs(-8.0, 12.0);
  for (int i = 0; i < 20; ++i) {
    double X = xs(rng);
    double lhs = 2 * w_part(n, g, h2, X) + 2 * n * w_part(n, g, h2, 1.0 / h2 - X);
    CHECK(lhs == doctest::Approx(1 - g * X).epsilon(1e-12));
  }

  TwistSolution s = solution_at(n, h2);
  for (double v : {0.3, 0.8, 1.5, 2.5, 4.0}) {
    CHECK(functional_residual(s, v) < 1e-8);
  }
}

TEST_CASE("resolvent: decay at infinity and fixed-point geometry") {
  double n = std::cos(0.3 * kPi);
  TwistSolution s = solution_at(n, 0.075);
  double G = s.gamma_bipartite;
  cdouble e1 = 100 * G * resolvent_bipartite(s, 100 * G) - 1.0;
  cdouble e2 = 200 * G * resolvent_bipartite(s, 200 * G) - 1.0;
  CHECK(std::abs(e1) < 5e-3);
  CHECK(std::abs(e2 / e1 - 0.5) < 0.03);
}

TEST_CASE("density: evenness convention, endpoint vanishing, mass, rho(0)") {
  double n = std::cos(0.3 * kPi);
  TwistSolution dense = solution_at(n, 0.075);
  TwistSolution dil = dilute_point(n);

  for (const TwistSolution* sp : {&dense, &dil}) {
    const TwistSolution& s = *sp;
    for (double v : {0.4, 1.0, 2.0, 4.0}) {
      auto [x, rho] = density(s, v);
      CHECK(rho > -1e-12);
      CHECK(x >= 0);
      CHECK(x <= std::sqrt(1.0 / (2 * s.h2)) * (1 + 1e-12));
    }
    auto [x_hi, rho_hi] = density(s, 15.0);
    CHECK(rho_hi < 1e-3);
    // rho(0) does not vanish
    auto [x_lo, rho_lo] = density(s, 1e-5);
    CHECK(x_lo < 1e-3);
    CHECK(rho_lo > 1e-3);
    CHECK(density_mass(s) == doctest::Approx(1.0).epsilon(1e-4));
  }

  // dilute vanishes faster at the edge: exponents 1 -+ b in x units
  auto edge_exponent = [&](const TwistSolution& s) {
    std::vector<double> dist, val;
    double edge = std::sqrt(1.0 / (2 * s.h2));
    for (double v : {6.0, 6.5, 7.0, 7.5, 8.0}) {
      auto [x, rho] = density(s, v);
      dist.push_back(edge - x);
      val.push_back(rho);
    }
    return fitted_slope(dist, val);
  };
  CHECK(edge_exponent(dense) == doctest::Approx(1 - 0.3).epsilon(0.05 / 0.7));
  CHECK(edge_exponent(dil) == doctest::Approx(1 + 0.3).epsilon(0.05 / 1.3));
}

TEST_CASE("bipartite ring function matches the full twisting rings") {
  // A~(X,Y) = A^twist(sqrt X, sqrt Y): the reindexed coefficients A_{2k,2k'}
  // must reproduce the one-pole closed form X/(1/h2 - Y - X), and all odd
  // entries of the full function must vanish.
  auto fam = ringgen::RingFamily::twisting(Rational(1, 12));
  qseries::TruncatedSeries a = ringgen::grand_a(fam, 16);
  for (int k = 1; k <= 16; ++k)
    for (int kp = 0; kp <= 16; ++kp)
      if (k % 2 != 0 || kp % 2 != 0) CHECK(a.coeff({k, kp}) == Rational(0));

  double h2 = 1.0 / 12, X = 1.4, Y = 2.1;  // inside the convergence region
  double series = 0;
  for (int k = 8; k >= 1; --k)
    for (int kp = 8; kp >= 0; --kp)
      series += to_double(a.coeff_or_zero({2 * k, 2 * kp})) * std::pow(X, k) * std::pow(Y, kp);
  double closed = 2.0 * X / (1.0 / h2 - Y - X);
  CHECK(series == doctest::Approx(closed).epsilon(1e-6));

  // and the exponentiation identity in the bipartite variable
  auto chk = ringgen::exponentiation_check(fam, 2, 2.0, 64);
  CHECK(chk.error < 1e-10);
}
