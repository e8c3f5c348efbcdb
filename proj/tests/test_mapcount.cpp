#include <doctest.h>

#include <cmath>
#include <random>

#include "loopmaps/detail/quadrature.hpp"
#include "loopmaps/mapcount.hpp"

using namespace loopmaps;
using namespace loopmaps::mapcount;
using qseries::Axis;
using qseries::TruncatedSeries;

namespace {

Rational catalan(int m) {
  return Rational(binomial(static_cast<unsigned>(2 * m), static_cast<unsigned>(m)),
                  BigInt(m + 1));
}

}  // namespace

TEST_CASE("motzkin polynomials") {
  CHECK(motzkin_poly(0, Rational(3), Rational(5)) == Rational(1));
  // P_2 = S^2 + 2R
  CHECK(motzkin_poly(2, Rational(3), Rational(5)) == Rational(31));
  // P_3 = S^3 + 6RS
  CHECK(motzkin_poly(3, Rational(3), Rational(5)) == Rational(125 + 90));
  // P_4(R, 0) = 6 R^2
  CHECK(motzkin_poly(4, Rational(3), Rational(0)) == Rational(54));
  CHECK(motzkin_poly(4, 3.0, 0.0) == doctest::Approx(54.0));
  CHECK(motzkin_poly(3, 2.25, 1.5) == doctest::Approx(1.5 * 1.5 * 1.5 + 6 * 2.25 * 1.5));
}

TEST_CASE("solve_rs basics") {
  WeightProfile empty({});
  RSState st = solve_rs(empty, 1.0);
  CHECK(st.R == doctest::Approx(1.0));
  CHECK(st.S == doctest::Approx(0.0));

  // quartic weight 1/12: double root R = 2 (relaxed tolerance), S = 0
  WeightProfile quartic({0, 0, 0, 1.0 / 12.0});
  RSState q = solve_rs(quartic, 1.0);
  CHECK(q.S == doctest::Approx(0.0));
  CHECK(q.R == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(q.critical);

  Cut c = cut_endpoints(quartic);
  CHECK(c.gamma_plus == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(c.gamma_minus == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-6));

  // supercritical weights must be diagnosed, not silently mangled
  WeightProfile bad({0, 0, 0, 0.5});
  CHECK_THROWS_AS(solve_rs(bad, 1.0), std::domain_error);
}

TEST_CASE("pure triangulation criticality flag") {
  double gc = 1.0 / (2.0 * std::pow(3.0, 0.75));
  WeightProfile w({0, 0, gc});
  RSState st = solve_rs(w, 1.0);
  CHECK(st.critical);
  WeightProfile sub({0, 0, 0.9 * gc});
  CHECK_FALSE(solve_rs(sub, 1.0).critical);
}

TEST_CASE("formal solve: cubic weight series") {
  // S = 2g + O(g^3), R = 1 + 4g^2 + O(g^4) for g3 = g.
  FormalWeights w = FormalWeights::monomial(3, Rational(1), 4);
  FormalRS rs = solve_rs_formal(w, default_u_order(w));
  // evaluate at u = 1: sum over u powers
  auto at_u1 = [](const TruncatedSeries& s, int t_pow) {
    Rational acc = 0;
    s.for_each([&](const std::vector<int>& e, const Rational& c) {
      if (e[0] == t_pow) acc += c;
    });
    return acc;
  };
  CHECK(at_u1(rs.S, 0) == Rational(0));
  CHECK(at_u1(rs.S, 1) == Rational(2));
  CHECK(at_u1(rs.S, 2) == Rational(0));
  CHECK(at_u1(rs.R, 0) == Rational(1));
  CHECK(at_u1(rs.R, 1) == Rational(0));
  CHECK(at_u1(rs.R, 2) == Rational(4));
}

TEST_CASE("disk series: trees give Catalan numbers") {
  FormalWeights none = FormalWeights::monomial(1, Rational(0), 0);
  for (int m = 0; m <= 10; ++m) {
    TruncatedSeries f = disk_series(none, 2 * m, DiskMethod::rs_integration);
    CHECK(f.coeff({0}) == catalan(m));
    TruncatedSeries f2 = disk_series(none, 2 * m, DiskMethod::tutte);
    CHECK(f2.coeff({0}) == catalan(m));
    TruncatedSeries fo = disk_series(none, 2 * m + 1, DiskMethod::rs_integration);
    CHECK(fo.is_zero());
  }
}

TEST_CASE("disk series cross-oracle: both methods agree exactly") {
  const int order = 6;
  FormalWeights g3 = FormalWeights::monomial(3, Rational(1), order);
  FormalWeights g4 = FormalWeights::monomial(4, Rational(1), order);
  for (int p = 0; p <= 8; ++p) {
    CHECK(disk_series(g3, p, DiskMethod::rs_integration) ==
          disk_series(g3, p, DiskMethod::tutte));
    CHECK(disk_series(g4, p, DiskMethod::rs_integration) ==
          disk_series(g4, p, DiskMethod::tutte));
  }
}

TEST_CASE("disk series: unit weights count maps (non-negative integers)") {
  FormalWeights g3 = FormalWeights::monomial(3, Rational(1), 6);
  // One-triangle disks with a 3-boundary: the plain triangle plus the three
  // rootings of a loop-vertex with one pendant inside and one outside.
  TruncatedSeries f3 = disk_series(g3, 3, DiskMethod::tutte);
  CHECK(f3.coeff({1}) == Rational(4));
  CHECK(disk_series(g3, 1, DiskMethod::tutte).coeff({1}) == Rational(1));
  for (int p = 0; p <= 6; ++p) {
    TruncatedSeries f = disk_series(g3, p, DiskMethod::rs_integration);
    f.for_each([&](const std::vector<int>&, const Rational& c) {
      CHECK(denominator(c) == 1);
      CHECK(c >= 0);
    });
  }
}

TEST_CASE("resolvent and density closed forms for trees") {
  WeightProfile empty({});
  // W(3) = (3 - sqrt(5))/2
  auto w3 = resolvent(empty, 3.0);
  CHECK(w3.real() == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-9));
  CHECK(std::abs(w3.imag()) < 1e-12);
  // rho(x) = sqrt(4-x^2)/(2 pi)
  CHECK(density(empty, 0.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-8));
  CHECK(density(empty, 1.0) ==
        doctest::Approx(std::sqrt(3.0) / (2 * std::numbers::pi)).epsilon(1e-8));
  // x W(x) -> 1, with the 1/x^2 correction F_2/x^2 = 1/62500 visible
  auto wbig = resolvent(empty, 250.0);
  CHECK(std::abs(250.0 * wbig.real() - 1.0) < 2e-5);
  CHECK(std::abs(250.0 * wbig.real() - 1.0 - 1.0 / 62500.0) < 1e-8);
}

TEST_CASE("functional residual vanishes inside the cut") {
  WeightProfile w({0, 0.04, 0.03, 0.002});
  Cut c = cut_endpoints(w);
  for (double f : {0.15, 0.4, 0.62, 0.85}) {
    double x = c.gamma_minus + f * (c.gamma_plus - c.gamma_minus);
    auto pt = resolvent_and_density(w, x);
    CHECK(pt.inside_cut);
    CHECK(pt.functional_residual < 1e-6);
    CHECK(pt.rho > 0);
  }
}

TEST_CASE("density integrates to one and vanishes at the edges") {
  WeightProfile w({0.01, 0.05, 0.04});
  Cut c = cut_endpoints(w);
  double mid = 0.5 * (c.gamma_plus + c.gamma_minus);
  double half = 0.5 * (c.gamma_plus - c.gamma_minus);
  // x = mid + half*cos(phi) turns the edge vanishing into a smooth integrand.
  double mass = loopmaps::detail::integrate(
      [&](double phi) {
        double x = mid + half * std::cos(phi);
        return density(w, x, 1e-9) * half * std::sin(phi);
      },
      0.0, std::numbers::pi, 1e-8);
  CHECK(mass == doctest::Approx(1.0).epsilon(2e-6));

  double rho3 = density(w, c.gamma_plus - 1e-3);
  double rho4 = density(w, c.gamma_plus - 1e-4);
  CHECK(rho4 < rho3);
  double lm3 = density(w, c.gamma_minus + 1e-3);
  double lm4 = density(w, c.gamma_minus + 1e-4);
  CHECK(lm4 < lm3);
}

TEST_CASE("endpoint maps are monotone") {
  WeightProfile w({0.0, 0.05, 0.06});
  double prev_p = 0.0, prev_m = 0.0;
  for (int i = 1; i <= 50; ++i) {
    double u = i / 50.0;
    double gp = cut_plus_at(w, u);
    double gm = cut_minus_at(w, u);
    CHECK(gp > prev_p);
    CHECK(gm < prev_m);
    prev_p = gp;
    prev_m = gm;
  }
}

TEST_CASE("cut asymmetry tracks odd weights") {
  WeightProfile even({0, 0.05, 0, 0.002});
  Cut ce = cut_endpoints(even);
  CHECK(ce.gamma_plus == doctest::Approx(-ce.gamma_minus).epsilon(1e-12));
  WeightProfile odd({0, 0.05, 0.03});
  Cut co = cut_endpoints(odd);
  CHECK(co.gamma_plus > -co.gamma_minus);
}

TEST_CASE("rs derivatives and the edge-monotonicity identity") {
  // all weights zero at u = 1/4: dS = 0, dT = 1
  WeightProfile empty({});
  RSDerivatives d0 = rs_derivatives(empty, 0.25);
  CHECK(d0.dS == doctest::Approx(0.0));
  CHECK(d0.dT == doctest::Approx(1.0));
  CHECK(d0.L0 == doctest::Approx(0.0));

  WeightProfile w({0, 0, 0.05});
  RSDerivatives d = rs_derivatives(w, 1.0);
  CHECK(d.L0 > 0);
  CHECK(d.L1 > 0);
  CHECK(d.identity_residual < 1e-8);
  CHECK((2 * d.dT) * (2 * d.dT) - d.dS * d.dS > 0);
  // closed forms: L0 = sum g_k (k-1) P_{k-2}, L1 = sum g_k (k-1)(P_{k-1} - S P_{k-2})/(2T)
  RSState st = solve_rs(w, 1.0);
  double T = std::sqrt(st.R);
  double L0c = 0.05 * 2 * motzkin_poly(1, st.R, st.S);
  double L1c = 0.05 * 2 * (motzkin_poly(2, st.R, st.S) - st.S * motzkin_poly(1, st.R, st.S)) / (2 * T);
  CHECK(d.L0 == doctest::Approx(L0c).epsilon(1e-9));
  CHECK(d.L1 == doctest::Approx(L1c).epsilon(1e-9));
  // dR/du from the derivative system matches the solve_rs diagnostic
  CHECK(d.dR == doctest::Approx(st.dR_du).epsilon(1e-6));
}

TEST_CASE("random admissible profiles: density and identity properties") {
  std::mt19937 rng(20120501);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int done = 0;
  while (done < 6) {
    std::vector<double> g(4);
    g[0] = 0.02 * u01(rng);
    g[1] = 0.08 * u01(rng);
    g[2] = 0.05 * u01(rng);
    g[3] = 0.01 * u01(rng);
    WeightProfile w(g);
    try {
      solve_rs(w, 1.0);
    } catch (const std::domain_error&) {
      continue;
    }
    ++done;
    Cut c = cut_endpoints(w);
    double mid = 0.5 * (c.gamma_plus + c.gamma_minus);
    CHECK(density(w, mid) > 0);
    RSDerivatives d = rs_derivatives(w, 1.0);
    CHECK(d.identity_residual < 1e-8);
  }
}

TEST_CASE("u_of_x inverts the endpoint maps") {
  WeightProfile w({0, 0.05, 0.04});
  for (double u : {0.2, 0.5, 0.9}) {
    double x = cut_plus_at(w, u);
    CHECK(u_of_x(w, x) == doctest::Approx(u).epsilon(1e-9));
    double xm = cut_minus_at(w, u);
    CHECK(u_of_x(w, xm) == doctest::Approx(u).epsilon(1e-9));
  }
}
