#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "loopmaps/ringgen.hpp"

using namespace loopmaps;
using namespace loopmaps::ringgen;
using qseries::Axis;
using qseries::TruncatedSeries;

namespace {

std::vector<RingFamily> all_families() {
  return {
      RingFamily::triangular(Rational(1, 5)),
      RingFamily::quadrangular(Rational(1, 3), Rational(1, 7)),
      RingFamily::rigid(Rational(2, 5)),
      RingFamily::twisting(Rational(1, 4)),
      RingFamily::bending(Rational(3, 2), Rational(1, 6)),
  };
}

double eval_series_sum(const RingFamily& f, double x, double y, int order) {
  auto a = ring_matrix(f, order, order);
  double s = 0;
  for (int k = order; k >= 1; --k)
    for (int kp = order; kp >= 0; --kp)
      s += a[(std::size_t)k][(std::size_t)kp] * std::pow(x, k) * std::pow(y, kp);
  return s;
}

}  // namespace

TEST_CASE("ring coefficients match the stated small cases") {
  RingFamily tri = RingFamily::triangular(Rational(1, 2));
  // (k,k') = (2,1): 2 h^3
  CHECK(ring_coeff(tri, 2, 1) == Rational(2) * Rational(1, 8));

  RingFamily rigid = RingFamily::rigid(Rational(1, 3));
  CHECK(ring_coeff(rigid, 3, 3) == Rational(1, 27));
  CHECK(ring_coeff(rigid, 3, 2) == Rational(0));

  RingFamily twist = RingFamily::twisting(Rational(1, 5));
  CHECK(ring_coeff(twist, 2, 2) == Rational(2, 25));
  CHECK(ring_coeff(twist, 2, 1) == Rational(0));

  RingFamily bend = RingFamily::bending(Rational(2), Rational(1, 7));
  CHECK(ring_coeff(bend, 1, 0) == Rational(2, 7));                    // a h
  CHECK(ring_coeff(bend, 1, 1) == Rational(1, 49));                   // h^2
  CHECK(ring_coeff(bend, 2, 0) == Rational(4, 49));                   // (a h)^2
}

TEST_CASE("brute force matches the small cases independently") {
  RingFamily tri = RingFamily::triangular(Rational(1, 2));
  CHECK(ring_bruteforce(tri, 2, 1) == Rational(1, 4));  // 2 h^3 = 1/4
  RingFamily bend = RingFamily::bending(Rational(2), Rational(1, 7));
  CHECK(ring_bruteforce(bend, 1, 0) == Rational(2, 7));
  CHECK_THROWS_AS(ring_bruteforce(tri, 10, 10, 14), std::invalid_argument);
}

TEST_CASE("ring_coeff equals ring_bruteforce for every family, k+k' <= 10") {
  for (const RingFamily& f : all_families()) {
    for (int k = 1; k + 0 <= 10; ++k)
      for (int kp = 0; k + kp <= 10; ++kp)
        CHECK(ring_coeff(f, k, kp) == ring_bruteforce(f, k, kp));
  }
}

TEST_CASE("bending at a=1 agrees with triangular; at a=0 with rigid on h^2") {
  RingFamily tri = RingFamily::triangular(Rational(2, 9));
  RingFamily b1 = RingFamily::bending(Rational(1), Rational(2, 9));
  RingFamily b0 = RingFamily::bending(Rational(0), Rational(2, 9));
  RingFamily rig = RingFamily::rigid(Rational(4, 81));
  for (int k = 1; k <= 9; ++k)
    for (int kp = 0; k + kp <= 10; ++kp) {
      CHECK(ring_coeff(b1, k, kp) == ring_coeff(tri, k, kp));
      CHECK(ring_coeff(b0, k, kp) == ring_coeff(rig, k, kp));
    }
}

TEST_CASE("H(x,y) is symmetric and A = x d/dx log H, order 12") {
  for (const RingFamily& f : all_families()) {
    TruncatedSeries h = grand_h(f, 12);
    for (int i = 0; i <= 12; ++i)
      for (int j = 0; j < i; ++j) CHECK(h.coeff({i, j}) == h.coeff({j, i}));

    TruncatedSeries a_from_log =
        TruncatedSeries::variable(h.axes(), 'x') * derivative(log_series(h), 'x');
    TruncatedSeries a = grand_a(f, 12);
    std::vector<Axis> ax{{'x', 11}, {'y', 11}};
    CHECK(restrict_orders(a, ax) == restrict_orders(lift(a_from_log, a.axes()), ax));
  }
}

TEST_CASE("grand A matches the coefficient accessor") {
  for (const RingFamily& f : all_families()) {
    TruncatedSeries a = grand_a(f, 8);
    for (int k = 1; k <= 8; ++k)
      for (int kp = 0; kp <= 8; ++kp) CHECK(a.coeff({k, kp}) == ring_coeff(f, k, kp));
  }
}

TEST_CASE("one-pole closed forms for A(x,y) agree numerically") {
  // A(x,y) = x/(s(y)-x) = x s'(x)/(y-s(x)) + x s''(x)/(2 s'(x)), and both
  // match the series sum inside the polydisk of convergence.
  std::vector<RingFamily> one_pole = {
      RingFamily::triangular(Rational(1, 10)),
      RingFamily::rigid(Rational(1, 4)),
      RingFamily::bending(Rational(1, 2), Rational(3, 20)),
      RingFamily::bending(Rational(2), Rational(1, 10)),
  };
  for (const RingFamily& f : one_pole) {
    Homography s = involution_of(f);
    double x = 0.31, y = 0.17;
    double closed1 = x / (s(y) - x);
    double closed2 = x * s.deriv(x) / (y - s(x)) + x * s.deriv2(x) / (2 * s.deriv(x));
    CHECK(closed1 == doctest::Approx(closed2).epsilon(1e-12));
    double series = eval_series_sum(f, x, y, 64);
    CHECK(series == doctest::Approx(closed1).epsilon(1e-9));
  }
}

TEST_CASE("involutions: closed forms, fixed points, involutivity") {
  RingFamily b1 = RingFamily::bending(Rational(1), Rational(1, 8));
  Homography s1 = involution_of(b1);
  // a=1 reduces to 1/h - x
  CHECK(s1(0.3) == doctest::Approx(8.0 - 0.3).epsilon(1e-14));

  RingFamily b0 = RingFamily::bending(Rational(0), Rational(1, 8));
  Homography s0 = involution_of(b0);
  // a=0 reduces to 1/(h^2 x)
  CHECK(s0(0.3) == doctest::Approx(64.0 / 0.3).epsilon(1e-14));

  RingFamily bend = RingFamily::bending(Rational(3, 4), Rational(1, 8));
  Homography s = involution_of(bend);
  auto [f1, f2] = s.fixed_points();
  double a = 0.75, h = 0.125;
  CHECK(f1 == doctest::Approx(1.0 / ((a + 1) * h)).epsilon(1e-12));
  CHECK(f2 == doctest::Approx(1.0 / ((a - 1) * h)).epsilon(1e-12));

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> xs(-5.0, 5.0);
  for (const RingFamily& f : all_families()) {
    if (f.tag == FamilyTag::quadrangular) continue;
    Homography inv = involution_of(f);
    for (int i = 0; i < 100; ++i) {
      double x = xs(rng);
      if (inv.has_pole() && std::abs(x - inv.pole()) < 0.1) continue;
      double sx = inv(x);
      if (inv.has_pole() && std::abs(sx - inv.pole()) < 1e-6) continue;
      CHECK(inv(sx) == doctest::Approx(x).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(involution_of(RingFamily::quadrangular(Rational(1, 3), Rational(1, 3))),
                  std::domain_error);
}

TEST_CASE("exponentiation property") {
  // Triangular, k=1, y=0: only the k'=0 term survives, A_{1,0} = h = 1/s(0).
  RingFamily tri = RingFamily::triangular(Rational(1, 5));
  auto c1 = exponentiation_check(tri, 1, 0.0, 4);
  CHECK(c1.partial_sum == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(c1.closed_form == doctest::Approx(0.2).epsilon(1e-15));

  RingFamily bhalf = RingFamily::bending(Rational(1, 2), Rational(1, 5));
  auto c2 = exponentiation_check(bhalf, 1, 0.0, 4);
  CHECK(c2.partial_sum == doctest::Approx(0.1).epsilon(1e-15));

  RingFamily b2 = RingFamily::bending(Rational(2), Rational(1, 10));
  // Moderate K: the certified tail bound is above the rounding floor and the
  // actual truncation error must sit below it.
  auto c3a = exponentiation_check(b2, 3, 0.5, 12);
  CHECK(c3a.tail_bound > 1e-14);
  CHECK(c3a.error <= c3a.tail_bound);
  // Large K: the mathematical tail is far below double precision, so compare
  // against the bound plus a rounding allowance.
  auto c3 = exponentiation_check(b2, 3, 0.5, 60);
  double rounding = 1e-14 * (1.0 + std::abs(c3.closed_form));
  CHECK(c3.error <= c3.tail_bound + rounding);
  CHECK(c3.error < 1e-10);

  CHECK_THROWS_AS(exponentiation_check(tri, 1, 10.0, 10), std::domain_error);
}

TEST_CASE("configuration classifier") {
  // s(x) = 1/h - x with h = 0.1, I = [-2,2]: s(I) = [8,12] right of I.
  Homography s1{10.0, 1.0, 0.0};
  CHECK(classify_configuration(s1, -2, 2) == ConfigurationCase::one_minus);

  // s(x) = 1/x, I = [-1/2, 1/2]: pole inside, decreasing.
  Homography s2{1.0, 0.0, -1.0};
  CHECK(classify_configuration(s2, -0.5, 0.5) == ConfigurationCase::three_minus);

  // s(x) = -1/x, I = [1,2]: increasing, image [-1,-1/2] left of I.
  Homography s3{1.0, 0.0, 1.0};
  CHECK(classify_configuration(s3, 1, 2) == ConfigurationCase::two_plus);

  // Remaining cases for coverage.
  CHECK(classify_configuration(s3, -2, -1) == ConfigurationCase::one_plus);
  CHECK(classify_configuration(s3, -0.5, 0.5) == ConfigurationCase::three_plus);
  CHECK(classify_configuration(s1, 11, 14) == ConfigurationCase::two_minus);

  // Overlap without a pole inside is inadmissible.
  CHECK_THROWS_AS(classify_configuration(s1, 3, 9), std::domain_error);

  // Invariance under rescaling (alpha, beta, delta) -> (l a, l b, l d).
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> dist(0.2, 3.0);
  for (int i = 0; i < 50; ++i) {
    Homography s{dist(rng), dist(rng), dist(rng) * (i % 2 ? 1 : -1)};
    double gm = -0.4, gp = 0.4;
    ConfigurationCase base;
    try {
      base = classify_configuration(s, gm, gp);
    } catch (const std::exception&) {
      continue;
    }
    double l = dist(rng);
    Homography scaled{l * s.alpha, l * s.beta, l * s.delta};
    CHECK(classify_configuration(scaled, gm, gp) == base);
  }
}

TEST_CASE("graded coefficients sum back to the plain ones") {
  for (const RingFamily& f : all_families()) {
    for (int k = 1; k <= 5; ++k)
      for (int kp = 0; k + kp <= 6; ++kp) {
        TruncatedSeries graded = ring_coeff_graded(f, k, kp, 12);
        Rational sum = 0;
        graded.for_each([&](const std::vector<int>&, const Rational& c) { sum += c; });
        CHECK(sum == ring_coeff(f, k, kp));
      }
  }
}
