#include <doctest.h>

#include <cmath>
#include <complex>

#include "loopmaps/detail/quadrature.hpp"
#include "loopmaps/gasket.hpp"

using namespace loopmaps;
using namespace loopmaps::gasket;
using mapcount::DiskMethod;
using mapcount::FormalWeights;
using mapcount::WeightProfile;
using qseries::Axis;
using qseries::TruncatedSeries;

TEST_CASE("n = 0 and h = 0 reduce to the bare weights exactly") {
  LoopModel m0{0.0, WeightProfile({0, 0, 0.05}),
               ringgen::RingFamily::triangular(rat_from_double(0.1))};
  EffectiveWeights e0 = fixed_point_weights(m0, {.K = 10});
  CHECK(e0.iterations == 1);
  CHECK(e0.g[2] == 0.05);
  for (int k = 1; k <= 10; ++k)
    if (k != 3) CHECK(e0.g[static_cast<std::size_t>(k - 1)] == 0.0);

  LoopModel mh{1.0, WeightProfile({0, 0, 0.05}),
               ringgen::RingFamily::bending(rat_from_double(0.7), Rational(0))};
  EffectiveWeights eh = fixed_point_weights(mh, {.K = 10});
  CHECK(eh.g[2] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(eh.g[0] == doctest::Approx(0.0));
}

TEST_CASE("rigid rings: first Picard correction has the stated form") {
  // A^rigid_{k,k'} = delta_{k,k'} h1^k, so one Picard step from the bare
  // weights gives g_k = g delta_{k,4} + n h1^k F_k(bare).
  double h1 = 0.05, n = 0.7, gq = 0.01;
  LoopModel m{n, WeightProfile({0, 0, 0, gq}), ringgen::RingFamily::rigid(rat_from_double(h1))};
  WeightProfile bare({0, 0, 0, gq});
  EffectiveWeights ew = fixed_point_weights(m, {.K = 14});
  // the full fixed point is close to the one-step value for small h1
  for (int k = 1; k <= 6; ++k) {
    double one_step = bare.weight(k) + n * std::pow(h1, k) * mapcount::disk_value(bare, k);
    CHECK(ew.g[static_cast<std::size_t>(k - 1)] ==
          doctest::Approx(one_step).epsilon(2e-3));
  }
  CHECK(ew.residual < 1e-10);
}

TEST_CASE("numeric fixed point: residual, tail, K-stability, cut geometry") {
  LoopModel m{1.0, WeightProfile({0, 0, 0.03}),
              ringgen::RingFamily::bending(rat_from_double(1.5), rat_from_double(0.06))};
  EffectiveWeights ew = fixed_point_weights(m, {.K = 30});
  CHECK(ew.residual < 1e-10);
  CHECK(ew.tail_estimate < 1e-8);

  EffectiveWeights ew2 = fixed_point_weights(m, {.K = 35});
  for (int k = 1; k <= 30; ++k)
    CHECK(std::abs(ew.g[static_cast<std::size_t>(k - 1)] -
                   ew2.g[static_cast<std::size_t>(k - 1)]) <=
          ew.tail_estimate + 1e-12);

  // interior of the cut must stay disjoint from its image under s
  ringgen::Homography s = ringgen::involution_of(m.rings);
  mapcount::Cut c = mapcount::cut_endpoints(ew.profile());
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double x = c.gamma_minus + f * (c.gamma_plus - c.gamma_minus);
    double sx = s(x);
    CHECK((sx <= c.gamma_minus || sx >= c.gamma_plus));
  }
  auto cls = ringgen::classify_configuration(s, c.gamma_minus, c.gamma_plus);
  CHECK((cls == ringgen::ConfigurationCase::one_minus ||
         cls == ringgen::ConfigurationCase::three_minus));
}

TEST_CASE("supercritical parameters are diagnosed") {
  LoopModel m{2.0, WeightProfile({0, 0, 0.2}),
              ringgen::RingFamily::triangular(rat_from_double(0.25))};
  CHECK_THROWS_AS(fixed_point_weights(m, {.K = 20}), std::domain_error);
}

TEST_CASE("formal fixed point solves its own equation exactly") {
  const int N = 4;
  std::vector<Axis> ax{{'t', N}};
  FormalLoopModel m{
      TruncatedSeries::constant(ax, Rational(2)),  // n = 2 as an exact scalar
      FormalWeights::monomial(3, Rational(1), N),
      ringgen::RingFamily::triangular(Rational(1))};
  FormalWeights g = fixed_point_weights_formal(m);

  // substitute back: g_k must equal g0_k + n sum A_{k,k'} F_{k'} exactly
  int kp_max = N;
  mapcount::FormalRS rs = mapcount::solve_rs_formal(g, mapcount::default_u_order(g));
  std::vector<Axis> wide = rs.R.axes();
  for (Axis& a : wide)
    if (a.label == 'u') a.order += kp_max / 2 + 1;
  std::vector<TruncatedSeries> F;
  for (int kp = 0; kp <= kp_max; ++kp)
    F.push_back(integrate_unit(
        mapcount::motzkin_poly(kp, lift(rs.R, wide), lift(rs.S, wide)), 'u'));
  for (int k = 1; k <= g.max_degree(); ++k) {
    TruncatedSeries loop_sum(ax);
    for (int kp = 0; kp <= kp_max; ++kp)
      loop_sum +=
          ringgen::ring_coeff_graded(m.rings, k, kp, N) * F[static_cast<std::size_t>(kp)];
    TruncatedSeries rhs = Rational(2) * loop_sum;
    if (k == 3) rhs += TruncatedSeries::variable(ax, 't');
    CHECK(g.g[static_cast<std::size_t>(k - 1)] == rhs);
  }
}

TEST_CASE("loop disk series: F_0 = 1 and n = 0 reduces to plain maps") {
  const int N = 4;
  std::vector<Axis> ax{{'t', N}};
  FormalLoopModel m{TruncatedSeries(ax),  // n = 0
                    FormalWeights::monomial(3, Rational(1), N),
                    ringgen::RingFamily::triangular(Rational(1))};
  CHECK(loop_disk_series(m, 0) == TruncatedSeries::constant(ax, Rational(1)));
  for (int p = 1; p <= 4; ++p)
    CHECK(loop_disk_series(m, p) ==
          mapcount::disk_series(FormalWeights::monomial(3, Rational(1), N), p,
                                DiskMethod::rs_integration));
}

TEST_CASE("one-level gasket substitution matches at first order in n") {
  // With n as a marker truncated at first order, the full fixed point and a
  // single substitution of the gasket relation agree exactly: both count the
  // configurations with at most one loop.
  const int N = 5;
  std::vector<Axis> ax{{'t', N}, {'n', 1}};
  FormalWeights bare;
  for (int k = 1; k <= 3; ++k) bare.g.emplace_back(TruncatedSeries(ax));
  bare.g[2] = TruncatedSeries::variable(ax, 't');

  FormalLoopModel m{TruncatedSeries::variable(ax, 'n'), bare,
                    ringgen::RingFamily::triangular(Rational(1))};

  FormalWeights bare_plain = FormalWeights::monomial(3, Rational(1), N);

  // one substitution: g_k = g0_k + n sum_{k'} A_{k,k'} t^{faces} F_{k'}(g0)
  FormalWeights once;
  int K = 5;
  for (int k = 1; k <= K; ++k) once.g.emplace_back(TruncatedSeries(ax));
  once.g[2] = TruncatedSeries::variable(ax, 't');
  for (int k = 1; k <= K; ++k) {
    TruncatedSeries corr({{'t', N}});
    for (int kp = 0; kp + 1 <= N; ++kp) {
      TruncatedSeries a = ringgen::ring_coeff_graded(m.rings, k, kp, N);
      if (a.is_zero()) continue;
      corr += a * mapcount::disk_series(bare_plain, kp, DiskMethod::tutte);
    }
    once.g[static_cast<std::size_t>(k - 1)] +=
        TruncatedSeries::variable(ax, 'n') * lift(corr, ax);
  }

  for (int p = 0; p <= 4; ++p) {
    TruncatedSeries full = loop_disk_series(m, p);
    TruncatedSeries oracle = mapcount::disk_series(once, p, DiskMethod::tutte);
    CHECK(full == oracle);
  }
}

TEST_CASE("loop potential: fixed point identity and contour cross-check") {
  LoopModel m{1.0, WeightProfile({0, 0, 0.03}),
              ringgen::RingFamily::bending(rat_from_double(2.0), rat_from_double(0.05))};
  EffectiveWeights ew = fixed_point_weights(m, {.K = 30});
  WeightProfile eff = ew.profile();
  mapcount::Cut c = mapcount::cut_endpoints(eff);

  // bare potential for triangle weights
  double x0 = c.gamma_plus + 0.8;
  PotentialParts pp = loop_potential(m, ew, x0);
  CHECK(pp.v0_prime == doctest::Approx(x0 - 0.03 * x0 * x0).epsilon(1e-14));

  // V'(x) = V0'(x) - (n/x) * ring_term, up to the truncation tail
  CHECK(pp.v_prime ==
        doctest::Approx(pp.v0_prime - m.n / x0 * pp.ring_term).epsilon(1e-7));

  // residue formula vs a direct contour integral of A(x,y) W(y)
  ringgen::Homography s = ringgen::involution_of(m.rings);
  double center = 0.5 * (c.gamma_plus + c.gamma_minus);
  double radius = 0.6 * (c.gamma_plus - c.gamma_minus);
  // keep the contour inside the analyticity domain of y -> A(x0, y)
  CHECK(std::abs(s(x0) - center) > radius);
  std::complex<double> acc{0, 0};
  const int M = 256;
  for (int j = 0; j < M; ++j) {
    double th = 2 * std::numbers::pi * j / M;
    std::complex<double> y = center + radius * std::exp(std::complex<double>(0, th));
    std::complex<double> w = mapcount::resolvent(eff, y, 1e-11);
    std::complex<double> a = x0 / (s(y) - x0);
    std::complex<double> dy = radius * std::exp(std::complex<double>(0, th)) *
                              std::complex<double>(0, 2 * std::numbers::pi / M);
    acc += a * w * dy;
  }
  std::complex<double> contour = acc / std::complex<double>(0, 2 * std::numbers::pi);
  CHECK(std::abs(contour.imag()) < 1e-9);
  CHECK(contour.real() == doctest::Approx(pp.ring_term).epsilon(1e-8));
}

TEST_CASE("functional equation residuals across the pipeline") {
  // n = 0 reduces to the plain-map relation
  LoopModel m0{0.0, WeightProfile({0, 0.04, 0.03}),
               ringgen::RingFamily::triangular(rat_from_double(0.05))};
  EffectiveWeights e0 = fixed_point_weights(m0, {.K = 12});
  WeightProfile eff0 = e0.profile();
  mapcount::Cut c0 = mapcount::cut_endpoints(eff0);
  for (double f : {0.25, 0.5, 0.75}) {
    double x = c0.gamma_minus + f * (c0.gamma_plus - c0.gamma_minus);
    CHECK(mapcount::resolvent_and_density(eff0, x).functional_residual < 1e-6);
  }

  // triangular rings, small weights
  LoopModel mt{1.0, WeightProfile({0, 0, 0.05}),
               ringgen::RingFamily::triangular(rat_from_double(0.05))};
  EffectiveWeights et = fixed_point_weights(mt, {.K = 30});
  mapcount::Cut ct = mapcount::cut_endpoints(et.profile());
  for (int i = 1; i <= 10; ++i) {
    double x = ct.gamma_minus + i / 11.0 * (ct.gamma_plus - ct.gamma_minus);
    CHECK(one_pole_residual(mt, et, x) < 1e-5);
  }

  // bending rings with a = 2
  LoopModel mb{1.0, WeightProfile({0, 0, 0.03}),
               ringgen::RingFamily::bending(rat_from_double(2.0), rat_from_double(0.05))};
  EffectiveWeights eb = fixed_point_weights(mb, {.K = 30});
  mapcount::Cut cb = mapcount::cut_endpoints(eb.profile());
  for (int i = 1; i <= 10; ++i) {
    double x = cb.gamma_minus + i / 11.0 * (cb.gamma_plus - cb.gamma_minus);
    CHECK(one_pole_residual(mb, eb, x) < 1e-5);
  }
}

TEST_CASE("formal loop disk coefficients stay non-negative") {
  const int N = 4;
  std::vector<Axis> ax{{'t', N}};
  FormalLoopModel m{TruncatedSeries::constant(ax, Rational(1)),
                    FormalWeights::monomial(3, Rational(1), N),
                    ringgen::RingFamily::triangular(Rational(1))};
  for (int p = 0; p <= 4; ++p) {
    TruncatedSeries f = loop_disk_series(m, p);
    f.for_each([&](const std::vector<int>&, const Rational& c) { CHECK(c >= 0); });
  }
}
