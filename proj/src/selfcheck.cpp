#include "loopmaps/selfcheck.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

#include "loopmaps/critline.hpp"
#include "loopmaps/gasket.hpp"
#include "loopmaps/mapcount.hpp"
#include "loopmaps/qseries.hpp"
#include "loopmaps/ringgen.hpp"
#include "loopmaps/twistline.hpp"

namespace loopmaps::selfcheck {

namespace {

constexpr double kPi = std::numbers::pi;

struct Runner {
  std::ostream& os;
  int failures = 0;

  void check(const char* name, const std::function<bool()>& body) {
    bool ok = false;
    std::string note;
    try {
      ok = body();
    } catch (const std::exception& e) {
      note = e.what();
    }
    os << (ok ? "ok   - " : "FAIL - ") << name;
    if (!ok && !note.empty()) os << " (" << note << ")";
    os << "\n";
    if (!ok) ++failures;
  }
};

Rational catalan(int m) {
  return Rational(binomial(static_cast<unsigned>(2 * m), static_cast<unsigned>(m)),
                  BigInt(m + 1));
}

}  // namespace

int run(std::ostream& os) {
  Runner r{os};

  r.check("ring coefficients equal brute-force enumeration (k+k' <= 8)", [] {
    std::vector<ringgen::RingFamily> fams = {
        ringgen::RingFamily::triangular(Rational(1, 5)),
        ringgen::RingFamily::quadrangular(Rational(1, 3), Rational(1, 7)),
        ringgen::RingFamily::rigid(Rational(2, 5)),
        ringgen::RingFamily::twisting(Rational(1, 4)),
        ringgen::RingFamily::bending(Rational(3, 2), Rational(1, 6))};
    for (const auto& f : fams)
      for (int k = 1; k <= 8; ++k)
        for (int kp = 0; k + kp <= 8; ++kp)
          if (ringgen::ring_coeff(f, k, kp) != ringgen::ring_bruteforce(f, k, kp))
            return false;
    return true;
  });

  r.check("exponentiation property with certified tail (bending)", [] {
    auto f = ringgen::RingFamily::bending(rat_from_double(2.0), rat_from_double(0.1));
    auto c = ringgen::exponentiation_check(f, 3, 1.25, 80);
    return c.error <= c.tail_bound + 1e-13 && c.error < 1e-10;
  });

  r.check("tree disks are Catalan numbers (both methods)", [] {
    mapcount::FormalWeights none = mapcount::FormalWeights::monomial(1, Rational(0), 0);
    for (int m = 0; m <= 8; ++m) {
      if (mapcount::disk_series(none, 2 * m, mapcount::DiskMethod::rs_integration)
              .coeff({0}) != catalan(m))
        return false;
      if (mapcount::disk_series(none, 2 * m, mapcount::DiskMethod::tutte).coeff({0}) !=
          catalan(m))
        return false;
    }
    return true;
  });

  r.check("disk series cross-oracle (g3, g4; p <= 5, order <= 5)", [] {
    auto g3 = mapcount::FormalWeights::monomial(3, Rational(1), 5);
    auto g4 = mapcount::FormalWeights::monomial(4, Rational(1), 5);
    for (int p = 0; p <= 5; ++p) {
      if (!(mapcount::disk_series(g3, p, mapcount::DiskMethod::rs_integration) ==
            mapcount::disk_series(g3, p, mapcount::DiskMethod::tutte)))
        return false;
      if (!(mapcount::disk_series(g4, p, mapcount::DiskMethod::rs_integration) ==
            mapcount::disk_series(g4, p, mapcount::DiskMethod::tutte)))
        return false;
    }
    return true;
  });

  r.check("pure-quadrangulation landmark R = 2, gamma_+ = 2 sqrt(2)", [] {
    mapcount::WeightProfile w({0, 0, 0, 1.0 / 12});
    mapcount::RSState st = mapcount::solve_rs(w, 1.0);
    mapcount::Cut c = mapcount::cut_endpoints(w);
    return std::abs(st.R - 2.0) < 1e-6 &&
           std::abs(c.gamma_plus - 2 * std::sqrt(2.0)) < 1e-6;
  });

  r.check("plain-map boundary relation W(x+i0)+W(x-i0) = V'(x)", [] {
    mapcount::WeightProfile w({0, 0.04, 0.03});
    mapcount::Cut c = mapcount::cut_endpoints(w);
    for (double f : {0.3, 0.5, 0.8}) {
      double x = c.gamma_minus + f * (c.gamma_plus - c.gamma_minus);
      if (mapcount::resolvent_and_density(w, x).functional_residual > 1e-6) return false;
    }
    return true;
  });

  r.check("zeta: shift identity and residue", [] {
    using critline::cdouble;
    for (double b : {0.2, 0.3, 0.45}) {
      cdouble v(0.8, 0.35);
      cdouble lhs = critline::zeta(b, v + cdouble(0, kPi)) +
                    critline::zeta(b, v - cdouble(0, kPi)) -
                    2 * std::cos(kPi * b) * critline::zeta(b, v);
      if (std::abs(lhs) > 1e-12) return false;
      cdouble eps(1e-6, 1e-6);
      if (std::abs(eps * critline::zeta(b, eps) - 1.0) > 1e-5) return false;
    }
    return true;
  });

  r.check("percolation point g = h = 1/(2 sqrt(2) 3^{3/4})", [] {
    auto [g, h] = critline::critical_line_a1(1.0, 1.5);
    double t = 1.0 / (2 * std::sqrt(2.0) * std::pow(3.0, 0.75));
    return std::abs(g - t) < 1e-12 && std::abs(h - t) < 1e-12;
  });

  r.check("Ising transition point (a = 1, n = 1)", [] {
    auto [gs, hs] = critline::dilute_point_a1(1.0);
    double gr = std::sqrt(5.0) / (2 * std::sqrt(2.0) * std::pow(7.0, 0.75));
    double hr = std::sqrt(20.0 / std::sqrt(7.0) - 5.0) / 12.0;
    return std::abs(gs - gr) < 1e-10 && std::abs(hs - hr) < 1e-10;
  });

  r.check("n -> 0 dilute point for a = 0.5 and 2", [] {
    for (double a : {0.5, 2.0}) {
      critline::CriticalSolution s = critline::dilute_point(a, 0.0);
      auto [gstar, hstar] = critline::nzero_dilute(a);
      if (std::abs(s.g - gstar) > 1e-8 || std::abs(s.h - hstar) > 1e-8) return false;
    }
    return true;
  });

  r.check("dilute point satisfies its three conditions (a = 0.5, b = 0.3)", [] {
    double n = 2 * std::cos(0.3 * kPi);
    critline::CriticalSolution s = critline::dilute_point(0.5, n);
    auto e = critline::endpoint_conditions(s.omega);
    double scale = std::abs(s.omega.c[3]) + std::abs(s.omega.c[0]);
    return e.omega_ipi < 1e-9 * scale && std::abs(e.kappa_b) < 1e-9 * scale &&
           std::abs(e.kappa_2mb) < 1e-7 * scale && e.kappa_2pb < 0;
  });

  r.check("twisting line: n -> 0 parabola and dilute (1/12, 1/16)", [] {
    for (double h2 : {0.03, 0.06, 0.09}) {
      if (std::abs(twistline::parabola_g(0.0, h2) - 8.0 / 3.0 * (h2 - 8 * h2 * h2)) >
          1e-12)
        return false;
    }
    auto d = twistline::dilute_point(0.0);
    return std::abs(d.g - 1.0 / 12) < 1e-10 && std::abs(d.h2 - 1.0 / 16) < 1e-10;
  });

  r.check("twisting functional equation on the cut", [] {
    double n = std::cos(0.3 * kPi);
    auto s = twistline::solution_at(n, 0.075);
    for (double v : {0.5, 1.2, 2.5})
      if (twistline::functional_residual(s, v) > 1e-8) return false;
    return true;
  });

  r.check("configuration classifier landmark cases", [] {
    ringgen::Homography s1{10.0, 1.0, 0.0};
    ringgen::Homography s2{1.0, 0.0, -1.0};
    ringgen::Homography s3{1.0, 0.0, 1.0};
    return ringgen::classify_configuration(s1, -2, 2) ==
               ringgen::ConfigurationCase::one_minus &&
           ringgen::classify_configuration(s2, -0.5, 0.5) ==
               ringgen::ConfigurationCase::three_minus &&
           ringgen::classify_configuration(s3, 1, 2) ==
               ringgen::ConfigurationCase::two_plus;
  });

  r.check("gasket fixed point reduces to bare weights at n = 0", [] {
    gasket::LoopModel m{0.0, mapcount::WeightProfile({0, 0, 0.05}),
                        ringgen::RingFamily::triangular(rat_from_double(0.1))};
    auto e = gasket::fixed_point_weights(m, {.K = 10});
    return e.g[2] == 0.05 && e.residual == 0;
  });

  return r.failures;
}

}  // namespace loopmaps::selfcheck
