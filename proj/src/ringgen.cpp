#include "loopmaps/ringgen.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace loopmaps::ringgen {

using qseries::Axis;
using qseries::TruncatedSeries;

RingFamily RingFamily::triangular(Rational h) {
  if (h < 0) throw std::invalid_argument("negative ring weight");
  return RingFamily{FamilyTag::triangular, std::move(h), 0, 0, 0};
}

RingFamily RingFamily::quadrangular(Rational h1, Rational h2) {
  if (h1 < 0 || h2 < 0) throw std::invalid_argument("negative ring weight");
  return RingFamily{FamilyTag::quadrangular, 0, std::move(h1), std::move(h2), 0};
}

RingFamily RingFamily::rigid(Rational h1) {
  if (h1 < 0) throw std::invalid_argument("negative ring weight");
  return RingFamily{FamilyTag::rigid, 0, std::move(h1), 0, 0};
}

RingFamily RingFamily::twisting(Rational h2) {
  if (h2 < 0) throw std::invalid_argument("negative ring weight");
  return RingFamily{FamilyTag::twisting, 0, 0, std::move(h2), 0};
}

RingFamily RingFamily::bending(Rational a, Rational h) {
  if (a < 0 || h < 0) throw std::invalid_argument("negative ring weight");
  return RingFamily{FamilyTag::bending, std::move(h), 0, 0, std::move(a)};
}

namespace {

// Face types of a ring, described by how many outer/inner edges each face
// contributes and its weight. Rings are cyclic sequences of such faces.
struct FaceType {
  int outer;
  int inner;
  Rational weight;
  int orientation;  // bending only: +1 outward, -1 inward, 0 unused
};

std::vector<FaceType> face_types(const RingFamily& f) {
  switch (f.tag) {
    case FamilyTag::triangular:
      return {{1, 0, f.h, +1}, {0, 1, f.h, -1}};
    case FamilyTag::bending:
      return {{1, 0, f.h, +1}, {0, 1, f.h, -1}};
    case FamilyTag::quadrangular:
      return {{1, 1, f.h1, 0}, {2, 0, f.h2, 0}, {0, 2, f.h2, 0}};
    case FamilyTag::rigid:
      return {{1, 1, f.h1, 0}};
    case FamilyTag::twisting:
      return {{2, 0, f.h2, 0}, {0, 2, f.h2, 0}};
  }
  throw std::logic_error("unknown family");
}

void enumerate_rec(const std::vector<FaceType>& types, const RingFamily& f,
                   std::vector<int>& seq, int outer_left, int inner_left,
                   Rational& acc) {
  if (outer_left == 0 && inner_left == 0) {
    Rational w(1);
    for (int t : seq) w *= types[static_cast<std::size_t>(t)].weight;
    if (f.tag == FamilyTag::bending) {
      // One cyclic adjacency per face: (seq[i], seq[i+1 mod m]). For a
      // single face this is the pair of the face with itself.
      const std::size_t m = seq.size();
      for (std::size_t i = 0; i < m; ++i) {
        int o1 = types[static_cast<std::size_t>(seq[i])].orientation;
        int o2 = types[static_cast<std::size_t>(seq[(i + 1) % m])].orientation;
        if (o1 == o2) w *= f.a;
      }
    }
    // Root multiplicity: number of outer edges of the first face.
    acc += Rational(types[static_cast<std::size_t>(seq[0])].outer) * w;
    return;
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    if (types[t].outer > outer_left || types[t].inner > inner_left) continue;
    if (seq.empty() && types[t].outer == 0) continue;  // root sits on an outer edge
    seq.push_back(static_cast<int>(t));
    enumerate_rec(types, f, seq, outer_left - types[t].outer,
                  inner_left - types[t].inner, acc);
    seq.pop_back();
  }
}

// Shared exact expansion kernel: coefficients U_{k,k'} of 1/D(x,y) where D is
// the (affine) ring denominator, via the linear recurrence D * U = 1.
struct BivariateRecurrence {
  // D = 1 - cx*x - cy*y - cxy*x*y - cxx*x^2 - cyy*y^2
  Rational cx{0}, cy{0}, cxy{0}, cxx{0}, cyy{0};

  template <typename T>
  std::vector<std::vector<T>> inverse_table(int kmax, int kpmax, T cast(const Rational&)) const {
    std::vector<std::vector<T>> u(static_cast<std::size_t>(kmax) + 1,
                                  std::vector<T>(static_cast<std::size_t>(kpmax) + 1));
    auto get = [&](int i, int j) -> T {
      if (i < 0 || j < 0) return T(0);
      return u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };
    T tcx = cast(cx), tcy = cast(cy), tcxy = cast(cxy), tcxx = cast(cxx), tcyy = cast(cyy);
    for (int i = 0; i <= kmax; ++i)
      for (int j = 0; j <= kpmax; ++j) {
        T v = (i == 0 && j == 0) ? T(1) : T(0);
        v += tcx * get(i - 1, j);
        v += tcy * get(i, j - 1);
        v += tcxy * get(i - 1, j - 1);
        v += tcxx * get(i - 2, j);
        v += tcyy * get(i, j - 2);
        u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      }
    return u;
  }
};

BivariateRecurrence denominator_of(const RingFamily& f) {
  BivariateRecurrence d;
  switch (f.tag) {
    case FamilyTag::triangular:
      d.cx = f.h;
      d.cy = f.h;
      break;
    case FamilyTag::bending:
      d.cx = f.a * f.h;
      d.cy = f.a * f.h;
      d.cxy = (1 - f.a * f.a) * f.h * f.h;
      break;
    case FamilyTag::quadrangular:
      d.cxy = f.h1;
      d.cxx = f.h2;
      d.cyy = f.h2;
      break;
    case FamilyTag::rigid:
      d.cxy = f.h1;
      break;
    case FamilyTag::twisting:
      d.cxx = f.h2;
      d.cyy = f.h2;
      break;
  }
  return d;
}

Rational rational_id(const Rational& r) { return r; }

// A(x,y) numerator N with A = N * (1/D): N = x*dx(D applied to -log) i.e.
// A = -x (d_x D)/D. For all five families -x d_x D has the terms below.
struct Numerator {
  // N = nx*x + nxy*x*y + nxx*x^2
  Rational nx{0}, nxy{0}, nxx{0};
};

Numerator numerator_of(const RingFamily& f) {
  BivariateRecurrence d = denominator_of(f);
  Numerator n;
  n.nx = d.cx;
  n.nxy = d.cxy;
  n.nxx = 2 * d.cxx;
  return n;
}

}  // namespace

Rational ring_coeff(const RingFamily& f, int k, int kp) {
  if (k < 1 || kp < 0) throw std::invalid_argument("ring_coeff: need k >= 1, k' >= 0");
  switch (f.tag) {
    case FamilyTag::triangular: {
      // binom(k+k'-1, k') h^{k+k'}: sequences of k+k' triangles, k of them
      // outward, read from the rooted outward triangle.
      Rational w(binomial(static_cast<unsigned>(k + kp - 1), static_cast<unsigned>(kp)));
      for (int i = 0; i < k + kp; ++i) w *= f.h;
      return w;
    }
    case FamilyTag::rigid: {
      if (k != kp) return 0;
      Rational w(1);
      for (int i = 0; i < k; ++i) w *= f.h1;
      return w;
    }
    case FamilyTag::twisting: {
      if (k % 2 != 0 || kp % 2 != 0) return 0;
      int m = k / 2, mp = kp / 2;
      Rational w(2 * binomial(static_cast<unsigned>(m + mp - 1), static_cast<unsigned>(mp)));
      for (int i = 0; i < m + mp; ++i) w *= f.h2;
      return w;
    }
    case FamilyTag::quadrangular:
    case FamilyTag::bending: {
      // Series expansion of the closed form A = N/D.
      BivariateRecurrence d = denominator_of(f);
      Numerator n = numerator_of(f);
      auto u = d.inverse_table<Rational>(k, kp, rational_id);
      auto get = [&](int i, int j) -> Rational {
        if (i < 0 || j < 0) return 0;
        return u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      };
      return n.nx * get(k - 1, kp) + n.nxy * get(k - 1, kp - 1) + n.nxx * get(k - 2, kp);
    }
  }
  throw std::logic_error("unknown family");
}

qseries::TruncatedSeries ring_coeff_graded(const RingFamily& f, int k, int kp,
                                           int t_order) {
  TruncatedSeries out({Axis{'t', t_order}});
  switch (f.tag) {
    case FamilyTag::triangular:
    case FamilyTag::bending: {
      int faces = k + kp;  // one triangle per unit of contour length
      if (faces <= t_order) out.set_coeff({faces}, ring_coeff(f, k, kp));
      return out;
    }
    case FamilyTag::rigid: {
      if (k <= t_order) out.set_coeff({k}, ring_coeff(f, k, kp));
      return out;
    }
    case FamilyTag::twisting: {
      int faces = (k + kp) / 2;
      if (k % 2 == 0 && kp % 2 == 0 && faces <= t_order)
        out.set_coeff({faces}, ring_coeff(f, k, kp));
      return out;
    }
    case FamilyTag::quadrangular: {
      // Mixed grading: rings with the same contour lengths can have
      // different face counts, so collect them by face count. A ring with j
      // opposite-crossed squares has j + (k+k'-2j)/2 faces; enumerate
      // directly (sizes stay small wherever grading is used).
      std::vector<FaceType> types = face_types(f);
      struct Walker {
        const std::vector<FaceType>& types;
        int faces;
        Rational total{0};
        void rec(std::vector<int>& seq, int outer_left, int inner_left) {
          if (static_cast<int>(seq.size()) > faces) return;
          if (outer_left == 0 && inner_left == 0) {
            if (static_cast<int>(seq.size()) != faces) return;
            Rational w(1);
            for (int t : seq) w *= types[static_cast<std::size_t>(t)].weight;
            total += Rational(types[static_cast<std::size_t>(seq[0])].outer) * w;
            return;
          }
          for (std::size_t t = 0; t < types.size(); ++t) {
            if (types[t].outer > outer_left || types[t].inner > inner_left) continue;
            if (seq.empty() && types[t].outer == 0) continue;
            seq.push_back(static_cast<int>(t));
            rec(seq, outer_left - types[t].outer, inner_left - types[t].inner);
            seq.pop_back();
          }
        }
      };
      for (int faces = 1; faces <= t_order; ++faces) {
        Walker walker{types, faces, Rational(0)};
        std::vector<int> seq;
        walker.rec(seq, k, kp);
        if (walker.total != 0) out.set_coeff({faces}, walker.total);
      }
      return out;
    }
  }
  throw std::logic_error("unknown family");
}

Rational ring_bruteforce(const RingFamily& f, int k, int kp, int bound) {
  if (k < 1 || kp < 0) throw std::invalid_argument("ring_bruteforce: need k >= 1, k' >= 0");
  if (k + kp > bound) throw std::invalid_argument("ring_bruteforce: k + k' beyond bound");
  std::vector<FaceType> types = face_types(f);
  Rational acc = 0;
  std::vector<int> seq;
  enumerate_rec(types, f, seq, k, kp, acc);
  return acc;
}

std::vector<std::vector<double>> ring_matrix(const RingFamily& f, int kmax,
                                             int kpmax) {
  std::vector<std::vector<double>> a(static_cast<std::size_t>(kmax) + 1,
                                     std::vector<double>(static_cast<std::size_t>(kpmax) + 1, 0.0));
  switch (f.tag) {
    case FamilyTag::triangular:
    case FamilyTag::rigid:
    case FamilyTag::twisting: {
      for (int k = 1; k <= kmax; ++k)
        for (int kp = 0; kp <= kpmax; ++kp)
          a[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)] =
              to_double(ring_coeff(f, k, kp));
      break;
    }
    case FamilyTag::quadrangular:
    case FamilyTag::bending: {
      BivariateRecurrence d = denominator_of(f);
      Numerator n = numerator_of(f);
      auto u = d.inverse_table<double>(kmax, kpmax, [](const Rational& r) { return to_double(r); });
      auto get = [&](int i, int j) -> double {
        if (i < 0 || j < 0) return 0.0;
        return u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      };
      double nx = to_double(n.nx), nxy = to_double(n.nxy), nxx = to_double(n.nxx);
      for (int k = 1; k <= kmax; ++k)
        for (int kp = 0; kp <= kpmax; ++kp)
          a[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)] =
              nx * get(k - 1, kp) + nxy * get(k - 1, kp - 1) + nxx * get(k - 2, kp);
      break;
    }
  }
  return a;
}

qseries::TruncatedSeries grand_h(const RingFamily& f, int order) {
  std::vector<Axis> xy{{'x', order}, {'y', order}};
  BivariateRecurrence d = denominator_of(f);
  TruncatedSeries den = TruncatedSeries::constant(xy, Rational(1));
  TruncatedSeries x = TruncatedSeries::variable(xy, 'x');
  TruncatedSeries y = TruncatedSeries::variable(xy, 'y');
  den -= d.cx * x;
  den -= d.cy * y;
  den -= d.cxy * (x * y);
  den -= d.cxx * (x * x);
  den -= d.cyy * (y * y);
  return reciprocal(den);
}

qseries::TruncatedSeries grand_a(const RingFamily& f, int order) {
  std::vector<Axis> xy{{'x', order}, {'y', order}};
  Numerator n = numerator_of(f);
  TruncatedSeries x = TruncatedSeries::variable(xy, 'x');
  TruncatedSeries y = TruncatedSeries::variable(xy, 'y');
  TruncatedSeries num = n.nx * x + n.nxy * (x * y) + n.nxx * (x * x);
  BivariateRecurrence d = denominator_of(f);
  TruncatedSeries den = TruncatedSeries::constant(xy, Rational(1));
  den -= d.cx * x;
  den -= d.cy * y;
  den -= d.cxy * (x * y);
  den -= d.cxx * (x * x);
  den -= d.cyy * (y * y);
  return num * reciprocal(den);
}

double Homography::operator()(double x) const {
  return (alpha - beta * x) / (beta - delta * x);
}

std::complex<double> Homography::operator()(std::complex<double> x) const {
  return (alpha - beta * x) / (beta - delta * x);
}

double Homography::deriv(double x) const {
  double q = beta - delta * x;
  return (alpha * delta - beta * beta) / (q * q);
}

double Homography::deriv2(double x) const {
  double q = beta - delta * x;
  return 2.0 * delta * (alpha * delta - beta * beta) / (q * q * q);
}

double Homography::pole() const {
  if (delta == 0) throw std::domain_error("affine involution has no pole");
  return beta / delta;
}

double Homography::image_of_infinity() const { return pole(); }

std::pair<double, double> Homography::fixed_points() const {
  double disc = beta * beta - alpha * delta;
  if (disc < 0) throw std::domain_error("no real fixed points");
  if (delta == 0) {
    double fp = alpha / (2 * beta);
    return {fp, fp};
  }
  double r = std::sqrt(disc);
  double f1 = (beta - r) / delta;
  double f2 = (beta + r) / delta;
  if (std::abs(f1) > std::abs(f2)) std::swap(f1, f2);
  return {f1, f2};
}

Homography involution_of(const RingFamily& f) {
  switch (f.tag) {
    case FamilyTag::triangular:
      // s(x) = 1/h - x
      return Homography{1.0 / to_double(f.h), 1.0, 0.0};
    case FamilyTag::rigid:
      // s(x) = 1/(h1 x)
      return Homography{1.0, 0.0, -to_double(f.h1)};
    case FamilyTag::bending: {
      double a = to_double(f.a), h = to_double(f.h);
      // s(x) = (1 - a h x)/(a h + (1-a^2) h^2 x)
      return Homography{1.0, a * h, (a * a - 1.0) * h * h};
    }
    case FamilyTag::twisting:
      // On the bipartite variable X = x^2: s(X) = 1/h2 - X.
      return Homography{1.0 / to_double(f.h2), 1.0, 0.0};
    case FamilyTag::quadrangular:
      if (f.h1 != 0 && f.h2 != 0)
        throw std::domain_error(
            "quadrangular rings with h1*h2 != 0 are not one-pole; no involution");
      if (f.h2 == 0) return involution_of(RingFamily::rigid(f.h1));
      return involution_of(RingFamily::twisting(f.h2));
  }
  throw std::logic_error("unknown family");
}

ExponentiationCheck exponentiation_check(const RingFamily& f, int k, double y,
                                         int K) {
  if (f.tag == FamilyTag::quadrangular && f.h1 != 0 && f.h2 != 0)
    throw std::domain_error("exponentiation check requires a one-pole family");
  Homography s = involution_of(f);
  // s(y)^{-k} = (beta - delta y)^k / (alpha - beta y)^k, so the only
  // singularity of k' -> A_{k,k'} is the zero of s at y = s(0) = alpha/beta.
  // For rigid rings beta = 0 and the sum is a polynomial (infinite radius).
  double radius = s.beta == 0 ? std::numeric_limits<double>::infinity()
                              : std::abs(s.alpha / s.beta);
  if (!(std::abs(y) < radius))
    throw std::domain_error("y outside the convergence disk");

  // For the twisting family the identity lives in the bipartite variable:
  // the caller's (k, y) are the bipartite outer length and Y = x^2, and the
  // pole carries residue 2 (two root positions per outward square).
  bool bipartite = f.tag == FamilyTag::twisting;
  double mult = bipartite ? 2.0 : 1.0;
  auto a = bipartite ? ring_matrix(f, 2 * k, 2 * K) : ring_matrix(f, k, K);
  ExponentiationCheck out;
  for (int kp = 0; kp <= K; ++kp) {
    double akk = bipartite
                     ? a[static_cast<std::size_t>(2 * k)][static_cast<std::size_t>(2 * kp)]
                     : a[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)];
    out.partial_sum += akk * std::pow(y, kp);
  }
  out.closed_form = mult * std::pow(s(y), -k);
  double Y = std::isfinite(radius) ? 0.5 * (std::abs(y) + radius) : 2.0 * std::abs(y) + 1.0;
  double ratio = std::abs(y) / Y;
  out.tail_bound =
      mult * std::pow(ratio, K + 1) / (1.0 - ratio) * std::pow(std::abs(s(Y)), -k);
  out.error = std::abs(out.partial_sum - out.closed_form);
  return out;
}

const char* to_string(ConfigurationCase c) {
  switch (c) {
    case ConfigurationCase::one_minus: return "1-";
    case ConfigurationCase::two_minus: return "2-";
    case ConfigurationCase::three_minus: return "3-";
    case ConfigurationCase::one_plus: return "1+";
    case ConfigurationCase::two_plus: return "2+";
    case ConfigurationCase::three_plus: return "3+";
  }
  return "?";
}

ConfigurationCase classify_configuration(const Homography& s, double gamma_minus,
                                         double gamma_plus) {
  if (!(gamma_minus < gamma_plus))
    throw std::invalid_argument("classify: cut must be a proper interval");
  double disc = s.beta * s.beta - s.alpha * s.delta;
  if (disc == 0) throw std::domain_error("degenerate homography");
  bool dec = disc > 0;
  if (s.has_pole()) {
    double p = s.pole();
    if (p == gamma_minus || p == gamma_plus)
      throw std::invalid_argument("classify: pole of s at a cut endpoint");
    if (p > gamma_minus && p < gamma_plus)
      return dec ? ConfigurationCase::three_minus : ConfigurationCase::three_plus;
  }
  double s1 = s(gamma_minus), s2 = s(gamma_plus);
  double lo = std::min(s1, s2), hi = std::max(s1, s2);
  if (lo >= gamma_plus) return dec ? ConfigurationCase::one_minus : ConfigurationCase::one_plus;
  if (hi <= gamma_minus) return dec ? ConfigurationCase::two_minus : ConfigurationCase::two_plus;
  throw std::domain_error(
      "classify: cut overlaps its image without the pole inside (inadmissible)");
}

}  // namespace loopmaps::ringgen
