#include "loopmaps/qseries.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace loopmaps {

BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;  // divides exactly: r is binomial(n, i+1) * i!/(i+1)!-free
  }
  return r;
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace loopmaps

namespace loopmaps::qseries {

bool operator==(const Axis& a, const Axis& b) {
  return a.label == b.label && a.order == b.order;
}

TruncatedSeries::TruncatedSeries(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 3)
    throw std::invalid_argument("TruncatedSeries supports 1 to 3 axes");
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].order < 0) throw std::invalid_argument("negative truncation order");
    for (std::size_t j = i + 1; j < axes_.size(); ++j)
      if (axes_[i].label == axes_[j].label)
        throw std::invalid_argument("duplicate axis label");
  }
  std::size_t n = 1;
  stride_.resize(axes_.size());
  for (std::size_t i = axes_.size(); i-- > 0;) {
    stride_[i] = n;
    n *= static_cast<std::size_t>(axes_[i].order) + 1;
  }
  coeff_.assign(n, Rational(0));
}

TruncatedSeries TruncatedSeries::constant(std::vector<Axis> axes, const Rational& c) {
  TruncatedSeries s(std::move(axes));
  s.coeff_[0] = c;
  return s;
}

TruncatedSeries TruncatedSeries::variable(std::vector<Axis> axes, char label) {
  TruncatedSeries s(std::move(axes));
  std::vector<int> e(s.axes_.size(), 0);
  bool found = false;
  for (std::size_t i = 0; i < s.axes_.size(); ++i) {
    if (s.axes_[i].label == label) {
      if (s.axes_[i].order < 1)
        throw std::out_of_range("axis order too small for a variable term");
      e[i] = 1;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("no such axis label");
  s.set_coeff(e, Rational(1));
  return s;
}

int TruncatedSeries::order_of(char label) const {
  for (const Axis& a : axes_)
    if (a.label == label) return a.order;
  throw std::invalid_argument("no such axis label");
}

bool TruncatedSeries::has_axis(char label) const {
  for (const Axis& a : axes_)
    if (a.label == label) return true;
  return false;
}

std::size_t TruncatedSeries::index_of(const std::vector<int>& exponents) const {
  if (exponents.size() != axes_.size())
    throw std::invalid_argument("exponent tuple arity mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] > axes_[i].order)
      throw std::out_of_range("exponent beyond truncation order");
    idx += stride_[i] * static_cast<std::size_t>(exponents[i]);
  }
  return idx;
}

const Rational& TruncatedSeries::coeff(const std::vector<int>& exponents) const {
  return coeff_[index_of(exponents)];
}

Rational TruncatedSeries::coeff_or_zero(const std::vector<int>& exponents) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (exponents[i] < 0 || exponents[i] > axes_[i].order) return Rational(0);
  return coeff(exponents);
}

void TruncatedSeries::set_coeff(const std::vector<int>& exponents, Rational value) {
  coeff_[index_of(exponents)] = std::move(value);
}

Rational TruncatedSeries::constant_term() const { return coeff_[0]; }

bool TruncatedSeries::is_zero() const {
  for (const Rational& c : coeff_)
    if (c != 0) return false;
  return true;
}

int TruncatedSeries::min_total_degree() const {
  int best = -1;
  std::vector<int> e(axes_.size(), 0);
  for (std::size_t i = 0; i < coeff_.size(); ++i) {
    if (coeff_[i] != 0) {
      int deg = 0;
      for (int x : e) deg += x;
      if (best < 0 || deg < best) best = deg;
    }
    advance(e);
  }
  if (best < 0) {
    best = 0;
    for (const Axis& a : axes_) best += a.order;
    ++best;
  }
  return best;
}

void TruncatedSeries::advance(std::vector<int>& e) const {
  for (std::size_t i = axes_.size(); i-- > 0;) {
    if (++e[i] <= axes_[i].order) return;
    e[i] = 0;
  }
}

void TruncatedSeries::check_compatible(const TruncatedSeries& rhs) const {
  if (axes_.size() != rhs.axes_.size())
    throw std::invalid_argument("incompatible variable sets");
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].label != rhs.axes_[i].label)
      throw std::invalid_argument("incompatible variable sets");
}

namespace {

std::vector<Axis> min_axes(const TruncatedSeries& a, const TruncatedSeries& b) {
  std::vector<Axis> r = a.axes();
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i].order = std::min(r[i].order, b.axes()[i].order);
  return r;
}

}  // namespace

TruncatedSeries TruncatedSeries::operator-() const {
  TruncatedSeries r = *this;
  for (Rational& c : r.coeff_) c = -c;
  return r;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& rhs) {
  *this = *this + rhs;
  return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& rhs) {
  *this = *this - rhs;
  return *this;
}

TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) {
  a.check_compatible(b);
  TruncatedSeries r(min_axes(a, b));
  std::vector<int> e(r.axes_.size(), 0);
  for (std::size_t i = 0; i < r.coeff_.size(); ++i) {
    r.coeff_[i] = a.coeff(e) + b.coeff(e);
    r.advance(e);
  }
  return r;
}

TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) {
  a.check_compatible(b);
  TruncatedSeries r(min_axes(a, b));
  std::vector<int> e(r.axes_.size(), 0);
  for (std::size_t i = 0; i < r.coeff_.size(); ++i) {
    r.coeff_[i] = a.coeff(e) - b.coeff(e);
    r.advance(e);
  }
  return r;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  a.check_compatible(b);
  TruncatedSeries r(min_axes(a, b));
  const std::size_t dims = r.axes_.size();
  std::vector<int> ea(dims, 0);
  a.for_each([&](const std::vector<int>& xa, const Rational& ca) {
    b.for_each([&](const std::vector<int>& xb, const Rational& cb) {
      std::vector<int> e(dims);
      for (std::size_t i = 0; i < dims; ++i) {
        e[i] = xa[i] + xb[i];
        if (e[i] > r.axes_[i].order) return;
      }
      r.coeff_[r.index_of(e)] += ca * cb;
    });
  });
  (void)ea;
  return r;
}

TruncatedSeries operator*(const Rational& s, const TruncatedSeries& a) {
  TruncatedSeries r = a;
  for (Rational& c : r.coeff_) c *= s;
  return r;
}

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
  a.check_compatible(b);
  TruncatedSeries diff = a - b;
  return diff.is_zero();
}

std::ostream& operator<<(std::ostream& os, const TruncatedSeries& s) {
  bool first = true;
  s.for_each([&](const std::vector<int>& e, const Rational& c) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c << ")";
    for (std::size_t i = 0; i < s.axes().size(); ++i)
      if (e[i] > 0) os << "*" << s.axes()[i].label << "^" << e[i];
  });
  if (first) os << "0";
  return os;
}

TruncatedSeries pow(const TruncatedSeries& a, int n) {
  if (n < 0) throw std::invalid_argument("negative power");
  TruncatedSeries r = TruncatedSeries::constant(a.axes(), Rational(1));
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

namespace {

int max_power_needed(const TruncatedSeries& f) {
  int total = 0;
  for (const Axis& a : f.axes()) total += a.order;
  int d = f.min_total_degree();
  if (d <= 0) return total;  // callers guarantee d >= 1
  return total / d;
}

}  // namespace

TruncatedSeries reciprocal(const TruncatedSeries& a) {
  Rational c0 = a.constant_term();
  if (c0 == 0) throw std::domain_error("reciprocal of a series with zero constant term");
  Rational inv = Rational(1) / c0;
  // a = c0 (1 + f) with ord(f) >= 1, so 1/a = (1/c0) sum (-f)^m, a finite sum
  // at fixed truncation.
  TruncatedSeries f = inv * a;
  std::vector<int> zero(a.axes().size(), 0);
  f.set_coeff(zero, Rational(0));
  const int kmax = max_power_needed(f);
  TruncatedSeries r = TruncatedSeries::constant(a.axes(), Rational(1));
  TruncatedSeries fp = TruncatedSeries::constant(a.axes(), Rational(1));
  for (int m = 1; m <= kmax; ++m) {
    fp = fp * f;
    if (fp.is_zero()) break;
    if (m % 2 == 1)
      r -= fp;
    else
      r += fp;
  }
  return inv * r;
}

TruncatedSeries log_series(const TruncatedSeries& a) {
  if (a.constant_term() != 1)
    throw std::domain_error("log of a series whose constant term is not 1");
  TruncatedSeries f = a;
  std::vector<int> zero(a.axes().size(), 0);
  f.set_coeff(zero, Rational(0));
  const int kmax = max_power_needed(f);
  TruncatedSeries r(a.axes());
  TruncatedSeries fp = TruncatedSeries::constant(a.axes(), Rational(1));
  for (int m = 1; m <= kmax; ++m) {
    fp = fp * f;
    if (fp.is_zero()) break;
    Rational c = Rational(m % 2 == 1 ? 1 : -1) / Rational(m);
    r += c * fp;
  }
  return r;
}

TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedSeries& inner) {
  if (outer.axes().size() != 1)
    throw std::invalid_argument("compose: outer series must be univariate");
  if (inner.constant_term() != 0)
    throw std::domain_error("compose: inner series must have zero constant term");
  const int kmax = inner.is_zero() ? 0 : max_power_needed(inner);
  if (outer.order_of(outer.axes()[0].label) < kmax)
    throw std::out_of_range("compose: outer order insufficient for exact result");
  TruncatedSeries r = TruncatedSeries::constant(inner.axes(), outer.constant_term());
  TruncatedSeries ip = TruncatedSeries::constant(inner.axes(), Rational(1));
  for (int m = 1; m <= kmax; ++m) {
    ip = ip * inner;
    if (ip.is_zero()) break;
    r += outer.coeff({m}) * ip;
  }
  return r;
}

TruncatedSeries derivative(const TruncatedSeries& a, char label) {
  std::size_t ax = 0;
  bool found = false;
  for (std::size_t i = 0; i < a.axes().size(); ++i)
    if (a.axes()[i].label == label) {
      ax = i;
      found = true;
    }
  if (!found) throw std::invalid_argument("no such axis label");
  // The top coefficient of the axis is lost by differentiation, so the
  // result order drops by one; callers keep exactness explicit.
  std::vector<Axis> axes = a.axes();
  if (axes[ax].order == 0) throw std::out_of_range("cannot differentiate order-0 axis");
  axes[ax].order -= 1;
  TruncatedSeries r(axes);
  a.for_each([&](const std::vector<int>& e, const Rational& c) {
    if (e[ax] == 0) return;
    std::vector<int> d = e;
    d[ax] -= 1;
    r.set_coeff(d, Rational(e[ax]) * c);
  });
  return r;
}

TruncatedSeries integrate_unit(const TruncatedSeries& a, char label) {
  std::size_t ax = 0;
  bool found = false;
  for (std::size_t i = 0; i < a.axes().size(); ++i)
    if (a.axes()[i].label == label) {
      ax = i;
      found = true;
    }
  if (!found) throw std::invalid_argument("no such axis label");
  if (a.axes().size() == 1)
    throw std::invalid_argument("integration would leave a series with no axis");
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < a.axes().size(); ++i)
    if (i != ax) axes.push_back(a.axes()[i]);
  TruncatedSeries r(axes);
  a.for_each([&](const std::vector<int>& e, const Rational& c) {
    std::vector<int> d;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (i != ax) d.push_back(e[i]);
    r.set_coeff(d, r.coeff(d) + c / Rational(e[ax] + 1));
  });
  return r;
}

TruncatedSeries lift(const TruncatedSeries& a, const std::vector<Axis>& axes) {
  std::vector<int> map(a.axes().size(), -1);
  for (std::size_t i = 0; i < a.axes().size(); ++i) {
    for (std::size_t j = 0; j < axes.size(); ++j)
      if (axes[j].label == a.axes()[i].label) map[i] = static_cast<int>(j);
    if (map[i] < 0) throw std::invalid_argument("lift: axis not present in target");
  }
  TruncatedSeries r(axes);
  a.for_each([&](const std::vector<int>& e, const Rational& c) {
    std::vector<int> d(axes.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) d[static_cast<std::size_t>(map[i])] = e[i];
    for (std::size_t j = 0; j < axes.size(); ++j)
      if (d[j] > axes[j].order) throw std::out_of_range("lift: exponent beyond target order");
    r.set_coeff(d, c);
  });
  return r;
}

TruncatedSeries restrict_orders(const TruncatedSeries& a, const std::vector<Axis>& axes) {
  if (axes.size() != a.axes().size())
    throw std::invalid_argument("restrict_orders: axis arity mismatch");
  TruncatedSeries r(axes);
  a.for_each([&](const std::vector<int>& e, const Rational& c) {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (axes[i].label != a.axes()[i].label)
        throw std::invalid_argument("restrict_orders: label mismatch");
      if (e[i] > axes[i].order) return;
    }
    r.set_coeff(e, c);
  });
  return r;
}

}  // namespace loopmaps::qseries
