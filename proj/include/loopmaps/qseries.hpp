#pragma once

#include <initializer_list>
#include <iosfwd>
#include <vector>

#include "loopmaps/rational.hpp"

namespace loopmaps::qseries {

// One series axis: a variable label and the largest exponent that is kept.
struct Axis {
  char label;
  int order;
};

bool operator==(const Axis& a, const Axis& b);

// Formal power series with exact rational coefficients, truncated at a fixed
// order per axis. Dense storage: the series handled here are short (orders
// up to ~30) and dense. Supported shapes are one or two variables plus an
// optional size marker, i.e. at most three axes.
//
// Arithmetic never extends an order: binary operations require identical
// label sequences and truncate each axis at the smaller of the two orders.
// Values are immutable in practice (all operations return new series), so
// concurrent use needs no coordination.
class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::vector<Axis> axes);

  static TruncatedSeries constant(std::vector<Axis> axes, const Rational& c);
  static TruncatedSeries variable(std::vector<Axis> axes, char label);

  const std::vector<Axis>& axes() const { return axes_; }
  int order_of(char label) const;
  bool has_axis(char label) const;
  std::size_t table_size() const { return coeff_.size(); }

  // Exact coefficient; throws std::out_of_range past the truncation order
  // (the caller must recompute at a higher order, nothing is guessed).
  const Rational& coeff(const std::vector<int>& exponents) const;
  Rational coeff_or_zero(const std::vector<int>& exponents) const;
  void set_coeff(const std::vector<int>& exponents, Rational value);

  Rational constant_term() const;
  bool is_zero() const;
  // Smallest total degree of a nonzero term; table size bound if zero.
  int min_total_degree() const;

  TruncatedSeries operator-() const;
  TruncatedSeries& operator+=(const TruncatedSeries& rhs);
  TruncatedSeries& operator-=(const TruncatedSeries& rhs);
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b);
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);
  friend TruncatedSeries operator*(const Rational& s, const TruncatedSeries& a);
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

  // Iteration support for integration/printing.
  template <typename F>
  void for_each(F&& f) const {
    std::vector<int> e(axes_.size(), 0);
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      if (coeff_[i] != 0) f(e, coeff_[i]);
      advance(e);
    }
  }

 private:
  std::size_t index_of(const std::vector<int>& exponents) const;
  void advance(std::vector<int>& e) const;
  void check_compatible(const TruncatedSeries& rhs) const;

  std::vector<Axis> axes_;
  std::vector<std::size_t> stride_;
  std::vector<Rational> coeff_;
};

std::ostream& operator<<(std::ostream& os, const TruncatedSeries& s);

TruncatedSeries pow(const TruncatedSeries& a, int n);

// 1/a; requires a nonzero constant term.
TruncatedSeries reciprocal(const TruncatedSeries& a);

// log(a); requires constant term exactly 1.
TruncatedSeries log_series(const TruncatedSeries& a);

// outer(inner): outer univariate, inner with zero constant term. The outer
// order must cover every power of inner that survives truncation.
TruncatedSeries compose(const TruncatedSeries& outer, const TruncatedSeries& inner);

TruncatedSeries derivative(const TruncatedSeries& a, char label);

// Integrate the given axis over [0,1] (u^q -> 1/(q+1)); the axis is dropped.
TruncatedSeries integrate_unit(const TruncatedSeries& a, char label);

// Embed a series into a superset of axes (new axes get exponent 0).
TruncatedSeries lift(const TruncatedSeries& a, const std::vector<Axis>& axes);

// Restrict orders downward (never extends).
TruncatedSeries restrict_orders(const TruncatedSeries& a, const std::vector<Axis>& axes);

}  // namespace loopmaps::qseries
