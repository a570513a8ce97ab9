#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

namespace refnorm {

// Exact rational carrying JSON numbers. Anything parsed from JSON text is a
// finite decimal; intermediate values (lcm, quotients) may not be.
class Decimal {
 public:
  Decimal() = default;
  Decimal(long v) : v_(v) {}  // NOLINT(implicit)
  explicit Decimal(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  // JSON number grammar, exponent allowed. Throws std::invalid_argument.
  static Decimal parse(std::string_view text);

  // Plain decimal notation, no exponent. Non-decimal fractions print as p/q.
  std::string to_string() const;
  bool is_finite_decimal() const;

  bool is_integer() const { return v_.get_den() == 1; }
  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  // this == l * q for an integer l; q must be non-zero
  bool is_multiple_of(const Decimal& q) const;

  Decimal floor() const;
  Decimal ceil() const;
  Decimal abs() const { return Decimal(mpq_class(::abs(v_))); }

  // lcm over rationals: lcm(numerators) / gcd(denominators), both positive
  static Decimal lcm(const Decimal& a, const Decimal& b);

  // Fits in a signed 64 bit integer; used for counters and array positions
  bool fits_long() const;
  long to_long() const;
  double to_double() const { return v_.get_d(); }

  const mpq_class& raw() const { return v_; }
  std::size_t hash() const;

  friend Decimal operator+(const Decimal& a, const Decimal& b) { return Decimal(mpq_class(a.v_ + b.v_)); }
  friend Decimal operator-(const Decimal& a, const Decimal& b) { return Decimal(mpq_class(a.v_ - b.v_)); }
  friend Decimal operator*(const Decimal& a, const Decimal& b) { return Decimal(mpq_class(a.v_ * b.v_)); }
  friend Decimal operator/(const Decimal& a, const Decimal& b) { return Decimal(mpq_class(a.v_ / b.v_)); }
  Decimal operator-() const { return Decimal(mpq_class(-v_)); }

  friend bool operator==(const Decimal& a, const Decimal& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class v_{0};
};

}  // namespace refnorm
