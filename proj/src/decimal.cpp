#include "refnorm/decimal.hpp"

#include <functional>
#include <stdexcept>

namespace refnorm {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

mpz_class pow10(unsigned long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

}  // namespace

Decimal Decimal::parse(std::string_view s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && s[i] == '-') {
    neg = true;
    ++i;
  }
  std::string digits;
  long scale = 0;  // value = digits * 10^-scale
  std::size_t start = i;
  while (i < s.size() && is_digit(s[i])) digits.push_back(s[i++]);
  if (i == start) throw std::invalid_argument("bad number: " + std::string(s));
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::size_t fs = i;
    while (i < s.size() && is_digit(s[i])) {
      digits.push_back(s[i++]);
      ++scale;
    }
    if (i == fs) throw std::invalid_argument("bad number: " + std::string(s));
  }
  long exp = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    std::size_t es = i;
    while (i < s.size() && is_digit(s[i])) {
      exp = exp * 10 + (s[i++] - '0');
      // exponents beyond this are not meaningful for schemas
      if (exp > 100000) throw std::invalid_argument("exponent too large: " + std::string(s));
    }
    if (i == es) throw std::invalid_argument("bad number: " + std::string(s));
    if (eneg) exp = -exp;
  }
  if (i != s.size()) throw std::invalid_argument("bad number: " + std::string(s));
  mpz_class mant(digits, 10);
  long e = exp - scale;
  mpq_class q;
  if (e >= 0) {
    q = mpq_class(mant * pow10(static_cast<unsigned long>(e)));
  } else {
    q = mpq_class(mant, pow10(static_cast<unsigned long>(-e)));
  }
  if (neg) q = -q;
  return Decimal(q);
}

bool Decimal::is_finite_decimal() const {
  mpz_class d = v_.get_den();
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) d /= 2;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) d /= 5;
  return d == 1;
}

std::string Decimal::to_string() const {
  if (is_integer()) return v_.get_num().get_str();
  if (!is_finite_decimal()) return v_.get_str();
  mpz_class d = v_.get_den();
  unsigned long k = 0;
  mpz_class p = 1;
  while (!mpz_divisible_p(p.get_mpz_t(), d.get_mpz_t())) {
    p *= 10;
    ++k;
  }
  mpz_class scaled = ::abs(v_.get_num()) * (p / d);
  std::string digits = scaled.get_str();
  if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
  digits.insert(digits.size() - k, ".");
  return (sgn(v_) < 0 ? "-" : "") + digits;
}

bool Decimal::is_multiple_of(const Decimal& q) const {
  mpq_class r = v_ / q.v_;
  r.canonicalize();
  return r.get_den() == 1;
}

Decimal Decimal::floor() const {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return Decimal(mpq_class(r));
}

Decimal Decimal::ceil() const {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return Decimal(mpq_class(r));
}

Decimal Decimal::lcm(const Decimal& a, const Decimal& b) {
  mpz_class n, d;
  mpz_class an = ::abs(a.v_.get_num()), bn = ::abs(b.v_.get_num());
  mpz_lcm(n.get_mpz_t(), an.get_mpz_t(), bn.get_mpz_t());
  mpz_gcd(d.get_mpz_t(), a.v_.get_den_mpz_t(), b.v_.get_den_mpz_t());
  return Decimal(mpq_class(n, d));
}

bool Decimal::fits_long() const { return is_integer() && v_.get_num().fits_slong_p(); }

long Decimal::to_long() const {
  if (!fits_long()) throw std::out_of_range("not a small integer: " + to_string());
  return v_.get_num().get_si();
}

std::size_t Decimal::hash() const { return std::hash<std::string>{}(v_.get_str()); }

}  // namespace refnorm
