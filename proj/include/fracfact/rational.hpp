#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fracfact/bigint.hpp"

namespace fracfact {

// Exact rational with canonical form: denominator > 0, gcd(num, den) = 1,
// zero stored as 0/1. All criterion values flow through this type; doubles
// appear only at display time.
class Rational {
 public:
  Rational() : num_(0LL), den_(1LL) {}
  Rational(long long v) : num_(v), den_(1LL) {}  // NOLINT
  Rational(int v) : Rational(static_cast<long long>(v)) {}  // NOLINT
  Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  // Accepts "12", "-3.27", "49/15".
  static Rational parse(std::string_view s) {
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
      return Rational(BigInt::from_decimal(s.substr(0, slash)),
                      BigInt::from_decimal(s.substr(slash + 1)));
    }
    auto dot = s.find('.');
    if (dot == std::string_view::npos)
      return Rational(BigInt::from_decimal(s), BigInt(1LL));
    std::string digits(s.substr(0, dot));
    std::string_view frac = s.substr(dot + 1);
    if (frac.empty()) throw std::invalid_argument("Rational: trailing dot");
    digits.append(frac);
    BigInt den{1LL};
    for (std::size_t i = 0; i < frac.size(); ++i) den.mul_small(10);
    return Rational(BigInt::from_decimal(digits), std::move(den));
  }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == BigInt(1LL); }
  int sign() const { return num_.sign(); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  double to_double() const { return num_.to_double() / den_.to_double(); }

  // Round half away from zero at `decimals` places; displayed criterion
  // values are nonnegative, where this is plain half-up.
  Rational round_half_up(int decimals) const {
    BigInt scale = pow10(decimals);
    BigInt two{2LL};
    BigInt scaled_num = num_;
    bool neg = scaled_num.sign() < 0;
    if (neg) scaled_num = -scaled_num;
    scaled_num = scaled_num * scale;
    // floor((2*|num|*scale + den) / (2*den))
    BigInt k = (scaled_num * two + den_) / (den_ * two);
    if (neg) k = -k;
    return Rational(std::move(k), std::move(scale));
  }

  // Fixed-point decimal string, half-up: to_decimal(2) of 49/15 is "3.27".
  std::string to_decimal(int decimals) const {
    BigInt scale = pow10(decimals);
    BigInt scaled = num_;
    bool neg = scaled.sign() < 0;
    if (neg) scaled = -scaled;
    BigInt k = (scaled * scale * BigInt(2LL) + den_) / (den_ * BigInt(2LL));
    std::string digits = k.to_string();
    if (decimals == 0) return neg && k.sign() != 0 ? "-" + digits : digits;
    if (digits.size() <= static_cast<std::size_t>(decimals))
      digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(),
                    '0');
    digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
    bool nonzero = digits.find_first_not_of("0.") != std::string::npos;
    return neg && nonzero ? "-" + digits : digits;
  }

  // Exact minimal rendering: integers as "49", terminating decimals as
  // "3.265", everything else as "49/15".
  std::string to_string() const {
    if (is_integer()) return num_.to_string();
    BigInt den = den_;
    int twos = 0, fives = 0;
    BigInt q, r;
    for (;;) {
      BigInt::divmod(den, BigInt(2LL), q, r);
      if (!r.is_zero()) break;
      den = q;
      ++twos;
    }
    for (;;) {
      BigInt::divmod(den, BigInt(5LL), q, r);
      if (!r.is_zero()) break;
      den = q;
      ++fives;
    }
    if (den == BigInt(1LL)) {
      int places = std::max(twos, fives);
      BigInt scaled = num_ * pow10(places) / den_;
      std::string digits = scaled.to_string();
      bool neg = !digits.empty() && digits[0] == '-';
      if (neg) digits.erase(digits.begin());
      if (digits.size() <= static_cast<std::size_t>(places))
        digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(),
                      '0');
      digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
      while (digits.back() == '0') digits.pop_back();
      if (digits.back() == '.') digits.pop_back();
      return neg ? "-" + digits : digits;
    }
    return num_.to_string() + "/" + den_.to_string();
  }

 private:
  BigInt num_, den_;

  static BigInt pow10(int k) {
    BigInt p{1LL};
    for (int i = 0; i < k; ++i) p.mul_small(10);
    return p;
  }

  void normalize() {
    if (den_.sign() < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    if (num_.is_zero()) {
      den_ = BigInt(1LL);
      return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1LL))) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
  }
};

}  // namespace fracfact
