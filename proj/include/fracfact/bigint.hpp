#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace fracfact {

// Arbitrary-precision signed integer. Magnitude is stored as little-endian
// base-2^32 limbs with no leading zero limb; zero is the empty limb vector
// with a non-negative sign. Sized for criterion arithmetic (a few hundred
// bits), not for general number theory.
class BigInt {
 public:
  BigInt() = default;

  template <std::integral T>
  BigInt(T v) {  // NOLINT(google-explicit-constructor)
    if constexpr (std::is_signed_v<T>) {
      neg_ = v < 0;
      // Two's complement negation avoids overflow on the minimum value.
      unsigned long long u = neg_ ? ~static_cast<unsigned long long>(v) + 1ULL
                                  : static_cast<unsigned long long>(v);
      assign_u64(u);
    } else {
      assign_u64(v);
    }
  }

  static BigInt from_decimal(std::string_view s) {
    BigInt out;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      neg = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw std::invalid_argument("BigInt: empty numeral");
    for (; i < s.size(); ++i) {
      char c = s[i];
      if (c < '0' || c > '9') throw std::invalid_argument("BigInt: bad digit");
      out.mul_small(10);
      out.add_small(static_cast<std::uint32_t>(c - '0'));
    }
    out.neg_ = neg && !out.is_zero();
    return out;
  }

  bool is_zero() const { return limbs_.empty(); }
  int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

  BigInt operator-() const {
    BigInt r = *this;
    if (!r.is_zero()) r.neg_ = !r.neg_;
    return r;
  }

  BigInt& operator+=(const BigInt& o) {
    if (neg_ == o.neg_) {
      add_mag(limbs_, o.limbs_);
    } else {
      int c = cmp_mag(limbs_, o.limbs_);
      if (c == 0) {
        limbs_.clear();
        neg_ = false;
      } else if (c > 0) {
        sub_mag(limbs_, o.limbs_);
      } else {
        std::vector<std::uint32_t> tmp = o.limbs_;
        sub_mag(tmp, limbs_);
        limbs_ = std::move(tmp);
        neg_ = o.neg_;
      }
    }
    return *this;
  }
  BigInt& operator-=(const BigInt& o) { return *this += -o; }

  BigInt& operator*=(const BigInt& o) {
    *this = *this * o;
    return *this;
  }

  friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
  friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.is_zero() || b.is_zero()) return r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      std::uint64_t ai = a.limbs_[i];
      for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
        std::uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
        r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
      }
      std::size_t k = i + b.limbs_.size();
      while (carry) {
        std::uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.trim();
    r.neg_ = a.neg_ != b.neg_ && !r.is_zero();
    return r;
  }

  // Truncating division (quotient rounds toward zero, remainder keeps the
  // dividend's sign), matching built-in integer semantics.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
    q = BigInt();
    r = BigInt();
    int c = cmp_mag(a.limbs_, b.limbs_);
    if (c < 0) {
      r = a;
      return;
    }
    // Binary long division over the magnitude, MSB first.
    q.limbs_.assign(a.limbs_.size(), 0);
    std::vector<std::uint32_t> rem;
    for (std::size_t bit = a.limbs_.size() * 32; bit-- > 0;) {
      shl1(rem);
      if ((a.limbs_[bit / 32] >> (bit % 32)) & 1u) {
        if (rem.empty())
          rem.push_back(1);
        else
          rem[0] |= 1u;
      }
      if (cmp_mag(rem, b.limbs_) >= 0) {
        sub_mag(rem, b.limbs_);
        q.limbs_[bit / 32] |= 1u << (bit % 32);
      }
    }
    q.trim();
    r.limbs_ = std::move(rem);
    r.trim();
    q.neg_ = (a.neg_ != b.neg_) && !q.is_zero();
    r.neg_ = a.neg_ && !r.is_zero();
  }

  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return q;
  }
  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return r;
  }

  // this += x * k, one pass; the hot path of moment accumulation.
  void addmul(const BigInt& x, std::uint32_t k) {
    if (k == 0 || x.is_zero()) return;
    if (x.neg_ != neg_ && !is_zero()) {
      // Rare outside the uniformly nonnegative criterion sums.
      BigInt t = x;
      t.mul_small(k);
      *this += t;
      return;
    }
    if (is_zero()) neg_ = x.neg_;
    if (limbs_.size() < x.limbs_.size()) limbs_.resize(x.limbs_.size(), 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < x.limbs_.size(); ++i) {
      std::uint64_t cur =
          static_cast<std::uint64_t>(x.limbs_[i]) * k + limbs_[i] + carry;
      limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    std::size_t i = x.limbs_.size();
    while (carry) {
      if (i == limbs_.size()) limbs_.push_back(0);
      std::uint64_t cur = static_cast<std::uint64_t>(limbs_[i]) + carry;
      limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
      ++i;
    }
  }

  void mul_small(std::uint32_t k) {
    if (k == 0) {
      limbs_.clear();
      neg_ = false;
      return;
    }
    std::uint64_t carry = 0;
    for (auto& limb : limbs_) {
      std::uint64_t cur = static_cast<std::uint64_t>(limb) * k + carry;
      limb = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
  }

  static BigInt pow(std::uint64_t base, unsigned exp) {
    BigInt r{1ULL};
    BigInt b{base};
    for (unsigned i = 0; i < exp; ++i) r *= b;
    return r;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.neg_ = false;
    b.neg_ = false;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = std::move(b);
      b = std::move(r);
    }
    return a;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }
  friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_ ? std::strong_ordering::less
                                        : std::strong_ordering::greater;
    int c = cmp_mag(a.limbs_, b.limbs_);
    if (a.neg_) c = -c;
    return c <=> 0;
  }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::vector<std::uint32_t> mag = limbs_;
    std::string digits;
    while (!mag.empty()) {
      // Divide the magnitude by 10^9, collecting 9 decimal digits per pass.
      std::uint64_t rem = 0;
      for (std::size_t i = mag.size(); i-- > 0;) {
        std::uint64_t cur = (rem << 32) | mag[i];
        mag[i] = static_cast<std::uint32_t>(cur / 1000000000ULL);
        rem = cur % 1000000000ULL;
      }
      while (!mag.empty() && mag.back() == 0) mag.pop_back();
      for (int d = 0; d < 9; ++d) {
        digits.push_back(static_cast<char>('0' + rem % 10));
        rem /= 10;
        if (mag.empty() && rem == 0) break;
      }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (neg_) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
  }

  double to_double() const {
    double v = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;)
      v = v * 4294967296.0 + limbs_[i];
    return neg_ ? -v : v;
  }

  // Value as uint64 assuming it fits; callers guard with bit_width().
  std::uint64_t to_u64() const {
    std::uint64_t v = 0;
    for (std::size_t i = std::min<std::size_t>(limbs_.size(), 2); i-- > 0;)
      v = (v << 32) | limbs_[i];
    return v;
  }

  std::size_t bit_width() const {
    if (limbs_.empty()) return 0;
    std::size_t w = (limbs_.size() - 1) * 32;
    std::uint32_t top = limbs_.back();
    while (top) {
      ++w;
      top >>= 1;
    }
    return w;
  }

 private:
  std::vector<std::uint32_t> limbs_;
  bool neg_ = false;

  void assign_u64(unsigned long long u) {
    limbs_.clear();
    while (u) {
      limbs_.push_back(static_cast<std::uint32_t>(u));
      u >>= 32;
    }
    if (limbs_.empty()) neg_ = false;
  }

  void add_small(std::uint32_t k) {
    std::uint64_t carry = k;
    for (std::size_t i = 0; carry && i < limbs_.size(); ++i) {
      std::uint64_t cur = limbs_[i] + carry;
      limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
  }

  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }

  static int cmp_mag(const std::vector<std::uint32_t>& a,
                     const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  static void add_mag(std::vector<std::uint32_t>& a,
                      const std::vector<std::uint32_t>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::uint64_t cur = static_cast<std::uint64_t>(a[i]) + carry +
                          (i < b.size() ? b[i] : 0u);
      a[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    if (carry) a.push_back(static_cast<std::uint32_t>(carry));
  }

  // Requires |a| >= |b|.
  static void sub_mag(std::vector<std::uint32_t>& a,
                      const std::vector<std::uint32_t>& b) {
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::int64_t cur = static_cast<std::int64_t>(a[i]) - borrow -
                         (i < b.size() ? b[i] : 0u);
      borrow = cur < 0;
      if (cur < 0) cur += 1LL << 32;
      a[i] = static_cast<std::uint32_t>(cur);
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
  }

  static void shl1(std::vector<std::uint32_t>& a) {
    std::uint32_t carry = 0;
    for (auto& limb : a) {
      std::uint32_t next = limb >> 31;
      limb = (limb << 1) | carry;
      carry = next;
    }
    if (carry) a.push_back(carry);
  }
};

}  // namespace fracfact
