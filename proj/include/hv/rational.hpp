#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hv {

/// Exact rational on 64-bit integers. Every operation is overflow-checked and
/// throws std::overflow_error instead of wrapping; the den is always positive
/// and the fraction is kept in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const {
    if (num_ == INT64_MIN) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) {
    if (den_ == 1 && o.den_ == 1) {
      std::int64_t s;
      if (__builtin_add_overflow(num_, o.num_, &s)) throw std::overflow_error("rational overflow");
      num_ = s;
      return *this;
    }
    __int128 n = static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    assign128(n, d);
    return *this;
  }
  Rational& operator-=(const Rational& o) { return *this += -o; }
  Rational& operator*=(const Rational& o) {
    if (den_ == 1 && o.den_ == 1) {
      std::int64_t p;
      if (__builtin_mul_overflow(num_, o.num_, &p)) throw std::overflow_error("rational overflow");
      num_ = p;
      return *this;
    }
    assign128(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    assign128(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  /// "p" or "p/q".
  std::string str() const;
  /// Accepts "p", "-p", "p/q" with q > 0. Does not require lowest terms.
  static Rational parse(std::string_view text);
  /// Like parse() but rejects fractions that are not in lowest terms.
  static Rational parse_canonical(std::string_view text);

 private:
  void assign(std::int64_t n, std::int64_t d) { assign128(n, d); }
  void assign128(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// (-1)^e as a small integer.
constexpr int sign_pow(long e) { return (e & 1) ? -1 : 1; }

}  // namespace hv
