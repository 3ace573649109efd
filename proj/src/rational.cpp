#include "hv/rational.hpp"

#include <charconv>
#include <ostream>

namespace hv {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

void Rational::assign128(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) {
    num_ = 0;
    den_ = 1;
    return;
  }
  __int128 g = gcd128(n, d);
  n /= g;
  d /= g;
  if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) throw std::overflow_error("rational overflow");
  num_ = static_cast<std::int64_t>(n);
  den_ = static_cast<std::int64_t>(d);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  std::int64_t n = 0;
  std::int64_t d = 1;
  if (slash == std::string_view::npos) {
    if (!parse_int(text, n)) throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
    return Rational(n);
  }
  if (!parse_int(text.substr(0, slash), n) || !parse_int(text.substr(slash + 1), d) ||
      text.substr(slash + 1).front() == '-' || d <= 0) {
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  }
  return Rational(n, d);
}

Rational Rational::parse_canonical(std::string_view text) {
  Rational r = parse(text);
  auto slash = text.find('/');
  std::int64_t n = r.num();
  if (slash != std::string_view::npos) {
    parse_int(text.substr(0, slash), n);
  }
  if (n != r.num()) throw std::invalid_argument("rational not in lowest terms: '" + std::string(text) + "'");
  return r;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace hv
