#ifndef VOXCAL_RATIONAL_HPP
#define VOXCAL_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace voxcal {

// Exact scalars. cpp_rational is always canonical: lowest terms, positive
// denominator, zero stored as 0/1.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline bool is_zero(const Rational& r) { return r.is_zero(); }

inline Rational rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational: zero denominator");
  return Rational(Integer(num)) / Rational(Integer(den));
}

// Renders "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& r) { return r.str(); }

// Accepts "p" and "p/q" with optional leading '-'; rejects everything else.
inline Rational parse_rational(std::string_view text) {
  auto is_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_int(num) || !is_int(den) || den.front() == '-')
    throw std::invalid_argument("parse_rational: invalid rational string '" +
                                std::string(text) + "'");
  Rational d{Integer(std::string(den))};
  if (is_zero(d)) throw std::invalid_argument("parse_rational: zero denominator");
  return Rational(Integer(std::string(num))) / d;
}

// An element of (1/2)Z, stored as twice its value.  The exponent grid of the
// whole calculus: series exponents, Fock indices and weights all live here.
class Half {
 public:
  constexpr Half() = default;
  constexpr Half(std::int64_t integer) : twice_(2 * integer) {}  // NOLINT(runtime/explicit)

  static constexpr Half from_twice(std::int64_t twice) {
    Half h;
    h.twice_ = twice;
    return h;
  }

  constexpr std::int64_t twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  constexpr std::int64_t as_integer() const { return twice_ / 2; }
  // Positive half-odd integers 1/2, 3/2, ... index the Fock variables.
  constexpr bool is_half_odd() const { return twice_ % 2 != 0 && twice_ % 2 != -1; }
  constexpr bool is_positive_half_odd() const { return twice_ > 0 && twice_ % 2 != 0; }

  Rational as_rational() const { return rational(twice_, 2); }

  friend constexpr Half operator+(Half a, Half b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr Half operator-(Half a, Half b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr Half operator-(Half a) { return from_twice(-a.twice_); }
  friend constexpr Half operator*(std::int64_t k, Half a) { return from_twice(k * a.twice_); }
  Half& operator+=(Half o) {
    twice_ += o.twice_;
    return *this;
  }
  Half& operator-=(Half o) {
    twice_ -= o.twice_;
    return *this;
  }
  friend constexpr auto operator<=>(Half, Half) = default;

  std::string str() const {
    if (is_integer()) return std::to_string(as_integer());
    return std::to_string(twice_) + "/2";
  }

 private:
  std::int64_t twice_ = 0;
};

constexpr Half half_step = Half::from_twice(1);

inline Half half(std::int64_t twice) { return Half::from_twice(twice); }

}  // namespace voxcal

#endif
