#ifndef VOXCAL_FOCK_HPP
#define VOXCAL_FOCK_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxcal/rational.hpp"

namespace voxcal {

inline void require_fock_index(Half n) {
  if (!n.is_positive_half_odd())
    throw std::invalid_argument("fock: index " + n.str() +
                                " is not a positive half-odd integer");
}

// A monomial in the variables y(1/2), y(3/2), ...: a multiset of indices,
// kept sorted descending so that the basis order is reproducible.
class FockMonomial {
 public:
  FockMonomial() = default;
  explicit FockMonomial(std::vector<Half> parts) : parts_(std::move(parts)) {
    for (Half p : parts_) require_fock_index(p);
    std::sort(parts_.begin(), parts_.end(), std::greater<>());
  }

  const std::vector<Half>& parts() const { return parts_; }
  bool is_unit() const { return parts_.empty(); }

  Half weight() const {
    Half w(0);
    for (Half p : parts_) w += p;
    return w;
  }

  std::int64_t multiplicity(Half n) const {
    std::int64_t m = 0;
    for (Half p : parts_)
      if (p == n) ++m;
    return m;
  }

  FockMonomial with_part(Half n) const {
    require_fock_index(n);
    auto p = parts_;
    p.insert(std::upper_bound(p.begin(), p.end(), n, std::greater<>()), n);
    FockMonomial out;
    out.parts_ = std::move(p);
    return out;
  }

  // Removes one copy of n; multiplicity must be positive.
  FockMonomial without_part(Half n) const {
    auto p = parts_;
    auto it = std::find(p.begin(), p.end(), n);
    if (it == p.end()) throw std::logic_error("fock: removing absent part");
    p.erase(it);
    FockMonomial out;
    out.parts_ = std::move(p);
    return out;
  }

  FockMonomial merged(const FockMonomial& o) const {
    auto p = parts_;
    p.insert(p.end(), o.parts_.begin(), o.parts_.end());
    std::sort(p.begin(), p.end(), std::greater<>());
    FockMonomial out;
    out.parts_ = std::move(p);
    return out;
  }

  friend auto operator<=>(const FockMonomial&, const FockMonomial&) = default;

  // Rendered with ascending indices: "y(1/2)^3 y(3/2)".
  std::string str() const {
    if (parts_.empty()) return "1";
    std::string out;
    for (std::size_t i = parts_.size(); i > 0;) {
      std::size_t j = i;
      while (j > 0 && parts_[j - 1] == parts_[i - 1]) --j;
      if (!out.empty()) out += " ";
      out += "y(" + parts_[i - 1].str() + ")";
      if (i - j > 1) out += "^" + std::to_string(i - j);
      i = j;
    }
    return out;
  }

 private:
  std::vector<Half> parts_;
};

// Basis order: lexicographically larger part-lists (descending-sorted) first,
// e.g. y(3/2) before y(1/2)^3 within weight 3/2.
struct FockBasisOrder {
  bool operator()(const FockMonomial& a, const FockMonomial& b) const { return a > b; }
};

// An element of the Fock space S: a finitely supported exact polynomial.
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(Rational scalar) {
    if (!is_zero(scalar)) terms_.emplace(FockMonomial{}, std::move(scalar));
  }
  explicit FockVector(const FockMonomial& m, Rational c = Rational(1)) {
    if (!is_zero(c)) terms_.emplace(m, std::move(c));
  }

  static FockVector unit() { return FockVector(Rational(1)); }

  // Builds from an arbitrary list of (monomial, coefficient) contributions.
  static FockVector from_unsorted(std::vector<std::pair<FockMonomial, Rational>> buf) {
    std::sort(buf.begin(), buf.end(), [](const auto& a, const auto& b) {
      return FockBasisOrder{}(a.first, b.first);
    });
    FockVector out;
    std::size_t i = 0;
    while (i < buf.size()) {
      std::size_t j = i + 1;
      while (j < buf.size() && buf[j].first == buf[i].first) {
        buf[i].second += buf[j].second;
        ++j;
      }
      if (!is_zero(buf[i].second))
        out.terms_.emplace_hint(out.terms_.end(), std::move(buf[i].first),
                                std::move(buf[i].second));
      i = j;
    }
    return out;
  }

  const std::map<FockMonomial, Rational, FockBasisOrder>& terms() const { return terms_; }
  bool is_zero_vector() const { return terms_.empty(); }

  void accumulate(const FockMonomial& m, const Rational& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!is_zero(c)) terms_.emplace(m, c);
      return;
    }
    it->second += c;
    if (is_zero(it->second)) terms_.erase(it);
  }

  Rational coeff(const FockMonomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  friend FockVector operator+(const FockVector& a, const FockVector& b) {
    FockVector out = a;
    for (const auto& [m, c] : b.terms_) out.accumulate(m, c);
    return out;
  }
  friend FockVector operator-(const FockVector& a) {
    FockVector out;
    for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
    return out;
  }
  friend FockVector operator-(const FockVector& a, const FockVector& b) {
    return a + (-b);
  }
  friend FockVector operator*(const Rational& r, const FockVector& v) {
    FockVector out;
    if (is_zero(r)) return out;
    for (const auto& [m, c] : v.terms_) out.terms_.emplace(m, r * c);
    return out;
  }
  // Product in S (multiset union of monomials).
  friend FockVector operator*(const FockVector& a, const FockVector& b) {
    FockVector out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.accumulate(ma.merged(mb), ca * cb);
    return out;
  }
  friend bool operator==(const FockVector& a, const FockVector& b) {
    return a.terms_ == b.terms_;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += to_string(c);
      if (!m.is_unit()) out += " " + m.str();
    }
    return out;
  }

 private:
  std::map<FockMonomial, Rational, FockBasisOrder> terms_;
};

inline bool is_zero(const FockVector& v) { return v.is_zero_vector(); }
inline std::string to_string(const FockVector& v) { return "(" + v.str() + ")"; }

// Creation operator: multiplication by y_n.  Raises weight by n.
inline FockVector mul_y(Half n, const FockVector& v) {
  require_fock_index(n);
  FockVector out;
  for (const auto& [m, c] : v.terms()) out.accumulate(m.with_part(n), c);
  return out;
}

// Annihilation operator: d/dy_n.  Lowers weight by n.
inline FockVector d_y(Half n, const FockVector& v) {
  require_fock_index(n);
  FockVector out;
  for (const auto& [m, c] : v.terms()) {
    const std::int64_t mult = m.multiplicity(n);
    if (mult > 0) out.accumulate(m.without_part(n), Rational(Integer(mult)) * c);
  }
  return out;
}

namespace detail {

inline void enumerate_weight_basis(Half remaining, Half max_part,
                                   std::vector<Half>& acc,
                                   std::vector<FockMonomial>& out) {
  if (remaining == Half(0)) {
    out.emplace_back(acc);
    return;
  }
  // Parts are chosen descending; largest first gives the basis order.
  Half p = std::min(max_part, remaining);
  if (!p.is_half_odd()) p = p - half_step;
  for (; p > Half(0); p = p - Half(1)) {
    acc.push_back(p);
    enumerate_weight_basis(remaining - p, p, acc, out);
    acc.pop_back();
  }
}

}  // namespace detail

// All monomials of weight exactly w, in the canonical order.  Memoized; map
// nodes are stable, so returned references stay valid.
inline const std::vector<FockMonomial>& weight_basis(Half w) {
  if (w < Half(0)) throw std::invalid_argument("weight_basis: negative weight");
  static std::map<Half, std::vector<FockMonomial>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;
  std::vector<FockMonomial> out;
  if (w == Half(0)) {
    out.emplace_back();
  } else {
    std::vector<Half> acc;
    detail::enumerate_weight_basis(w, w, acc, out);
    std::sort(out.begin(), out.end(), FockBasisOrder{});
  }
  return cache.emplace(w, std::move(out)).first->second;
}

// Weights 0, 1/2, 1, ... up to and including w_max.
inline std::vector<Half> weight_grid(Half w_max) {
  std::vector<Half> out;
  for (Half w(0); w <= w_max; w += half_step) out.push_back(w);
  return out;
}

inline Half vector_weight(const FockVector& v) {
  if (v.is_zero_vector())
    throw std::invalid_argument("vector_weight: zero vector has no weight");
  Half w = v.terms().begin()->first.weight();
  for (const auto& [m, c] : v.terms())
    if (m.weight() != w)
      throw std::invalid_argument("vector_weight: not homogeneous");
  return w;
}

}  // namespace voxcal

#endif
