#ifndef VOXCAL_SERIES_HPP
#define VOXCAL_SERIES_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voxcal/rational.hpp"

namespace voxcal {

struct calculus_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// series_mul would need coefficients outside every factor's known region.
struct ill_defined_product : calculus_error {
  using calculus_error::calculus_error;
};

// Coefficient requested outside the window: unknown, not zero.
struct outside_window : calculus_error {
  using calculus_error::calculus_error;
};

// One variable's slice of a window.  nullopt = unbounded.  The window is the
// region on which the stored terms are the exact coefficients of the series;
// outside it nothing is claimed.
struct Interval {
  std::optional<Half> lo;
  std::optional<Half> hi;

  static Interval all() { return {}; }
  static Interval bounded(Half l, Half h) { return {l, h}; }
  static Interval at_most(Half h) { return {std::nullopt, h}; }
  static Interval at_least(Half l) { return {l, std::nullopt}; }

  bool contains(Half e) const {
    if (lo && e < *lo) return false;
    if (hi && e > *hi) return false;
    return true;
  }
  bool empty() const { return lo && hi && *lo > *hi; }

  friend Interval intersect(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.lo)
      r.lo = std::max(*a.lo, *b.lo);
    else
      r.lo = a.lo ? a.lo : b.lo;
    if (a.hi && b.hi)
      r.hi = std::min(*a.hi, *b.hi);
    else
      r.hi = a.hi ? a.hi : b.hi;
    return r;
  }
  // Minkowski sum; an unbounded side absorbs.
  friend Interval sum(const Interval& a, const Interval& b) {
    Interval r;
    if (a.lo && b.lo) r.lo = *a.lo + *b.lo;
    if (a.hi && b.hi) r.hi = *a.hi + *b.hi;
    return r;
  }
  friend bool intersects(const Interval& a, const Interval& b) {
    return !intersect(a, b).empty();
  }

  std::string str() const {
    auto b = [](const std::optional<Half>& x, const char* inf) {
      return x ? x->str() : std::string(inf);
    };
    return "[" + b(lo, "-inf") + ", " + b(hi, "+inf") + "]";
  }
};

using Window = std::vector<Interval>;
using ExpKey = std::vector<Half>;

inline Window window_all(std::size_t n) { return Window(n); }

// Sparse formal series over an ordered variable list with per-variable
// windows.  Coefficients C form a module over Rational: they need +, unary -,
// Rational * C, C * C where products are taken, and is_zero.
template <class C>
class SeriesT {
 public:
  SeriesT() = default;
  SeriesT(std::vector<std::string> vars, Window window)
      : vars_(std::move(vars)), window_(std::move(window)) {
    if (window_.size() != vars_.size())
      throw std::invalid_argument("series: window/variable arity mismatch");
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const Window& window() const { return window_; }
  const std::map<ExpKey, C>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  std::size_t var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i;
    throw std::invalid_argument("series: unknown variable '" + name + "'");
  }

  bool in_window(const ExpKey& e) const {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (!window_[i].contains(e[i])) return false;
    return true;
  }

  // Inserting outside the window is a programming error, not a user error.
  void set(ExpKey e, C c) {
    if (e.size() != vars_.size())
      throw std::invalid_argument("series: exponent arity mismatch");
    if (!in_window(e))
      throw std::invalid_argument("series: term outside window");
    if (is_zero(c))
      terms_.erase(e);
    else
      terms_[std::move(e)] = std::move(c);
  }
  void accumulate(const ExpKey& e, const C& c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!is_zero(c)) {
        if (!in_window(e))
          throw std::invalid_argument("series: term outside window");
        terms_.emplace(e, c);
      }
      return;
    }
    it->second = it->second + c;
    if (is_zero(it->second)) terms_.erase(it);
  }

  // Stored support hull per variable; nullopt when there are no terms.
  std::optional<Interval> support_hull(std::size_t v) const {
    if (terms_.empty()) return std::nullopt;
    Half lo = terms_.begin()->first[v], hi = lo;
    for (const auto& [e, c] : terms_) {
      lo = std::min(lo, e[v]);
      hi = std::max(hi, e[v]);
    }
    return Interval::bounded(lo, hi);
  }

  bool fully_known() const {
    for (const auto& iv : window_)
      if (iv.lo || iv.hi) return false;
    return true;
  }

 private:
  std::vector<std::string> vars_;
  Window window_;
  std::map<ExpKey, C> terms_;
};

template <class C>
SeriesT<C> make_series(std::vector<std::string> vars, Window window) {
  return SeriesT<C>(std::move(vars), std::move(window));
}

template <class C>
SeriesT<C> series_zero(std::vector<std::string> vars) {
  Window w(vars.size());
  return SeriesT<C>(std::move(vars), std::move(w));
}

template <class C>
SeriesT<C> series_monomial(std::vector<std::string> vars, ExpKey exps, C coeff) {
  auto s = series_zero<C>(std::move(vars));
  s.set(std::move(exps), std::move(coeff));
  return s;
}

template <class C>
SeriesT<C> series_constant(std::vector<std::string> vars, C coeff) {
  ExpKey e(vars.size(), Half(0));
  return series_monomial<C>(std::move(vars), std::move(e), std::move(coeff));
}

namespace detail {

inline void require_same_vars(const std::vector<std::string>& a,
                              const std::vector<std::string>& b) {
  if (a != b) throw std::invalid_argument("series: variable lists differ");
}

// Pieces of the line where a series is not known (beyond its window).
inline std::vector<Interval> unknown_pieces(const Interval& w) {
  std::vector<Interval> out;
  if (w.lo) out.push_back(Interval::at_most(*w.lo - half_step));
  if (w.hi) out.push_back(Interval::at_least(*w.hi + half_step));
  return out;
}

}  // namespace detail

template <class C>
SeriesT<C> restrict(const SeriesT<C>& s, const Window& window) {
  if (window.size() != s.vars().size())
    throw std::invalid_argument("restrict: window arity mismatch");
  Window w(window.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = intersect(s.window()[i], window[i]);
  SeriesT<C> out(s.vars(), w);
  for (const auto& [e, c] : s.terms())
    if (out.in_window(e)) out.set(e, c);
  return out;
}

template <class C>
SeriesT<C> add(const SeriesT<C>& a, const SeriesT<C>& b) {
  detail::require_same_vars(a.vars(), b.vars());
  Window w(a.vars().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = intersect(a.window()[i], b.window()[i]);
  SeriesT<C> out(a.vars(), w);
  for (const auto& [e, c] : a.terms())
    if (out.in_window(e)) out.accumulate(e, c);
  for (const auto& [e, c] : b.terms())
    if (out.in_window(e)) out.accumulate(e, c);
  return out;
}

template <class C>
SeriesT<C> negate(const SeriesT<C>& s) {
  SeriesT<C> out(s.vars(), s.window());
  for (const auto& [e, c] : s.terms()) out.set(e, -c);
  return out;
}

template <class C>
SeriesT<C> sub(const SeriesT<C>& a, const SeriesT<C>& b) {
  return add(a, negate(b));
}

template <class C>
SeriesT<C> scale(const Rational& r, const SeriesT<C>& s) {
  SeriesT<C> out(s.vars(), s.window());
  if (is_zero(r)) return out;
  for (const auto& [e, c] : s.terms()) out.set(e, r * c);
  return out;
}

// The closure check behind series_mul.  A target coefficient is determined
// exactly when every split e = e1 + e2 pairs known data with known data, or
// hits a known zero of one factor.  With box windows this is decidable per
// variable only when the unknown regions of the two factors do not spread
// over distinct variables; otherwise the product is refused outright (the
// cross pairings cannot be excluded by interval reasoning).
template <class A, class B>
void check_product_defined(const SeriesT<A>& a, const SeriesT<B>& b,
                           const Window& target) {
  const std::size_t nv = a.vars().size();
  std::set<std::size_t> ua, ub;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!detail::unknown_pieces(a.window()[v]).empty()) ua.insert(v);
    if (!detail::unknown_pieces(b.window()[v]).empty()) ub.insert(v);
  }
  if (!ua.empty() && !ub.empty() && !(ua == ub && ua.size() == 1)) {
    throw ill_defined_product(
        "series_mul: both factors carry unknown regions across distinct "
        "variables; no coefficient of the product is determined");
  }
  auto nkz = [](const auto& s, std::size_t v) {
    std::vector<Interval> out = detail::unknown_pieces(s.window()[v]);
    if (auto hull = s.support_hull(v)) out.push_back(*hull);
    return out;
  };
  for (std::size_t v = 0; v < nv; ++v) {
    auto harm = [&](const auto& x, const auto& y) {
      for (const Interval& p : detail::unknown_pieces(x.window()[v]))
        for (const Interval& q : nkz(y, v))
          if (intersects(sum(p, q), target[v]))
            throw ill_defined_product(
                "series_mul: coefficients in " + target[v].str() +
                " of variable '" + a.vars()[v] +
                "' depend on data outside the factors' windows");
    };
    harm(a, b);
    harm(b, a);
  }
}

template <class A, class B>
auto mul(const SeriesT<A>& a, const SeriesT<B>& b, const Window& target)
    -> SeriesT<decltype(std::declval<A>() * std::declval<B>())> {
  detail::require_same_vars(a.vars(), b.vars());
  if (target.size() != a.vars().size())
    throw std::invalid_argument("series_mul: target window arity mismatch");
  check_product_defined(a, b, target);
  using R = decltype(std::declval<A>() * std::declval<B>());
  SeriesT<R> out(a.vars(), target);
  const std::size_t nv = a.vars().size();
  ExpKey e(nv, Half(0));
  for (const auto& [e1, c1] : a.terms())
    for (const auto& [e2, c2] : b.terms()) {
      for (std::size_t v = 0; v < nv; ++v) e[v] = e1[v] + e2[v];
      if (out.in_window(e)) out.accumulate(e, c1 * c2);
    }
  return out;
}

template <class A, class B>
auto mul(const SeriesT<A>& a, const SeriesT<B>& b) {
  Window t(a.vars().size());
  for (std::size_t v = 0; v < t.size(); ++v)
    t[v] = sum(a.window()[v], b.window()[v]);
  return mul(a, b, t);
}

template <class C>
C coefficient(const SeriesT<C>& s, const ExpKey& exps) {
  if (exps.size() != s.vars().size())
    throw std::invalid_argument("coefficient: exponent arity mismatch");
  if (!s.in_window(exps))
    throw outside_window("coefficient: exponent outside window (unknown, not zero)");
  auto it = s.terms().find(exps);
  return it == s.terms().end() ? C{} : it->second;
}

// The exponent-e slice in one variable, as a series in the remaining ones.
template <class C>
SeriesT<C> slice(const SeriesT<C>& s, const std::string& var, Half e) {
  const std::size_t v = s.var_index(var);
  if (!s.window()[v].contains(e))
    throw outside_window("slice: exponent outside window in '" + var + "'");
  std::vector<std::string> vars;
  Window w;
  for (std::size_t i = 0; i < s.vars().size(); ++i)
    if (i != v) {
      vars.push_back(s.vars()[i]);
      w.push_back(s.window()[i]);
    }
  SeriesT<C> out(std::move(vars), std::move(w));
  for (const auto& [key, c] : s.terms()) {
    if (key[v] != e) continue;
    ExpKey reduced;
    for (std::size_t i = 0; i < key.size(); ++i)
      if (i != v) reduced.push_back(key[i]);
    out.accumulate(reduced, c);
  }
  return out;
}

template <class C>
SeriesT<C> residue(const SeriesT<C>& s, const std::string& var) {
  return slice(s, var, Half(-1));
}

template <class C>
SeriesT<C> derive(const SeriesT<C>& s, const std::string& var) {
  const std::size_t v = s.var_index(var);
  Window w = s.window();
  if (w[v].lo) w[v].lo = *w[v].lo - Half(1);
  if (w[v].hi) w[v].hi = *w[v].hi - Half(1);
  SeriesT<C> out(s.vars(), std::move(w));
  for (const auto& [key, c] : s.terms()) {
    if (key[v] == Half(0)) continue;
    ExpKey e = key;
    e[v] = key[v] - Half(1);
    out.accumulate(e, key[v].as_rational() * c);
  }
  return out;
}

// Multiply by var^k (exact; window shifts along).
template <class C>
SeriesT<C> shift_exponent(const SeriesT<C>& s, const std::string& var, Half k) {
  const std::size_t v = s.var_index(var);
  Window w = s.window();
  if (w[v].lo) w[v].lo = *w[v].lo + k;
  if (w[v].hi) w[v].hi = *w[v].hi + k;
  SeriesT<C> out(s.vars(), std::move(w));
  for (const auto& [key, c] : s.terms()) {
    ExpKey e = key;
    e[v] = key[v] + k;
    out.set(e, c);
  }
  return out;
}

// Reinterpret over a larger (or reordered) variable list; new variables get
// exponent zero and stay fully known.
template <class C>
SeriesT<C> embed(const SeriesT<C>& s, const std::vector<std::string>& vars) {
  std::vector<int> pos(vars.size(), -1);
  std::vector<bool> used(s.vars().size(), false);
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = 0; j < s.vars().size(); ++j)
      if (vars[i] == s.vars()[j]) {
        pos[i] = static_cast<int>(j);
        used[j] = true;
      }
  for (std::size_t j = 0; j < used.size(); ++j)
    if (!used[j])
      throw std::invalid_argument("embed: variable '" + s.vars()[j] + "' dropped");
  Window w(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (pos[i] >= 0) w[i] = s.window()[pos[i]];
  SeriesT<C> out(vars, std::move(w));
  for (const auto& [key, c] : s.terms()) {
    ExpKey e(vars.size(), Half(0));
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (pos[i] >= 0) e[i] = key[pos[i]];
    out.set(e, c);
  }
  return out;
}

using Series = SeriesT<Rational>;

// delta(x) = sum over all integers n of x^n, restricted to [lo, hi].
inline Series delta_window(const std::string& var, Half lo, Half hi) {
  Series out({var}, {Interval::bounded(lo, hi)});
  std::int64_t n0 = lo.twice() >= 0 ? (lo.twice() + 1) / 2 : lo.twice() / 2;  // ceil(lo)
  for (std::int64_t n = n0; Half(n) <= hi; ++n) out.set({Half(n)}, Rational(1));
  return out;
}

enum class SignOrder {
  plus_minus,  // (first - second)^n
  minus_plus,  // (-first + second)^n
};

inline Rational binomial_coeff(std::int64_t n, std::int64_t k) {
  Rational c(1);
  for (std::int64_t i = 0; i < k; ++i) {
    c *= Rational(Integer(n - i));
    c /= Rational(Integer(i + 1));
  }
  return c;
}

// (+-first -+ second)^n expanded in nonnegative integral powers of the
// second-listed variable.  Result variables: [first, second].
inline Series binomial_expand(const std::string& first, const std::string& second,
                              SignOrder order, std::int64_t n, const Window& window) {
  if (window.size() != 2)
    throw std::invalid_argument("binomial_expand: expected a two-variable window");
  std::int64_t k_max;
  if (n >= 0) {
    k_max = n;
  } else {
    if (!window[1].hi)
      throw std::invalid_argument(
          "binomial_expand: negative power needs the second variable bounded above");
    if (*window[1].hi < Half(0)) return Series({first, second}, window);
    k_max = window[1].hi->twice() / 2;
  }
  // Knowledge: every tuple with second-exponent <= k_max is determined (the
  // second exponent fixes the term), so only the second variable is cut.
  Window known(2);
  if (n < 0) known[1] = Interval::at_most(Half(k_max));
  Series out({first, second}, known);
  for (std::int64_t k = 0; k <= k_max; ++k) {
    Rational c = binomial_coeff(n, k);
    // (first - second)^n: sign (-1)^k on second; (-first + second)^n: the
    // sign rides on first's power n-k.
    bool neg = order == SignOrder::plus_minus ? (k % 2 != 0) : ((n - k) % 2 != 0);
    if (neg) c = -c;
    if (!is_zero(c)) out.set({Half(n - k), Half(k)}, c);
  }
  return restrict(out, window);
}

// sum over all integers n of (+-A -+ B)^n D^-n with each binomial expanded in
// nonnegative powers of B; exact on the window.  Multiply by D^-1 (via
// shift_exponent) to form the prefactored expressions of the Jacobi identity.
inline Series delta_composite(const std::string& var_a, const std::string& var_b,
                              const std::string& var_d, SignOrder order,
                              const Window& window) {
  if (window.size() != 3)
    throw std::invalid_argument("delta_composite: expected a three-variable window");
  const Interval& wd = window[2];
  if (!wd.lo || !wd.hi)
    throw std::invalid_argument("delta_composite: window unbounded in '" + var_d + "'");
  if (!window[1].hi)
    throw std::invalid_argument("delta_composite: window unbounded above in '" + var_b +
                                "'");
  if (!wd.lo->is_integer() || !wd.hi->is_integer() || !window[1].hi->is_integer())
    throw std::invalid_argument("delta_composite: bounds must be integers");
  Window known(3);
  known[1] = Interval::at_most(*window[1].hi);
  known[2] = wd;
  Series out({var_a, var_b, var_d}, known);
  const std::int64_t k_max = window[1].hi->twice() / 2;
  if (k_max < 0) return restrict(out, window);
  // D-exponent is -n, so n runs over the negated D-window.
  for (std::int64_t n = -wd.hi->as_integer(); n <= -wd.lo->as_integer(); ++n) {
    const std::int64_t kk = n >= 0 ? std::min(n, k_max) : k_max;
    for (std::int64_t k = 0; k <= kk; ++k) {
      Rational c = binomial_coeff(n, k);
      bool neg = order == SignOrder::plus_minus ? (k % 2 != 0) : ((n - k) % 2 != 0);
      if (neg) c = -c;
      if (!is_zero(c)) out.accumulate({Half(n - k), Half(k), Half(-n)}, c);
    }
  }
  return restrict(out, window);
}

// exp(s) = sum s^k / k! truncated to the window.  s must be graded strictly
// away from zero: every term's exponents all >= 0 with positive total, or all
// <= 0 with negative total.
template <class C>
SeriesT<C> formal_exp(const SeriesT<C>& s, const Window& window) {
  if (window.size() != s.vars().size())
    throw std::invalid_argument("formal_exp: window arity mismatch");
  bool all_nonneg = true, all_nonpos = true;
  for (const auto& [e, c] : s.terms()) {
    Half total(0);
    for (Half x : e) {
      total += x;
      if (x < Half(0)) all_nonneg = false;
      if (x > Half(0)) all_nonpos = false;
    }
    if (total == Half(0)) all_nonneg = all_nonpos = false;
  }
  if (!(all_nonneg || all_nonpos))
    throw std::invalid_argument(
        "formal_exp: nonzero constant term or non-positive grading");
  if (s.empty()) return series_constant<C>(s.vars(), C(Rational(1)));
  for (std::size_t v = 0; v < window.size(); ++v) {
    if (all_nonneg && !window[v].hi)
      throw std::invalid_argument("formal_exp: window unbounded above");
    if (!all_nonneg && !window[v].lo)
      throw std::invalid_argument("formal_exp: window unbounded below");
  }
  // Nothing on the far side of the grading direction exists, so knowledge
  // extends to the whole unbounded side; computing with the extended window
  // keeps the powers' known-zero regions visible to the product check.
  Window w(window.size());
  for (std::size_t v = 0; v < w.size(); ++v) {
    w[v] = window[v];
    if (all_nonneg)
      w[v].lo = std::nullopt;
    else
      w[v].hi = std::nullopt;
  }
  auto acc = restrict(series_constant<C>(s.vars(), C(Rational(1))), w);
  auto power = acc;
  for (std::int64_t k = 1; !power.empty(); ++k) {
    power = scale(rational(1, k), mul(power, s, w));
    acc = add(acc, power);
  }
  return acc;
}

// Scalar formal_exp needs C(Rational) constructible; Rational itself is.
template <class C>
std::string render(const SeriesT<C>& s) {
  if (s.terms().empty()) return "0";
  std::string out;
  for (const auto& [e, c] : s.terms()) {
    if (!out.empty()) out += " + ";
    out += to_string(c);
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == Half(0)) continue;
      out += " * " + s.vars()[v];
      out += "^" + e[v].str();
    }
  }
  return out;
}

}  // namespace voxcal

#endif
