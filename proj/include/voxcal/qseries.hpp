#ifndef VOXCAL_QSERIES_HPP
#define VOXCAL_QSERIES_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxcal/fock.hpp"
#include "voxcal/rational.hpp"

namespace voxcal {

// Exact one-variable series in q on the half-integer grid, known up to and
// including the truncation order.
class QSeries {
 public:
  explicit QSeries(Half order) : order_(order) {}

  Half order() const { return order_; }
  const std::map<Half, Rational>& terms() const { return terms_; }

  void set(Half e, Rational c) {
    if (e > order_) throw std::invalid_argument("qseries: exponent beyond order");
    if (is_zero(c))
      terms_.erase(e);
    else
      terms_[e] = std::move(c);
  }
  void accumulate(Half e, const Rational& c) {
    if (e > order_) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!is_zero(c)) terms_.emplace(e, c);
      return;
    }
    it->second += c;
    if (is_zero(it->second)) terms_.erase(it);
  }

  Rational coefficient(Half e) const {
    if (e > order_)
      throw std::out_of_range("qseries: coefficient beyond truncation order");
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  static QSeries one(Half order) {
    QSeries s(order);
    s.set(Half(0), Rational(1));
    return s;
  }

  friend QSeries operator+(const QSeries& a, const QSeries& b) {
    QSeries out(std::min(a.order_, b.order_));
    for (const auto& [e, c] : a.terms_) out.accumulate(e, c);
    for (const auto& [e, c] : b.terms_) out.accumulate(e, c);
    return out;
  }
  friend QSeries operator-(const QSeries& a, const QSeries& b) {
    QSeries out(std::min(a.order_, b.order_));
    for (const auto& [e, c] : a.terms_) out.accumulate(e, c);
    for (const auto& [e, c] : b.terms_) out.accumulate(e, -c);
    return out;
  }
  // Truncated product; factors must have no negative exponents (all series
  // handled here live in q^0 and up).
  friend QSeries operator*(const QSeries& a, const QSeries& b) {
    QSeries out(std::min(a.order_, b.order_));
    for (const auto& [ea, ca] : a.terms_) {
      if (ea < Half(0))
        throw std::invalid_argument("qseries: product needs nonnegative exponents");
      for (const auto& [eb, cb] : b.terms_) {
        if (ea + eb > out.order_) break;
        out.accumulate(ea + eb, ca * cb);
      }
    }
    return out;
  }
  friend bool operator==(const QSeries& a, const QSeries& b) {
    return a.order_ == b.order_ && a.terms_ == b.terms_;
  }

  // First exponent <= min(order) where the two disagree.
  static std::optional<Half> first_mismatch(const QSeries& a, const QSeries& b) {
    Half hi = std::min(a.order_, b.order_);
    std::set<Half> exps;
    for (const auto& [e, c] : a.terms_)
      if (e <= hi) exps.insert(e);
    for (const auto& [e, c] : b.terms_)
      if (e <= hi) exps.insert(e);
    for (Half e : exps)
      if (a.coefficient(e) != b.coefficient(e)) return e;
    return std::nullopt;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += to_string(c);
      if (e != Half(0)) out += "*q^" + e.str();
    }
    return out;
  }

 private:
  Half order_;
  std::map<Half, Rational> terms_;
};

// Product over the allowed parts p <= order of 1/(1 - q^p), exact to order.
inline QSeries euler_product(const std::vector<Half>& parts, Half order) {
  QSeries out = QSeries::one(order);
  for (Half p : parts) {
    if (p <= Half(0)) throw std::invalid_argument("euler_product: part <= 0");
    if (p > order) continue;
    QSeries geom(order);
    for (Half e(0); e <= order; e += p) geom.set(e, Rational(1));
    out = out * geom;
  }
  return out;
}

inline std::vector<Half> parts_congruent(const std::set<std::int64_t>& residues,
                                         std::int64_t modulus, Half order) {
  std::vector<Half> out;
  for (std::int64_t p = 1; Half(p) <= order; ++p)
    if (residues.count(((p % modulus) + modulus) % modulus)) out.push_back(Half(p));
  return out;
}

inline std::vector<Half> parts_half_odd(Half order) {
  std::vector<Half> out;
  for (Half p = half_step; p <= order; p += Half(1)) out.push_back(p);
  return out;
}

// Decidable conditions on integer partitions; conjunction of the present
// fields.  Parts are listed descending.
struct PartitionPredicate {
  std::optional<std::pair<std::set<std::int64_t>, std::int64_t>> congruence;
  std::optional<std::int64_t> min_part;
  std::optional<std::int64_t> difference_at_least;

  static PartitionPredicate congruent(std::set<std::int64_t> residues,
                                      std::int64_t modulus) {
    PartitionPredicate p;
    p.congruence = {std::move(residues), modulus};
    return p;
  }
  static PartitionPredicate difference_two() {
    PartitionPredicate p;
    p.difference_at_least = 2;
    return p;
  }
  static PartitionPredicate difference_two_min_two() {
    PartitionPredicate p;
    p.difference_at_least = 2;
    p.min_part = 2;
    return p;
  }

  bool matches(const std::vector<std::int64_t>& desc_parts) const {
    if (congruence) {
      const auto& [residues, mod] = *congruence;
      for (auto p : desc_parts)
        if (!residues.count(((p % mod) + mod) % mod)) return false;
    }
    if (min_part && !desc_parts.empty() && desc_parts.back() < *min_part) return false;
    if (difference_at_least) {
      for (std::size_t i = 0; i + 1 < desc_parts.size(); ++i)
        if (desc_parts[i] - desc_parts[i + 1] < *difference_at_least) return false;
    }
    return true;
  }
};

namespace detail {

// Exhaustive enumeration oracle: walks every partition of n and tests the
// predicate on each one.
inline std::int64_t brute_force_count(std::int64_t n, const PartitionPredicate& pred) {
  std::vector<std::int64_t> parts;
  std::function<std::int64_t(std::int64_t, std::int64_t)> walk =
      [&](std::int64_t rest, std::int64_t max_part) -> std::int64_t {
    if (rest == 0) return pred.matches(parts) ? 1 : 0;
    std::int64_t total = 0;
    for (std::int64_t p = std::min(rest, max_part); p >= 1; --p) {
      parts.push_back(p);
      total += walk(rest - p, p);
      parts.pop_back();
    }
    return total;
  };
  return walk(n, n);
}

// DP over allowed parts (no difference condition).
inline std::int64_t dp_count_parts(std::int64_t n,
                                   const std::vector<std::int64_t>& allowed) {
  std::vector<std::int64_t> ways(n + 1, 0);
  ways[0] = 1;
  for (auto p : allowed)
    for (std::int64_t m = p; m <= n; ++m) ways[m] += ways[m - p];
  return ways[n];
}

// DP for successive differences >= d with smallest part >= k: the smallest
// part is either k (leaving min >= k + d) or >= k + 1.
inline std::int64_t dp_count_gaps(std::int64_t n, std::int64_t k, std::int64_t d,
                                  std::vector<std::vector<std::int64_t>>& memo) {
  if (n == 0) return 1;
  if (k > n) return 0;
  auto& row = memo[n];
  if (row[k] >= 0) return row[k];
  std::int64_t r = dp_count_gaps(n, k + 1, d, memo);
  r += dp_count_gaps(n - k, std::min<std::int64_t>(k + d, n - k + 1), d, memo);
  row[k] = r;
  return r;
}

}  // namespace detail

// Counting path chosen by the predicate's shape; disagreement between the DP
// and the brute-force enumeration throws.
inline std::int64_t count_partitions_dp(std::int64_t n, const PartitionPredicate& pred) {
  if (n < 0) throw std::invalid_argument("count_partitions: negative n");
  if (pred.difference_at_least) {
    if (pred.congruence)
      throw std::invalid_argument(
          "count_partitions: DP for congruence combined with gap condition is "
          "not implemented");
    std::int64_t k = pred.min_part.value_or(1);
    if (n == 0) return 1;
    std::vector<std::vector<std::int64_t>> memo(
        n + 1, std::vector<std::int64_t>(n + 2, -1));
    return detail::dp_count_gaps(n, std::min(k, n + 1), *pred.difference_at_least, memo);
  }
  std::vector<std::int64_t> allowed;
  for (std::int64_t p = pred.min_part.value_or(1); p <= n; ++p) {
    if (pred.congruence) {
      const auto& [residues, mod] = *pred.congruence;
      if (!residues.count(((p % mod) + mod) % mod)) continue;
    }
    allowed.push_back(p);
  }
  return n == 0 ? 1 : detail::dp_count_parts(n, allowed);
}

// Brute force walks every partition of n, so it is capped; the DP carries
// larger orders.
inline constexpr std::int64_t brute_force_cap = 60;

inline std::int64_t count_partitions_brute(std::int64_t n,
                                           const PartitionPredicate& pred) {
  if (n < 0) throw std::invalid_argument("count_partitions: negative n");
  if (n > brute_force_cap)
    throw std::invalid_argument("count_partitions: brute force capped at n <= " +
                                std::to_string(brute_force_cap));
  return detail::brute_force_count(n, pred);
}

inline std::int64_t count_partitions(std::int64_t n, const PartitionPredicate& pred) {
  const std::int64_t dp = count_partitions_dp(n, pred);
  const std::int64_t brute = count_partitions_brute(n, pred);
  if (dp != brute)
    throw std::logic_error("count_partitions: DP and brute-force paths disagree at n=" +
                           std::to_string(n));
  return dp;
}

struct RRReport {
  int which = 1;
  std::int64_t order = 0;
  bool pass = false;
  std::optional<Half> first_mismatch;
  Rational product_value_at_mismatch;
  Rational sum_value_at_mismatch;
};

inline PartitionPredicate rr_product_predicate(int which) {
  if (which == 1) return PartitionPredicate::congruent({1, 4}, 5);
  if (which == 2) return PartitionPredicate::congruent({2, 3}, 5);
  throw std::invalid_argument("rr: which must be 1 or 2");
}

inline PartitionPredicate rr_sum_predicate(int which) {
  if (which == 1) return PartitionPredicate::difference_two();
  if (which == 2) return PartitionPredicate::difference_two_min_two();
  throw std::invalid_argument("rr: which must be 1 or 2");
}

inline QSeries rr_product_series(int which, std::int64_t order) {
  auto residues = which == 1 ? std::set<std::int64_t>{1, 4} : std::set<std::int64_t>{2, 3};
  return euler_product(parts_congruent(residues, 5, Half(order)), Half(order));
}

inline QSeries rr_sum_series(int which, std::int64_t order) {
  const PartitionPredicate pred = rr_sum_predicate(which);
  QSeries out{Half(order)};
  for (std::int64_t n = 0; n <= order; ++n)
    out.set(Half(n), Rational(Integer(count_partitions_dp(n, pred))));
  return out;
}

// Product side (congruence-restricted Euler product) against the sum side
// (gap-condition counting), coefficient by coefficient.
inline RRReport rr_verify(int which, std::int64_t order) {
  if (order < 1) throw std::invalid_argument("rr_verify: order must be >= 1");
  RRReport rep;
  rep.which = which;
  rep.order = order;
  const QSeries product = rr_product_series(which, order);
  const QSeries sum = rr_sum_series(which, order);
  rep.first_mismatch = QSeries::first_mismatch(product, sum);
  rep.pass = !rep.first_mismatch.has_value();
  if (rep.first_mismatch) {
    rep.product_value_at_mismatch = product.coefficient(*rep.first_mismatch);
    rep.sum_value_at_mismatch = sum.coefficient(*rep.first_mismatch);
  }
  return rep;
}

struct DifferenceTwoCount {
  std::int64_t weight = 0;
  bool strict_tail = false;
  std::int64_t count = 0;
};

// Index tuples j_1 <= j_2 - 2, ..., j_{m-1} <= j_m - 2, all j_i < 0, with
// sum(-j_i) = weight; with strict_tail additionally j_m <= -2.  Enumerated
// directly on the tuples (via a = -j, chosen largest first), independently of
// the partition counters.
inline std::int64_t difference_two_monomial_count(std::int64_t weight, bool strict_tail) {
  if (weight < 0) throw std::invalid_argument("difference_two_monomials: negative weight");
  if (weight == 0) return 1;  // the empty monomial
  const std::int64_t tail_min = strict_tail ? 2 : 1;
  std::function<std::int64_t(std::int64_t, std::int64_t)> walk =
      // rest = weight still to place; cap = largest allowed -j for the next
      // index down the tuple.  Stopping here makes the part just placed the
      // tuple's last (innermost) index, so it must meet the tail bound.
      [&](std::int64_t rest, std::int64_t cap) -> std::int64_t {
    std::int64_t total = 0;
    for (std::int64_t a = std::min(rest, cap); a >= 1; --a) {
      if (rest == a) {
        if (a >= tail_min) ++total;
        continue;
      }
      total += walk(rest - a, a - 2);
    }
    return total;
  };
  return walk(weight, weight);
}

inline QSeries difference_two_generating_series(std::int64_t max_weight,
                                                bool strict_tail) {
  QSeries out{Half(max_weight)};
  for (std::int64_t w = 0; w <= max_weight; ++w)
    out.set(Half(w),
            Rational(Integer(difference_two_monomial_count(w, strict_tail))));
  return out;
}

// Graded dimension of S: generating function of weight_basis sizes.
inline QSeries fock_graded_dimension(Half max_weight) {
  if (max_weight < Half(0))
    throw std::invalid_argument("graded_dimension: negative order");
  QSeries out(max_weight);
  for (Half w : weight_grid(max_weight))
    out.set(w, Rational(Integer(static_cast<std::int64_t>(weight_basis(w).size()))));
  return out;
}

// Display constants quoted from the moonshine discussion; none of these are
// computed here.
struct MoonshineConstants {
  std::int64_t j_coefficient_q_minus_1 = 1;
  std::int64_t j_coefficient_q_0 = 0;
  std::int64_t j_coefficient_q_1 = 196884;
  std::int64_t griess_dimension = 196883;
  std::int64_t griess_enlarged_dimension = 196884;
  std::int64_t moonshine_central_charge = 24;
  std::int64_t leech_rank = 24;
};

inline MoonshineConstants moonshine_constants() { return {}; }

}  // namespace voxcal

#endif
