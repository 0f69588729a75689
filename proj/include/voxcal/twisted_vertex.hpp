#ifndef VOXCAL_TWISTED_VERTEX_HPP
#define VOXCAL_TWISTED_VERTEX_HPP

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "voxcal/fock.hpp"
#include "voxcal/linsolve.hpp"
#include "voxcal/parallel.hpp"
#include "voxcal/rational.hpp"

namespace voxcal {

// Selects Y(x) or -Y(x); the two basic modules differ only by this sign.
enum class BasicModuleSign : int { plus = 1, minus = -1 };

inline int sign_value(BasicModuleSign s) { return static_cast<int>(s); }

namespace detail {

inline Rational pow_rational(const Rational& base, std::int64_t k) {
  Rational out(1);
  for (std::int64_t i = 0; i < k; ++i) out *= base;
  return out;
}

inline Rational factorial(std::int64_t k) {
  Rational out(1);
  for (std::int64_t i = 2; i <= k; ++i) out *= Rational(Integer(i));
  return out;
}

}  // namespace detail

// Coefficient of x^e in exp(sum_n y_n x^n / n): the sum over monomials of
// weight e of prod_n y_n^{m_n} / (n^{m_n} m_n!).
inline FockVector compute_creation_coefficient(Half e) {
  FockVector out;
  if (e < Half(0)) return out;
  for (const FockMonomial& m : weight_basis(e)) {
    Rational c(1);
    const auto& parts = m.parts();
    for (std::size_t i = 0; i < parts.size();) {
      std::size_t j = i;
      while (j < parts.size() && parts[j] == parts[i]) ++j;
      const std::int64_t mult = static_cast<std::int64_t>(j - i);
      c /= detail::pow_rational(parts[i].as_rational(), mult) * detail::factorial(mult);
      i = j;
    }
    out.accumulate(m, c);
  }
  return out;
}

inline const FockVector& creation_coefficient(Half e) {
  static std::map<Half, FockVector> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(e);
  if (it != cache.end()) return it->second;
  return cache.emplace(e, compute_creation_coefficient(e)).first->second;
}

// exp(-2 sum_n d/dy_n x^{-n}) v, grouped by the weight d it removes:
// returns d -> component, with x-exponent -d.  Finite because the operator is
// locally nilpotent.
inline std::map<Half, FockVector> annihilation_expansion(const FockVector& v) {
  std::map<Half, FockVector> acc;
  acc.emplace(Half(0), v);
  std::set<Half> indices;
  for (const auto& [m, c] : v.terms())
    for (Half p : m.parts()) indices.insert(p);
  for (Half n : indices) {
    std::map<Half, FockVector> next;
    for (const auto& [d, vec] : acc) {
      FockVector der = vec;
      Rational factor(1);
      for (std::int64_t m = 0; !der.is_zero_vector(); ++m) {
        if (m > 0) {
          der = d_y(n, der);
          factor *= rational(-2, m);
          if (der.is_zero_vector()) break;
        }
        auto [it, inserted] = next.emplace(d + m * n, factor * der);
        if (!inserted) {
          FockVector sum = it->second + factor * der;
          it->second = std::move(sum);
        }
      }
    }
    acc = std::move(next);
  }
  return acc;
}

// The exact component A_j of Y(x) = exp(sum y_n x^n / n) exp(-2 sum d_n x^-n):
// coefficient of x^{-j} applied to v, times the module sign.  No truncation:
// annihilation acts through finitely many monomials and each leftover weight
// determines the creation part.
inline FockVector apply_A(Half j, const FockVector& v,
                          BasicModuleSign sign = BasicModuleSign::plus) {
  FockVector out;
  for (const auto& [d, vec] : annihilation_expansion(v)) {
    const Half e = d - j;
    if (e < Half(0)) continue;
    const FockVector& c = creation_coefficient(e);
    if (c.is_zero_vector()) continue;
    out = out + c * vec;
  }
  if (sign_value(sign) < 0) out = -out;
  return out;
}

// Coordinates in a given ordered monomial basis; the vector must be supported
// on it.
inline RatVec coordinates(const FockVector& v, const std::vector<FockMonomial>& basis) {
  RatVec out(basis.size());
  std::size_t found = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out[i] = v.coeff(basis[i]);
    if (!is_zero(out[i])) ++found;
  }
  if (found != v.terms().size())
    throw std::invalid_argument("coordinates: vector not supported on the basis");
  return out;
}

// Weight-graded matrix of A_j up to the cutoff: block(w) maps the weight-w
// basis into the weight-(w-j) basis.  Weights whose source or image leave
// [0, cutoff] have no block: they are out of window, not zero.
struct GradedOperatorMatrix {
  Half j{0};
  Half cutoff{0};
  BasicModuleSign sign = BasicModuleSign::plus;
  std::map<Half, Matrix> blocks;

  bool has_block(Half w) const { return blocks.count(w) != 0; }
  const Matrix& block(Half w) const {
    auto it = blocks.find(w);
    if (it == blocks.end())
      throw std::out_of_range("a_matrix: weight " + w.str() + " out of window");
    return it->second;
  }
};

inline GradedOperatorMatrix a_matrix(Half j, Half cutoff,
                                     BasicModuleSign sign = BasicModuleSign::plus) {
  if (cutoff < Half(0)) throw std::invalid_argument("a_matrix: negative cutoff");
  GradedOperatorMatrix out;
  out.j = j;
  out.cutoff = cutoff;
  out.sign = sign;
  for (Half w : weight_grid(cutoff)) {
    const Half target = w - j;
    if (target < Half(0) || target > cutoff) continue;
    const auto source_basis = weight_basis(w);
    const auto target_basis = weight_basis(target);
    Matrix m = zero_matrix(target_basis.size(), source_basis.size());
    for (std::size_t col = 0; col < source_basis.size(); ++col) {
      const RatVec coords =
          coordinates(apply_A(j, FockVector(source_basis[col]), sign), target_basis);
      for (std::size_t row = 0; row < target_basis.size(); ++row) m[row][col] = coords[row];
    }
    out.blocks.emplace(w, std::move(m));
  }
  return out;
}

// The operators of the closure statement: identity, creation y_n,
// annihilation d/dy_n, and the twisted components A_j.
struct SpanOperator {
  enum class Kind { identity, creation, annihilation, a_component };
  Kind kind = Kind::identity;
  Half index{0};

  static SpanOperator id() { return {Kind::identity, Half(0)}; }
  static SpanOperator creation_op(Half n) {
    require_fock_index(n);
    return {Kind::creation, n};
  }
  static SpanOperator annihilation_op(Half n) {
    require_fock_index(n);
    return {Kind::annihilation, n};
  }
  static SpanOperator a_op(Half j) { return {Kind::a_component, j}; }

  // Weight drop: identity 0, y_n raises by n, d_n lowers by n, A_j lowers by j.
  Half degree() const {
    switch (kind) {
      case Kind::identity: return Half(0);
      case Kind::creation: return -index;
      case Kind::annihilation: return index;
      case Kind::a_component: return index;
    }
    return Half(0);
  }

  friend auto operator<=>(const SpanOperator&, const SpanOperator&) = default;

  std::string str() const {
    switch (kind) {
      case Kind::identity: return "1";
      case Kind::creation: return "y(" + index.str() + ")";
      case Kind::annihilation: return "d(" + index.str() + ")";
      case Kind::a_component: return "A(" + index.str() + ")";
    }
    return "?";
  }
};

// The finite set of span operators of exactly the given weight degree.
inline std::vector<SpanOperator> candidate_span(Half d) {
  std::vector<SpanOperator> out;
  if (d == Half(0)) out.push_back(SpanOperator::id());
  if ((-d).is_positive_half_odd()) out.push_back(SpanOperator::creation_op(-d));
  if (d.is_positive_half_odd()) out.push_back(SpanOperator::annihilation_op(d));
  out.push_back(SpanOperator::a_op(d));
  return out;
}

// Formal linear combination of span operators.
using SpanCombination = std::map<SpanOperator, Rational>;

struct BracketEntry {
  SpanOperator op1, op2;
  bool fit_consistent = false;
  bool residual_zero = false;
  SpanCombination combination;
  std::string failure;  // nonempty on any defect

  bool pass() const { return fit_consistent && residual_zero; }
};

struct ClosureReport {
  Half index_bound{0};
  Half fit_cutoff{0};
  Half verify_cutoff{0};
  BasicModuleSign sign = BasicModuleSign::plus;
  std::vector<BracketEntry> a_pairs;
  std::vector<BracketEntry> mixed_pairs;
  bool antisymmetry_pass = false;
  std::size_t jacobi_triples_checked = 0;
  bool jacobi_pass = false;
  bool pass = false;
  std::vector<std::string> failures;
};

// Derives and cross-validates the bracket table of the span operators: solve
// for the decomposition at weight <= fit_cutoff, then re-verify it with zero
// residual on every basis vector of weight <= verify_cutoff.
class ClosureVerifier {
 public:
  ClosureVerifier(BasicModuleSign sign, Half fit_cutoff, Half verify_cutoff)
      : sign_(sign), fit_cutoff_(fit_cutoff), verify_cutoff_(verify_cutoff) {
    if (verify_cutoff_ < fit_cutoff_)
      throw std::invalid_argument("closure: verify cutoff below fit cutoff");
  }

  BasicModuleSign sign() const { return sign_; }
  Half fit_cutoff() const { return fit_cutoff_; }
  Half verify_cutoff() const { return verify_cutoff_; }

  const FockVector& a_on_monomial(Half j, const FockMonomial& m) {
    const auto key = std::make_pair(j, m);
    auto it = a_cache_.find(key);
    if (it == a_cache_.end())
      it = a_cache_.emplace(key, apply_A(j, FockVector(m), sign_)).first;
    return it->second;
  }

  FockVector apply_a(Half j, const FockVector& v) {
    std::vector<std::pair<FockMonomial, Rational>> buf;
    for (const auto& [m, c] : v.terms())
      for (const auto& [m2, c2] : a_on_monomial(j, m).terms()) buf.emplace_back(m2, c * c2);
    return FockVector::from_unsorted(std::move(buf));
  }

  FockVector apply(const SpanOperator& op, const FockVector& v) {
    switch (op.kind) {
      case SpanOperator::Kind::identity: return v;
      case SpanOperator::Kind::creation: return mul_y(op.index, v);
      case SpanOperator::Kind::annihilation: return d_y(op.index, v);
      case SpanOperator::Kind::a_component: return apply_a(op.index, v);
    }
    return v;
  }

  FockVector commutator(const SpanOperator& p, const SpanOperator& q,
                        const FockVector& v) {
    return apply(p, apply(q, v)) - apply(q, apply(p, v));
  }

  // Fit-then-verify decomposition of [p, q] in candidate_span(deg p + deg q).
  // The mirrored pair comes out of the same run: [q, p] b = -(X_b - Y_b) for
  // the same two compositions, so its fit solution and residuals are the
  // exact negations.
  const BracketEntry& bracket(const SpanOperator& p, const SpanOperator& q) {
    {
      auto it = table_.find(std::make_pair(p, q));
      if (it != table_.end()) return it->second;
    }

    BracketEntry entry;
    entry.op1 = p;
    entry.op2 = q;
    const std::vector<SpanOperator> candidates = candidate_span(p.degree() + q.degree());
    const std::vector<FockMonomial>& basis = verify_basis();

    std::vector<FockVector> rhs(basis.size());
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const FockVector vb(basis[b]);
      rhs[b] = apply(p, apply(q, vb)) - apply(q, apply(p, vb));
    }

    // One global exact system over all fit vectors (weight <= fit cutoff).
    std::set<FockMonomial> support;
    std::vector<std::vector<FockVector>> cand_applied(basis.size());
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (basis[b].weight() > fit_cutoff_) continue;
      for (const auto& [m, c] : rhs[b].terms()) support.insert(m);
      for (const SpanOperator& cand : candidates) {
        cand_applied[b].push_back(apply(cand, FockVector(basis[b])));
        for (const auto& [m, c] : cand_applied[b].back().terms()) support.insert(m);
      }
    }
    Matrix a;
    std::vector<Rational> b_col;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (basis[b].weight() > fit_cutoff_) continue;
      for (const FockMonomial& m : support) {
        std::vector<Rational> row(candidates.size());
        bool any = false;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          row[c] = cand_applied[b][c].coeff(m);
          any = any || !is_zero(row[c]);
        }
        const Rational target = rhs[b].coeff(m);
        if (!any && is_zero(target)) continue;
        a.push_back(std::move(row));
        b_col.push_back(target);
      }
    }

    LinearSolveResult sol = a.empty()
                                ? LinearSolveResult{true, false, {}}
                                : solve_exact(std::move(a), std::move(b_col));
    if (!sol.consistent) {
      entry.fit_consistent = false;
      entry.failure = "fit system inconsistent for [" + p.str() + ", " + q.str() + "]";
      return insert_pair(p, q, std::move(entry));
    }
    entry.fit_consistent = true;
    if (!sol.unique) {
      // All-zero data: the zero combination is the canonical answer.  Any
      // other degeneracy means the fit cutoff cannot separate the candidates.
      bool all_zero = true;
      for (const auto& v : rhs) all_zero = all_zero && v.is_zero_vector();
      if (!all_zero)
        throw std::logic_error("closure: fit system underdetermined; raise fit cutoff");
      sol.solution.assign(candidates.size(), Rational(0));
    }
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (!is_zero(sol.solution[c])) entry.combination[candidates[c]] = sol.solution[c];

    entry.residual_zero = true;
    for (std::size_t b = 0; b < basis.size() && entry.residual_zero; ++b) {
      const FockVector vb(basis[b]);
      FockVector residual = rhs[b];
      for (const auto& [op, coeff] : entry.combination)
        residual = residual - coeff * apply(op, vb);
      if (!residual.is_zero_vector()) {
        entry.residual_zero = false;
        entry.failure = "nonzero residual for [" + p.str() + ", " + q.str() + "] on " +
                        basis[b].str();
      }
    }
    return insert_pair(p, q, std::move(entry));
  }

  // [x, combination], expanded through the bracket table.
  SpanCombination bracket_with_combination(const SpanOperator& x,
                                           const SpanCombination& comb, bool& ok) {
    SpanCombination out;
    for (const auto& [op, coeff] : comb) {
      const BracketEntry& e = bracket(x, op);
      if (!e.pass()) {
        ok = false;
        return out;
      }
      for (const auto& [op2, c2] : e.combination) {
        out[op2] += coeff * c2;
        if (is_zero(out[op2])) out.erase(op2);
      }
    }
    return out;
  }

  // Lie Jacobi identity of the derived table on one triple.
  bool jacobi_triple(const SpanOperator& x, const SpanOperator& y,
                     const SpanOperator& z) {
    bool ok = true;
    SpanCombination total;
    auto cyc = [&](const SpanOperator& a, const SpanOperator& b, const SpanOperator& c) {
      const BracketEntry& inner = bracket(b, c);
      if (!inner.pass()) {
        ok = false;
        return;
      }
      for (const auto& [op, coeff] : bracket_with_combination(a, inner.combination, ok)) {
        total[op] += coeff;
        if (is_zero(total[op])) total.erase(op);
      }
    };
    cyc(x, y, z);
    cyc(y, z, x);
    cyc(z, x, y);
    return ok && total.empty();
  }

  ClosureReport run(Half index_bound);

 private:
  const std::vector<FockMonomial>& verify_basis() {
    if (verify_basis_.empty())
      for (Half w : weight_grid(verify_cutoff_))
        for (const FockMonomial& m : weight_basis(w)) verify_basis_.push_back(m);
    return verify_basis_;
  }

  const BracketEntry& insert_pair(const SpanOperator& p, const SpanOperator& q,
                                  BracketEntry entry) {
    if (!(q == p)) {
      BracketEntry mirror;
      mirror.op1 = q;
      mirror.op2 = p;
      mirror.fit_consistent = entry.fit_consistent;
      mirror.residual_zero = entry.residual_zero;
      for (const auto& [op, c] : entry.combination) mirror.combination[op] = -c;
      if (!entry.failure.empty())
        mirror.failure = "mirror of: " + entry.failure;
      table_.emplace(std::make_pair(q, p), std::move(mirror));
    }
    return table_.emplace(std::make_pair(p, q), std::move(entry)).first->second;
  }

  BasicModuleSign sign_;
  Half fit_cutoff_;
  Half verify_cutoff_;
  std::vector<FockMonomial> verify_basis_;
  std::map<std::pair<Half, FockMonomial>, FockVector> a_cache_;
  std::map<std::pair<SpanOperator, SpanOperator>, BracketEntry> table_;
};

inline ClosureReport ClosureVerifier::run(Half index_bound) {
  if (index_bound <= Half(0))
    throw std::invalid_argument("closure: index bound must be positive");
  ClosureReport rep;
  rep.index_bound = index_bound;
  rep.fit_cutoff = fit_cutoff_;
  rep.verify_cutoff = verify_cutoff_;
  rep.sign = sign_;

  std::vector<Half> indices;
  for (Half i = -index_bound; i <= index_bound; i += half_step) indices.push_back(i);

  // Prefill the monomial cache so the pair evaluations are pure lookups;
  // candidate degrees reach twice the index bound.
  {
    const Half double_bound = index_bound + index_bound;
    std::map<Half, Half> needed;  // A index -> max monomial weight
    for (Half j : indices) needed[j] = verify_cutoff_ + index_bound;
    for (Half d = -double_bound; d <= double_bound; d += half_step) {
      auto [it, inserted] = needed.emplace(d, verify_cutoff_);
      if (!inserted) it->second = std::max(it->second, verify_cutoff_);
    }
    std::vector<std::pair<Half, Half>> jobs(needed.begin(), needed.end());
    auto filled = parallel_map<std::map<std::pair<Half, FockMonomial>, FockVector>>(
        jobs.size(), [&](std::size_t k) {
          std::map<std::pair<Half, FockMonomial>, FockVector> out;
          const auto [j, wmax] = jobs[k];
          for (Half w : weight_grid(wmax))
            for (const FockMonomial& m : weight_basis(w))
              out.emplace(std::make_pair(j, m), apply_A(j, FockVector(m), sign_));
          return out;
        });
    for (auto& part : filled)
      for (auto& [k, v] : part) a_cache_.insert_or_assign(k, std::move(v));
  }

  for (Half i : indices)
    for (Half j : indices) {
      const BracketEntry& e = bracket(SpanOperator::a_op(i), SpanOperator::a_op(j));
      rep.a_pairs.push_back(e);
      if (!e.pass()) rep.failures.push_back(e.failure);
    }

  // Brackets of the A family against the Heisenberg span and the identity,
  // plus the Heisenberg relations themselves.
  std::vector<SpanOperator> heis;
  for (Half n = half_step; n <= index_bound; n += Half(1)) {
    heis.push_back(SpanOperator::creation_op(n));
    heis.push_back(SpanOperator::annihilation_op(n));
  }
  heis.push_back(SpanOperator::id());
  for (Half i : indices)
    for (const SpanOperator& h : heis) {
      const BracketEntry& e = bracket(SpanOperator::a_op(i), h);
      rep.mixed_pairs.push_back(e);
      if (!e.pass()) rep.failures.push_back(e.failure);
    }
  for (const SpanOperator& h1 : heis)
    for (const SpanOperator& h2 : heis) {
      const BracketEntry& e = bracket(h1, h2);
      rep.mixed_pairs.push_back(e);
      if (!e.pass()) rep.failures.push_back(e.failure);
    }

  rep.antisymmetry_pass = true;
  for (Half i : indices)
    for (Half j : indices) {
      const auto& eij = bracket(SpanOperator::a_op(i), SpanOperator::a_op(j));
      const auto& eji = bracket(SpanOperator::a_op(j), SpanOperator::a_op(i));
      SpanCombination neg;
      for (const auto& [op, c] : eji.combination) neg[op] = -c;
      if (eij.combination != neg) {
        rep.antisymmetry_pass = false;
        rep.failures.push_back("antisymmetry fails at (" + i.str() + ", " + j.str() + ")");
      }
    }

  // Jacobi identity of the derived bracket table on a deterministic sample.
  std::vector<SpanOperator> sample;
  const Half jac_bound = std::min(Half(1), index_bound);
  for (Half i = -jac_bound; i <= jac_bound; i += half_step)
    sample.push_back(SpanOperator::a_op(i));
  sample.push_back(SpanOperator::creation_op(half_step));
  sample.push_back(SpanOperator::annihilation_op(half_step));
  sample.push_back(SpanOperator::id());
  rep.jacobi_pass = true;
  for (const auto& x : sample)
    for (const auto& y : sample)
      for (const auto& z : sample) {
        ++rep.jacobi_triples_checked;
        if (!jacobi_triple(x, y, z)) {
          rep.jacobi_pass = false;
          rep.failures.push_back("Lie Jacobi identity fails on (" + x.str() + ", " +
                                 y.str() + ", " + z.str() + ")");
        }
      }

  rep.pass = rep.antisymmetry_pass && rep.jacobi_pass && rep.failures.empty();
  return rep;
}

inline ClosureReport verify_sl2_closure(Half index_bound, Half fit_cutoff,
                                        Half verify_cutoff, BasicModuleSign sign) {
  ClosureVerifier v(sign, fit_cutoff, verify_cutoff);
  return v.run(index_bound);
}

// One decomposition in isolation: [A_i, A_j] fitted at weight <= fit_cutoff
// and verified at weight <= verify_cutoff.
inline BracketEntry bracket_decompose(Half i, Half j, Half fit_cutoff, Half verify_cutoff,
                                      BasicModuleSign sign = BasicModuleSign::plus) {
  ClosureVerifier v(sign, fit_cutoff, verify_cutoff);
  return v.bracket(SpanOperator::a_op(i), SpanOperator::a_op(j));
}

inline nlohmann::ordered_json to_json(const BracketEntry& e) {
  nlohmann::ordered_json span = nlohmann::ordered_json::array();
  for (const auto& [op, c] : e.combination)
    span.push_back({{"op", op.str()}, {"coeff", to_string(c)}});
  return {{"op1", e.op1.str()},
          {"op2", e.op2.str()},
          {"span", span},
          {"fit_consistent", e.fit_consistent},
          {"residual_zero", e.residual_zero}};
}

inline nlohmann::ordered_json to_json(const ClosureReport& r) {
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& e : r.a_pairs) pairs.push_back(to_json(e));
  nlohmann::ordered_json mixed = nlohmann::ordered_json::array();
  for (const auto& e : r.mixed_pairs) mixed.push_back(to_json(e));
  return {{"schema", "voxcal/1"},
          {"kind", "closure_report"},
          {"index_bound", r.index_bound.str()},
          {"fit_cutoff", r.fit_cutoff.str()},
          {"verify_cutoff", r.verify_cutoff.str()},
          {"sign", sign_value(r.sign)},
          {"pairs", pairs},
          {"mixed_pairs", mixed},
          {"antisymmetry_pass", r.antisymmetry_pass},
          {"jacobi_triples_checked", r.jacobi_triples_checked},
          {"jacobi_pass", r.jacobi_pass},
          {"pass", r.pass},
          {"failures", r.failures}};
}

}  // namespace voxcal

#endif
