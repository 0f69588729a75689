#ifndef VOXCAL_VERTEX_AXIOMS_HPP
#define VOXCAL_VERTEX_AXIOMS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "voxcal/linsolve.hpp"
#include "voxcal/rational.hpp"
#include "voxcal/series.hpp"

namespace voxcal {

enum class Verdict { pass, fail, inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::string detail;                  // ranges used, found k, skipped pairs
  std::vector<std::string> witnesses;  // offending monomials/entries
};

struct AxiomReport {
  std::string mode;  // which axiom subset ran
  std::vector<CheckResult> checks;

  Verdict overall() const {
    Verdict out = Verdict::pass;
    for (const auto& c : checks) {
      if (c.verdict == Verdict::fail) return Verdict::fail;
      if (c.verdict == Verdict::inconclusive) out = Verdict::inconclusive;
    }
    return out;
  }
};

struct BasisElement {
  std::string name;
  std::int64_t weight = 0;
};

// Products u_n v for one (u, v): known for n >= n_min, zero for n >=
// truncation, stored in between.  Entries below n_min are unknown unless the
// instance is complete.
struct PairTable {
  std::int64_t n_min = 0;
  std::int64_t truncation = 0;  // N(u, v)
  std::map<std::int64_t, RatVec> entries;

  friend bool operator==(const PairTable&, const PairTable&) = default;
};

struct ConformalData {
  int omega = 0;
  Rational central_charge;
  std::map<std::int64_t, Matrix> l_matrices;
};

// Finite truncated data of a vertex (operator) algebra.  complete == true
// means every unlisted product is a known zero (valid for the built-in
// nilpotent constructions); parsed files are never complete, so their
// knowledge ends at the declared ranges.
class VertexAlgebraInstance {
 public:
  std::vector<BasisElement> basis;
  int vacuum = 0;
  bool complete = false;
  std::map<std::pair<int, int>, PairTable> table;
  std::optional<ConformalData> conformal;

  std::size_t dim() const { return basis.size(); }

  const PairTable* pair(int u, int v) const {
    auto it = table.find({u, v});
    return it == table.end() ? nullptr : &it->second;
  }

  bool known(int u, std::int64_t n, int v) const {
    if (complete) return true;
    const PairTable* p = pair(u, v);
    return p && n >= p->n_min;
  }

  // u_n v; only valid where known.
  RatVec product(int u, std::int64_t n, int v) const {
    if (!known(u, n, v))
      throw std::out_of_range("instance: u_n v outside the declared range");
    const PairTable* p = pair(u, v);
    if (!p) return RatVec(dim());
    auto it = p->entries.find(n);
    return it == p->entries.end() ? RatVec(dim()) : it->second;
  }

  // Declares (or overwrites) one product; the declared truncation is not
  // adjusted, which is exactly what lets the checkers catch a corrupted
  // entry above N(u, v).
  void set_entry(int u, std::int64_t n, int v, RatVec coords) {
    if (coords.size() != dim())
      throw std::invalid_argument("instance: coordinate arity mismatch");
    PairTable& p = table[{u, v}];
    if (p.entries.empty() && p.n_min == 0 && p.truncation == 0) {
      p.n_min = n;
      p.truncation = n + 1;
    }
    p.n_min = std::min(p.n_min, n);
    if (is_zero(coords))
      p.entries.erase(n);
    else
      p.entries[n] = std::move(coords);
  }

  void declare_truncation(int u, int v, std::int64_t n_min, std::int64_t trunc) {
    PairTable& p = table[{u, v}];
    p.n_min = n_min;
    p.truncation = trunc;
  }

  RatVec basis_coords(int i) const {
    RatVec e(dim());
    e[i] = Rational(1);
    return e;
  }

  std::string coords_str(const RatVec& c) const {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (is_zero(c[i])) continue;
      if (!out.empty()) out += " + ";
      out += to_string(c[i]) + "*" + basis[i].name;
    }
    return out.empty() ? "0" : out;
  }
};

// Commutative associative algebra with a derivation: the easy source of
// vertex algebras.
struct DerivationAlgebra {
  std::vector<std::string> names;
  int unit = 0;
  std::vector<std::vector<RatVec>> product;  // product[i][j] = e_i * e_j
  Matrix derivation;

  std::size_t dim() const { return names.size(); }

  RatVec multiply(const RatVec& a, const RatVec& b) const {
    RatVec out(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      if (is_zero(a[i])) continue;
      for (std::size_t j = 0; j < dim(); ++j) {
        if (is_zero(b[j])) continue;
        out = out + (a[i] * b[j]) * product[i][j];
      }
    }
    return out;
  }

  void validate() const {
    if (product.size() != dim() || derivation.size() != dim())
      throw std::invalid_argument("derivation algebra: shape mismatch");
    RatVec one(dim());
    one[unit] = Rational(1);
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t j = 0; j < dim(); ++j) {
        if (!(product[i][j] == product[j][i]))
          throw std::invalid_argument("derivation algebra: product not commutative");
      }
      RatVec ei(dim());
      ei[i] = Rational(1);
      if (!(multiply(one, ei) == ei))
        throw std::invalid_argument("derivation algebra: unit law fails");
    }
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j)
        for (std::size_t k = 0; k < dim(); ++k) {
          RatVec ei(dim()), ej(dim()), ek(dim());
          ei[i] = ej[j] = ek[k] = Rational(1);
          if (!(multiply(multiply(ei, ej), ek) == multiply(ei, multiply(ej, ek))))
            throw std::invalid_argument("derivation algebra: product not associative");
        }
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) {
        RatVec ei(dim()), ej(dim());
        ei[i] = ej[j] = Rational(1);
        const RatVec lhs = mat_apply(derivation, multiply(ei, ej));
        const RatVec rhs =
            multiply(mat_apply(derivation, ei), ej) + multiply(ei, mat_apply(derivation, ej));
        if (!(lhs == rhs))
          throw std::invalid_argument("derivation algebra: Leibniz rule fails");
      }
    if (!is_zero(mat_apply(derivation, one)))
      throw std::invalid_argument("derivation algebra: D(1) != 0");
  }

  bool nilpotent() const {
    Matrix power = derivation;
    for (std::size_t k = 1; k <= dim(); ++k) {
      bool zero = true;
      for (const auto& row : power)
        for (const auto& x : row) zero = zero && is_zero(x);
      if (zero) return true;
      Matrix next = zero_matrix(dim(), dim());
      for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j)
          for (std::size_t k2 = 0; k2 < dim(); ++k2)
            next[i][j] += power[i][k2] * derivation[k2][j];
      power = std::move(next);
    }
    return false;
  }

  // C[t]/(t^order) with D = t^2 d/dt, the canonical nilpotent derivation of
  // the truncated polynomial algebra (d/dt itself does not satisfy the
  // Leibniz rule modulo t^order).
  static DerivationAlgebra truncated_polynomial(int order) {
    if (order < 1) throw std::invalid_argument("truncated_polynomial: order < 1");
    DerivationAlgebra a;
    for (int i = 0; i < order; ++i)
      a.names.push_back(i == 0 ? "1" : (i == 1 ? "t" : "t^" + std::to_string(i)));
    a.unit = 0;
    a.product.assign(order, std::vector<RatVec>(order, RatVec(order)));
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j)
        if (i + j < order) a.product[i][j][i + j] = Rational(1);
    a.derivation = zero_matrix(order, order);
    for (int i = 1; i + 1 < order; ++i) a.derivation[i + 1][i] = Rational(Integer(i));
    return a;
  }

  static DerivationAlgebra scalars() { return truncated_polynomial(1); }
};

// Y(a, x) b := (exp(xD) a) * b, i.e. a_{-k-1} b = (D^k a / k!) b and
// a_n b = 0 for n >= 0.  Nilpotency keeps the table finite and makes every
// unlisted product a known zero.
inline VertexAlgebraInstance from_derivation(const DerivationAlgebra& algebra) {
  algebra.validate();
  if (!algebra.nilpotent())
    throw std::invalid_argument("from_derivation: derivation is not nilpotent");
  const std::size_t dim = algebra.dim();
  VertexAlgebraInstance inst;
  for (const auto& n : algebra.names) inst.basis.push_back({n, 0});
  inst.vacuum = algebra.unit;
  inst.complete = true;
  for (std::size_t u = 0; u < dim; ++u) {
    RatVec dku(dim);  // D^k e_u / k!
    dku[u] = Rational(1);
    for (std::size_t k = 0; k < dim; ++k) {
      if (k > 0) {
        dku = mat_apply(algebra.derivation, dku);
        dku = rational(1, static_cast<std::int64_t>(k)) * dku;
        if (is_zero(dku)) break;
      }
      for (std::size_t v = 0; v < dim; ++v) {
        RatVec prod(dim);
        for (std::size_t r = 0; r < dim; ++r)
          if (!is_zero(dku[r])) prod = prod + dku[r] * algebra.product[r][v];
        const std::int64_t n = -static_cast<std::int64_t>(k) - 1;
        if (!is_zero(prod)) inst.set_entry(static_cast<int>(u), n, static_cast<int>(v),
                                           std::move(prod));
      }
    }
  }
  // Declared ranges: zero for n >= 0 by construction; complete below.
  for (std::size_t u = 0; u < dim; ++u)
    for (std::size_t v = 0; v < dim; ++v) {
      auto it = inst.table.find({static_cast<int>(u), static_cast<int>(v)});
      const std::int64_t lowest = -static_cast<std::int64_t>(dim) - 1;
      if (it == inst.table.end())
        inst.declare_truncation(static_cast<int>(u), static_cast<int>(v), lowest, 0);
      else {
        it->second.n_min = std::min(it->second.n_min, lowest);
        it->second.truncation = 0;
      }
    }
  return inst;
}

namespace detail {

struct InsufficientRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest declared knowledge floor across all pairs with the given left
// element (every basis element can appear as the inner composition target).
inline std::int64_t global_floor_for_left(const VertexAlgebraInstance& inst, int u) {
  std::int64_t floor = 0;
  bool any = false;
  for (std::size_t v = 0; v < inst.dim(); ++v) {
    const PairTable* p = inst.pair(u, static_cast<int>(v));
    if (!p) throw InsufficientRange("pair (" + inst.basis[u].name + ", " +
                                    inst.basis[v].name + ") not declared");
    floor = any ? std::max(floor, p->n_min) : p->n_min;
    any = true;
  }
  return floor;
}

}  // namespace detail

using VecSeries = SeriesT<RatVec>;

inline const std::vector<std::string> jacobi_vars = {"x0", "x1", "x2"};

// Y(a, x_outer) Y(b, x_inner) w as a three-variable vector series; the inner
// operator acts first.
inline VecSeries y_compose(const VertexAlgebraInstance& inst, int a,
                           const std::string& outer_var, int b,
                           const std::string& inner_var, int w) {
  Window win(2);
  if (!inst.complete) {
    const PairTable* inner = inst.pair(b, w);
    if (!inner)
      throw detail::InsufficientRange("pair (" + inst.basis[b].name + ", " +
                                      inst.basis[w].name + ") not declared");
    win[0] = Interval::at_most(Half(-detail::global_floor_for_left(inst, a) - 1));
    win[1] = Interval::at_most(Half(-inner->n_min - 1));
  }
  VecSeries out({outer_var, inner_var}, win);
  const PairTable* inner = inst.pair(b, w);
  if (inner)
    for (const auto& [n, coords] : inner->entries)
      for (std::size_t r = 0; r < coords.size(); ++r) {
        if (is_zero(coords[r])) continue;
        const PairTable* outer = inst.pair(a, static_cast<int>(r));
        if (!outer) continue;
        for (const auto& [m, coords2] : outer->entries) {
          ExpKey e{Half(-m - 1), Half(-n - 1)};
          if (out.in_window(e)) out.accumulate(e, coords[r] * coords2);
        }
      }
  return embed(out, jacobi_vars);
}

// Y(Y(a, x0) b, x2) w as a three-variable vector series.
inline VecSeries y_iterate(const VertexAlgebraInstance& inst, int a, int b, int w) {
  Window win(2);
  if (!inst.complete) {
    const PairTable* inner = inst.pair(a, b);
    if (!inner)
      throw detail::InsufficientRange("pair (" + inst.basis[a].name + ", " +
                                      inst.basis[b].name + ") not declared");
    std::int64_t floor = 0;
    bool any = false;
    for (std::size_t r = 0; r < inst.dim(); ++r) {
      const PairTable* p = inst.pair(static_cast<int>(r), w);
      if (!p)
        throw detail::InsufficientRange("pair (" + inst.basis[r].name + ", " +
                                        inst.basis[w].name + ") not declared");
      floor = any ? std::max(floor, p->n_min) : p->n_min;
      any = true;
    }
    win[0] = Interval::at_most(Half(-inner->n_min - 1));
    win[1] = Interval::at_most(Half(-floor - 1));
  }
  VecSeries out({"x0", "x2"}, win);
  const PairTable* inner = inst.pair(a, b);
  if (inner)
    for (const auto& [m, c1] : inner->entries)
      for (std::size_t r = 0; r < c1.size(); ++r) {
        if (is_zero(c1[r])) continue;
        const PairTable* outer = inst.pair(static_cast<int>(r), w);
        if (!outer) continue;
        for (const auto& [n, c2] : outer->entries) {
          ExpKey e{Half(-m - 1), Half(-n - 1)};
          if (out.in_window(e)) out.accumulate(e, c1[r] * c2);
        }
      }
  return embed(out, jacobi_vars);
}

namespace detail {

// The delta expression sized so that its product with the given series is
// determined on the target box: per variable the composite must reach
// target - support(other factor).
inline Series jacobi_delta_expr(const std::string& var_a, const std::string& var_b,
                                const std::string& var_d, SignOrder order,
                                const VecSeries& other, const Window& target) {
  auto hull = [&](const std::string& var) -> Interval {
    auto h = other.support_hull(other.var_index(var));
    return h ? *h : Interval::bounded(Half(0), Half(0));
  };
  const Interval hb = hull(var_b), hd = hull(var_d);
  const Interval tb = target[1], td = target[2];
  auto need = [](const Interval& t, const Interval& s) {
    return Interval::bounded(*t.lo - *s.hi, *t.hi - *s.lo);
  };
  // Shift by -1 in var_d afterwards, so request one higher.
  Interval dwin = need(td, hd);
  dwin.lo = *dwin.lo + Half(1);
  dwin.hi = *dwin.hi + Half(1);
  Window req(3);
  req[0] = Interval::all();
  req[1] = Interval::at_most(*need(tb, hb).hi);
  req[2] = dwin;
  // delta_composite returns vars [A, B, D]; bring into canonical order.
  Series d = delta_composite(var_a, var_b, var_d, order, req);
  d = shift_exponent(d, var_d, Half(-1));
  return embed(d, jacobi_vars);
}

inline Window box_window(Half radius, std::size_t nvars) {
  return Window(nvars, Interval::bounded(-radius, radius));
}

inline std::string monomial_str(const std::vector<std::string>& vars, const ExpKey& e) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!out.empty()) out += " ";
    out += vars[i] + "^" + e[i].str();
  }
  return out;
}

}  // namespace detail

// Both sides of the main identity applied to basis vector w, restricted to
// the box window.  Returns (lhs, rhs).
inline std::pair<VecSeries, VecSeries> jacobi_sides(const VertexAlgebraInstance& inst,
                                                    int u, int v, int w, Half radius) {
  const Window target = detail::box_window(radius, 3);
  const VecSeries yy_uv = y_compose(inst, u, "x1", v, "x2", w);
  const VecSeries yy_vu = y_compose(inst, v, "x2", u, "x1", w);
  const VecSeries yy_it = y_iterate(inst, u, v, w);
  const Series d1 =
      detail::jacobi_delta_expr("x1", "x2", "x0", SignOrder::plus_minus, yy_uv, target);
  const Series d2 =
      detail::jacobi_delta_expr("x2", "x1", "x0", SignOrder::minus_plus, yy_vu, target);
  const Series d3 =
      detail::jacobi_delta_expr("x1", "x0", "x2", SignOrder::plus_minus, yy_it, target);
  VecSeries lhs = sub(mul(d1, yy_uv, target), mul(d2, yy_vu, target));
  VecSeries rhs = mul(d3, yy_it, target);
  return {std::move(lhs), std::move(rhs)};
}

// The main axiom, coefficient by coefficient on the box window.
inline CheckResult check_jacobi(const VertexAlgebraInstance& inst, int u, int v, int w,
                                Half radius, std::size_t witness_cap = 5) {
  CheckResult out;
  out.name = "jacobi(" + inst.basis[u].name + ", " + inst.basis[v].name + ", " +
             inst.basis[w].name + ")";
  out.detail = "window radius " + radius.str();
  try {
    auto [lhs, rhs] = jacobi_sides(inst, u, v, w, radius);
    const VecSeries residual = sub(lhs, rhs);
    if (!residual.empty()) {
      out.verdict = Verdict::fail;
      for (const auto& [e, c] : residual.terms()) {
        if (out.witnesses.size() >= witness_cap) break;
        out.witnesses.push_back(detail::monomial_str(jacobi_vars, e) + " -> " +
                                inst.coords_str(c));
      }
    }
  } catch (const detail::InsufficientRange& ex) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back(ex.what());
  } catch (const ill_defined_product& ex) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back(std::string("insufficient table range: ") + ex.what());
  }
  return out;
}

// x0-residue of both sides: the commutator formula.
inline CheckResult check_commutator_formula(const VertexAlgebraInstance& inst, int u,
                                            int v, Half radius) {
  CheckResult out;
  out.name = "commutator_formula(" + inst.basis[u].name + ", " + inst.basis[v].name + ")";
  out.detail = "window radius " + radius.str();
  try {
    for (std::size_t w = 0; w < inst.dim(); ++w) {
      auto [lhs, rhs] = jacobi_sides(inst, u, v, static_cast<int>(w), radius);
      const VecSeries residual = sub(residue(lhs, "x0"), residue(rhs, "x0"));
      if (!residual.empty()) {
        out.verdict = Verdict::fail;
        const auto& [e, c] = *residual.terms().begin();
        out.witnesses.push_back("w=" + inst.basis[w].name + " " +
                                detail::monomial_str({"x1", "x2"}, e) + " -> " +
                                inst.coords_str(c));
        return out;
      }
    }
  } catch (const detail::InsufficientRange& ex) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back(ex.what());
  } catch (const ill_defined_product& ex) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back(std::string("insufficient table range: ") + ex.what());
  }
  return out;
}

// x1-residue of both sides: the iterate formula.
inline CheckResult check_iterate_formula(const VertexAlgebraInstance& inst, int u, int v,
                                         Half radius) {
  CheckResult out;
  out.name = "iterate_formula(" + inst.basis[u].name + ", " + inst.basis[v].name + ")";
  out.detail = "window radius " + radius.str();
  try {
    for (std::size_t w = 0; w < inst.dim(); ++w) {
      auto [lhs, rhs] = jacobi_sides(inst, u, v, static_cast<int>(w), radius);
      const VecSeries residual = sub(residue(lhs, "x1"), residue(rhs, "x1"));
      if (!residual.empty()) {
        out.verdict = Verdict::fail;
        const auto& [e, c] = *residual.terms().begin();
        out.witnesses.push_back("w=" + inst.basis[w].name + " " +
                                detail::monomial_str({"x0", "x2"}, e) + " -> " +
                                inst.coords_str(c));
        return out;
      }
    }
  } catch (const detail::InsufficientRange& ex) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back(ex.what());
  } catch (const ill_defined_product& ex) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back(std::string("insufficient table range: ") + ex.what());
  }
  return out;
}

struct WeakCommutativityResult {
  CheckResult check;
  std::optional<std::int64_t> k;  // least k that kills the commutator
};

// Least k <= k_max with (x1 - x2)^k [Y(u,x1), Y(v,x2)] = 0 on the window,
// tested against every basis vector.
inline WeakCommutativityResult check_weak_commutativity(const VertexAlgebraInstance& inst,
                                                        int u, int v, std::int64_t k_max,
                                                        Half radius) {
  WeakCommutativityResult out;
  out.check.name =
      "weak_commutativity(" + inst.basis[u].name + ", " + inst.basis[v].name + ")";
  const std::vector<std::string> vars = {"x1", "x2"};
  const Window target = detail::box_window(radius, 2);
  try {
    std::vector<VecSeries> commutators;
    for (std::size_t w = 0; w < inst.dim(); ++w) {
      VecSeries a = y_compose(inst, u, "x1", v, "x2", static_cast<int>(w));
      VecSeries b = y_compose(inst, v, "x2", u, "x1", static_cast<int>(w));
      commutators.push_back(sub(slice(a, "x0", Half(0)), slice(b, "x0", Half(0))));
    }
    for (std::int64_t k = 0; k <= k_max; ++k) {
      const Series factor =
          embed(binomial_expand("x1", "x2", SignOrder::plus_minus, k, window_all(2)), vars);
      bool all_zero = true;
      for (const auto& c : commutators)
        if (!mul(factor, c, target).empty()) {
          all_zero = false;
          break;
        }
      if (all_zero) {
        out.k = k;
        out.check.detail = "k = " + std::to_string(k);
        return out;
      }
    }
    out.check.verdict = Verdict::fail;
    out.check.detail = "no k <= " + std::to_string(k_max);
  } catch (const detail::InsufficientRange& ex) {
    out.check.verdict = Verdict::inconclusive;
    out.check.witnesses.push_back(ex.what());
  } catch (const ill_defined_product& ex) {
    out.check.verdict = Verdict::inconclusive;
    out.check.witnesses.push_back(std::string("insufficient table range: ") + ex.what());
  }
  return out;
}

// u_n v = 0 for every stored n >= N(u, v); N declared finite per pair.
inline CheckResult check_truncation(const VertexAlgebraInstance& inst) {
  CheckResult out;
  out.name = "truncation";
  std::size_t pairs = 0;
  for (const auto& [key, p] : inst.table) {
    ++pairs;
    for (const auto& [n, coords] : p.entries)
      if (n >= p.truncation && !is_zero(coords)) {
        out.verdict = Verdict::fail;
        out.witnesses.push_back("(" + inst.basis[key.first].name + ")_" +
                                std::to_string(n) + " (" + inst.basis[key.second].name +
                                ") = " + inst.coords_str(coords) + " above N=" +
                                std::to_string(p.truncation));
      }
  }
  if (!inst.complete && pairs < inst.dim() * inst.dim()) {
    out.verdict = out.verdict == Verdict::fail ? Verdict::fail : Verdict::inconclusive;
    out.witnesses.push_back("undeclared pairs cannot be confirmed truncated");
  }
  out.detail = std::to_string(pairs) + " pairs declared";
  return out;
}

// Y(vacuum, x) = identity; Y(v, x) vacuum has no pole and constant term v.
inline CheckResult check_vacuum_creation(const VertexAlgebraInstance& inst) {
  CheckResult out;
  out.name = "vacuum_creation";
  const int vac = inst.vacuum;
  for (std::size_t v = 0; v < inst.dim(); ++v) {
    const PairTable* p = inst.pair(vac, static_cast<int>(v));
    const bool neg_one_known = inst.known(vac, -1, static_cast<int>(v));
    if (!neg_one_known) {
      out.verdict = Verdict::inconclusive;
      out.witnesses.push_back("vacuum action on " + inst.basis[v].name +
                              " not declared at n = -1");
      continue;
    }
    if (p)
      for (const auto& [n, coords] : p->entries) {
        RatVec expect(inst.dim());
        if (n == -1) expect[v] = Rational(1);
        if (!(coords == expect)) {
          out.verdict = Verdict::fail;
          out.witnesses.push_back("Y(vacuum)_" + std::to_string(n) + " " +
                                  inst.basis[v].name + " = " + inst.coords_str(coords));
        }
      }
    if (!(inst.product(vac, -1, static_cast<int>(v)) == inst.basis_coords(static_cast<int>(v)))) {
      out.verdict = Verdict::fail;
      out.witnesses.push_back("vacuum_{-1} " + inst.basis[v].name + " != " +
                              inst.basis[v].name);
    }
  }
  for (std::size_t v = 0; v < inst.dim(); ++v) {
    const PairTable* p = inst.pair(static_cast<int>(v), vac);
    if (!inst.known(static_cast<int>(v), -1, vac)) {
      out.verdict = out.verdict == Verdict::fail ? Verdict::fail : Verdict::inconclusive;
      out.witnesses.push_back("creation data for " + inst.basis[v].name +
                              " not declared at n = -1");
      continue;
    }
    if (p)
      for (const auto& [n, coords] : p->entries)
        if (n >= 0 && !is_zero(coords)) {
          out.verdict = Verdict::fail;
          out.witnesses.push_back("(" + inst.basis[v].name + ")_" + std::to_string(n) +
                                  " vacuum = " + inst.coords_str(coords) +
                                  " (pole in x)");
        }
    if (!(inst.product(static_cast<int>(v), -1, vac) ==
          inst.basis_coords(static_cast<int>(v)))) {
      out.verdict = Verdict::fail;
      out.witnesses.push_back("constant term of Y(" + inst.basis[v].name +
                              ", x) vacuum is not " + inst.basis[v].name);
    }
  }
  return out;
}

// Coordinate of b in u_n v vanishes unless wt(b) = wt(u) + wt(v) - n - 1.
inline CheckResult check_grading(const VertexAlgebraInstance& inst) {
  CheckResult out;
  out.name = "grading";
  for (const auto& [key, p] : inst.table)
    for (const auto& [n, coords] : p.entries)
      for (std::size_t b = 0; b < coords.size(); ++b) {
        if (is_zero(coords[b])) continue;
        const std::int64_t expected =
            inst.basis[key.first].weight + inst.basis[key.second].weight - n - 1;
        if (inst.basis[b].weight != expected) {
          out.verdict = Verdict::fail;
          out.witnesses.push_back("(" + inst.basis[key.first].name + ")_" +
                                  std::to_string(n) + " (" + inst.basis[key.second].name +
                                  ") hits " + inst.basis[b].name + " of weight " +
                                  std::to_string(inst.basis[b].weight) + ", expected " +
                                  std::to_string(expected));
        }
      }
  return out;
}

// Virasoro bracket on the declared matrices, L(0) = grading, and the L(-1)
// derivative property on the declared table ranges.
inline CheckResult check_virasoro(const VertexAlgebraInstance& inst) {
  CheckResult out;
  out.name = "virasoro";
  if (!inst.conformal) {
    out.verdict = Verdict::inconclusive;
    out.witnesses.push_back("no conformal data");
    return out;
  }
  const ConformalData& cd = *inst.conformal;
  const std::size_t d = inst.dim();
  std::vector<std::int64_t> skipped;
  for (const auto& [m, lm] : cd.l_matrices)
    for (const auto& [n, ln] : cd.l_matrices) {
      auto it = cd.l_matrices.find(m + n);
      if (it == cd.l_matrices.end()) {
        skipped.push_back(m);
        continue;
      }
      Matrix lhs = zero_matrix(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t k = 0; k < d; ++k)
            lhs[i][j] += lm[i][k] * ln[k][j] - ln[i][k] * lm[k][j];
      Matrix rhs = it->second;
      for (auto& row : rhs)
        for (auto& x : row) x *= Rational(Integer(m - n));
      if (m + n == 0) {
        const Rational central =
            rational(m * m * m - m, 12) * cd.central_charge;
        for (std::size_t i = 0; i < d; ++i) rhs[i][i] += central;
      }
      if (!(lhs == rhs)) {
        out.verdict = Verdict::fail;
        out.witnesses.push_back("[L(" + std::to_string(m) + "), L(" + std::to_string(n) +
                                ")] differs from the required bracket");
      }
    }
  if (auto it = cd.l_matrices.find(0); it != cd.l_matrices.end()) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const Rational expect =
            i == j ? Rational(Integer(inst.basis[i].weight)) : Rational(0);
        if (!(it->second[i][j] == expect)) {
          out.verdict = Verdict::fail;
          out.witnesses.push_back("L(0) is not the weight grading at (" +
                                  inst.basis[i].name + ", " + inst.basis[j].name + ")");
        }
      }
  } else {
    out.verdict = out.verdict == Verdict::fail ? Verdict::fail : Verdict::inconclusive;
    out.witnesses.push_back("L(0) not declared");
  }
  if (auto it = cd.l_matrices.find(-1); it != cd.l_matrices.end()) {
    const Matrix& lminus = it->second;
    for (std::size_t u = 0; u < d; ++u) {
      RatVec lu(d);
      for (std::size_t i = 0; i < d; ++i) lu[i] = lminus[i][u];
      std::int64_t lo = 0, hi = 0;
      bool any = false;
      for (std::size_t v = 0; v < d; ++v)
        if (const PairTable* p = inst.pair(static_cast<int>(u), static_cast<int>(v)))
          for (const auto& [n, c] : p->entries) {
            lo = any ? std::min(lo, n) : n;
            hi = any ? std::max(hi, n) : n;
            any = true;
          }
      for (std::int64_t m = lo; m <= hi + 1 && any; ++m)
        for (std::size_t v = 0; v < d; ++v) {
          if (!inst.known(static_cast<int>(u), m - 1, static_cast<int>(v))) continue;
          bool lhs_known = true;
          RatVec lhs(d);
          for (std::size_t b = 0; b < d; ++b) {
            if (is_zero(lu[b])) continue;
            if (!inst.known(static_cast<int>(b), m, static_cast<int>(v))) {
              lhs_known = false;
              break;
            }
            lhs = lhs + lu[b] * inst.product(static_cast<int>(b), m, static_cast<int>(v));
          }
          if (!lhs_known) continue;
          const RatVec rhs = Rational(Integer(-m)) *
                             inst.product(static_cast<int>(u), m - 1, static_cast<int>(v));
          if (!(lhs == rhs)) {
            out.verdict = Verdict::fail;
            out.witnesses.push_back("L(-1) derivative property fails for (" +
                                    inst.basis[u].name + ")_" + std::to_string(m - 1) +
                                    " (" + inst.basis[v].name + ")");
          }
        }
    }
  }
  if (!skipped.empty())
    out.detail = std::to_string(skipped.size()) + " bracket pairs left the declared range";
  return out;
}

// Every applicable axiom; derivation-style instances (no conformal data) are
// checked as vertex algebras.
inline AxiomReport run_axiom_checks(const VertexAlgebraInstance& inst, Half radius,
                                    std::int64_t k_max) {
  AxiomReport rep;
  rep.mode = inst.conformal ? "vertex_operator_algebra" : "vertex_algebra";
  rep.checks.push_back(check_truncation(inst));
  rep.checks.push_back(check_vacuum_creation(inst));
  if (inst.conformal) {
    rep.checks.push_back(check_grading(inst));
    rep.checks.push_back(check_virasoro(inst));
  }
  const int d = static_cast<int>(inst.dim());
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v) {
      for (int w = 0; w < d; ++w)
        rep.checks.push_back(check_jacobi(inst, u, v, w, radius));
      rep.checks.push_back(check_commutator_formula(inst, u, v, radius));
      rep.checks.push_back(check_iterate_formula(inst, u, v, radius));
      rep.checks.push_back(check_weak_commutativity(inst, u, v, k_max, radius).check);
    }
  return rep;
}

// Early-exit variant for soundness fuzzing: true as soon as any check fails.
inline bool any_axiom_fails(const VertexAlgebraInstance& inst, Half radius,
                            std::int64_t k_max) {
  if (check_truncation(inst).verdict == Verdict::fail) return true;
  if (check_vacuum_creation(inst).verdict == Verdict::fail) return true;
  const int d = static_cast<int>(inst.dim());
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v)
      for (int w = 0; w < d; ++w)
        if (check_jacobi(inst, u, v, w, radius, 1).verdict == Verdict::fail) return true;
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v)
      if (check_weak_commutativity(inst, u, v, k_max, radius).check.verdict ==
          Verdict::fail)
        return true;
  return false;
}

// ---------------------------------------------------------------------------
// Instance file format.  Strict: unknown fields are rejected, every
// coordinate is a rational string.

namespace detail {

inline void reject_unknown_fields(const nlohmann::json& obj,
                                  const std::set<std::string>& allowed,
                                  const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw std::invalid_argument("instance: unknown field '" + key + "' in " + where);
}

inline RatVec parse_coords(const nlohmann::json& arr, std::size_t dim,
                           const std::string& where) {
  if (!arr.is_array() || arr.size() != dim)
    throw std::invalid_argument("instance: " + where + " must be an array of " +
                                std::to_string(dim) + " rational strings");
  RatVec out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!arr[i].is_string())
      throw std::invalid_argument("instance: coordinate in " + where +
                                  " is not a rational string");
    out[i] = parse_rational(arr[i].get<std::string>());
  }
  return out;
}

}  // namespace detail

inline VertexAlgebraInstance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw std::invalid_argument(std::string("instance: JSON parse error: ") + ex.what());
  }
  if (!j.is_object()) throw std::invalid_argument("instance: top level must be an object");
  detail::reject_unknown_fields(j, {"basis", "vacuum", "y_table", "conformal"}, "top level");
  if (!j.contains("basis") || !j.contains("vacuum") || !j.contains("y_table"))
    throw std::invalid_argument("instance: basis, vacuum and y_table are required");

  VertexAlgebraInstance inst;
  for (const auto& b : j.at("basis")) {
    detail::reject_unknown_fields(b, {"name", "weight"}, "basis element");
    inst.basis.push_back(
        {b.at("name").get<std::string>(), b.at("weight").get<std::int64_t>()});
  }
  if (inst.basis.empty()) throw std::invalid_argument("instance: empty basis");
  inst.vacuum = j.at("vacuum").get<int>();
  if (inst.vacuum < 0 || static_cast<std::size_t>(inst.vacuum) >= inst.dim())
    throw std::invalid_argument("instance: vacuum index out of range");
  for (const auto& row : j.at("y_table")) {
    detail::reject_unknown_fields(row, {"u", "n", "v", "coords"}, "y_table row");
    const int u = row.at("u").get<int>();
    const int v = row.at("v").get<int>();
    const std::int64_t n = row.at("n").get<std::int64_t>();
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= inst.dim() ||
        static_cast<std::size_t>(v) >= inst.dim())
      throw std::invalid_argument("instance: y_table index out of range");
    inst.set_entry(u, n, v, detail::parse_coords(row.at("coords"), inst.dim(), "y_table"));
    PairTable& p = inst.table[{u, v}];
    p.truncation = std::max(p.truncation, n + 1);
  }
  if (j.contains("conformal")) {
    const auto& c = j.at("conformal");
    detail::reject_unknown_fields(c, {"omega", "c", "L"}, "conformal");
    ConformalData cd;
    cd.omega = c.at("omega").get<int>();
    if (cd.omega < 0 || static_cast<std::size_t>(cd.omega) >= inst.dim())
      throw std::invalid_argument("instance: omega index out of range");
    cd.central_charge = parse_rational(c.at("c").get<std::string>());
    for (const auto& lrow : c.at("L")) {
      detail::reject_unknown_fields(lrow, {"m", "matrix"}, "conformal L row");
      const std::int64_t m = lrow.at("m").get<std::int64_t>();
      const auto& mat = lrow.at("matrix");
      if (!mat.is_array() || mat.size() != inst.dim())
        throw std::invalid_argument("instance: L matrix has wrong shape");
      Matrix parsed = zero_matrix(inst.dim(), inst.dim());
      for (std::size_t r = 0; r < inst.dim(); ++r) {
        const RatVec row = detail::parse_coords(mat[r], inst.dim(), "L matrix row");
        for (std::size_t cidx = 0; cidx < inst.dim(); ++cidx) parsed[r][cidx] = row[cidx];
      }
      cd.l_matrices[m] = std::move(parsed);
    }
    inst.conformal = std::move(cd);
  }
  return inst;
}

inline nlohmann::ordered_json serialize_instance(const VertexAlgebraInstance& inst) {
  nlohmann::ordered_json j;
  j["basis"] = nlohmann::ordered_json::array();
  for (const auto& b : inst.basis)
    j["basis"].push_back({{"name", b.name}, {"weight", b.weight}});
  j["vacuum"] = inst.vacuum;
  j["y_table"] = nlohmann::ordered_json::array();
  for (const auto& [key, p] : inst.table)
    for (const auto& [n, coords] : p.entries) {
      nlohmann::ordered_json row;
      row["u"] = key.first;
      row["n"] = n;
      row["v"] = key.second;
      row["coords"] = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < coords.size(); ++i)
        row["coords"].push_back(to_string(coords[i]));
      j["y_table"].push_back(std::move(row));
    }
  if (inst.conformal) {
    nlohmann::ordered_json c;
    c["omega"] = inst.conformal->omega;
    c["c"] = to_string(inst.conformal->central_charge);
    c["L"] = nlohmann::ordered_json::array();
    for (const auto& [m, mat] : inst.conformal->l_matrices) {
      nlohmann::ordered_json row;
      row["m"] = m;
      row["matrix"] = nlohmann::ordered_json::array();
      for (const auto& r : mat) {
        nlohmann::ordered_json jr = nlohmann::ordered_json::array();
        for (const auto& x : r) jr.push_back(to_string(x));
        row["matrix"].push_back(std::move(jr));
      }
      c["L"].push_back(std::move(row));
    }
    j["conformal"] = std::move(c);
  }
  return j;
}

inline nlohmann::ordered_json to_json(const AxiomReport& rep, Half radius,
                                      std::int64_t k_max) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"verdict", verdict_name(c.verdict)},
                      {"detail", c.detail},
                      {"witnesses", c.witnesses}});
  return {{"schema", "voxcal/1"},
          {"kind", "axiom_report"},
          {"mode", rep.mode},
          {"window_radius", radius.str()},
          {"k_max", k_max},
          {"checks", checks},
          {"overall", verdict_name(rep.overall())}};
}

}  // namespace voxcal

#endif
