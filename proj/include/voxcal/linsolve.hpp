#ifndef VOXCAL_LINSOLVE_HPP
#define VOXCAL_LINSOLVE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxcal/rational.hpp"

namespace voxcal {

// Coordinate vector over Rational; the coefficient type of instance-valued
// formal series and of graded operator matrices.
struct RatVec {
  std::vector<Rational> v;

  RatVec() = default;
  explicit RatVec(std::size_t n) : v(n) {}
  explicit RatVec(Rational scalar) : v(1, std::move(scalar)) {}
  RatVec(std::initializer_list<Rational> init) : v(init) {}

  std::size_t size() const { return v.size(); }
  Rational& operator[](std::size_t i) { return v[i]; }
  const Rational& operator[](std::size_t i) const { return v[i]; }

  friend RatVec operator+(const RatVec& a, const RatVec& b) {
    if (a.v.size() != b.v.size()) throw std::invalid_argument("ratvec: size mismatch");
    RatVec out(a.v.size());
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
    return out;
  }
  friend RatVec operator-(const RatVec& a) {
    RatVec out(a.v.size());
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = -a.v[i];
    return out;
  }
  friend RatVec operator-(const RatVec& a, const RatVec& b) { return a + (-b); }
  friend RatVec operator*(const Rational& r, const RatVec& a) {
    RatVec out(a.v.size());
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = r * a.v[i];
    return out;
  }
  friend bool operator==(const RatVec&, const RatVec&) = default;
};

inline bool is_zero(const RatVec& a) {
  for (const auto& x : a.v)
    if (!is_zero(x)) return false;
  return true;
}

inline std::string to_string(const RatVec& a) {
  std::string out = "[";
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(a.v[i]);
  }
  return out + "]";
}

using Matrix = std::vector<std::vector<Rational>>;

inline Matrix zero_matrix(std::size_t rows, std::size_t cols) {
  return Matrix(rows, std::vector<Rational>(cols));
}

inline RatVec mat_apply(const Matrix& m, const RatVec& x) {
  RatVec out(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (m[r].size() != x.size()) throw std::invalid_argument("mat_apply: shape mismatch");
    for (std::size_t c = 0; c < x.size(); ++c) out[r] += m[r][c] * x[c];
  }
  return out;
}

struct LinearSolveResult {
  bool consistent = false;
  bool unique = false;
  std::vector<Rational> solution;  // valid when consistent && unique
};

// Exact Gauss-Jordan on A x = b (possibly overdetermined).
inline LinearSolveResult solve_exact(Matrix a, std::vector<Rational> b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  if (b.size() != rows) throw std::invalid_argument("solve_exact: shape mismatch");
  std::vector<std::size_t> pivot_row_of_col(cols, SIZE_MAX);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && is_zero(a[p][c])) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    std::swap(b[p], b[rank]);
    const Rational inv = Rational(1) / a[rank][c];
    for (std::size_t j = c; j < cols; ++j) a[rank][j] *= inv;
    b[rank] *= inv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || is_zero(a[r][c])) continue;
      const Rational f = a[r][c];
      for (std::size_t j = c; j < cols; ++j) a[r][j] -= f * a[rank][j];
      b[r] -= f * b[rank];
    }
    pivot_row_of_col[c] = rank;
    ++rank;
  }
  LinearSolveResult out;
  out.consistent = true;
  for (std::size_t r = rank; r < rows; ++r)
    if (!is_zero(b[r])) out.consistent = false;
  out.unique = rank == cols;
  if (out.consistent && out.unique) {
    out.solution.resize(cols);
    for (std::size_t c = 0; c < cols; ++c) out.solution[c] = b[pivot_row_of_col[c]];
  }
  return out;
}

}  // namespace voxcal

#endif
