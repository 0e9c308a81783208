#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace snc::gf {

struct FieldElem {
  std::uint8_t value = 0;

  friend constexpr bool operator==(FieldElem, FieldElem) = default;
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

/*
 * GF(2^m), 1 <= m <= 8, represented in polynomial basis with log/antilog tables.
 *
 * Reduction polynomials (all primitive, so x is a generator):
 *   m=1 x+1          m=5 x^5+x^2+1
 *   m=2 x^2+x+1      m=6 x^6+x+1
 *   m=3 x^3+x+1      m=7 x^7+x^3+1
 *   m=4 x^4+x+1      m=8 x^8+x^4+x^3+x^2+1 (0x11D)
 */
class Field {
 public:
  explicit Field(unsigned bits = 8);

  static Field gf16() { return Field(4); }
  static Field gf256() { return Field(8); }

  // Field for q = 2^m; throws ConstructionError when q is not a power of two in [2, 256].
  static Field with_size(unsigned q);

  unsigned bits() const { return bits_; }
  unsigned size() const { return 1u << bits_; }
  std::uint16_t polynomial() const { return poly_; }

  bool contains(FieldElem a) const { return a.value < size(); }

  FieldElem zero() const { return {0}; }
  FieldElem one() const { return {1}; }
  // Primitive element (the class of x).
  FieldElem generator() const { return {exp_[1 % (size() - 1)]}; }

  FieldElem add(FieldElem a, FieldElem b) const { return {static_cast<std::uint8_t>(a.value ^ b.value)}; }
  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, b); }

  FieldElem mul(FieldElem a, FieldElem b) const {
    if (a.value == 0 || b.value == 0) return {0};
    return {exp_[log_[a.value] + log_[b.value]]};
  }

  // Throws std::domain_error for a == 0.
  FieldElem inv(FieldElem a) const;
  // Throws std::domain_error for b == 0.
  FieldElem div(FieldElem a, FieldElem b) const;

  FieldElem pow(FieldElem a, unsigned e) const;

  // Discrete log base generator(); a must be nonzero.
  unsigned log(FieldElem a) const;
  // generator()^e
  FieldElem exp(unsigned e) const { return {exp_[e % (size() - 1)]}; }

  friend bool operator==(const Field& a, const Field& b) { return a.bits_ == b.bits_; }

 private:
  unsigned bits_;
  std::uint16_t poly_;
  std::array<std::uint8_t, 512> exp_{};
  std::array<std::uint16_t, 256> log_{};
};

// Dense row-major matrix over a field.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const FieldElem> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElem& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  FieldElem at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<FieldElem> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const FieldElem> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  std::span<const FieldElem> entries() const { return entries_; }

  // Columns [first, first + count).
  Matrix columns(std::size_t first, std::size_t count) const;

  bool is_zero() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElem> entries_;
};

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b);
Matrix add(const Field& f, const Matrix& a, const Matrix& b);

// Entry (i, j) = points[j]^i. Points must be distinct and nonzero.
Matrix vandermonde(const Field& f, std::span<const FieldElem> points, std::size_t rows);

// Unique x with a*x == b for square a, or nullopt when a is singular.
// b may carry several right-hand-side columns.
std::optional<Matrix> solve_linear(const Field& f, const Matrix& a, const Matrix& b);

std::optional<Matrix> inverse(const Field& f, const Matrix& a);

std::size_t rank(const Field& f, Matrix a);

struct RowEchelon {
  Matrix reduced;                     // reduced row echelon form of the input
  std::vector<std::size_t> pivots;    // pivot column of each nonzero row, in row order
};

// Gauss-Jordan elimination restricted to the first `lhs_cols` columns; remaining
// columns (augmented right-hand sides) are carried along. Pivot choice is the first
// nonzero entry at or below the current row, so the result is deterministic.
RowEchelon row_reduce(const Field& f, Matrix m, std::size_t lhs_cols);
inline RowEchelon row_reduce(const Field& f, Matrix m) {
  const auto c = m.cols();
  return row_reduce(f, std::move(m), c);
}

}  // namespace snc::gf
