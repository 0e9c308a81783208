#include "snc/galois.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "snc/error.hpp"

namespace snc::gf {

namespace {

constexpr std::array<std::uint16_t, 9> kPrimitivePoly = {
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D,
};

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::domain_error(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

Field::Field(unsigned bits) : bits_(bits) {
  if (bits < 1 || bits > 8) {
    throw ConstructionError("GF(2^m) requires 1 <= m <= 8, got m=" + std::to_string(bits));
  }
  poly_ = kPrimitivePoly[bits];
  const unsigned q = size();
  unsigned x = 1;
  for (unsigned i = 0; i + 1 < q; ++i) {
    if (i > 0 && x == 1) throw ConstructionError("reduction polynomial is not primitive");
    exp_[i] = static_cast<std::uint8_t>(x);
    log_[x] = static_cast<std::uint16_t>(i);
    x <<= 1;
    if (x & q) x ^= poly_;
  }
  for (unsigned i = q - 1; i < exp_.size(); ++i) exp_[i] = exp_[i - (q - 1)];
}

Field Field::with_size(unsigned q) {
  for (unsigned m = 1; m <= 8; ++m) {
    if ((1u << m) == q) return Field(m);
  }
  throw ConstructionError("field size must be a power of two in [2, 256], got " + std::to_string(q));
}

FieldElem Field::inv(FieldElem a) const {
  if (a.value == 0) throw std::domain_error("inverse of zero");
  const unsigned order = size() - 1;
  return {exp_[(order - log_[a.value]) % order]};
}

FieldElem Field::div(FieldElem a, FieldElem b) const {
  if (b.value == 0) throw std::domain_error("division by zero");
  if (a.value == 0) return {0};
  const unsigned order = size() - 1;
  return {exp_[(log_[a.value] + order - log_[b.value]) % order]};
}

FieldElem Field::pow(FieldElem a, unsigned e) const {
  if (e == 0) return one();
  if (a.value == 0) return zero();
  const unsigned order = size() - 1;
  return {exp_[(static_cast<unsigned long long>(log_[a.value]) * e) % order]};
}

unsigned Field::log(FieldElem a) const {
  if (a.value == 0) throw std::domain_error("log of zero");
  return log_[a.value];
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = {1};
  return m;
}

Matrix Matrix::column(std::span<const FieldElem> values) {
  Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m.at(i, 0) = values[i];
  return m;
}

Matrix Matrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw std::domain_error("column range out of bounds");
  Matrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < count; ++c) out.at(r, c) = at(r, first + c);
  return out;
}

bool Matrix::is_zero() const {
  for (auto e : entries_)
    if (e.value != 0) return false;
  return true;
}

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::domain_error("multiply: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t t = 0; t < a.cols(); ++t) {
      const FieldElem s = a.at(i, t);
      if (s.value == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) = f.add(out.at(i, j), f.mul(s, b.at(t, j)));
    }
  }
  return out;
}

Matrix add(const Field& f, const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = f.add(a.at(i, j), b.at(i, j));
  return out;
}

Matrix vandermonde(const Field& f, std::span<const FieldElem> points, std::size_t rows) {
  if (rows == 0) throw ConstructionError("vandermonde: rows must be >= 1");
  std::vector<bool> seen(f.size(), false);
  for (auto p : points) {
    if (!f.contains(p)) throw ConstructionError("vandermonde: point outside field");
    if (p.value == 0) throw ConstructionError("vandermonde: zero evaluation point");
    if (seen[p.value]) throw ConstructionError("vandermonde: duplicate evaluation point");
    seen[p.value] = true;
  }
  Matrix v(rows, points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    FieldElem power = f.one();
    for (std::size_t i = 0; i < rows; ++i) {
      v.at(i, j) = power;
      power = f.mul(power, points[j]);
    }
  }
  return v;
}

RowEchelon row_reduce(const Field& f, Matrix m, std::size_t lhs_cols) {
  if (lhs_cols > m.cols()) throw std::domain_error("row_reduce: lhs_cols exceeds matrix width");
  RowEchelon out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < lhs_cols && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && m.at(pivot, col).value == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row) {
      auto a = m.row(pivot);
      auto b = m.row(row);
      std::swap_ranges(a.begin(), a.end(), b.begin());
    }
    const FieldElem scale = f.inv(m.at(row, col));
    for (auto& e : m.row(row)) e = f.mul(e, scale);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row) continue;
      const FieldElem factor = m.at(r, col);
      if (factor.value == 0) continue;
      for (std::size_t c = col; c < m.cols(); ++c) m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(row, c)));
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const Field& f, Matrix a) { return row_reduce(f, std::move(a)).pivots.size(); }

std::optional<Matrix> solve_linear(const Field& f, const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw std::domain_error("solve_linear: expected square system with matching right-hand side");
  }
  const std::size_t n = a.rows();
  Matrix aug(n, n + b.cols());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) aug.at(r, n + c) = b.at(r, c);
  }
  auto ech = row_reduce(f, std::move(aug), n);
  if (ech.pivots.size() < n) return std::nullopt;
  return ech.reduced.columns(n, b.cols());
}

std::optional<Matrix> inverse(const Field& f, const Matrix& a) {
  if (a.rows() != a.cols()) throw std::domain_error("inverse: matrix not square");
  return solve_linear(f, a, Matrix::identity(a.rows()));
}

}  // namespace snc::gf
