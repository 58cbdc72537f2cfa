#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gradman {

using Rat = mpq_class;

Rat make_rat(long num, long den = 1);
// Accepts "p" or "p/q" with optional leading '-'.
Rat parse_rat(const std::string& text);
std::string rat_str(const Rat& r);

using Exponent = std::vector<int>;

// Graded lexicographic: total degree first, then lexicographic.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

int exponent_degree(const Exponent& e);

class Poly {
 public:
  using TermMap = std::map<Exponent, Rat, GrlexLess>;

  Poly() = default;
  explicit Poly(std::size_t nvars);
  Poly(std::size_t nvars, const Rat& c);

  static Poly variable(std::size_t nvars, std::size_t index);
  static Poly monomial(const Exponent& e, const Rat& c);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant_term() const;
  int total_degree() const;  // -1 for zero
  const Exponent& leading_exponent() const;
  const Rat& leading_coeff() const;

  void add_term(const Exponent& e, const Rat& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rat& c);
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rat& c) const;
  Poly operator-() const;
  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }
  bool operator<(const Poly& o) const;

  Poly derivative(std::size_t var) const;
  // Antiderivative in `var` vanishing on var = 0.
  Poly integral(std::size_t var) const;
  Rat eval(const std::vector<Rat>& point) const;
  Poly compose(const std::vector<Poly>& images) const;
  Poly pow(int k) const;
  std::optional<Poly> divide_exact(const Poly& d) const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  void check_compatible(const Poly& o) const;
  std::size_t nvars_ = 0;
  TermMap terms_;
};

Poly operator*(const Rat& c, const Poly& p);

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using RatMatrix = Matrix<Rat>;

class PolyMatrix : public Matrix<Poly> {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols, std::size_t nvars)
      : Matrix<Poly>(rows, cols, Poly(nvars)), nvars_(nvars) {}

  static PolyMatrix identity(std::size_t n, std::size_t nvars);
  static PolyMatrix from_rat(const RatMatrix& m, std::size_t nvars);

  std::size_t nvars() const { return nvars_; }
  bool is_constant() const;
  bool is_zero() const;
  RatMatrix evaluate(const std::vector<Rat>& point) const;
  PolyMatrix operator*(const PolyMatrix& o) const;
  PolyMatrix operator+(const PolyMatrix& o) const;
  PolyMatrix operator-(const PolyMatrix& o) const;
  PolyMatrix transpose() const;
  std::vector<Poly> column(std::size_t c) const;
  std::vector<Poly> apply(const std::vector<Poly>& v) const;

 private:
  std::size_t nvars_ = 0;
};

RatMatrix rat_identity(std::size_t n);
RatMatrix rat_mul(const RatMatrix& a, const RatMatrix& b);

// Sparse row echelon form over Q, kept fully reduced.
class RatEchelon {
 public:
  explicit RatEchelon(std::size_t ncols) : ncols_(ncols) {}
  // Returns true when the row increased the rank.
  bool add_row(std::map<std::size_t, Rat> row);
  bool reduces_to_zero(std::map<std::size_t, Rat> row) const;
  std::size_t rank() const { return rows_.size(); }
  std::size_t ncols() const { return ncols_; }
  std::vector<std::size_t> pivot_columns() const;
  std::vector<std::vector<Rat>> kernel_basis() const;

 private:
  void reduce(std::map<std::size_t, Rat>& row) const;
  std::size_t ncols_;
  std::map<std::size_t, std::map<std::size_t, Rat>> rows_;  // pivot col -> row
};

std::size_t rank(const RatMatrix& m);
std::vector<std::vector<Rat>> kernel_basis(const RatMatrix& m);
std::optional<RatMatrix> inverse(const RatMatrix& m);

struct KernelVector {
  std::vector<Poly> v;
  // True when the vector normalized to 1 in its free coordinate is polynomial;
  // v is then that normalized representative.
  bool polynomial = true;
};

// Fraction-free Gauss-Jordan form: pivot columns carry d on the diagonal.
struct FFForm {
  PolyMatrix R;
  std::vector<std::size_t> pivot_rows;
  std::vector<std::size_t> pivot_cols;
  Poly d;
};

// Pivots are chosen among the first pivot_limit columns only.
FFForm ff_gauss_jordan(const PolyMatrix& m, std::size_t pivot_limit = static_cast<std::size_t>(-1));
std::vector<KernelVector> kernel_basis(const PolyMatrix& m);
std::size_t rank_generic(const PolyMatrix& m);
std::size_t rank_at(const PolyMatrix& m, const std::vector<Rat>& point);

struct SolveResult {
  bool consistent = false;
  bool polynomial = false;
  std::vector<Poly> x;  // valid when consistent && polynomial
  std::vector<Poly> numerators;  // x = numerators / denominator
  Poly denominator;
};

// Solves m x = b over Q(x); free unknowns are set to zero.
SolveResult solve(const PolyMatrix& m, const std::vector<Poly>& b);
std::optional<PolyMatrix> inverse_polynomial(const PolyMatrix& m);

}  // namespace gradman
