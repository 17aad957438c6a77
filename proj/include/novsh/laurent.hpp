#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace novsh {

using Complex = std::complex<double>;
using Exponents = std::vector<int>;

/// Point on the n-torus, stored as angles in radians.
struct TorusPoint {
  std::vector<double> angles;

  int num_vars() const { return static_cast<int>(angles.size()); }
  Complex coordinate(int k) const {
    return std::polar(1.0, angles.at(static_cast<size_t>(k)));
  }
};

/// Finite C-linear combination of monomials z^m, m in Z^n.
/// Coefficients are complex doubles; terms with coefficient exactly 0.0
/// are pruned so that structural zero tests stay exact.
class LaurentPoly {
 public:
  LaurentPoly() : num_vars_(0) {}
  explicit LaurentPoly(int num_vars);

  static LaurentPoly zero(int num_vars) { return LaurentPoly(num_vars); }
  static LaurentPoly constant(int num_vars, Complex c);
  static LaurentPoly monomial(int num_vars, const Exponents& exp, Complex c);
  // z_index^power as an element of C[Z^num_vars].
  static LaurentPoly variable(int num_vars, int index, int power = 1);

  int num_vars() const { return num_vars_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }
  const std::map<Exponents, Complex>& terms() const { return terms_; }

  void add_term(const Exponents& exp, Complex c);

  Complex eval(const TorusPoint& pt) const;

  // Star involution: sum c_m z^m  ->  sum conj(c_m) z^{-m}.
  LaurentPoly involution() const;

  double max_coeff_magnitude() const;

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly operator-() const;
  LaurentPoly scaled(Complex c) const;

  bool operator==(const LaurentPoly& o) const {
    return num_vars_ == o.num_vars_ && terms_ == o.terms_;
  }

 private:
  void check_same_vars(const LaurentPoly& o) const;

  int num_vars_;
  std::map<Exponents, Complex> terms_;
};

/// Dense rows x cols matrix of Laurent polynomials, row-major.
class LaurentMatrix {
 public:
  LaurentMatrix() : rows_(0), cols_(0), num_vars_(0) {}
  LaurentMatrix(int rows, int cols, int num_vars);

  static LaurentMatrix identity(int n, int num_vars);
  static LaurentMatrix zero(int rows, int cols, int num_vars) {
    return LaurentMatrix(rows, cols, num_vars);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_vars() const { return num_vars_; }

  const LaurentPoly& at(int r, int c) const;
  LaurentPoly& at(int r, int c);
  void set(int r, int c, const LaurentPoly& p);

  bool is_zero() const;
  double max_coeff_magnitude() const;

  bool operator==(const LaurentMatrix& o) const;

 private:
  int rows_, cols_, num_vars_;
  std::vector<LaurentPoly> entries_;
};

// Shape/domain mismatches raise std::invalid_argument from all of these.
LaurentMatrix matmul(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix add(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix sub(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix scale(const LaurentMatrix& a, Complex c);
LaurentMatrix negate(const LaurentMatrix& a);

// Conjugate transpose with the star involution applied entrywise.
LaurentMatrix adjoint(const LaurentMatrix& a);

LaurentMatrix block_diag(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix block_diag(const std::vector<LaurentMatrix>& blocks);
LaurentMatrix hstack(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix hstack(const std::vector<LaurentMatrix>& blocks);
LaurentMatrix vstack(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix vstack(const std::vector<LaurentMatrix>& blocks);

Eigen::MatrixXcd eval_matrix(const LaurentMatrix& a, const TorusPoint& pt);

// Convenience for building small matrices in code: entries[r][c] given as
// Laurent polynomials sharing num_vars.
LaurentMatrix from_rows(const std::vector<std::vector<LaurentPoly>>& rows);

}  // namespace novsh
