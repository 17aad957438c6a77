#include "novsh/laurent.hpp"

#include <cmath>

namespace novsh {

namespace {

Exponents negated(const Exponents& e) {
  Exponents out(e.size());
  for (size_t i = 0; i < e.size(); ++i) out[i] = -e[i];
  return out;
}

}  // namespace

LaurentPoly::LaurentPoly(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 0) throw std::invalid_argument("LaurentPoly: num_vars < 0");
}

LaurentPoly LaurentPoly::constant(int num_vars, Complex c) {
  LaurentPoly p(num_vars);
  p.add_term(Exponents(static_cast<size_t>(num_vars), 0), c);
  return p;
}

LaurentPoly LaurentPoly::monomial(int num_vars, const Exponents& exp, Complex c) {
  LaurentPoly p(num_vars);
  p.add_term(exp, c);
  return p;
}

LaurentPoly LaurentPoly::variable(int num_vars, int index, int power) {
  if (index < 0 || index >= num_vars)
    throw std::invalid_argument("LaurentPoly::variable: index out of range");
  Exponents e(static_cast<size_t>(num_vars), 0);
  e[static_cast<size_t>(index)] = power;
  return monomial(num_vars, e, Complex(1.0, 0.0));
}

void LaurentPoly::add_term(const Exponents& exp, Complex c) {
  if (static_cast<int>(exp.size()) != num_vars_)
    throw std::invalid_argument("LaurentPoly::add_term: exponent arity mismatch");
  auto it = terms_.find(exp);
  if (it == terms_.end()) {
    if (c != Complex(0.0, 0.0)) terms_.emplace(exp, c);
    return;
  }
  it->second += c;
  if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
}

Complex LaurentPoly::eval(const TorusPoint& pt) const {
  if (pt.num_vars() != num_vars_)
    throw std::invalid_argument("LaurentPoly::eval: point arity mismatch");
  Complex acc(0.0, 0.0);
  for (const auto& [exp, c] : terms_) {
    double phase = 0.0;
    for (size_t k = 0; k < exp.size(); ++k) phase += exp[k] * pt.angles[k];
    acc += c * std::polar(1.0, phase);
  }
  return acc;
}

LaurentPoly LaurentPoly::involution() const {
  LaurentPoly out(num_vars_);
  for (const auto& [exp, c] : terms_) out.add_term(negated(exp), std::conj(c));
  return out;
}

double LaurentPoly::max_coeff_magnitude() const {
  double m = 0.0;
  for (const auto& [exp, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void LaurentPoly::check_same_vars(const LaurentPoly& o) const {
  if (num_vars_ != o.num_vars_)
    throw std::invalid_argument("LaurentPoly: mixed num_vars in arithmetic");
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  check_same_vars(o);
  LaurentPoly out = *this;
  for (const auto& [exp, c] : o.terms_) out.add_term(exp, c);
  return out;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
  check_same_vars(o);
  LaurentPoly out = *this;
  for (const auto& [exp, c] : o.terms_) out.add_term(exp, -c);
  return out;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  check_same_vars(o);
  LaurentPoly out(num_vars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e(ea.size());
      for (size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

LaurentPoly LaurentPoly::operator-() const { return scaled(Complex(-1.0, 0.0)); }

LaurentPoly LaurentPoly::scaled(Complex c) const {
  LaurentPoly out(num_vars_);
  for (const auto& [exp, v] : terms_) out.add_term(exp, v * c);
  return out;
}

LaurentMatrix::LaurentMatrix(int rows, int cols, int num_vars)
    : rows_(rows), cols_(cols), num_vars_(num_vars) {
  if (rows < 0 || cols < 0)
    throw std::invalid_argument("LaurentMatrix: negative shape");
  entries_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols),
                  LaurentPoly(num_vars));
}

LaurentMatrix LaurentMatrix::identity(int n, int num_vars) {
  LaurentMatrix m(n, n, num_vars);
  for (int i = 0; i < n; ++i)
    m.set(i, i, LaurentPoly::constant(num_vars, Complex(1.0, 0.0)));
  return m;
}

const LaurentPoly& LaurentMatrix::at(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::invalid_argument("LaurentMatrix::at: index out of range");
  return entries_[static_cast<size_t>(r) * cols_ + c];
}

LaurentPoly& LaurentMatrix::at(int r, int c) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::invalid_argument("LaurentMatrix::at: index out of range");
  return entries_[static_cast<size_t>(r) * cols_ + c];
}

void LaurentMatrix::set(int r, int c, const LaurentPoly& p) {
  if (p.num_vars() != num_vars_)
    throw std::invalid_argument("LaurentMatrix::set: num_vars mismatch");
  at(r, c) = p;
}

bool LaurentMatrix::is_zero() const {
  for (const auto& e : entries_)
    if (!e.is_zero()) return false;
  return true;
}

double LaurentMatrix::max_coeff_magnitude() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.max_coeff_magnitude());
  return m;
}

bool LaurentMatrix::operator==(const LaurentMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && num_vars_ == o.num_vars_ &&
         entries_ == o.entries_;
}

namespace {

void check_vars(const LaurentMatrix& a, const LaurentMatrix& b, const char* op) {
  if (a.num_vars() != b.num_vars())
    throw std::invalid_argument(std::string(op) + ": num_vars mismatch");
}

}  // namespace

LaurentMatrix matmul(const LaurentMatrix& a, const LaurentMatrix& b) {
  check_vars(a, b, "matmul");
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree");
  LaurentMatrix out(a.rows(), b.cols(), a.num_vars());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const LaurentPoly& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j) {
        if (b.at(k, j).is_zero()) continue;
        out.at(i, j) = out.at(i, j) + aik * b.at(k, j);
      }
    }
  }
  return out;
}

LaurentMatrix add(const LaurentMatrix& a, const LaurentMatrix& b) {
  check_vars(a, b, "add");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add: shape mismatch");
  LaurentMatrix out(a.rows(), a.cols(), a.num_vars());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j) + b.at(i, j);
  return out;
}

LaurentMatrix sub(const LaurentMatrix& a, const LaurentMatrix& b) {
  return add(a, negate(b));
}

LaurentMatrix scale(const LaurentMatrix& a, Complex c) {
  LaurentMatrix out(a.rows(), a.cols(), a.num_vars());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j).scaled(c);
  return out;
}

LaurentMatrix negate(const LaurentMatrix& a) { return scale(a, Complex(-1.0, 0.0)); }

LaurentMatrix adjoint(const LaurentMatrix& a) {
  LaurentMatrix out(a.cols(), a.rows(), a.num_vars());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j).involution();
  return out;
}

LaurentMatrix block_diag(const LaurentMatrix& a, const LaurentMatrix& b) {
  return block_diag(std::vector<LaurentMatrix>{a, b});
}

LaurentMatrix block_diag(const std::vector<LaurentMatrix>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diag: empty block list");
  int rows = 0, cols = 0;
  for (const auto& blk : blocks) {
    check_vars(blocks.front(), blk, "block_diag");
    rows += blk.rows();
    cols += blk.cols();
  }
  LaurentMatrix out(rows, cols, blocks.front().num_vars());
  int r0 = 0, c0 = 0;
  for (const auto& blk : blocks) {
    for (int i = 0; i < blk.rows(); ++i)
      for (int j = 0; j < blk.cols(); ++j) out.at(r0 + i, c0 + j) = blk.at(i, j);
    r0 += blk.rows();
    c0 += blk.cols();
  }
  return out;
}

LaurentMatrix hstack(const LaurentMatrix& a, const LaurentMatrix& b) {
  return hstack(std::vector<LaurentMatrix>{a, b});
}

LaurentMatrix hstack(const std::vector<LaurentMatrix>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("hstack: empty block list");
  int cols = 0;
  for (const auto& blk : blocks) {
    check_vars(blocks.front(), blk, "hstack");
    if (blk.rows() != blocks.front().rows())
      throw std::invalid_argument("hstack: row count mismatch");
    cols += blk.cols();
  }
  LaurentMatrix out(blocks.front().rows(), cols, blocks.front().num_vars());
  int c0 = 0;
  for (const auto& blk : blocks) {
    for (int i = 0; i < blk.rows(); ++i)
      for (int j = 0; j < blk.cols(); ++j) out.at(i, c0 + j) = blk.at(i, j);
    c0 += blk.cols();
  }
  return out;
}

LaurentMatrix vstack(const LaurentMatrix& a, const LaurentMatrix& b) {
  return vstack(std::vector<LaurentMatrix>{a, b});
}

LaurentMatrix vstack(const std::vector<LaurentMatrix>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack: empty block list");
  int rows = 0;
  for (const auto& blk : blocks) {
    check_vars(blocks.front(), blk, "vstack");
    if (blk.cols() != blocks.front().cols())
      throw std::invalid_argument("vstack: column count mismatch");
    rows += blk.rows();
  }
  LaurentMatrix out(rows, blocks.front().cols(), blocks.front().num_vars());
  int r0 = 0;
  for (const auto& blk : blocks) {
    for (int i = 0; i < blk.rows(); ++i)
      for (int j = 0; j < blk.cols(); ++j) out.at(r0 + i, j) = blk.at(i, j);
    r0 += blk.rows();
  }
  return out;
}

Eigen::MatrixXcd eval_matrix(const LaurentMatrix& a, const TorusPoint& pt) {
  if (pt.num_vars() != a.num_vars())
    throw std::invalid_argument("eval_matrix: point arity mismatch");
  Eigen::MatrixXcd out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a.at(i, j).eval(pt);
  return out;
}

LaurentMatrix from_rows(const std::vector<std::vector<LaurentPoly>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw std::invalid_argument("from_rows: empty matrix");
  int nv = rows.front().front().num_vars();
  LaurentMatrix out(static_cast<int>(rows.size()),
                    static_cast<int>(rows.front().size()), nv);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw std::invalid_argument("from_rows: ragged rows");
    for (size_t j = 0; j < rows[i].size(); ++j)
      out.set(static_cast<int>(i), static_cast<int>(j), rows[i][j]);
  }
  return out;
}

}  // namespace novsh
