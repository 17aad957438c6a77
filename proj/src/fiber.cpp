#include "novsh/fiber.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "novsh/parallel.hpp"

namespace novsh {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

int TorusGrid::default_points_per_dim(int num_vars) {
  switch (num_vars) {
    case 1: return 4096;
    case 2: return 256;
    case 3: return 32;
    default: return num_vars <= 0 ? 1 : 8;
  }
}

TorusGrid TorusGrid::standard(int num_vars) {
  return with_size(num_vars, default_points_per_dim(num_vars));
}

TorusGrid TorusGrid::with_size(int num_vars, int points_per_dim) {
  if (num_vars < 1) throw std::invalid_argument("TorusGrid: num_vars < 1");
  if (points_per_dim < 1) throw std::invalid_argument("TorusGrid: empty grid");
  TorusGrid g;
  g.num_vars = num_vars;
  g.points_per_dim = points_per_dim;
  return g;
}

size_t TorusGrid::total_points() const {
  size_t p = 1;
  for (int k = 0; k < num_vars; ++k) p *= static_cast<size_t>(points_per_dim);
  return p;
}

double TorusGrid::weight() const { return 1.0 / static_cast<double>(total_points()); }

TorusPoint TorusGrid::point(size_t flat_index) const {
  TorusPoint pt;
  pt.angles.resize(static_cast<size_t>(num_vars));
  size_t rem = flat_index;
  for (int k = num_vars - 1; k >= 0; --k) {
    size_t i = rem % static_cast<size_t>(points_per_dim);
    rem /= static_cast<size_t>(points_per_dim);
    pt.angles[static_cast<size_t>(k)] =
        kTwoPi * static_cast<double>(i) / static_cast<double>(points_per_dim);
  }
  return pt;
}

std::vector<int> TorusGrid::indices(size_t flat_index) const {
  std::vector<int> idx(static_cast<size_t>(num_vars));
  size_t rem = flat_index;
  for (int k = num_vars - 1; k >= 0; --k) {
    idx[static_cast<size_t>(k)] = static_cast<int>(rem % static_cast<size_t>(points_per_dim));
    rem /= static_cast<size_t>(points_per_dim);
  }
  return idx;
}

size_t TorusGrid::flat_index(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != num_vars)
    throw std::invalid_argument("TorusGrid::flat_index: arity mismatch");
  size_t flat = 0;
  for (int k = 0; k < num_vars; ++k) {
    int i = idx[static_cast<size_t>(k)];
    if (i < 0 || i >= points_per_dim)
      throw std::invalid_argument("TorusGrid::flat_index: index out of range");
    flat = flat * static_cast<size_t>(points_per_dim) + static_cast<size_t>(i);
  }
  return flat;
}

Eigen::MatrixXcd TorusSymbol::at(const TorusPoint& pt) const {
  Eigen::MatrixXcd out(rows(), cols());
  eval_into(pt, out);
  return out;
}

namespace {

class LaurentSymbol final : public TorusSymbol {
 public:
  explicit LaurentSymbol(LaurentMatrix m) : m_(std::move(m)) {}
  int rows() const override { return m_.rows(); }
  int cols() const override { return m_.cols(); }
  int num_vars() const override { return m_.num_vars(); }
  Provenance provenance() const override { return Provenance::kLaurent; }
  const LaurentMatrix* as_laurent() const override { return &m_; }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    for (int i = 0; i < m_.rows(); ++i)
      for (int j = 0; j < m_.cols(); ++j) out(i, j) = m_.at(i, j).eval(pt);
  }

 private:
  LaurentMatrix m_;
};

class AbsPowerSymbol final : public TorusSymbol {
 public:
  AbsPowerSymbol(double center_angle, double nu) : theta0_(center_angle), nu_(nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("abs_power_symbol: nu must be > 0");
  }
  int rows() const override { return 1; }
  int cols() const override { return 1; }
  int num_vars() const override { return 1; }
  Provenance provenance() const override { return Provenance::kScalarSymbol; }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    if (pt.num_vars() != 1)
      throw std::invalid_argument("abs_power_symbol: point arity mismatch");
    // |e^{i t} - e^{i t0}| = 2 |sin((t - t0)/2)|
    double d = 2.0 * std::abs(std::sin(0.5 * (pt.angles[0] - theta0_)));
    out(0, 0) = Complex(std::pow(d, nu_), 0.0);
  }

 private:
  double theta0_, nu_;
};

void check_blocks(const std::vector<SymbolPtr>& blocks, const char* op) {
  if (blocks.empty()) throw std::invalid_argument(std::string(op) + ": empty block list");
  for (const auto& b : blocks) {
    if (!b) throw std::invalid_argument(std::string(op) + ": null block");
    if (b->num_vars() != blocks.front()->num_vars())
      throw std::invalid_argument(std::string(op) + ": num_vars mismatch");
  }
}

Provenance combined_provenance(const std::vector<SymbolPtr>& blocks) {
  for (const auto& b : blocks)
    if (b->provenance() != Provenance::kLaurent) return Provenance::kScalarSymbol;
  return Provenance::kLaurent;
}

class BlockDiagSymbol final : public TorusSymbol {
 public:
  explicit BlockDiagSymbol(std::vector<SymbolPtr> blocks) : blocks_(std::move(blocks)) {
    check_blocks(blocks_, "block_diag_symbol");
    for (const auto& b : blocks_) {
      rows_ += b->rows();
      cols_ += b->cols();
    }
  }
  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  int num_vars() const override { return blocks_.front()->num_vars(); }
  Provenance provenance() const override { return combined_provenance(blocks_); }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    out.setZero();
    int r0 = 0, c0 = 0;
    Eigen::MatrixXcd buf;
    for (const auto& b : blocks_) {
      buf.resize(b->rows(), b->cols());
      b->eval_into(pt, buf);
      out.block(r0, c0, b->rows(), b->cols()) = buf;
      r0 += b->rows();
      c0 += b->cols();
    }
  }

 private:
  std::vector<SymbolPtr> blocks_;
  int rows_ = 0, cols_ = 0;
};

class HStackSymbol final : public TorusSymbol {
 public:
  explicit HStackSymbol(std::vector<SymbolPtr> blocks) : blocks_(std::move(blocks)) {
    check_blocks(blocks_, "hstack_symbol");
    for (const auto& b : blocks_) {
      if (b->rows() != blocks_.front()->rows())
        throw std::invalid_argument("hstack_symbol: row count mismatch");
      cols_ += b->cols();
    }
  }
  int rows() const override { return blocks_.front()->rows(); }
  int cols() const override { return cols_; }
  int num_vars() const override { return blocks_.front()->num_vars(); }
  Provenance provenance() const override { return combined_provenance(blocks_); }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    int c0 = 0;
    Eigen::MatrixXcd buf;
    for (const auto& b : blocks_) {
      buf.resize(b->rows(), b->cols());
      b->eval_into(pt, buf);
      out.block(0, c0, b->rows(), b->cols()) = buf;
      c0 += b->cols();
    }
  }

 private:
  std::vector<SymbolPtr> blocks_;
  int cols_ = 0;
};

class VStackSymbol final : public TorusSymbol {
 public:
  explicit VStackSymbol(std::vector<SymbolPtr> blocks) : blocks_(std::move(blocks)) {
    check_blocks(blocks_, "vstack_symbol");
    for (const auto& b : blocks_) {
      if (b->cols() != blocks_.front()->cols())
        throw std::invalid_argument("vstack_symbol: column count mismatch");
      rows_ += b->rows();
    }
  }
  int rows() const override { return rows_; }
  int cols() const override { return blocks_.front()->cols(); }
  int num_vars() const override { return blocks_.front()->num_vars(); }
  Provenance provenance() const override { return combined_provenance(blocks_); }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    int r0 = 0;
    Eigen::MatrixXcd buf;
    for (const auto& b : blocks_) {
      buf.resize(b->rows(), b->cols());
      b->eval_into(pt, buf);
      out.block(r0, 0, b->rows(), b->cols()) = buf;
      r0 += b->rows();
    }
  }

 private:
  std::vector<SymbolPtr> blocks_;
  int rows_ = 0;
};

class ScaleSymbol final : public TorusSymbol {
 public:
  ScaleSymbol(SymbolPtr inner, Complex c) : inner_(std::move(inner)), c_(c) {
    if (!inner_) throw std::invalid_argument("scale_symbol: null symbol");
  }
  int rows() const override { return inner_->rows(); }
  int cols() const override { return inner_->cols(); }
  int num_vars() const override { return inner_->num_vars(); }
  Provenance provenance() const override { return inner_->provenance(); }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    inner_->eval_into(pt, out);
    out *= c_;
  }

 private:
  SymbolPtr inner_;
  Complex c_;
};

class AdjointSymbol final : public TorusSymbol {
 public:
  explicit AdjointSymbol(SymbolPtr inner) : inner_(std::move(inner)) {}
  int rows() const override { return inner_->cols(); }
  int cols() const override { return inner_->rows(); }
  int num_vars() const override { return inner_->num_vars(); }
  Provenance provenance() const override { return inner_->provenance(); }
  const SymbolPtr& inner() const { return inner_; }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    Eigen::MatrixXcd buf(inner_->rows(), inner_->cols());
    inner_->eval_into(pt, buf);
    out = buf.adjoint();
  }

 private:
  SymbolPtr inner_;
};

class PointwiseSymbol final : public TorusSymbol {
 public:
  PointwiseSymbol(int rows, int cols, int num_vars,
                  std::function<Eigen::MatrixXcd(const TorusPoint&)> fn)
      : rows_(rows), cols_(cols), num_vars_(num_vars), fn_(std::move(fn)) {
    if (rows_ < 0 || cols_ < 0 || num_vars_ < 1 || !fn_)
      throw std::invalid_argument("pointwise_symbol: bad arguments");
  }
  int rows() const override { return rows_; }
  int cols() const override { return cols_; }
  int num_vars() const override { return num_vars_; }
  Provenance provenance() const override { return Provenance::kScalarSymbol; }
  void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const override {
    out = fn_(pt);
    if (out.rows() != rows_ || out.cols() != cols_)
      throw std::invalid_argument("pointwise_symbol: evaluation shape mismatch");
  }

 private:
  int rows_, cols_, num_vars_;
  std::function<Eigen::MatrixXcd(const TorusPoint&)> fn_;
};

}  // namespace

SymbolPtr make_symbol(const LaurentMatrix& m) {
  return std::make_shared<LaurentSymbol>(m);
}

SymbolPtr abs_power_symbol(double center_angle, double nu) {
  return std::make_shared<AbsPowerSymbol>(center_angle, nu);
}

SymbolPtr block_diag_symbol(const std::vector<SymbolPtr>& blocks) {
  return std::make_shared<BlockDiagSymbol>(blocks);
}

SymbolPtr hstack_symbol(const std::vector<SymbolPtr>& blocks) {
  return std::make_shared<HStackSymbol>(blocks);
}

SymbolPtr vstack_symbol(const std::vector<SymbolPtr>& blocks) {
  return std::make_shared<VStackSymbol>(blocks);
}

SymbolPtr scale_symbol(const SymbolPtr& s, Complex c) {
  return std::make_shared<ScaleSymbol>(s, c);
}

SymbolPtr adjoint_symbol(const SymbolPtr& s) {
  if (!s) throw std::invalid_argument("adjoint_symbol: null symbol");
  if (const LaurentMatrix* lm = s->as_laurent()) return make_symbol(adjoint(*lm));
  if (auto adj = std::dynamic_pointer_cast<const AdjointSymbol>(s)) return adj->inner();
  return std::make_shared<AdjointSymbol>(s);
}

SymbolPtr pointwise_symbol(int rows, int cols, int num_vars,
                           std::function<Eigen::MatrixXcd(const TorusPoint&)> fn) {
  return std::make_shared<PointwiseSymbol>(rows, cols, num_vars, std::move(fn));
}

Eigen::Map<const Eigen::MatrixXcd> SampledMatrix::at(size_t point_index) const {
  size_t stride = static_cast<size_t>(rows) * static_cast<size_t>(cols);
  return Eigen::Map<const Eigen::MatrixXcd>(data.data() + point_index * stride, rows,
                                            cols);
}

SampledMatrix sample(const LaurentMatrix& m, const TorusGrid& grid) {
  return sample(make_symbol(m), grid);
}

SampledMatrix sample(const SymbolPtr& s, const TorusGrid& grid) {
  if (!s) throw std::invalid_argument("sample: null symbol");
  if (s->num_vars() != grid.num_vars)
    throw std::invalid_argument("sample: symbol/grid arity mismatch");
  SampledMatrix out;
  out.grid = grid;
  out.rows = s->rows();
  out.cols = s->cols();
  out.provenance = s->provenance();
  size_t stride = static_cast<size_t>(out.rows) * static_cast<size_t>(out.cols);
  out.data.resize(grid.total_points() * stride);
  Complex* base = out.data.data();
  parallel_for(grid.total_points(), [&](size_t b, size_t e) {
    Eigen::MatrixXcd buf(s->rows(), s->cols());
    for (size_t i = b; i < e; ++i) {
      s->eval_into(grid.point(i), buf);
      Eigen::Map<Eigen::MatrixXcd>(base + i * stride, buf.rows(), buf.cols()) = buf;
    }
  });
  return out;
}

namespace {

// Ascending singular values of a dense complex matrix.
void sigmas_of(const Eigen::MatrixXcd& m, double* out) {
  int r = static_cast<int>(m.rows());
  int c = static_cast<int>(m.cols());
  int k = std::min(r, c);
  if (k == 0) return;
  if (r == 1 || c == 1) {
    out[0] = m.norm();
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  for (int i = 0; i < k; ++i) out[i] = sv(k - 1 - i);
}

}  // namespace

SigmaField singular_values(const SampledMatrix& s) {
  SigmaField f;
  f.grid = s.grid;
  f.rows = s.rows;
  f.cols = s.cols;
  f.uniform_count = std::min(s.rows, s.cols);
  size_t total = s.grid.total_points();
  f.values.resize(total * static_cast<size_t>(f.uniform_count));
  double* base = f.values.data();
  int k = f.uniform_count;
  parallel_for(total, [&](size_t b, size_t e) {
    for (size_t i = b; i < e; ++i) sigmas_of(s.at(i), base + i * static_cast<size_t>(k));
  });
  for (double v : f.values) f.global_max = std::max(f.global_max, v);
  return f;
}

SigmaField sigma_field(const SymbolPtr& s, const TorusGrid& grid) {
  if (!s) throw std::invalid_argument("sigma_field: null symbol");
  if (s->num_vars() != grid.num_vars)
    throw std::invalid_argument("sigma_field: symbol/grid arity mismatch");
  SigmaField f;
  f.grid = grid;
  f.rows = s->rows();
  f.cols = s->cols();
  f.uniform_count = std::min(f.rows, f.cols);
  size_t total = grid.total_points();
  f.values.resize(total * static_cast<size_t>(f.uniform_count));
  double* base = f.values.data();
  int k = f.uniform_count;
  parallel_for(total, [&](size_t b, size_t e) {
    Eigen::MatrixXcd buf(s->rows(), s->cols());
    for (size_t i = b; i < e; ++i) {
      s->eval_into(grid.point(i), buf);
      sigmas_of(buf, base + i * static_cast<size_t>(k));
    }
  });
  for (double v : f.values) f.global_max = std::max(f.global_max, v);
  return f;
}

int RankProfile::max_corank(int rank_cap) const {
  int m = 0;
  for (int r : fiber_ranks) m = std::max(m, rank_cap - std::min(r, rank_cap));
  return m;
}

RankProfile rank_profile(const SigmaField& f, double eps_rank) {
  if (!(eps_rank > 0.0)) throw std::invalid_argument("rank_profile: eps_rank <= 0");
  RankProfile p;
  p.eps_rank = eps_rank;
  p.sigma_max = f.global_max;
  p.threshold = eps_rank * std::max(1.0, f.global_max);
  size_t total = f.grid.total_points();
  p.fiber_ranks.resize(total);
  for (size_t i = 0; i < total; ++i) {
    size_t b = f.fiber_begin(i);
    int n = f.fiber_count(i);
    int r = 0;
    // values ascend within the fiber; count the tail above threshold
    for (int j = n - 1; j >= 0; --j) {
      if (f.values[b + static_cast<size_t>(j)] > p.threshold)
        ++r;
      else
        break;
    }
    p.fiber_ranks[i] = r;
    p.generic_rank = std::max(p.generic_rank, r);
  }
  return p;
}

RankProfile rank_profile(const SampledMatrix& s, double eps_rank) {
  return rank_profile(singular_values(s), eps_rank);
}

double vn_dim_kernel(const SymbolPtr& s, const TorusGrid& grid, double eps_rank) {
  RankProfile p = rank_profile(sigma_field(s, grid), eps_rank);
  return static_cast<double>(s->cols() - p.generic_rank);
}

double vn_dim_image_closure(const SymbolPtr& s, const TorusGrid& grid, double eps_rank) {
  RankProfile p = rank_profile(sigma_field(s, grid), eps_rank);
  return static_cast<double>(p.generic_rank);
}

double vn_dim_kernel(const LaurentMatrix& m, const TorusGrid& grid, double eps_rank) {
  return vn_dim_kernel(make_symbol(m), grid, eps_rank);
}

double vn_dim_image_closure(const LaurentMatrix& m, const TorusGrid& grid,
                            double eps_rank) {
  return vn_dim_image_closure(make_symbol(m), grid, eps_rank);
}

}  // namespace novsh
