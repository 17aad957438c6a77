#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "novsh/laurent.hpp"

namespace novsh {

/// Equispaced grid on the n-torus: angles 2*pi*k/N per coordinate,
/// uniform quadrature weight 1/N^n.
struct TorusGrid {
  int num_vars = 1;
  int points_per_dim = 0;

  static int default_points_per_dim(int num_vars);
  static TorusGrid standard(int num_vars);
  static TorusGrid with_size(int num_vars, int points_per_dim);

  size_t total_points() const;
  double weight() const;
  TorusPoint point(size_t flat_index) const;
  // Per-coordinate indices of a flat index (first coordinate slowest).
  std::vector<int> indices(size_t flat_index) const;
  size_t flat_index(const std::vector<int>& idx) const;
};

enum class Provenance { kLaurent, kScalarSymbol };

class TorusSymbol;
using SymbolPtr = std::shared_ptr<const TorusSymbol>;

/// Immutable matrix-valued multiplication symbol on the n-torus.
/// Laurent matrices are one realization; scalar symbols such as
/// |z - z0|^nu and piecewise (indicator-weighted) fields are others.
class TorusSymbol {
 public:
  virtual ~TorusSymbol() = default;

  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual int num_vars() const = 0;
  virtual void eval_into(const TorusPoint& pt, Eigen::MatrixXcd& out) const = 0;
  virtual Provenance provenance() const = 0;

  // Exact Laurent representation when one exists.
  virtual const LaurentMatrix* as_laurent() const { return nullptr; }

  Eigen::MatrixXcd at(const TorusPoint& pt) const;
};

SymbolPtr make_symbol(const LaurentMatrix& m);
// 1x1 symbol |z - exp(i*center_angle)|^nu on the circle; nu > 0.
SymbolPtr abs_power_symbol(double center_angle, double nu);
SymbolPtr block_diag_symbol(const std::vector<SymbolPtr>& blocks);
SymbolPtr hstack_symbol(const std::vector<SymbolPtr>& blocks);
SymbolPtr vstack_symbol(const std::vector<SymbolPtr>& blocks);
SymbolPtr scale_symbol(const SymbolPtr& s, Complex c);
SymbolPtr adjoint_symbol(const SymbolPtr& s);
// Arbitrary measurable symbol given by a pure evaluation function.
SymbolPtr pointwise_symbol(int rows, int cols, int num_vars,
                           std::function<Eigen::MatrixXcd(const TorusPoint&)> fn);

/// Symbol evaluated at every grid point. Per-point matrices are stored
/// column-major back to back.
struct SampledMatrix {
  TorusGrid grid;
  int rows = 0, cols = 0;
  Provenance provenance = Provenance::kLaurent;
  std::vector<Complex> data;

  Eigen::Map<const Eigen::MatrixXcd> at(size_t point_index) const;
};

SampledMatrix sample(const LaurentMatrix& m, const TorusGrid& grid);
SampledMatrix sample(const SymbolPtr& s, const TorusGrid& grid);

/// Ascending singular values of a symbol at every grid point.
/// uniform_count >= 0 means every fiber carries that many values;
/// otherwise per-fiber offsets are explicit.
struct SigmaField {
  TorusGrid grid;
  int rows = 0, cols = 0;
  int uniform_count = 0;
  std::vector<size_t> offsets;  // used only when uniform_count < 0
  std::vector<double> values;
  double global_max = 0.0;

  size_t fiber_begin(size_t i) const {
    return uniform_count >= 0 ? i * static_cast<size_t>(uniform_count) : offsets[i];
  }
  int fiber_count(size_t i) const {
    return uniform_count >= 0
               ? uniform_count
               : static_cast<int>(offsets[i + 1] - offsets[i]);
  }
};

SigmaField singular_values(const SampledMatrix& s);
// Streaming variant; avoids materializing the samples.
SigmaField sigma_field(const SymbolPtr& s, const TorusGrid& grid);

/// Fiberwise ranks at threshold eps_rank * max(1, global sigma max).
struct RankProfile {
  int generic_rank = 0;
  std::vector<int> fiber_ranks;
  double threshold = 0.0;
  double sigma_max = 0.0;
  double eps_rank = 0.0;

  int max_corank(int rank_cap) const;  // max over fibers of rank_cap - fiber_rank
};

RankProfile rank_profile(const SigmaField& f, double eps_rank);
RankProfile rank_profile(const SampledMatrix& s, double eps_rank);

inline constexpr double kDefaultRankEps = 1e-8;
inline constexpr double kDefaultInvertibleEps = 1e-6;

// Von Neumann dimensions over L^inf(T^n): integers in this model.
double vn_dim_kernel(const LaurentMatrix& m, const TorusGrid& grid,
                     double eps_rank = kDefaultRankEps);
double vn_dim_image_closure(const LaurentMatrix& m, const TorusGrid& grid,
                            double eps_rank = kDefaultRankEps);
double vn_dim_kernel(const SymbolPtr& s, const TorusGrid& grid,
                     double eps_rank = kDefaultRankEps);
double vn_dim_image_closure(const SymbolPtr& s, const TorusGrid& grid,
                            double eps_rank = kDefaultRankEps);

}  // namespace novsh
