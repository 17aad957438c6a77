#include "novsh/homology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace novsh {

LaurentMatrix FreeChainComplex::boundary_or_zero(int i) const {
  int top = top_degree();
  if (i >= 1 && i <= top) return boundaries[static_cast<size_t>(i) - 1];
  if (i == 0 && top >= 0) return LaurentMatrix(0, ranks[0], num_vars);
  if (i == top + 1 && top >= 0)
    return LaurentMatrix(ranks[static_cast<size_t>(top)], 0, num_vars);
  throw std::out_of_range("boundary_or_zero: degree outside the complex");
}

FreeChainComplex make_complex(int num_vars, std::vector<int> ranks,
                              std::vector<LaurentMatrix> boundaries) {
  if (ranks.empty()) throw std::invalid_argument("make_complex: no degrees");
  for (int r : ranks)
    if (r < 0) throw std::invalid_argument("make_complex: negative rank");
  if (boundaries.size() + 1 != ranks.size())
    throw std::invalid_argument(
        "make_complex: need exactly one boundary per degree pair");
  FreeChainComplex c;
  c.num_vars = num_vars;
  c.ranks = std::move(ranks);
  c.boundaries = std::move(boundaries);
  for (size_t i = 0; i < c.boundaries.size(); ++i) {
    const LaurentMatrix& b = c.boundaries[i];
    if (b.num_vars() != num_vars)
      throw std::invalid_argument("make_complex: boundary num_vars mismatch");
    if (b.rows() != c.ranks[i] || b.cols() != c.ranks[i + 1])
      throw std::invalid_argument("make_complex: boundary shape mismatch");
  }
  return c;
}

ValidationReport validate(const FreeChainComplex& c) {
  ValidationReport rep;
  int top = c.top_degree();
  if (top < 0) {
    rep.ok = false;
    rep.message = "complex has no degrees";
    return rep;
  }
  for (size_t i = 0; i < c.boundaries.size(); ++i) {
    const LaurentMatrix& b = c.boundaries[i];
    if (b.rows() != c.ranks[i] || b.cols() != c.ranks[i + 1] ||
        b.num_vars() != c.num_vars) {
      rep.ok = false;
      rep.first_bad_degree = static_cast<int>(i) + 1;
      rep.message = "boundary shape disagrees with the rank vector";
      return rep;
    }
  }
  for (size_t i = 0; i + 1 < c.boundaries.size(); ++i) {
    LaurentMatrix prod = matmul(c.boundaries[i], c.boundaries[i + 1]);
    double res = prod.max_coeff_magnitude();
    rep.max_residual = std::max(rep.max_residual, res);
    if (res >= kChainTol && rep.ok) {
      rep.ok = false;
      rep.first_bad_degree = static_cast<int>(i) + 1;
      std::ostringstream os;
      os << "boundary composite in degrees " << i + 1 << "," << i + 2
         << " has coefficient residual " << res;
      rep.message = os.str();
    }
  }
  return rep;
}

namespace {

int generic_rank_of(const LaurentMatrix& m, const TorusGrid& grid,
                    double eps_rank) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return rank_profile(sigma_field(make_symbol(m), grid), eps_rank).generic_rank;
}

}  // namespace

DegreeHomology homology(const FreeChainComplex& c, int degree,
                        const TorusGrid& grid, const std::vector<double>& lambdas,
                        double eps_rank) {
  int top = c.top_degree();
  if (degree < 0 || degree > top)
    throw std::out_of_range("homology: degree outside the complex");
  DegreeHomology h;
  h.degree = degree;
  LaurentMatrix in = c.boundary_or_zero(degree + 1);
  LaurentMatrix out = c.boundary_or_zero(degree);
  int r_out = generic_rank_of(out, grid, eps_rank);
  h.cycles_rank = c.ranks[static_cast<size_t>(degree)] - r_out;
  VirtualModule incoming = module_from(in);
  SigmaField f = sigma_field(incoming.alpha, grid);
  h.boundaries_rank = rank_profile(f, eps_rank).generic_rank;
  h.betti = static_cast<double>(h.cycles_rank - h.boundaries_rank);
  h.torsion_density = density_from_sigma(f, h.boundaries_rank, lambdas);
  h.ns_fit = ns_estimate(h.torsion_density);
  return h;
}

HomologyReport full_homology(const FreeChainComplex& c, const TorusGrid& grid,
                             const std::vector<double>& lambdas, double eps_rank) {
  HomologyReport rep;
  for (int i = 0; i <= c.top_degree(); ++i)
    rep.degrees.push_back(homology(c, i, grid, lambdas, eps_rank));
  return rep;
}

FreeChainComplex dual_complex(const FreeChainComplex& c) {
  FreeChainComplex d;
  d.num_vars = c.num_vars;
  d.orientable_manifold = c.orientable_manifold;
  int top = c.top_degree();
  d.ranks.resize(c.ranks.size());
  for (int i = 0; i <= top; ++i)
    d.ranks[static_cast<size_t>(top - i)] = c.ranks[static_cast<size_t>(i)];
  // boundary of the dual in degree j is the adjoint of the original boundary
  // in degree top - j + 1
  d.boundaries.reserve(c.boundaries.size());
  for (int j = 1; j <= top; ++j)
    d.boundaries.push_back(adjoint(c.boundaries[static_cast<size_t>(top - j)]));
  return d;
}

UniversalCoefficientsReport universal_coefficients_check(
    const FreeChainComplex& c, const TorusGrid& grid,
    const std::vector<double>& lambdas, double eps_rank) {
  UniversalCoefficientsReport rep;
  FreeChainComplex d = dual_complex(c);
  HomologyReport hc = full_homology(c, grid, lambdas, eps_rank);
  HomologyReport hd = full_homology(d, grid, lambdas, eps_rank);
  int top = c.top_degree();
  for (int i = 0; i <= top; ++i) {
    const DegreeHomology& original = hc.degrees[static_cast<size_t>(i)];
    // degree-i cohomology sits in degree top - i of the dual complex
    const DegreeHomology& dual = hd.degrees[static_cast<size_t>(top - i)];
    rep.betti_original.push_back(original.betti);
    rep.betti_dual.push_back(dual.betti);
    if (dual.betti != original.betti) rep.betti_ok = false;
    // torsion in cohomological degree i against homological degree i-1;
    // for i = 0 the left side must be torsion-free
    for (size_t j = 0; j < lambdas.size(); ++j) {
      double rhs = (i >= 1)
                       ? hc.degrees[static_cast<size_t>(i) - 1].torsion_density.value(j)
                       : 0.0;
      rep.max_density_gap = std::max(
          rep.max_density_gap, std::abs(dual.torsion_density.value(j) - rhs));
    }
  }
  return rep;
}

PoincareReport poincare_check(const FreeChainComplex& c, const TorusGrid& grid,
                              const std::vector<double>& lambdas,
                              double eps_rank) {
  if (!c.orientable_manifold)
    throw std::domain_error(
        "poincare_check: complex is not a closed orientable manifold preset");
  PoincareReport rep;
  FreeChainComplex d = dual_complex(c);
  HomologyReport hc = full_homology(c, grid, lambdas, eps_rank);
  HomologyReport hd = full_homology(d, grid, lambdas, eps_rank);
  int n = c.top_degree();
  for (int i = 0; i <= n; ++i) {
    if (hc.degrees[static_cast<size_t>(i)].betti !=
        hd.degrees[static_cast<size_t>(n - i)].betti)
      rep.betti_ok = false;
  }
  // torsion pairing: T(H_i) against the dual of T(H_{n-i-1}); the duality
  // preserves fiber spectra, so compare against the dual complex's torsion
  // in the mirrored degree
  for (int i = 0; i + 1 <= n; ++i) {
    const SpectralDensity& lhs =
        hc.degrees[static_cast<size_t>(i)].torsion_density;
    // H_{n-i-1} of the dual complex carries the e-dual torsion of H_i
    const SpectralDensity& rhs =
        hd.degrees[static_cast<size_t>(n - i - 1)].torsion_density;
    for (size_t j = 0; j < lambdas.size(); ++j)
      rep.max_density_gap =
          std::max(rep.max_density_gap, std::abs(lhs.value(j) - rhs.value(j)));
  }
  return rep;
}

namespace {

Eigen::MatrixXcd orthonormal_image(const Eigen::MatrixXcd& m, double thr) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::MatrixXcd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Essential rank of z -> (1 - P_{im alpha(z)}) f(z): the fiberwise rank of
// the map induced on projective parts of the target. Unlike a Laurent
// symbol, this family is built through spectral projections and JUMPS UP on
// the degeneracy loci of alpha, so the a.e. value is the max after excusing
// the usual measure-zero allowance of fibers, not the plain max.
int generic_rank_modulo_image(const SymbolPtr& f, const SymbolPtr& alpha,
                              const TorusGrid& grid, double eps_rank) {
  const double thr_a =
      eps_rank * std::max(1.0, sigma_field(alpha, grid).global_max);
  size_t total = grid.total_points();
  std::vector<Eigen::MatrixXcd> mods(total);
  double gmax = 0.0;
  Eigen::MatrixXcd fb(f->rows(), f->cols()), ab(alpha->rows(), alpha->cols());
  for (size_t i = 0; i < total; ++i) {
    TorusPoint pt = grid.point(i);
    f->eval_into(pt, fb);
    alpha->eval_into(pt, ab);
    Eigen::MatrixXcd u = orthonormal_image(ab, thr_a);
    mods[i] = fb - u * (u.adjoint() * fb);
    if (mods[i].size() > 0) gmax = std::max(gmax, mods[i].cwiseAbs().maxCoeff());
  }
  const double thr = eps_rank * std::max(1.0, gmax);
  std::vector<int> ranks(total, 0);
  for (size_t i = 0; i < total; ++i) {
    const Eigen::MatrixXcd& m = mods[i];
    if (m.rows() == 0 || m.cols() == 0) continue;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > thr) ++r;
    ranks[i] = r;
  }
  std::sort(ranks.begin(), ranks.end());
  size_t allowed = static_cast<size_t>(
      2.0 * grid.num_vars / grid.points_per_dim * static_cast<double>(total));
  size_t idx = (allowed + 1 <= total) ? total - 1 - allowed : 0;
  return ranks[idx];
}

}  // namespace

WeakExactnessReport projective_parts_weak_exactness_check(
    const EcatMorphism& f, const EcatMorphism& g, const TorusGrid& grid,
    double eps_rank) {
  if (f.target.rank_dst != g.source.rank_dst ||
      f.target.alpha->rows() != g.source.alpha->rows() ||
      f.target.alpha->cols() != g.source.alpha->cols())
    throw std::invalid_argument(
        "weak_exactness: middle modules of the two morphisms disagree");
  WeakExactnessReport rep;

  // The composite must be the zero morphism: fiberwise its matrix has to
  // factor through the closure of the image of the last structure map, up to
  // the usual measure-zero allowance of degenerate fibers.
  const SymbolPtr& az = g.target.alpha;
  const double thr_z =
      kDefaultRankEps * std::max(1.0, sigma_field(az, grid).global_max);
  size_t total = grid.total_points();
  size_t failures = 0;
  double scale = 0.0;
  Eigen::MatrixXcd fb(f.f->rows(), f.f->cols()), gb(g.f->rows(), g.f->cols());
  Eigen::MatrixXcd zb(az->rows(), az->cols());
  std::vector<Eigen::MatrixXcd> comps(total);
  for (size_t i = 0; i < total; ++i) {
    TorusPoint pt = grid.point(i);
    f.f->eval_into(pt, fb);
    g.f->eval_into(pt, gb);
    az->eval_into(pt, zb);
    Eigen::MatrixXcd u = orthonormal_image(zb, thr_z);
    comps[i] = gb * fb;
    comps[i] -= u * (u.adjoint() * comps[i]);
    if (fb.size() > 0) scale = std::max(scale, fb.cwiseAbs().maxCoeff());
    if (gb.size() > 0) scale = std::max(scale, gb.cwiseAbs().maxCoeff());
  }
  for (size_t i = 0; i < total; ++i)
    if (comps[i].size() > 0 &&
        comps[i].cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, scale))
      ++failures;
  rep.sequence_ok =
      static_cast<double>(failures) <
      2.0 * grid.num_vars / grid.points_per_dim * static_cast<double>(total);

  double p_mid = split(f.target, grid, eps_rank).projective_dim;
  int r_pf = generic_rank_modulo_image(f.f, f.target.alpha, grid, eps_rank);
  int r_pg = generic_rank_modulo_image(g.f, g.target.alpha, grid, eps_rank);
  rep.mid_projective_dim = p_mid - r_pg - r_pf;

  KernelData kd = kernel_data(g, grid, eps_rank);
  rep.h_projective_dim = kd.projective_dim - r_pf;
  rep.consistent =
      std::abs(rep.mid_projective_dim - rep.h_projective_dim) < 0.5;
  return rep;
}

}  // namespace novsh
