#pragma once

#include <string>

#include "novsh/spectral.hpp"

namespace novsh {

/// Chain complex of free modules over the Laurent ring, degrees 0..d.
/// boundaries[i-1] is the boundary in degree i, of shape ranks[i-1] x ranks[i].
struct FreeChainComplex {
  int num_vars = 0;
  std::vector<int> ranks;
  std::vector<LaurentMatrix> boundaries;
  bool orientable_manifold = false;  // set by closed-manifold presets

  int top_degree() const { return static_cast<int>(ranks.size()) - 1; }
  /// Boundary in degree i, materializing the zero map (with the shapes the
  /// chain convention dictates) outside 1..top.
  LaurentMatrix boundary_or_zero(int i) const;
};

FreeChainComplex make_complex(int num_vars, std::vector<int> ranks,
                              std::vector<LaurentMatrix> boundaries);

inline constexpr double kChainTol = 1e-9;

struct ValidationReport {
  bool ok = true;
  int first_bad_degree = -1;
  double max_residual = 0.0;
  std::string message;
};

/// Shape bookkeeping plus the symbolic chain condition: every coefficient of
/// each product of consecutive boundaries must vanish to kChainTol.
ValidationReport validate(const FreeChainComplex& c);

struct DegreeHomology {
  int degree = 0;
  double betti = 0.0;       // exact integer in the Laurent model
  int cycles_rank = 0;      // generic dimension of ker boundary_i
  int boundaries_rank = 0;  // generic rank of boundary_{i+1}
  SpectralDensity torsion_density;  // spectrum of the incoming boundary
  NSFit ns_fit;
};

struct HomologyReport {
  std::vector<DegreeHomology> degrees;
};

DegreeHomology homology(const FreeChainComplex& c, int degree,
                        const TorusGrid& grid, const std::vector<double>& lambdas,
                        double eps_rank = kDefaultRankEps);

HomologyReport full_homology(const FreeChainComplex& c, const TorusGrid& grid,
                             const std::vector<double>& lambdas,
                             double eps_rank = kDefaultRankEps);

/// Reindexes degrees by i -> top - i and replaces boundaries by adjoints;
/// an involution term for term. Homology of the dual in degree top - i is
/// the degree-i cohomology of the original.
FreeChainComplex dual_complex(const FreeChainComplex& c);

struct UniversalCoefficientsReport {
  bool betti_ok = true;
  double max_density_gap = 0.0;   // over degrees and tabulated lambdas
  std::vector<double> betti_original;
  std::vector<double> betti_dual;  // indexed by cohomological degree
};

/// Degree-by-degree comparison: betti of the degree-i cohomology equals
/// betti_i, and the torsion density in cohomological degree i matches the
/// torsion density of homological degree i-1 pointwise.
UniversalCoefficientsReport universal_coefficients_check(
    const FreeChainComplex& c, const TorusGrid& grid,
    const std::vector<double>& lambdas, double eps_rank = kDefaultRankEps);

struct PoincareReport {
  bool betti_ok = true;
  double max_density_gap = 0.0;
};

/// Closed orientable manifold duality: betti_i against betti_{n-i} of the
/// dual complex, and the torsion density of H_i against the dual of the
/// torsion in complementary degree n-i-1.
PoincareReport poincare_check(const FreeChainComplex& c, const TorusGrid& grid,
                              const std::vector<double>& lambdas,
                              double eps_rank = kDefaultRankEps);

struct WeakExactnessReport {
  bool sequence_ok = false;        // composite vanishes on the grid
  double mid_projective_dim = 0.0; // homology of the projective parts
  double h_projective_dim = 0.0;   // dimension of the extended homology object
  bool consistent = false;
};

/// For a two-step sequence X -f-> Y -g-> Z with g f = 0: the von Neumann
/// dimension of the middle homology of the projective parts must equal the
/// dimension of the extended homology object; both are computed fiberwise
/// and independently.
WeakExactnessReport projective_parts_weak_exactness_check(
    const EcatMorphism& f, const EcatMorphism& g, const TorusGrid& grid,
    double eps_rank = kDefaultRankEps);

}  // namespace novsh
