#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "novsh/ecat.hpp"
#include "novsh/homology.hpp"

namespace novsh {

/// Built-in cell structure together with the chain complex of its
/// universal covering, encoded over the group ring of Z^n.
struct CWPreset {
  std::string name;
  int fundamental_group_rank = 0;
  int top_dim = 0;
  FreeChainComplex complex;  // orientable_manifold flag set per preset
};

/// Recognized names: "circle", "circle_subdivided", "torus2" / "torus(2)",
/// "torus3" / "torus(3)". Throws std::invalid_argument otherwise.
CWPreset preset_complex(const std::string& name);

/// Exterior-algebra complex on num_vars generators with differentials
/// built from multiplication by (z_k - 1): a free resolution of the
/// trivial module, and the cell complex of the n-torus cover.
FreeChainComplex koszul_resolution(int num_vars);

/// Finite-dimensional unitary representation of Z^n: one commuting
/// unitary per generator.
struct UnitaryRep {
  int dim = 0;
  std::vector<Eigen::MatrixXcd> generators;
};

UnitaryRep trivial_rep(int num_vars);

inline constexpr double kRepTol = 1e-10;

/// Throws std::invalid_argument unless every generator is dim x dim,
/// unitary to kRepTol, and all pairs commute to kRepTol.
void validate_rep(const UnitaryRep& rep);

/// Coefficient twist: every monomial c*z^m of every entry is inflated to
/// the dim x dim block c * z^m * prod_k rep(k)^{m_k}. Ranks multiply by
/// dim; the chain condition is preserved exactly (the substitution is an
/// algebra homomorphism).
FreeChainComplex twist(const FreeChainComplex& c, const UnitaryRep& rep);

/// Degree-q derived functor of the completion applied to the module the
/// resolution presents. In this model the resolution's matrices already
/// act on the completed modules, so this is the degree-q extended
/// homology of the resolution itself.
struct TorModuleReport {
  int degree = 0;
  double projective_dim = 0.0;
  int torsion_rank = 0;
  bool is_zero = true;
  SpectralDensity density;
  NSFit fit;
};

TorModuleReport tor(int q, const FreeChainComplex& resolution,
                    const TorusGrid& grid, const std::vector<double>& lambdas,
                    double eps_rank = kDefaultRankEps);

/// Degreewise comparison, over a rank-one fundamental group, of the
/// extended homology of a complex against the two derived functors of the
/// ordinary homology modules of its cover, supplied as one presentation
/// matrix per degree (cokernel presentations over one-variable Laurent
/// polynomials; injective presentations expected).
/// Checks, per degree p:
///   betti(H_p)  ==  ker-dim of presentation p-1  +  coker-betti of
///   presentation p, and torsion density of H_p == torsion density of the
///   presented cokernel, to density_tol.
struct TorDecompositionRow {
  int degree = 0;
  double middle_betti = 0.0;
  double tor0_projective = 0.0;
  double tor1_projective = 0.0;
  bool dims_ok = false;
  double density_gap = 0.0;
};

struct TorDecompositionReport {
  std::vector<TorDecompositionRow> rows;
  double max_density_gap = 0.0;
  bool ok = false;
};

TorDecompositionReport tor_decomposition_check(
    const FreeChainComplex& complex,
    const std::vector<LaurentMatrix>& presentations, const TorusGrid& grid,
    const std::vector<double>& lambdas, double eps_rank = kDefaultRankEps,
    double density_tol = 1e-3);

/// Minimal-generator lower bound: max over grid fibers of the corank of
/// the structure map (point evaluation of the defining matrix equation).
/// Meaningful for normalized torsion modules; degenerate fibers are the
/// ones carrying the bound, so they are never excused here.
int mu_lower(const VirtualModule& x, const TorusGrid& grid,
             double eps_rank = kDefaultRankEps);

/// Result of a successful generator construction: the candidate map was
/// verified to be an epimorphism at every grid fiber (no exceptional-set
/// allowance).
struct MuUpperCertificate {
  int generators = 0;
  std::size_t cluster_count = 0;
  std::vector<std::size_t> center_indices;  // flat grid indices
  bool strict_epi = false;
  std::string summary;
};

/// Attempts the partition-of-unity generator construction: cluster the
/// degenerate fibers by grid adjacency (torus-wrapped), take cokernel
/// bases at the cluster centers, and send each generator through the
/// indicator of the nearest-center cell. Tries the column-sharing
/// candidate (max cluster corank) first, then the conservative disjoint
/// column blocks (sum of cluster coranks). Returns nothing when neither
/// candidate verifies or when the degeneracy locus is invisible at this
/// resolution while the module is not null.
std::optional<MuUpperCertificate> mu_upper(
    const VirtualModule& x, const TorusGrid& grid,
    double eps_rank = kDefaultRankEps,
    double eps_invertible = kDefaultInvertibleEps);

struct MuBounds {
  int lower = 0;
  std::optional<int> upper;
  std::optional<MuUpperCertificate> certificate;
};

MuBounds mu_bounds(const VirtualModule& x, const TorusGrid& grid,
                   double eps_rank = kDefaultRankEps,
                   double eps_invertible = kDefaultInvertibleEps);

/// Critical-point lower bounds per index from the twisted complex:
///   bound_i = ceil( max(mu(H_i), mu(T(H_{i-1}))) / rep.dim ).
/// The two mu contributions are reported separately; combination is by
/// max (the certified end of the direct-sum sandwich).
struct MorseIndexBound {
  int degree = 0;
  int mu_homology = 0;       // corank bound for H_i
  int mu_torsion_below = 0;  // corank bound for T(H_{i-1})
  int lower_bound = 0;
};

struct MorseReport {
  int rep_dim = 1;
  std::vector<MorseIndexBound> bounds;
};

MorseReport morse_bounds(const CWPreset& preset, const UnitaryRep& rep,
                         const TorusGrid& grid,
                         double eps_rank = kDefaultRankEps);

/// Degree-zero dichotomy for an infinite amenable deck group: the
/// zeroth extended homology is pure torsion but nontrivial, while the
/// zeroth extended cohomology (top homology of the dual complex)
/// vanishes.
struct ZerothHomologyReport {
  bool torsion_nontrivial = false;
  double h0_betti = 0.0;
  bool h0_vanishes = false;
  bool ok = false;
};

ZerothHomologyReport zeroth_homology_check(
    const CWPreset& preset, const TorusGrid& grid,
    const std::vector<double>& lambdas, double eps_rank = kDefaultRankEps);

}  // namespace novsh
