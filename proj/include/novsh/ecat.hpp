#pragma once

#include <optional>

#include "novsh/fiber.hpp"

namespace novsh {

/// Object of the extended category over L^inf(T^n): a morphism
/// alpha: A' -> A of free modules, kept as its multiplication symbol.
/// Normalization drops a.e. kernel directions by bookkeeping only
/// (rank_src shrinks, the symbol is untouched).
struct VirtualModule {
  int rank_src = 0;  // effective generator count of A'
  int rank_dst = 0;  // generator count of A (rows of alpha)
  SymbolPtr alpha;
  int excised_kernel = 0;
  bool normalized = false;

  int num_vars() const;
};

VirtualModule module_from(const LaurentMatrix& alpha);
VirtualModule module_from(const SymbolPtr& alpha);
/// Multiplication by |z - e^{i theta}|^nu on L^2 of the circle.
VirtualModule torsion_power_module(double nu, double theta);
/// Hilbertian (projective) module of rank k, represented as (0 -> A^k).
VirtualModule free_module(int k, int num_vars);
VirtualModule direct_sum(const VirtualModule& a, const VirtualModule& b);

VirtualModule normalize(const VirtualModule& x, const TorusGrid& grid,
                        double eps_rank = kDefaultRankEps);

struct SplitReport {
  double projective_dim = 0.0;  // rank_dst - generic rank of alpha
  int torsion_rank = 0;         // generic rank = dim of cl(im alpha)
  bool is_torsion = false;
  bool is_null = false;
  double min_sigma = 0.0;  // min over fibers of the torsion-part spectrum
  RankProfile profile;
};

SplitReport split(const VirtualModule& x, const TorusGrid& grid,
                  double eps_rank = kDefaultRankEps,
                  double eps_invertible = kDefaultInvertibleEps);

/// [f]: X -> Y, f acting between the destination modules. witness_g, when
/// supplied, must satisfy f * alpha_X = alpha_Y * g on the check grid.
struct EcatMorphism {
  VirtualModule source;
  VirtualModule target;
  SymbolPtr f;
  std::optional<SymbolPtr> witness_g;
};

inline constexpr double kWitnessTol = 1e-9;

EcatMorphism make_morphism(VirtualModule source, VirtualModule target, SymbolPtr f,
                           std::optional<SymbolPtr> witness_g = std::nullopt,
                           const TorusGrid* check_grid = nullptr,
                           double witness_tol = kWitnessTol);

/// Cokernel of [f]: X -> Y is represented by (alpha_Y | -f) into the
/// destination of Y; exact (stays Laurent when both inputs are Laurent).
VirtualModule cokernel(const EcatMorphism& m);

/// Kernel of [f]: X -> Y via the fiberwise pullback
///   P  = ker(f, -beta) in A + B',   P' = ker(f alpha, -beta) in A' + B',
/// with the induced map gamma = diag(alpha, id) restricted to P' -> P.
struct KernelData {
  double projective_dim = 0.0;
  int torsion_rank = 0;
  bool is_torsion = false;
  bool is_null = false;
  int generic_src_dim = 0;  // a.e. dim of P'
  int generic_dst_dim = 0;  // a.e. dim of P
  double min_sigma = 0.0;
  SigmaField gamma_sigmas;  // fiber spectra of gamma (per-fiber dims may vary)
};

KernelData kernel_data(const EcatMorphism& m, const TorusGrid& grid,
                       double eps_rank = kDefaultRankEps,
                       double eps_invertible = kDefaultInvertibleEps);

/// Fiberwise criteria for mono (im alpha contains f^{-1}(im beta)) and epi
/// (im beta + im f spans). Algebraic degeneracy loci are excused up to a
/// fraction 2/N per grid dimension unless allow_exceptional is false.
bool is_mono(const EcatMorphism& m, const TorusGrid& grid,
             double eps_rank = kDefaultRankEps, bool allow_exceptional = true);
bool is_epi(const EcatMorphism& m, const TorusGrid& grid,
            double eps_rank = kDefaultRankEps, bool allow_exceptional = true);

/// e-duality on torsion modules: (alpha: A' -> A) -> (alpha*: A* -> A'*).
/// Requires a torsion module whose stored symbol has no a.e. kernel.
VirtualModule dual_torsion(const VirtualModule& x, const TorusGrid& grid,
                           double eps_rank = kDefaultRankEps);

/// Probes Hom(X_{nu,theta0}, X_{nu,theta1}) = 0 for theta0 != theta1.
/// Each candidate f (1x1 symbol on the circle) is tested for being a valid
/// morphism representative (bounded g with f |z-z0|^nu = |z-z1|^nu g) and,
/// when valid, for representing the zero morphism (f / |z-z1|^nu bounded).
/// Returns true when no candidate witnesses a nonzero morphism. This is a
/// sampled boundedness probe, not a proof.
bool hom_vanishing_probe(double nu, double theta0, double theta1,
                         const std::vector<SymbolPtr>& candidates,
                         const TorusGrid& grid);

}  // namespace novsh
