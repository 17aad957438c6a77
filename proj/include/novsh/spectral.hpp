#pragma once

#include <cstdint>

#include "novsh/ecat.hpp"

namespace novsh {

/// Spectral density function of (the torsion part of) a virtual module,
/// tabulated on a lambda grid. Values are kept as exact integer fiber counts
///   counts[j] = sum over fibers of (#{sigma <= lambda_j} - structural zeros)
/// so that densities of direct sums are additive to the last bit and results
/// do not depend on the number of worker threads. The real value is
/// counts[j] * weight with weight = 1 / (number of fibers).
struct SpectralDensity {
  std::vector<double> lambdas;
  std::vector<std::int64_t> counts;
  double weight = 0.0;
  int torsion_rank = 0;  // value of F at the top of the spectrum

  double value(size_t i) const {
    return static_cast<double>(counts[i]) * weight;
  }
  std::vector<double> values() const;
};

/// Logarithmically spaced grid, inclusive of both endpoints.
std::vector<double> make_lambda_grid(double lo = 1e-3, double hi = 2.0,
                                     int points_per_decade = 64);

/// Core counting kernel. torsion_rank is the a.e. rank of the symbol whose
/// fiber spectra are given; each fiber's surplus below that rank counts as a
/// structural zero and is subtracted.
SpectralDensity density_from_sigma(const SigmaField& field, int torsion_rank,
                                   const std::vector<double>& lambdas);

SpectralDensity density(const VirtualModule& x, const TorusGrid& grid,
                        const std::vector<double>& lambdas,
                        double eps_rank = kDefaultRankEps);

/// Exact density of the power module |z - e^{i theta}|^nu on the circle:
/// the arc measure of {t : |2 sin(t/2)|^nu <= lambda}.
double power_module_density(double nu, double lambda);

inline constexpr int kMinFitPoints = 8;

/// Log-log least-squares estimate of the density exponent near zero.
/// ns is the fitted slope; capacity its reciprocal. Conventions:
///   trivial    — F vanishes on the whole grid: ns = +inf, capacity = 0
///   degenerate — fitted slope <= 0: ns = 0, capacity = +inf
///   insufficient — fewer than kMinFitPoints positive samples in the window
struct NSFit {
  double ns = 0.0;
  double capacity = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
  double slope_stderr = 0.0;
  bool trivial = false;
  bool degenerate = false;
  bool insufficient = false;
  bool ok() const { return !trivial && !degenerate && !insufficient; }
};

/// Smallest tabulated lambda whose count rises above twice the fiber weight;
/// below this the sampled density is grid noise. +inf when never reached.
double lambda_resolution(const SpectralDensity& d);

/// Default fit window [10 * lambda_resolution, 0.5].
NSFit ns_estimate(const SpectralDensity& d);
NSFit ns_estimate(const SpectralDensity& d, double window_lo, double window_hi);

/// Searches a dilatation constant C on a 1/32-decade grid such that
///   G(lambda / C) <= F(lambda) + slack   and   F(lambda) <= G(C lambda) + slack
/// hold for every tabulated lambda of F between the resolution floors of the
/// two densities and lambda_max, with slack = 2 (w_F + w_G). The window must
/// span at least one decade; it is anchored at the smallest resolved lambda,
/// since agreement on a band away from zero says nothing about equivalence.
/// The search stops at max_constant: certifying larger dilatations honestly
/// would need the window to extend below 1/C, i.e. far finer grids.
struct DilatationCheck {
  bool equivalent = false;
  double constant = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
};

DilatationCheck dilatational_compare(const SpectralDensity& f,
                                     const SpectralDensity& g,
                                     double lambda_max = 0.5,
                                     double max_constant = 32.0);

/// Two-sided capacity bound for a short exact sequence with outer capacities
/// c_sub and c_quot: max(c_sub, c_quot) <= c_middle <= c_sub + c_quot, each
/// side relaxed by the multiplicative slack. Infinite capacities follow the
/// obvious limit conventions.
bool capacity_sandwich_ok(double c_middle, double c_sub, double c_quot,
                          double slack = 0.05);

}  // namespace novsh
