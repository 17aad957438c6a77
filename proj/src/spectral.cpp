#include "novsh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace novsh {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> SpectralDensity::values() const {
  std::vector<double> out(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) out[i] = value(i);
  return out;
}

std::vector<double> make_lambda_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || points_per_decade < 1)
    throw std::invalid_argument("make_lambda_grid: bad range");
  std::vector<double> out;
  double step = 1.0 / points_per_decade;
  double llo = std::log10(lo), lhi = std::log10(hi);
  int n = static_cast<int>(std::floor((lhi - llo) / step + 1e-9));
  out.reserve(static_cast<size_t>(n) + 2);
  for (int i = 0; i <= n; ++i) out.push_back(std::pow(10.0, llo + step * i));
  if (out.back() < hi) out.push_back(hi);
  return out;
}

SpectralDensity density_from_sigma(const SigmaField& field, int torsion_rank,
                                   const std::vector<double>& lambdas) {
  if (lambdas.empty())
    throw std::invalid_argument("density_from_sigma: empty lambda grid");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw std::invalid_argument("density_from_sigma: lambdas must be ascending");
  SpectralDensity d;
  d.lambdas = lambdas;
  d.torsion_rank = torsion_rank;
  const size_t total = field.grid.total_points();
  d.weight = 1.0 / static_cast<double>(total);
  const size_t nl = lambdas.size();

  // Histogram each singular value into the first lambda bin that contains it,
  // then prefix-sum: exact integer arithmetic in any traversal order.
  std::vector<std::int64_t> hist(nl + 1, 0);
  std::int64_t structural = 0;
  for (size_t i = 0; i < total; ++i) {
    const size_t begin = field.fiber_begin(i);
    const int cnt = field.fiber_count(i);
    structural += std::max(0, cnt - torsion_rank);
    for (int k = 0; k < cnt; ++k) {
      double s = field.values[begin + static_cast<size_t>(k)];
      size_t bin = static_cast<size_t>(
          std::lower_bound(lambdas.begin(), lambdas.end(), s) - lambdas.begin());
      ++hist[bin];
    }
  }
  d.counts.resize(nl);
  std::int64_t run = 0;
  for (size_t j = 0; j < nl; ++j) {
    run += hist[j];
    d.counts[j] = run - structural;
  }
  return d;
}

SpectralDensity density(const VirtualModule& x, const TorusGrid& grid,
                        const std::vector<double>& lambdas, double eps_rank) {
  if (!x.alpha) throw std::invalid_argument("density: module has no symbol");
  SigmaField f = sigma_field(x.alpha, grid);
  RankProfile p = rank_profile(f, eps_rank);
  return density_from_sigma(f, p.generic_rank, lambdas);
}

double power_module_density(double nu, double lambda) {
  if (!(nu > 0.0)) throw std::invalid_argument("power_module_density: nu <= 0");
  if (lambda <= 0.0) return 0.0;
  // arc measure of {t : |2 sin(t/2)|^nu <= lambda}; the asin form of the
  // inverse stays accurate where the equivalent acos form cancels
  double u = 0.5 * std::pow(lambda, 1.0 / nu);
  if (u >= 1.0) return 1.0;
  return (2.0 / kPi) * std::asin(u);
}

double lambda_resolution(const SpectralDensity& d) {
  for (size_t j = 0; j < d.lambdas.size(); ++j)
    if (d.counts[j] > 2) return d.lambdas[j];
  return kInf;
}

namespace {

NSFit fit_window(const SpectralDensity& d, double lo, double hi) {
  NSFit fit;
  fit.window_lo = lo;
  fit.window_hi = hi;
  bool any_positive = false;
  for (std::int64_t c : d.counts) any_positive = any_positive || (c > 0);
  if (!any_positive) {
    fit.trivial = true;
    fit.ns = kInf;
    fit.capacity = 0.0;
    return fit;
  }
  std::vector<double> xs, ys;
  for (size_t j = 0; j < d.lambdas.size(); ++j) {
    double l = d.lambdas[j];
    if (l < lo || l > hi || d.counts[j] <= 0) continue;
    xs.push_back(std::log(l));
    ys.push_back(std::log(static_cast<double>(d.counts[j]) * d.weight));
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < kMinFitPoints) {
    fit.insufficient = true;
    fit.ns = std::numeric_limits<double>::quiet_NaN();
    fit.capacity = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  fit.slope_stderr =
      (xs.size() > 2) ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  if (slope <= 0.0) {
    fit.degenerate = true;
    fit.ns = 0.0;
    fit.capacity = kInf;
    return fit;
  }
  fit.ns = slope;
  fit.capacity = 1.0 / slope;
  return fit;
}

}  // namespace

NSFit ns_estimate(const SpectralDensity& d, double window_lo, double window_hi) {
  if (!(window_lo > 0.0) || !(window_hi > window_lo))
    throw std::invalid_argument("ns_estimate: bad window");
  return fit_window(d, window_lo, window_hi);
}

NSFit ns_estimate(const SpectralDensity& d) {
  double lres = lambda_resolution(d);
  if (lres == kInf) {
    NSFit fit;
    fit.trivial = true;
    fit.ns = kInf;
    fit.capacity = 0.0;
    return fit;
  }
  return fit_window(d, 10.0 * lres, 0.5);
}

namespace {

// Step-function evaluation: floor takes the last tabulated point <= x, ceil
// the first point >= x (top value past the grid). Below the grid, floor
// returns the first tabulated value — an overestimate, which keeps the
// comparator's lower bound strict instead of vacuously true.
double eval_floor(const SpectralDensity& d, double x) {
  auto it = std::upper_bound(d.lambdas.begin(), d.lambdas.end(), x);
  if (it == d.lambdas.begin()) return d.value(0);
  return d.value(static_cast<size_t>(it - d.lambdas.begin()) - 1);
}

double eval_ceil(const SpectralDensity& d, double x) {
  auto it = std::lower_bound(d.lambdas.begin(), d.lambdas.end(), x);
  if (it == d.lambdas.end()) return d.value(d.lambdas.size() - 1);
  return d.value(static_cast<size_t>(it - d.lambdas.begin()));
}

}  // namespace

DilatationCheck dilatational_compare(const SpectralDensity& f,
                                     const SpectralDensity& g,
                                     double lambda_max, double max_constant) {
  DilatationCheck out;
  const double slack = 2.0 * (f.weight + g.weight);
  double floor_f = lambda_resolution(f), floor_g = lambda_resolution(g);
  double lo = std::max(std::max(floor_f, floor_g), f.lambdas.front());
  out.lambda_lo = lo;
  out.lambda_hi = lambda_max;
  if (!(lo < kInf) || !(lambda_max >= 10.0 * lo)) return out;  // no usable decade
  for (int k = 0;; ++k) {
    double c = std::pow(10.0, static_cast<double>(k) / 32.0);
    if (c > max_constant * (1.0 + 1e-12)) break;
    bool all_ok = true;
    for (size_t j = 0; j < f.lambdas.size(); ++j) {
      double l = f.lambdas[j];
      if (l < lo) continue;
      if (l > lambda_max) break;
      double fl = f.value(j);
      if (eval_floor(g, l / c) > fl + slack || fl > eval_ceil(g, l * c) + slack) {
        all_ok = false;
        break;
      }
    }
    if (!all_ok) continue;
    out.equivalent = true;
    out.constant = c;
    return out;
  }
  return out;
}

bool capacity_sandwich_ok(double c_middle, double c_sub, double c_quot,
                          double slack) {
  double lower = std::max(c_sub, c_quot);
  double upper = c_sub + c_quot;
  bool lower_ok = (lower == kInf) ? (c_middle == kInf)
                                  : (c_middle >= lower / (1.0 + slack));
  bool upper_ok = (upper == kInf) || (c_middle <= upper * (1.0 + slack));
  return lower_ok && upper_ok;
}

}  // namespace novsh
