#include "novsh/ecat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "novsh/parallel.hpp"

namespace novsh {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSubspaceTol = 1e-6;

Eigen::MatrixXcd image_basis(const Eigen::MatrixXcd& m, double thr) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::MatrixXcd(m.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXcd null_basis(const Eigen::MatrixXcd& m, double thr) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Eigen::MatrixXcd(0, 0);
  if (m.rows() == 0) return Eigen::MatrixXcd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

std::vector<double> ascending_sigmas(const Eigen::MatrixXcd& m) {
  Eigen::Index k = std::min(m.rows(), m.cols());
  std::vector<double> out(static_cast<size_t>(k));
  if (k == 0) return out;
  if (m.rows() == 1 || m.cols() == 1) {
    out[0] = m.norm();
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < k; ++i) out[static_cast<size_t>(i)] = sv(k - 1 - i);
  return out;
}

double global_sigma_max(const SymbolPtr& s, const TorusGrid& grid) {
  return sigma_field(s, grid).global_max;
}

}  // namespace

int VirtualModule::num_vars() const { return alpha ? alpha->num_vars() : 0; }

VirtualModule module_from(const LaurentMatrix& alpha) {
  return module_from(make_symbol(alpha));
}

VirtualModule module_from(const SymbolPtr& alpha) {
  if (!alpha) throw std::invalid_argument("module_from: null symbol");
  VirtualModule x;
  x.alpha = alpha;
  x.rank_src = alpha->cols();
  x.rank_dst = alpha->rows();
  return x;
}

VirtualModule torsion_power_module(double nu, double theta) {
  return module_from(abs_power_symbol(theta, nu));
}

VirtualModule free_module(int k, int num_vars) {
  if (k < 0) throw std::invalid_argument("free_module: negative rank");
  // (0 -> A^k): a k x 0 symbol
  LaurentMatrix empty(k, 0, num_vars);
  return module_from(empty);
}

VirtualModule direct_sum(const VirtualModule& a, const VirtualModule& b) {
  VirtualModule x;
  x.alpha = block_diag_symbol({a.alpha, b.alpha});
  x.rank_src = a.rank_src + b.rank_src;
  x.rank_dst = a.rank_dst + b.rank_dst;
  x.excised_kernel = a.excised_kernel + b.excised_kernel;
  x.normalized = a.normalized && b.normalized;
  return x;
}

VirtualModule normalize(const VirtualModule& x, const TorusGrid& grid,
                        double eps_rank) {
  if (!x.alpha) throw std::invalid_argument("normalize: module has no symbol");
  RankProfile p = rank_profile(sigma_field(x.alpha, grid), eps_rank);
  VirtualModule out = x;
  out.rank_src = p.generic_rank;
  out.excised_kernel = x.alpha->cols() - p.generic_rank;
  out.normalized = true;
  return out;
}

SplitReport split(const VirtualModule& x, const TorusGrid& grid, double eps_rank,
                  double eps_invertible) {
  if (!x.alpha) throw std::invalid_argument("split: module has no symbol");
  SigmaField f = sigma_field(x.alpha, grid);
  SplitReport r;
  r.profile = rank_profile(f, eps_rank);
  r.torsion_rank = r.profile.generic_rank;
  r.projective_dim = static_cast<double>(x.rank_dst - r.torsion_rank);
  r.is_torsion = (x.rank_dst == r.torsion_rank);
  r.min_sigma = std::numeric_limits<double>::infinity();
  size_t total = grid.total_points();
  for (size_t i = 0; i < total; ++i) {
    int n = f.fiber_count(i);
    if (r.torsion_rank == 0) break;
    if (n < r.torsion_rank) {
      r.min_sigma = 0.0;
      break;
    }
    double v = f.values[f.fiber_begin(i) + static_cast<size_t>(n - r.torsion_rank)];
    r.min_sigma = std::min(r.min_sigma, v);
  }
  if (r.min_sigma == std::numeric_limits<double>::infinity()) r.min_sigma = 0.0;
  r.is_null = r.is_torsion &&
              (r.torsion_rank == 0 || r.min_sigma > eps_invertible);
  return r;
}

EcatMorphism make_morphism(VirtualModule source, VirtualModule target, SymbolPtr f,
                           std::optional<SymbolPtr> witness_g,
                           const TorusGrid* check_grid, double witness_tol) {
  if (!f) throw std::invalid_argument("make_morphism: null f");
  if (!source.alpha || !target.alpha)
    throw std::invalid_argument("make_morphism: modules lack symbols");
  if (f->num_vars() != source.alpha->num_vars() ||
      f->num_vars() != target.alpha->num_vars())
    throw std::invalid_argument("make_morphism: num_vars mismatch");
  if (f->rows() != target.alpha->rows() || f->cols() != source.alpha->rows())
    throw std::invalid_argument("make_morphism: f shape does not map A_X to A_Y");
  if (witness_g) {
    const SymbolPtr& g = *witness_g;
    if (!g || g->rows() != target.alpha->cols() || g->cols() != source.alpha->cols())
      throw std::invalid_argument("make_morphism: witness shape mismatch");
    if (check_grid) {
      double worst = 0.0;
      Eigen::MatrixXcd fb(f->rows(), f->cols()), ab(source.alpha->rows(), source.alpha->cols());
      Eigen::MatrixXcd bb(target.alpha->rows(), target.alpha->cols()), gb(g->rows(), g->cols());
      for (size_t i = 0; i < check_grid->total_points(); ++i) {
        TorusPoint pt = check_grid->point(i);
        f->eval_into(pt, fb);
        source.alpha->eval_into(pt, ab);
        target.alpha->eval_into(pt, bb);
        g->eval_into(pt, gb);
        worst = std::max(worst, (fb * ab - bb * gb).cwiseAbs().maxCoeff());
      }
      if (worst > witness_tol)
        throw std::invalid_argument("make_morphism: witness fails to commute");
    }
  }
  EcatMorphism m;
  m.source = std::move(source);
  m.target = std::move(target);
  m.f = std::move(f);
  m.witness_g = std::move(witness_g);
  return m;
}

VirtualModule cokernel(const EcatMorphism& m) {
  SymbolPtr neg_f = scale_symbol(m.f, Complex(-1.0, 0.0));
  SymbolPtr alpha;
  const LaurentMatrix* lb = m.target.alpha->as_laurent();
  const LaurentMatrix* lf = m.f->as_laurent();
  if (lb && lf) {
    alpha = make_symbol(hstack(*lb, negate(*lf)));
  } else {
    alpha = hstack_symbol({m.target.alpha, neg_f});
  }
  VirtualModule out = module_from(alpha);
  out.rank_dst = m.target.rank_dst;
  return out;
}

KernelData kernel_data(const EcatMorphism& m, const TorusGrid& grid, double eps_rank,
                       double eps_invertible) {
  const SymbolPtr& fa = m.source.alpha;
  const SymbolPtr& fb = m.target.alpha;
  const SymbolPtr& ff = m.f;
  const int kA = fa->rows(), kAp = fa->cols();
  const int kB = fb->rows(), kBp = fb->cols();
  const size_t total = grid.total_points();

  // Pass 1: global scales of the two combined maps.
  std::vector<double> max1(total, 0.0), max2(total, 0.0);
  parallel_for(total, [&](size_t b, size_t e) {
    Eigen::MatrixXcd A(kA, kAp), B(kB, kBp), F(kB, kA);
    for (size_t i = b; i < e; ++i) {
      TorusPoint pt = grid.point(i);
      fa->eval_into(pt, A);
      fb->eval_into(pt, B);
      ff->eval_into(pt, F);
      Eigen::MatrixXcd M1(kB, kA + kBp), M2(kB, kAp + kBp);
      M1 << F, -B;
      M2 << F * A, -B;
      auto s1 = ascending_sigmas(M1);
      auto s2 = ascending_sigmas(M2);
      max1[i] = s1.empty() ? 0.0 : s1.back();
      max2[i] = s2.empty() ? 0.0 : s2.back();
    }
  });
  double gm1 = 0.0, gm2 = 0.0;
  for (size_t i = 0; i < total; ++i) {
    gm1 = std::max(gm1, max1[i]);
    gm2 = std::max(gm2, max2[i]);
  }
  const double thr1 = eps_rank * std::max(1.0, gm1);
  const double thr2 = eps_rank * std::max(1.0, gm2);

  // Pass 2: pullback bases and the induced map per fiber.
  std::vector<std::vector<double>> sig(total);
  std::vector<int> dimP(total, 0), dimPp(total, 0);
  parallel_for(total, [&](size_t b, size_t e) {
    Eigen::MatrixXcd A(kA, kAp), B(kB, kBp), F(kB, kA);
    for (size_t i = b; i < e; ++i) {
      TorusPoint pt = grid.point(i);
      fa->eval_into(pt, A);
      fb->eval_into(pt, B);
      ff->eval_into(pt, F);
      Eigen::MatrixXcd M1(kB, kA + kBp), M2(kB, kAp + kBp);
      M1 << F, -B;
      M2 << F * A, -B;
      Eigen::MatrixXcd QP = null_basis(M1, thr1);
      Eigen::MatrixXcd QPp = null_basis(M2, thr2);
      dimP[i] = static_cast<int>(QP.cols());
      dimPp[i] = static_cast<int>(QPp.cols());
      // gamma = diag(alpha, id) restricted to P' -> P
      Eigen::MatrixXcd DQ(kA + kBp, QPp.cols());
      DQ.topRows(kA) = A * QPp.topRows(kAp);
      DQ.bottomRows(kBp) = QPp.bottomRows(kBp);
      Eigen::MatrixXcd G = QP.adjoint() * DQ;
      sig[i] = ascending_sigmas(G);
    }
  });

  KernelData kd;
  kd.gamma_sigmas.grid = grid;
  kd.gamma_sigmas.rows = -1;
  kd.gamma_sigmas.cols = -1;
  kd.gamma_sigmas.uniform_count = -1;
  kd.gamma_sigmas.offsets.resize(total + 1, 0);
  for (size_t i = 0; i < total; ++i)
    kd.gamma_sigmas.offsets[i + 1] = kd.gamma_sigmas.offsets[i] + sig[i].size();
  kd.gamma_sigmas.values.resize(kd.gamma_sigmas.offsets[total]);
  for (size_t i = 0; i < total; ++i) {
    std::copy(sig[i].begin(), sig[i].end(),
              kd.gamma_sigmas.values.begin() +
                  static_cast<long>(kd.gamma_sigmas.offsets[i]));
  }
  for (double v : kd.gamma_sigmas.values)
    kd.gamma_sigmas.global_max = std::max(kd.gamma_sigmas.global_max, v);

  // Generic pullback dimensions are the a.e. values; on a grid these are the
  // minima (rank jumps down only on thin degeneracy loci, so dim jumps up).
  int rank1_gen = 0, rank2_gen = 0;
  for (size_t i = 0; i < total; ++i) {
    rank1_gen = std::max(rank1_gen, (kA + kBp) - dimP[i]);
    rank2_gen = std::max(rank2_gen, (kAp + kBp) - dimPp[i]);
  }
  kd.generic_dst_dim = (kA + kBp) - rank1_gen;
  kd.generic_src_dim = (kAp + kBp) - rank2_gen;

  // The module structure of the kernel is an a.e. notion, so the rank of the
  // induced map is measured on the stratum where both pullbacks have their
  // generic dimension. Fibers off that stratum (a null set) would otherwise
  // inflate the count with spurious directions.
  const double thr_g = eps_rank * std::max(1.0, kd.gamma_sigmas.global_max);
  bool stratum_seen = false;
  for (size_t i = 0; i < total; ++i) {
    if (dimP[i] != kd.generic_dst_dim || dimPp[i] != kd.generic_src_dim) continue;
    stratum_seen = true;
    int r = 0;
    for (double v : sig[i])
      if (v > thr_g) ++r;
    kd.torsion_rank = std::max(kd.torsion_rank, r);
  }
  if (!stratum_seen) {
    for (size_t i = 0; i < total; ++i) {
      if (dimP[i] != kd.generic_dst_dim) continue;
      int r = 0;
      for (double v : sig[i])
        if (v > thr_g) ++r;
      kd.torsion_rank = std::max(kd.torsion_rank, r);
    }
  }

  kd.projective_dim = static_cast<double>(kd.generic_dst_dim - kd.torsion_rank);
  kd.is_torsion = (kd.generic_dst_dim == kd.torsion_rank);
  kd.min_sigma = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < total; ++i) {
    int need = dimP[i];
    if (need == 0) continue;
    int n = static_cast<int>(sig[i].size());
    if (n < need) {
      kd.min_sigma = 0.0;
      break;
    }
    kd.min_sigma = std::min(kd.min_sigma, sig[i][static_cast<size_t>(n - need)]);
  }
  if (kd.min_sigma == std::numeric_limits<double>::infinity()) kd.min_sigma = 0.0;
  kd.is_null = kd.is_torsion && (kd.generic_dst_dim == 0 || kd.min_sigma > eps_invertible);
  return kd;
}

namespace {

bool fiberwise_verdict(const TorusGrid& grid, size_t failures, bool allow_exceptional) {
  if (!allow_exceptional) return failures == 0;
  double allowed = 2.0 * static_cast<double>(grid.num_vars) /
                   static_cast<double>(grid.points_per_dim);
  return static_cast<double>(failures) <
         allowed * static_cast<double>(grid.total_points());
}

}  // namespace

bool is_mono(const EcatMorphism& m, const TorusGrid& grid, double eps_rank,
             bool allow_exceptional) {
  const SymbolPtr& fa = m.source.alpha;
  const SymbolPtr& fb = m.target.alpha;
  const SymbolPtr& ff = m.f;
  const double thrA = eps_rank * std::max(1.0, global_sigma_max(fa, grid));
  const double thrB = eps_rank * std::max(1.0, global_sigma_max(fb, grid));
  const double thrF = eps_rank * std::max(1.0, global_sigma_max(ff, grid));
  const size_t total = grid.total_points();
  std::vector<char> fail(total, 0);
  parallel_for(total, [&](size_t b, size_t e) {
    Eigen::MatrixXcd A(fa->rows(), fa->cols()), B(fb->rows(), fb->cols());
    Eigen::MatrixXcd F(ff->rows(), ff->cols());
    for (size_t i = b; i < e; ++i) {
      TorusPoint pt = grid.point(i);
      fa->eval_into(pt, A);
      fb->eval_into(pt, B);
      ff->eval_into(pt, F);
      Eigen::MatrixXcd Ub = image_basis(B, thrB);
      Eigen::MatrixXcd W = F - Ub * (Ub.adjoint() * F);
      Eigen::MatrixXcd V = null_basis(W, thrF);  // f^{-1}(im beta) fiberwise
      if (V.cols() == 0) continue;
      Eigen::MatrixXcd Ua = image_basis(A, thrA);
      Eigen::MatrixXcd R = V - Ua * (Ua.adjoint() * V);
      double defect = 0.0;
      for (Eigen::Index c = 0; c < R.cols(); ++c)
        defect = std::max(defect, R.col(c).norm());
      if (defect > kSubspaceTol) fail[i] = 1;
    }
  });
  size_t failures = 0;
  for (char c : fail) failures += static_cast<size_t>(c);
  return fiberwise_verdict(grid, failures, allow_exceptional);
}

bool is_epi(const EcatMorphism& m, const TorusGrid& grid, double eps_rank,
            bool allow_exceptional) {
  const SymbolPtr& fb = m.target.alpha;
  const SymbolPtr& ff = m.f;
  const int kB = fb->rows();
  if (kB == 0) return true;
  SymbolPtr combined = hstack_symbol({fb, ff});
  SigmaField f = sigma_field(combined, grid);
  const double thr = eps_rank * std::max(1.0, f.global_max);
  size_t failures = 0;
  const size_t total = grid.total_points();
  for (size_t i = 0; i < total; ++i) {
    int n = f.fiber_count(i);
    int rank = 0;
    for (int j = n - 1; j >= 0; --j) {
      if (f.values[f.fiber_begin(i) + static_cast<size_t>(j)] > thr)
        ++rank;
      else
        break;
    }
    if (rank < kB) ++failures;
  }
  return fiberwise_verdict(grid, failures, allow_exceptional);
}

VirtualModule dual_torsion(const VirtualModule& x, const TorusGrid& grid,
                           double eps_rank) {
  SplitReport r = split(x, grid, eps_rank);
  if (!r.is_torsion)
    throw std::domain_error("dual_torsion: module has a nonzero projective part");
  if (r.torsion_rank != x.alpha->cols())
    throw std::domain_error(
        "dual_torsion: stored symbol carries a.e. kernel directions");
  VirtualModule out;
  out.alpha = adjoint_symbol(x.alpha);
  out.rank_src = x.rank_dst;
  out.rank_dst = x.alpha->cols();
  out.normalized = x.normalized;
  return out;
}

namespace {

// max(values)/median positive ratio test; resolution-aware cap.
bool essentially_bounded(const std::vector<double>& num,
                         const std::vector<double>& den, double cap) {
  double num_max = 0.0;
  for (double v : num) num_max = std::max(num_max, v);
  std::vector<double> ratios;
  ratios.reserve(num.size());
  for (size_t i = 0; i < num.size(); ++i) {
    if (den[i] <= 0.0) {
      if (num[i] > 1e-12 * std::max(1.0, num_max)) return false;
      continue;
    }
    ratios.push_back(num[i] / den[i]);
  }
  if (ratios.empty()) return true;
  std::vector<double> sorted = ratios;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double med = sorted[sorted.size() / 2];
  double mx = *std::max_element(ratios.begin(), ratios.end());
  return mx <= cap * std::max(med, 1e-300);
}

}  // namespace

bool hom_vanishing_probe(double nu, double theta0, double theta1,
                         const std::vector<SymbolPtr>& candidates,
                         const TorusGrid& grid) {
  if (grid.num_vars != 1)
    throw std::invalid_argument("hom_vanishing_probe: circle modules only");
  if (!(nu > 0.0)) throw std::invalid_argument("hom_vanishing_probe: nu <= 0");
  double sep = std::abs(std::sin(0.5 * (theta0 - theta1)));
  if (sep < 1e-12) return false;  // equal centers: identity is a nonzero morphism

  const size_t total = grid.total_points();
  std::vector<double> a0(total), a1(total);
  for (size_t i = 0; i < total; ++i) {
    double t = grid.point(i).angles[0];
    a0[i] = std::pow(2.0 * std::abs(std::sin(0.5 * (t - theta0))), nu);
    a1[i] = std::pow(2.0 * std::abs(std::sin(0.5 * (t - theta1))), nu);
  }
  // Separation scale between bounded fields and fields blowing up like
  // |z - z1|^{-nu}, whose max/median ratio grows like (N/pi)^nu.
  const double cap =
      std::max(16.0, std::sqrt(std::pow(
                         static_cast<double>(grid.points_per_dim) / kPi, nu)));

  for (const auto& c : candidates) {
    if (!c || c->rows() != 1 || c->cols() != 1 || c->num_vars() != 1)
      throw std::invalid_argument("hom_vanishing_probe: candidates must be 1x1");
    std::vector<double> fv(total), fa0(total);
    Eigen::MatrixXcd buf(1, 1);
    for (size_t i = 0; i < total; ++i) {
      c->eval_into(grid.point(i), buf);
      fv[i] = std::abs(buf(0, 0));
      fa0[i] = fv[i] * a0[i];
    }
    // valid representative: g = f a0 / a1 essentially bounded
    if (!essentially_bounded(fa0, a1, cap)) continue;
    // zero morphism: h = f / a1 essentially bounded
    if (essentially_bounded(fv, a1, cap)) continue;
    return false;  // valid candidate with unbounded h: a nonzero morphism
  }
  return true;
}

}  // namespace novsh
