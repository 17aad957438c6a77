#include "novsh/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace novsh {

namespace {

// Ascending k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

LaurentPoly var_minus_one(int num_vars, int index) {
  LaurentPoly p = LaurentPoly::variable(num_vars, index);
  p.add_term(Exponents(static_cast<size_t>(num_vars), 0), Complex(-1.0, 0.0));
  return p;
}

SpectralDensity zero_density(const std::vector<double>& lambdas,
                             const TorusGrid& grid) {
  SpectralDensity d;
  d.lambdas = lambdas;
  d.counts.assign(lambdas.size(), 0);
  d.weight = grid.weight();
  d.torsion_rank = 0;
  return d;
}

bool any_positive(const SpectralDensity& d) {
  for (std::int64_t c : d.counts)
    if (c > 0) return true;
  return false;
}

}  // namespace

FreeChainComplex koszul_resolution(int num_vars) {
  if (num_vars < 1)
    throw std::invalid_argument("koszul_resolution: num_vars < 1");
  const int n = num_vars;
  std::vector<std::vector<std::vector<int>>> basis(static_cast<size_t>(n) + 1);
  std::vector<int> ranks;
  for (int k = 0; k <= n; ++k) {
    basis[static_cast<size_t>(k)] = combinations(n, k);
    ranks.push_back(static_cast<int>(basis[static_cast<size_t>(k)].size()));
  }
  std::vector<LaurentMatrix> boundaries;
  for (int k = 1; k <= n; ++k) {
    const auto& dom = basis[static_cast<size_t>(k)];
    const auto& cod = basis[static_cast<size_t>(k) - 1];
    std::map<std::vector<int>, int> row_of;
    for (size_t r = 0; r < cod.size(); ++r)
      row_of[cod[r]] = static_cast<int>(r);
    LaurentMatrix d(static_cast<int>(cod.size()), static_cast<int>(dom.size()),
                    n);
    for (size_t c = 0; c < dom.size(); ++c) {
      const std::vector<int>& s = dom[c];
      for (size_t t = 0; t < s.size(); ++t) {
        std::vector<int> face = s;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(t));
        const double sign = (t % 2 == 0) ? 1.0 : -1.0;
        LaurentPoly entry = var_minus_one(n, s[t]).scaled(Complex(sign, 0.0));
        d.set(row_of.at(face), static_cast<int>(c),
              d.at(row_of.at(face), static_cast<int>(c)) + entry);
      }
    }
    boundaries.push_back(std::move(d));
  }
  return make_complex(n, ranks, boundaries);
}

CWPreset preset_complex(const std::string& name) {
  CWPreset p;
  p.name = name;
  if (name == "circle") {
    p.fundamental_group_rank = 1;
    p.top_dim = 1;
    p.complex = koszul_resolution(1);
  } else if (name == "circle_subdivided") {
    p.fundamental_group_rank = 1;
    p.top_dim = 1;
    LaurentMatrix d1(2, 2, 1);
    d1.set(0, 0, LaurentPoly::constant(1, Complex(-1.0, 0.0)));
    d1.set(0, 1, LaurentPoly::variable(1, 0));
    d1.set(1, 0, LaurentPoly::constant(1, Complex(1.0, 0.0)));
    d1.set(1, 1, LaurentPoly::constant(1, Complex(-1.0, 0.0)));
    p.complex = make_complex(1, {2, 2}, {d1});
  } else if (name == "torus2" || name == "torus(2)") {
    p.fundamental_group_rank = 2;
    p.top_dim = 2;
    p.complex = koszul_resolution(2);
  } else if (name == "torus3" || name == "torus(3)") {
    p.fundamental_group_rank = 3;
    p.top_dim = 3;
    p.complex = koszul_resolution(3);
  } else {
    throw std::invalid_argument("preset_complex: unknown preset '" + name +
                                "'");
  }
  p.complex.orientable_manifold = true;
  return p;
}

UnitaryRep trivial_rep(int num_vars) {
  UnitaryRep rep;
  rep.dim = 1;
  rep.generators.assign(static_cast<size_t>(num_vars),
                        Eigen::MatrixXcd::Identity(1, 1));
  return rep;
}

void validate_rep(const UnitaryRep& rep) {
  if (rep.dim < 1) throw std::invalid_argument("UnitaryRep: dim < 1");
  if (rep.generators.empty())
    throw std::invalid_argument("UnitaryRep: no generators");
  const int d = rep.dim;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  for (const auto& g : rep.generators) {
    if (g.rows() != d || g.cols() != d)
      throw std::invalid_argument("UnitaryRep: generator shape mismatch");
    if ((g.adjoint() * g - id).cwiseAbs().maxCoeff() > kRepTol)
      throw std::invalid_argument("UnitaryRep: generator is not unitary");
  }
  for (size_t i = 0; i < rep.generators.size(); ++i)
    for (size_t j = i + 1; j < rep.generators.size(); ++j) {
      const auto& a = rep.generators[i];
      const auto& b = rep.generators[j];
      if ((a * b - b * a).cwiseAbs().maxCoeff() > kRepTol)
        throw std::invalid_argument("UnitaryRep: generators do not commute");
    }
}

namespace {

Eigen::MatrixXcd generator_power(const Eigen::MatrixXcd& g, int e) {
  const Eigen::Index d = g.rows();
  const Eigen::MatrixXcd base = e >= 0 ? g : Eigen::MatrixXcd(g.adjoint());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(d, d);
  for (int t = 0; t < std::abs(e); ++t) acc = acc * base;
  return acc;
}

}  // namespace

FreeChainComplex twist(const FreeChainComplex& c, const UnitaryRep& rep) {
  validate_rep(rep);
  if (static_cast<int>(rep.generators.size()) != c.num_vars)
    throw std::invalid_argument("twist: one generator per variable required");
  const int d = rep.dim;
  std::vector<int> ranks;
  for (int r : c.ranks) ranks.push_back(r * d);
  std::vector<LaurentMatrix> boundaries;
  for (const LaurentMatrix& b : c.boundaries) {
    LaurentMatrix out(b.rows() * d, b.cols() * d, c.num_vars);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j)
        for (const auto& [exp, coeff] : b.at(i, j).terms()) {
          Eigen::MatrixXcd block = Eigen::MatrixXcd::Identity(d, d);
          for (int k = 0; k < c.num_vars; ++k)
            if (exp[static_cast<size_t>(k)] != 0)
              block = block * generator_power(rep.generators[static_cast<size_t>(k)],
                                              exp[static_cast<size_t>(k)]);
          block *= coeff;
          for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s)
              if (block(r, s) != Complex(0.0, 0.0))
                out.at(i * d + r, j * d + s).add_term(exp, block(r, s));
        }
    boundaries.push_back(std::move(out));
  }
  FreeChainComplex t = make_complex(c.num_vars, ranks, boundaries);
  t.orientable_manifold = c.orientable_manifold;
  return t;
}

TorModuleReport tor(int q, const FreeChainComplex& resolution,
                    const TorusGrid& grid, const std::vector<double>& lambdas,
                    double eps_rank) {
  if (q < 0) throw std::invalid_argument("tor: negative degree");
  ValidationReport v = validate(resolution);
  if (!v.ok)
    throw std::invalid_argument("tor: resolution fails the chain condition: " +
                                v.message);
  TorModuleReport out;
  out.degree = q;
  if (q > resolution.top_degree()) {
    out.density = zero_density(lambdas, grid);
    out.fit = ns_estimate(out.density);
    return out;
  }
  DegreeHomology h = homology(resolution, q, grid, lambdas, eps_rank);
  out.projective_dim = h.betti;
  out.torsion_rank = h.torsion_density.torsion_rank;
  out.density = h.torsion_density;
  out.fit = h.ns_fit;
  out.is_zero = h.betti == 0.0 && !any_positive(h.torsion_density);
  return out;
}

TorDecompositionReport tor_decomposition_check(
    const FreeChainComplex& complex,
    const std::vector<LaurentMatrix>& presentations, const TorusGrid& grid,
    const std::vector<double>& lambdas, double eps_rank, double density_tol) {
  if (complex.num_vars != 1)
    throw std::invalid_argument(
        "tor_decomposition_check: rank-one deck group required");
  if (presentations.size() != complex.ranks.size())
    throw std::invalid_argument(
        "tor_decomposition_check: one presentation per degree required");
  for (const auto& q : presentations)
    if (q.num_vars() != 1)
      throw std::invalid_argument(
          "tor_decomposition_check: presentations must be one-variable");

  struct Presented {
    int rows = 0, cols = 0, generic_rank = 0;
    SpectralDensity density;
  };
  const int top = complex.top_degree();
  std::vector<Presented> pres(static_cast<size_t>(top) + 1);
  for (int p = 0; p <= top; ++p) {
    const LaurentMatrix& q = presentations[static_cast<size_t>(p)];
    Presented& e = pres[static_cast<size_t>(p)];
    e.rows = q.rows();
    e.cols = q.cols();
    if (q.rows() == 0 || q.cols() == 0) {
      e.density = zero_density(lambdas, grid);
    } else {
      SigmaField sf = sigma_field(make_symbol(q), grid);
      RankProfile prof = rank_profile(sf, eps_rank);
      e.generic_rank = prof.generic_rank;
      e.density = density_from_sigma(sf, e.generic_rank, lambdas);
    }
  }

  TorDecompositionReport rep;
  rep.ok = true;
  for (int p = 0; p <= top; ++p) {
    DegreeHomology mid = homology(complex, p, grid, lambdas, eps_rank);
    TorDecompositionRow row;
    row.degree = p;
    row.middle_betti = mid.betti;
    const Presented& here = pres[static_cast<size_t>(p)];
    row.tor0_projective = here.rows - here.generic_rank;
    if (p >= 1) {
      const Presented& below = pres[static_cast<size_t>(p) - 1];
      row.tor1_projective = below.cols - below.generic_rank;
    }
    row.dims_ok = std::abs(row.middle_betti -
                           (row.tor0_projective + row.tor1_projective)) < 0.5;
    for (size_t j = 0; j < lambdas.size(); ++j)
      row.density_gap =
          std::max(row.density_gap, std::abs(mid.torsion_density.value(j) -
                                             here.density.value(j)));
    rep.max_density_gap = std::max(rep.max_density_gap, row.density_gap);
    rep.ok = rep.ok && row.dims_ok;
    rep.rows.push_back(row);
  }
  rep.ok = rep.ok && rep.max_density_gap < density_tol;
  return rep;
}

int mu_lower(const VirtualModule& x, const TorusGrid& grid, double eps_rank) {
  if (!x.alpha) throw std::invalid_argument("mu_lower: module has no symbol");
  SigmaField sf = sigma_field(x.alpha, grid);
  RankProfile prof = rank_profile(sf, eps_rank);
  return prof.max_corank(x.rank_dst);
}

namespace {

struct UnionFind {
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), size_t{0});
  }
  size_t find(size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

// Orthonormal basis of the orthogonal complement of the image.
Eigen::MatrixXcd cokernel_fiber_basis(const Eigen::MatrixXcd& m, double thr) {
  if (m.rows() == 0) return Eigen::MatrixXcd(0, 0);
  if (m.cols() == 0) return Eigen::MatrixXcd::Identity(m.rows(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index t = 0; t < sv.size(); ++t)
    if (sv(t) > thr) ++rank;
  return svd.matrixU().rightCols(m.rows() - rank);
}

double wrapped_dist2(const TorusPoint& pt, const std::vector<double>& center) {
  double s = 0.0;
  for (size_t k = 0; k < center.size(); ++k) {
    double d = std::remainder(pt.angles[k] - center[k], 2.0 * M_PI);
    s += d * d;
  }
  return s;
}

}  // namespace

std::optional<MuUpperCertificate> mu_upper(const VirtualModule& x,
                                           const TorusGrid& grid,
                                           double eps_rank,
                                           double eps_invertible) {
  if (!x.alpha) throw std::invalid_argument("mu_upper: module has no symbol");
  const int k = x.rank_dst;
  const int nv = x.num_vars();
  SigmaField sf = sigma_field(x.alpha, grid);
  RankProfile prof = rank_profile(sf, eps_rank);
  const size_t total = grid.total_points();

  std::vector<int> corank(total, 0);
  bool any_degenerate = false;
  for (size_t i = 0; i < total; ++i) {
    corank[i] = k - prof.fiber_ranks[i];
    if (corank[i] > 0) any_degenerate = true;
  }

  if (!any_degenerate) {
    SplitReport s = split(x, grid, eps_rank, eps_invertible);
    if (s.is_null) {
      MuUpperCertificate cert;
      cert.generators = 0;
      cert.strict_epi = true;
      cert.summary =
          "structure map invertible at every grid fiber: null module, zero "
          "generators";
      return cert;
    }
    return std::nullopt;  // degeneracy locus invisible at this resolution
  }

  UnionFind uf(total);
  const int n = grid.points_per_dim;
  for (size_t i = 0; i < total; ++i) {
    if (corank[i] == 0) continue;
    std::vector<int> idx = grid.indices(i);
    for (int a = 0; a < nv; ++a) {
      std::vector<int> nb = idx;
      nb[static_cast<size_t>(a)] = (nb[static_cast<size_t>(a)] + 1) % n;
      size_t j = grid.flat_index(nb);
      if (corank[j] > 0) uf.unite(i, j);
    }
  }

  struct Cluster {
    size_t center = 0;
    int corank = 0;
    std::vector<double> center_angles;
    Eigen::MatrixXcd basis;
  };
  std::map<size_t, Cluster> by_root;
  for (size_t i = 0; i < total; ++i) {
    if (corank[i] == 0) continue;
    Cluster& cl = by_root[uf.find(i)];
    if (cl.corank == 0 || corank[i] > cl.corank) {
      cl.center = i;
      cl.corank = corank[i];
    }
  }
  std::vector<Cluster> clusters;
  for (auto& [root, cl] : by_root) {
    TorusPoint pt = grid.point(cl.center);
    cl.center_angles = pt.angles;
    Eigen::MatrixXcd fiber(x.alpha->rows(), x.alpha->cols());
    x.alpha->eval_into(pt, fiber);
    cl.basis = cokernel_fiber_basis(fiber, prof.threshold);
    clusters.push_back(cl);
  }

  auto try_candidate =
      [&](int m, bool shared_columns) -> std::optional<MuUpperCertificate> {
    std::vector<int> offsets(clusters.size(), 0);
    if (!shared_columns) {
      int off = 0;
      for (size_t j = 0; j < clusters.size(); ++j) {
        offsets[j] = off;
        off += static_cast<int>(clusters[j].basis.cols());
      }
    }
    std::vector<std::vector<double>> centers;
    std::vector<Eigen::MatrixXcd> bases;
    for (const Cluster& cl : clusters) {
      centers.push_back(cl.center_angles);
      bases.push_back(cl.basis);
    }
    SymbolPtr g = pointwise_symbol(
        k, m, nv,
        [centers, bases, offsets, k, m](const TorusPoint& pt) {
          Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k, m);
          size_t best = 0;
          double best_d = wrapped_dist2(pt, centers[0]);
          for (size_t j = 1; j < centers.size(); ++j) {
            double d2 = wrapped_dist2(pt, centers[j]);
            if (d2 < best_d) {
              best = j;
              best_d = d2;
            }
          }
          out.block(0, offsets[best], k, bases[best].cols()) = bases[best];
          return out;
        });
    EcatMorphism cand = make_morphism(free_module(m, nv), x, g);
    if (!is_epi(cand, grid, eps_rank, /*allow_exceptional=*/false))
      return std::nullopt;
    MuUpperCertificate cert;
    cert.generators = m;
    cert.cluster_count = clusters.size();
    for (const Cluster& cl : clusters) cert.center_indices.push_back(cl.center);
    cert.strict_epi = true;
    std::ostringstream os;
    os << m << " generator(s) through " << clusters.size()
       << " degeneracy cluster(s) ("
       << (shared_columns ? "shared columns" : "disjoint column blocks")
       << "); nearest-center indicator candidate is an epimorphism at all "
       << total << " grid fibers";
    cert.summary = os.str();
    return cert;
  };

  int m_shared = 0;
  int m_sum = 0;
  for (const Cluster& cl : clusters) {
    m_shared = std::max(m_shared, static_cast<int>(cl.basis.cols()));
    m_sum += static_cast<int>(cl.basis.cols());
  }
  if (auto cert = try_candidate(m_shared, true)) return cert;
  if (m_sum > m_shared)
    if (auto cert = try_candidate(m_sum, false)) return cert;
  return std::nullopt;
}

MuBounds mu_bounds(const VirtualModule& x, const TorusGrid& grid,
                   double eps_rank, double eps_invertible) {
  MuBounds b;
  b.lower = mu_lower(x, grid, eps_rank);
  b.certificate = mu_upper(x, grid, eps_rank, eps_invertible);
  if (b.certificate) b.upper = b.certificate->generators;
  return b;
}

MorseReport morse_bounds(const CWPreset& preset, const UnitaryRep& rep,
                         const TorusGrid& grid, double eps_rank) {
  FreeChainComplex tw = twist(preset.complex, rep);
  const int top = tw.top_degree();
  const int d = rep.dim;
  std::vector<RankProfile> prof(static_cast<size_t>(top) + 2);
  std::vector<int> gr(static_cast<size_t>(top) + 2, 0);
  for (int i = 1; i <= top; ++i) {
    SigmaField sf =
        sigma_field(make_symbol(tw.boundaries[static_cast<size_t>(i) - 1]), grid);
    prof[static_cast<size_t>(i)] = rank_profile(sf, eps_rank);
    gr[static_cast<size_t>(i)] = prof[static_cast<size_t>(i)].generic_rank;
  }
  MorseReport out;
  out.rep_dim = d;
  for (int i = 0; i <= top; ++i) {
    const int b = tw.ranks[static_cast<size_t>(i)] - gr[static_cast<size_t>(i)] -
                  gr[static_cast<size_t>(i) + 1];
    MorseIndexBound row;
    row.degree = i;
    row.mu_homology =
        b + (i + 1 <= top
                 ? prof[static_cast<size_t>(i) + 1].max_corank(
                       gr[static_cast<size_t>(i) + 1])
                 : 0);
    row.mu_torsion_below =
        i >= 1 ? prof[static_cast<size_t>(i)].max_corank(gr[static_cast<size_t>(i)])
               : 0;
    row.lower_bound = static_cast<int>(
        std::ceil(std::max(row.mu_homology, row.mu_torsion_below) /
                  static_cast<double>(d)));
    out.bounds.push_back(row);
  }
  return out;
}

ZerothHomologyReport zeroth_homology_check(const CWPreset& preset,
                                           const TorusGrid& grid,
                                           const std::vector<double>& lambdas,
                                           double eps_rank) {
  ZerothHomologyReport out;
  DegreeHomology h0 = homology(preset.complex, 0, grid, lambdas, eps_rank);
  out.torsion_nontrivial = any_positive(h0.torsion_density);
  FreeChainComplex dual = dual_complex(preset.complex);
  DegreeHomology hc =
      homology(dual, dual.top_degree(), grid, lambdas, eps_rank);
  out.h0_betti = hc.betti;
  out.h0_vanishes = hc.betti == 0.0;
  out.ok = out.torsion_nontrivial && out.h0_vanishes;
  return out;
}

}  // namespace novsh
