#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "novsh/spectral.hpp"
#include "novsh/topology.hpp"

using namespace novsh;

namespace {

LaurentPoly var_minus_one(int num_vars, int index) {
  LaurentPoly p = LaurentPoly::variable(num_vars, index);
  p.add_term(Exponents(static_cast<size_t>(num_vars), 0), Complex(-1.0, 0.0));
  return p;
}

double arc_reference(double nu, double lambda) {
  if (lambda <= 0.0) return 0.0;
  double u = 0.5 * std::pow(lambda, 1.0 / nu);
  if (u >= 1.0) return 1.0;
  return (2.0 / M_PI) * std::asin(u);
}

VirtualModule power_sum(int n, double nu, double theta) {
  VirtualModule x = torsion_power_module(nu, theta);
  for (int i = 1; i < n; ++i) x = direct_sum(x, torsion_power_module(nu, theta));
  return x;
}

}  // namespace

TEST_CASE("preset complexes") {
  SUBCASE("circle is the one-variable exterior complex") {
    CWPreset p = preset_complex("circle");
    CHECK(p.fundamental_group_rank == 1);
    CHECK(p.top_dim == 1);
    CHECK(p.complex.orientable_manifold);
    REQUIRE(p.complex.ranks == std::vector<int>({1, 1}));
    CHECK(p.complex.boundaries[0].at(0, 0) == var_minus_one(1, 0));
  }

  SUBCASE("two-torus differentials") {
    CWPreset p = preset_complex("torus2");
    REQUIRE(p.complex.ranks == std::vector<int>({1, 2, 1}));
    CHECK(p.complex.boundaries[0].at(0, 0) == var_minus_one(2, 0));
    CHECK(p.complex.boundaries[0].at(0, 1) == var_minus_one(2, 1));
    CHECK(p.complex.boundaries[1].at(0, 0) ==
          var_minus_one(2, 1).scaled(Complex(-1.0, 0.0)));
    CHECK(p.complex.boundaries[1].at(1, 0) == var_minus_one(2, 0));
    CHECK(validate(p.complex).ok);
    CHECK(preset_complex("torus(2)").complex.ranks == p.complex.ranks);
  }

  SUBCASE("three-torus exterior complex validates exactly") {
    CWPreset p = preset_complex("torus3");
    REQUIRE(p.complex.ranks == std::vector<int>({1, 3, 3, 1}));
    ValidationReport rep = validate(p.complex);
    CHECK(rep.ok);
    CHECK(rep.max_residual == 0.0);
  }

  SUBCASE("subdivided circle carries the same invariants as the circle") {
    CWPreset sub = preset_complex("circle_subdivided");
    REQUIRE(sub.complex.ranks == std::vector<int>({2, 2}));
    CHECK(validate(sub.complex).ok);

    TorusGrid grid = TorusGrid::with_size(1, 4096);
    auto lambdas = make_lambda_grid(1e-3, 2.0);
    HomologyReport hs = full_homology(sub.complex, grid, lambdas);
    HomologyReport hc =
        full_homology(preset_complex("circle").complex, grid, lambdas);
    CHECK(hs.degrees[0].betti == hc.degrees[0].betti);
    CHECK(hs.degrees[1].betti == hc.degrees[1].betti);

    DilatationCheck dc = dilatational_compare(hs.degrees[0].torsion_density,
                                              hc.degrees[0].torsion_density);
    CHECK(dc.equivalent);
    CHECK(dc.constant <= 4.0);
  }

  SUBCASE("unknown names are rejected") {
    CHECK_THROWS_AS(preset_complex("klein_bottle"), std::invalid_argument);
  }
}

TEST_CASE("unitary representation validation") {
  CHECK_NOTHROW(validate_rep(trivial_rep(3)));

  UnitaryRep stretched;
  stretched.dim = 1;
  stretched.generators = {Eigen::MatrixXcd::Identity(1, 1) * 2.0};
  CHECK_THROWS_AS(validate_rep(stretched), std::invalid_argument);

  UnitaryRep mismatched;
  mismatched.dim = 2;
  mismatched.generators = {Eigen::MatrixXcd::Identity(1, 1)};
  CHECK_THROWS_AS(validate_rep(mismatched), std::invalid_argument);

  UnitaryRep noncommuting;
  noncommuting.dim = 2;
  Eigen::MatrixXcd flip(2, 2), sign(2, 2);
  flip << 0, 1, 1, 0;
  sign << 1, 0, 0, -1;
  noncommuting.generators = {flip, sign};
  CHECK_THROWS_AS(validate_rep(noncommuting), std::invalid_argument);
}

TEST_CASE("coefficient twists") {
  CWPreset circle = preset_complex("circle");

  SUBCASE("trivial representation leaves the complex unchanged") {
    FreeChainComplex t = twist(circle.complex, trivial_rep(1));
    CHECK(t.ranks == circle.complex.ranks);
    CHECK(t.boundaries[0] == circle.complex.boundaries[0]);
  }

  SUBCASE("sign character moves the degeneracy to the opposite point") {
    UnitaryRep rep;
    rep.dim = 1;
    rep.generators = {-Eigen::MatrixXcd::Identity(1, 1)};
    FreeChainComplex t = twist(circle.complex, rep);
    LaurentPoly expect(1);
    expect.add_term({1}, Complex(-1.0, 0.0));
    expect.add_term({0}, Complex(-1.0, 0.0));
    CHECK(t.boundaries[0].at(0, 0) == expect);

    TorusGrid grid = TorusGrid::with_size(1, 4096);
    auto lambdas = make_lambda_grid(1e-2, 2.0);
    DegreeHomology h0 = homology(t, 0, grid, lambdas);
    CHECK(h0.betti == 0.0);
    double sup = 0.0;
    for (size_t j = 0; j < lambdas.size(); ++j)
      sup = std::max(sup, std::abs(h0.torsion_density.value(j) -
                                   arc_reference(1.0, lambdas[j])));
    CHECK(sup < 1e-3);
  }

  SUBCASE("two-character block twist adds the densities exactly") {
    UnitaryRep rep;
    rep.dim = 2;
    Eigen::MatrixXcd r(2, 2);
    r << 1, 0, 0, -1;
    rep.generators = {r};
    FreeChainComplex t = twist(circle.complex, rep);
    REQUIRE(t.ranks == std::vector<int>({2, 2}));
    CHECK(t.boundaries[0].at(0, 0) == var_minus_one(1, 0));
    CHECK(t.boundaries[0].at(0, 1).is_zero());
    CHECK(t.boundaries[0].at(1, 0).is_zero());
    LaurentPoly expect(1);
    expect.add_term({1}, Complex(-1.0, 0.0));
    expect.add_term({0}, Complex(-1.0, 0.0));
    CHECK(t.boundaries[0].at(1, 1) == expect);

    TorusGrid grid = TorusGrid::with_size(1, 1024);
    auto lambdas = make_lambda_grid(1e-2, 2.0);
    DegreeHomology h0 = homology(t, 0, grid, lambdas);

    LaurentMatrix at_zero(1, 1, 1), at_pi(1, 1, 1);
    at_zero.set(0, 0, var_minus_one(1, 0));
    at_pi.set(0, 0, expect);
    SpectralDensity d0 = density(module_from(at_zero), grid, lambdas);
    SpectralDensity dpi = density(module_from(at_pi), grid, lambdas);
    for (size_t j = 0; j < lambdas.size(); ++j)
      CHECK(h0.torsion_density.counts[j] == d0.counts[j] + dpi.counts[j]);
  }

  SUBCASE("twisting a torus preserves the chain condition") {
    CWPreset torus = preset_complex("torus2");
    UnitaryRep rep;
    rep.dim = 2;
    Eigen::MatrixXcd a(2, 2), b(2, 2);
    a << 1, 0, 0, -1;
    b << Complex(0.0, 1.0), 0, 0, 1;
    rep.generators = {a, b};
    FreeChainComplex t = twist(torus.complex, rep);
    CHECK(t.ranks == std::vector<int>({2, 4, 2}));
    CHECK(validate(t).ok);
  }

  SUBCASE("generator arity must match") {
    CHECK_THROWS_AS(twist(circle.complex, trivial_rep(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("derived completion functors of a resolution") {
  TorusGrid grid = TorusGrid::with_size(1, 4096);
  auto lambdas = make_lambda_grid(1e-2, 2.0);
  FreeChainComplex res = koszul_resolution(1);

  SUBCASE("degree zero reproduces the one-variable arc density") {
    TorModuleReport t0 = tor(0, res, grid, lambdas);
    CHECK(t0.projective_dim == 0.0);
    CHECK_FALSE(t0.is_zero);
    CHECK(t0.torsion_rank == 1);
    double sup = 0.0;
    for (size_t j = 0; j < lambdas.size(); ++j)
      sup = std::max(sup, std::abs(t0.density.value(j) -
                                   arc_reference(1.0, lambdas[j])));
    CHECK(sup < 1e-3);
    CHECK(t0.fit.ns == doctest::Approx(1.0).epsilon(0.05));
  }

  SUBCASE("positive degrees vanish, including past the resolution length") {
    for (int q : {1, 2, 5}) {
      TorModuleReport t = tor(q, res, grid, lambdas);
      CHECK(t.is_zero);
      CHECK(t.projective_dim == 0.0);
    }
  }

  SUBCASE("two-variable resolution has a density of quadratic order") {
    TorusGrid g2 = TorusGrid::with_size(2, 512);
    auto l2 = make_lambda_grid(1e-2, 4.0, 32);
    TorModuleReport t0 = tor(0, koszul_resolution(2), g2, l2);
    CHECK_FALSE(t0.is_zero);
    CHECK(t0.projective_dim == 0.0);
    CHECK(t0.fit.ns == doctest::Approx(2.0).epsilon(0.10));

    // Degree one keeps a torsion part (the second differential degenerates
    // at the same fiber), but no projective part; its spectrum coincides
    // with the degree-zero one here.
    TorModuleReport t1 = tor(1, koszul_resolution(2), g2, l2);
    CHECK_FALSE(t1.is_zero);
    CHECK(t1.projective_dim == 0.0);
    CHECK(t1.density.counts == t0.density.counts);

    CHECK(tor(3, koszul_resolution(2), g2, l2).is_zero);
  }

  SUBCASE("bad input is rejected") {
    CHECK_THROWS_AS(tor(-1, res, grid, lambdas), std::invalid_argument);
    LaurentMatrix one = LaurentMatrix::identity(1, 1);
    FreeChainComplex broken = make_complex(1, {1, 1, 1}, {one, one});
    CHECK_THROWS_AS(tor(0, broken, grid, lambdas), std::invalid_argument);
  }
}

TEST_CASE("degreewise decomposition against cover-module presentations") {
  TorusGrid grid = TorusGrid::with_size(1, 2048);
  auto lambdas = make_lambda_grid(1e-2, 2.0);

  SUBCASE("circle against its standard module presentations") {
    FreeChainComplex c = preset_complex("circle").complex;
    LaurentMatrix q0(1, 1, 1);
    q0.set(0, 0, var_minus_one(1, 0));
    std::vector<LaurentMatrix> pres = {q0, LaurentMatrix(0, 0, 1)};
    TorDecompositionReport rep =
        tor_decomposition_check(c, pres, grid, lambdas);
    CHECK(rep.ok);
    CHECK(rep.max_density_gap == 0.0);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].dims_ok);
    CHECK(rep.rows[1].dims_ok);
    CHECK(rep.rows[0].tor0_projective == 0.0);
    CHECK(rep.rows[1].tor1_projective == 0.0);
  }

  SUBCASE("doubled-root presentation") {
    LaurentPoly sq = var_minus_one(1, 0) * var_minus_one(1, 0);
    LaurentMatrix d1(1, 1, 1);
    d1.set(0, 0, sq);
    FreeChainComplex c = make_complex(1, {1, 1}, {d1});
    std::vector<LaurentMatrix> pres = {d1, LaurentMatrix(0, 0, 1)};
    TorDecompositionReport rep =
        tor_decomposition_check(c, pres, grid, lambdas);
    CHECK(rep.ok);
    CHECK(rep.max_density_gap == 0.0);

    TorModuleReport t0 = tor(0, c, grid, lambdas);
    CHECK(t0.fit.ns == doctest::Approx(0.5).epsilon(0.05));
  }

  SUBCASE("free homology splits into the degree-zero functor") {
    FreeChainComplex c = make_complex(1, {1, 1}, {LaurentMatrix(1, 1, 1)});
    std::vector<LaurentMatrix> pres = {LaurentMatrix(1, 0, 1),
                                       LaurentMatrix(1, 0, 1)};
    TorDecompositionReport rep =
        tor_decomposition_check(c, pres, grid, lambdas);
    CHECK(rep.ok);
    CHECK(rep.rows[0].middle_betti == 1.0);
    CHECK(rep.rows[0].tor0_projective == 1.0);
    CHECK(rep.rows[1].middle_betti == 1.0);
    CHECK(rep.rows[1].tor1_projective == 0.0);
  }

  SUBCASE("input validation") {
    FreeChainComplex c = preset_complex("circle").complex;
    CHECK_THROWS_AS(tor_decomposition_check(c, {}, grid, lambdas),
                    std::invalid_argument);
    FreeChainComplex c2 = preset_complex("torus2").complex;
    std::vector<LaurentMatrix> pres(3, LaurentMatrix(0, 0, 2));
    CHECK_THROWS_AS(tor_decomposition_check(c2, pres, grid, lambdas),
                    std::invalid_argument);
  }
}

TEST_CASE("minimal-generator lower bound") {
  TorusGrid grid = TorusGrid::with_size(1, 256);

  SUBCASE("single and repeated power modules") {
    CHECK(mu_lower(torsion_power_module(1.0, 0.0), grid) == 1);
    CHECK(mu_lower(torsion_power_module(2.0, M_PI), grid) == 1);
    for (int n = 1; n <= 4; ++n)
      CHECK(mu_lower(power_sum(n, 1.0, 0.0), grid) == n);
  }

  SUBCASE("separated degeneracies do not add up") {
    VirtualModule x = direct_sum(torsion_power_module(1.0, 0.0),
                                 torsion_power_module(1.0, M_PI));
    CHECK(mu_lower(x, grid) == 1);
  }

  SUBCASE("free modules need full-rank generation everywhere") {
    CHECK(mu_lower(free_module(2, 1), grid) == 2);
    CHECK(mu_lower(module_from(LaurentMatrix::identity(3, 1)), grid) == 0);
  }

  SUBCASE("invariant under everywhere-invertible rescaling") {
    LaurentPoly shifted = LaurentPoly::variable(1, 0);
    shifted.add_term({0}, Complex(3.0, 0.0));  // z + 3 never vanishes
    LaurentMatrix plain(1, 1, 1), scaled(1, 1, 1);
    plain.set(0, 0, var_minus_one(1, 0));
    scaled.set(0, 0, var_minus_one(1, 0) * shifted);
    CHECK(mu_lower(module_from(plain), grid) ==
          mu_lower(module_from(scaled), grid));
  }

  SUBCASE("direct-sum sandwich") {
    std::vector<VirtualModule> mods = {
        torsion_power_module(1.0, 0.0), torsion_power_module(2.0, 0.0),
        torsion_power_module(1.0, M_PI), power_sum(2, 1.0, M_PI / 2.0)};
    for (const auto& a : mods)
      for (const auto& b : mods) {
        int ma = mu_lower(a, grid), mb = mu_lower(b, grid);
        int ms = mu_lower(direct_sum(a, b), grid);
        CHECK(ms >= std::max(ma, mb));
        CHECK(ms <= ma + mb);
      }
  }
}

TEST_CASE("minimal-generator upper bound with epi certificates") {
  TorusGrid grid = TorusGrid::with_size(1, 256);

  SUBCASE("repeated summands at one point") {
    MuBounds b = mu_bounds(power_sum(3, 1.0, 0.0), grid);
    CHECK(b.lower == 3);
    REQUIRE(b.upper.has_value());
    CHECK(*b.upper == 3);
    CHECK(b.certificate->strict_epi);
    CHECK(b.certificate->cluster_count == 1);
  }

  SUBCASE("two separated degeneracies share one generator") {
    VirtualModule x = direct_sum(torsion_power_module(1.0, 0.0),
                                 torsion_power_module(1.0, M_PI));
    MuBounds b = mu_bounds(x, grid);
    CHECK(b.lower == 1);
    REQUIRE(b.upper.has_value());
    CHECK(*b.upper == 1);
    CHECK(b.certificate->strict_epi);
    CHECK(b.certificate->cluster_count == 2);
    CHECK_FALSE(b.certificate->summary.empty());
  }

  SUBCASE("mixed exponents at separated points") {
    VirtualModule x = direct_sum(torsion_power_module(1.0, 0.0),
                                 torsion_power_module(2.0, M_PI / 2.0));
    MuBounds b = mu_bounds(x, grid);
    CHECK(b.lower == 1);
    REQUIRE(b.upper.has_value());
    CHECK(*b.upper == 1);
  }

  SUBCASE("null modules need no generators") {
    MuBounds b = mu_bounds(module_from(LaurentMatrix::identity(2, 1)), grid);
    CHECK(b.lower == 0);
    REQUIRE(b.upper.has_value());
    CHECK(*b.upper == 0);
  }

  SUBCASE("free modules are generated by a fiberwise basis") {
    MuBounds b = mu_bounds(free_module(2, 1), grid);
    CHECK(b.lower == 2);
    REQUIRE(b.upper.has_value());
    CHECK(*b.upper == 2);
  }
}

TEST_CASE("critical-point lower bounds") {
  auto lambdas = make_lambda_grid(1e-2, 2.0, 16);

  SUBCASE("circle needs a minimum and a maximum") {
    TorusGrid grid = TorusGrid::with_size(1, 512);
    MorseReport rep =
        morse_bounds(preset_complex("circle"), trivial_rep(1), grid);
    REQUIRE(rep.bounds.size() == 2);
    CHECK(rep.rep_dim == 1);
    CHECK(rep.bounds[0].lower_bound == 1);
    CHECK(rep.bounds[1].lower_bound == 1);
    CHECK(rep.bounds[0].mu_homology == 1);
    CHECK(rep.bounds[1].mu_torsion_below == 1);
  }

  SUBCASE("two-torus bounds at every index") {
    TorusGrid grid = TorusGrid::with_size(2, 64);
    MorseReport rep =
        morse_bounds(preset_complex("torus2"), trivial_rep(2), grid);
    REQUIRE(rep.bounds.size() == 3);
    for (const auto& row : rep.bounds) CHECK(row.lower_bound == 1);
  }

  SUBCASE("projective homology forces a bound too") {
    CWPreset p;
    p.name = "point_like";
    p.fundamental_group_rank = 1;
    p.top_dim = 1;
    p.complex = make_complex(1, {1, 0}, {LaurentMatrix(1, 0, 1)});
    TorusGrid grid = TorusGrid::with_size(1, 64);
    MorseReport rep = morse_bounds(p, trivial_rep(1), grid);
    CHECK(rep.bounds[0].lower_bound == 1);
    CHECK(rep.bounds[0].mu_homology == 1);
    CHECK(rep.bounds[1].lower_bound == 0);
  }

  SUBCASE("representation dimension divides the bound") {
    UnitaryRep rep;
    rep.dim = 2;
    Eigen::MatrixXcd r(2, 2);
    r << 1, 0, 0, -1;
    rep.generators = {r};
    TorusGrid grid = TorusGrid::with_size(1, 512);
    MorseReport m = morse_bounds(preset_complex("circle"), rep, grid);
    CHECK(m.rep_dim == 2);
    CHECK(m.bounds[0].lower_bound == 1);  // ceil(1/2) with separated roots
    CHECK(m.bounds[1].lower_bound == 1);
  }
}

TEST_CASE("degree-zero dichotomy for the deck group") {
  auto lambdas = make_lambda_grid(1e-2, 2.0, 16);

  SUBCASE("circle") {
    TorusGrid grid = TorusGrid::with_size(1, 2048);
    ZerothHomologyReport rep =
        zeroth_homology_check(preset_complex("circle"), grid, lambdas);
    CHECK(rep.torsion_nontrivial);
    CHECK(rep.h0_betti == 0.0);
    CHECK(rep.h0_vanishes);
    CHECK(rep.ok);
  }

  SUBCASE("two-torus") {
    TorusGrid grid = TorusGrid::with_size(2, 64);
    ZerothHomologyReport rep =
        zeroth_homology_check(preset_complex("torus2"), grid, lambdas);
    CHECK(rep.ok);
  }

  SUBCASE("three-torus at coarse resolution") {
    TorusGrid grid = TorusGrid::with_size(3, 32);
    ZerothHomologyReport rep =
        zeroth_homology_check(preset_complex("torus3"), grid, lambdas);
    CHECK(rep.ok);
  }
}
