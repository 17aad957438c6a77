#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "novsh/json_io.hpp"
#include "test_support.hpp"

using namespace novsh;

namespace {

LaurentPoly var_minus_one(int num_vars, int index) {
  LaurentPoly p = LaurentPoly::variable(num_vars, index);
  p.add_term(Exponents(static_cast<size_t>(num_vars), 0), Complex(-1.0, 0.0));
  return p;
}

}  // namespace

TEST_CASE("laurent matrix round-trips through json") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    LaurentMatrix m = novsh_test::random_matrix(rng, 3, 2, 2);
    LaurentMatrix back = laurent_matrix_from_json(to_json(m));
    CHECK(back == m);
  }
}

TEST_CASE("zero entries are omitted and restored") {
  LaurentMatrix m(2, 3, 1);
  m.set(1, 2, var_minus_one(1, 0));
  Json j = to_json(m);
  CHECK(j["entries"].size() == 1);

  Json bare{{"rows", 2}, {"cols", 3}, {"num_vars", 1}};
  LaurentMatrix z = laurent_matrix_from_json(bare);
  CHECK(z == LaurentMatrix::zero(2, 3, 1));
}

TEST_CASE("default im and plain re fields parse") {
  Json j{{"rows", 1},
         {"cols", 1},
         {"num_vars", 1},
         {"entries",
          Json::array({Json{{"row", 0},
                            {"col", 0},
                            {"terms", Json::array({Json{
                                          {"exp", Json::array({1})},
                                          {"re", 2.5},
                                      }})}}})}};
  LaurentMatrix m = laurent_matrix_from_json(j);
  CHECK(m.at(0, 0) == LaurentPoly::monomial(1, {1}, Complex(2.5, 0.0)));
}

TEST_CASE("malformed laurent matrix json throws") {
  CHECK_THROWS_AS(laurent_matrix_from_json(Json{{"rows", 1}, {"cols", 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      laurent_matrix_from_json(Json{{"rows", 1},
                                    {"cols", 1},
                                    {"num_vars", 1},
                                    {"entries", Json::array({Json{
                                                    {"row", 3},
                                                    {"col", 0},
                                                    {"terms", Json::array()},
                                                }})}}),
      std::invalid_argument);
  // exponent arity mismatch
  CHECK_THROWS_AS(
      laurent_matrix_from_json(
          Json{{"rows", 1},
               {"cols", 1},
               {"num_vars", 2},
               {"entries",
                Json::array({Json{{"row", 0},
                                  {"col", 0},
                                  {"terms", Json::array({Json{
                                                {"exp", Json::array({1})},
                                                {"re", 1.0},
                                            }})}}})}}),
      std::invalid_argument);
  CHECK_THROWS_AS(laurent_matrix_from_json(Json::array()),
                  std::invalid_argument);
}

TEST_CASE("laurent-backed module round-trips") {
  LaurentMatrix a(1, 1, 1);
  a.set(0, 0, var_minus_one(1, 0));
  VirtualModule x = module_from(a);
  Json j = to_json(x);
  VirtualModule back = module_from_json(j);
  CHECK(back.rank_src == x.rank_src);
  CHECK(back.rank_dst == x.rank_dst);
  REQUIRE(back.alpha->as_laurent() != nullptr);
  CHECK(*back.alpha->as_laurent() == a);
}

TEST_CASE("abs_power module json builds the scalar symbol") {
  Json j{{"rank_src", 1},
         {"rank_dst", 1},
         {"alpha",
          Json{{"symbol", "abs_power"}, {"center_angle", 0.0}, {"nu", 2.0}}}};
  VirtualModule x = module_from_json(j);
  CHECK(x.alpha->as_laurent() == nullptr);
  TorusPoint pt;
  pt.angles = {3.14159265358979323846};
  // |e^{i pi} - 1|^2 = 4
  CHECK(std::abs(x.alpha->at(pt)(0, 0).real() - 4.0) < 1e-12);

  VirtualModule ref = torsion_power_module(2.0, 0.0);
  TorusGrid grid = TorusGrid::with_size(1, 256);
  auto lambdas = make_lambda_grid(1e-2, 2.0, 16);
  SpectralDensity dx = density(x, grid, lambdas);
  SpectralDensity dr = density(ref, grid, lambdas);
  CHECK(dx.counts == dr.counts);
}

TEST_CASE("module json validation errors") {
  // unknown symbol kind
  CHECK_THROWS_AS(
      module_from_json(Json{{"rank_src", 1},
                            {"rank_dst", 1},
                            {"alpha", Json{{"symbol", "mystery"}}}}),
      std::invalid_argument);
  // rank/shape mismatch
  Json alpha{{"rows", 2}, {"cols", 1}, {"num_vars", 1}};
  CHECK_THROWS_AS(module_from_json(Json{{"rank_src", 1},
                                        {"rank_dst", 1},
                                        {"alpha", alpha}}),
                  std::invalid_argument);
  // serializer refuses non-Laurent symbols
  VirtualModule scalar = torsion_power_module(1.0, 0.0);
  CHECK_THROWS_AS(to_json(scalar), std::invalid_argument);
}

TEST_CASE("chain complex round-trips and validates") {
  FreeChainComplex torus = [] {
    LaurentMatrix d1(1, 2, 2);
    d1.set(0, 0, var_minus_one(2, 0));
    d1.set(0, 1, var_minus_one(2, 1));
    LaurentMatrix d2(2, 1, 2);
    LaurentPoly m = var_minus_one(2, 1);
    d2.set(0, 0, LaurentPoly::constant(2, Complex(-1.0, 0.0)) * m);
    d2.set(1, 0, var_minus_one(2, 0));
    FreeChainComplex c = make_complex(2, {1, 2, 1}, {d1, d2});
    c.orientable_manifold = true;
    return c;
  }();

  Json j = to_json(torus);
  FreeChainComplex back = complex_from_json(j);
  CHECK(back.num_vars == torus.num_vars);
  CHECK(back.ranks == torus.ranks);
  CHECK(back.orientable_manifold);
  REQUIRE(back.boundaries.size() == torus.boundaries.size());
  for (size_t i = 0; i < back.boundaries.size(); ++i) {
    CHECK(back.boundaries[i] == torus.boundaries[i]);
  }
  CHECK(validate(back).ok);
}

TEST_CASE("missing boundaries default to zero maps") {
  Json j{{"num_vars", 1}, {"ranks", Json::array({2, 3, 1})}};
  FreeChainComplex c = complex_from_json(j);
  CHECK(c.boundaries[0] == LaurentMatrix::zero(2, 3, 1));
  CHECK(c.boundaries[1] == LaurentMatrix::zero(3, 1, 1));
  CHECK_FALSE(c.orientable_manifold);
}

TEST_CASE("complex json validation errors") {
  Json base{{"num_vars", 1}, {"ranks", Json::array({1, 1})}};
  Json bad_degree = base;
  bad_degree["boundaries"] = Json::array(
      {Json{{"degree", 2},
            {"matrix", Json{{"rows", 1}, {"cols", 1}, {"num_vars", 1}}}}});
  CHECK_THROWS_AS(complex_from_json(bad_degree), std::invalid_argument);

  Json dup = base;
  Json zero_matrix{{"rows", 1}, {"cols", 1}, {"num_vars", 1}};
  dup["boundaries"] =
      Json::array({Json{{"degree", 1}, {"matrix", zero_matrix}},
                   Json{{"degree", 1}, {"matrix", zero_matrix}}});
  CHECK_THROWS_AS(complex_from_json(dup), std::invalid_argument);

  Json bad_shape = base;
  bad_shape["boundaries"] = Json::array(
      {Json{{"degree", 1},
            {"matrix", Json{{"rows", 2}, {"cols", 2}, {"num_vars", 1}}}}});
  CHECK_THROWS_AS(complex_from_json(bad_shape), std::invalid_argument);

  CHECK_THROWS_AS(complex_from_json(Json{{"num_vars", 1}}),
                  std::invalid_argument);
}

TEST_CASE("unitary rep json round-trips") {
  UnitaryRep sign;
  sign.dim = 2;
  Eigen::MatrixXcd u(2, 2);
  u << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  sign.generators = {u};
  Json j = to_json(sign);
  UnitaryRep back = rep_from_json(j);
  CHECK(back.dim == 2);
  REQUIRE(back.generators.size() == 1);
  CHECK((back.generators[0] - u).norm() == 0.0);
}

TEST_CASE("rep json accepts plain numbers and rejects non-unitary") {
  Json plain{{"dim", 1},
             {"generators", Json::array({Json::array(
                                {Json::array({-1.0})})})}};
  UnitaryRep r = rep_from_json(plain);
  CHECK(std::abs(r.generators[0](0, 0) - Complex(-1, 0)) == 0.0);

  Json stretch{{"dim", 1},
               {"generators", Json::array({Json::array(
                                  {Json::array({2.0})})})}};
  CHECK_THROWS_AS(rep_from_json(stretch), std::invalid_argument);

  Json bad_shape{{"dim", 2},
                 {"generators", Json::array({Json::array(
                                    {Json::array({1.0})})})}};
  CHECK_THROWS_AS(rep_from_json(bad_shape), std::invalid_argument);
}

TEST_CASE("fit json encodes non-finite values as strings") {
  NSFit fit;
  fit.ns = std::numeric_limits<double>::infinity();
  fit.capacity = 0.0;
  fit.window_lo = 1e-3;
  fit.window_hi = 0.5;
  fit.trivial = true;
  Json j = to_json(fit);
  CHECK(j["ns"] == "inf");
  CHECK(j["capacity"] == 0.0);
  CHECK(j["window"][0] == 1e-3);
  CHECK(j["window"][1] == 0.5);
  CHECK(j["trivial"] == true);
}

TEST_CASE("density csv has the pinned header and full precision") {
  SpectralDensity d;
  d.lambdas = {0.001, 0.1, 1.0};
  d.counts = {0, 3, 7};
  d.weight = 1.0 / 3.0;
  std::string csv = density_csv(d);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "lambda,F");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  std::ostringstream expect;
  expect << std::setprecision(17) << 7.0 * d.weight;
  CHECK(csv.find(expect.str()) != std::string::npos);
}

TEST_CASE("mu bounds json uses null for absent upper data") {
  MuBounds b;
  b.lower = 2;
  Json j = to_json(b);
  CHECK(j["lower"] == 2);
  CHECK(j["upper"].is_null());
  CHECK(j["certificate"].is_null());

  MuUpperCertificate cert;
  cert.generators = 2;
  cert.cluster_count = 1;
  cert.strict_epi = true;
  cert.summary = "test";
  b.upper = 2;
  b.certificate = cert;
  Json j2 = to_json(b);
  CHECK(j2["upper"] == 2);
  CHECK(j2["certificate"]["generators"] == 2);
  CHECK(j2["certificate"]["strict_epi"] == true);
}

TEST_CASE("load_json_file maps io and syntax errors to invalid_argument") {
  CHECK_THROWS_AS(load_json_file("/nonexistent/nowhere.json"),
                  std::invalid_argument);
  std::string path = "bad_syntax_tmp.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_json_file(path), std::invalid_argument);
  std::remove(path.c_str());
}
