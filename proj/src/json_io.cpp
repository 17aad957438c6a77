#include "novsh/json_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace novsh {

namespace {

const Json& require_field(const Json& j, const char* key) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string("expected an object with field '") +
                                key + "'");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return *it;
}

int require_int(const Json& j, const char* key) {
  const Json& v = require_field(j, key);
  if (!v.is_number_integer()) {
    throw std::invalid_argument(std::string("field '") + key +
                                "' must be an integer");
  }
  return v.get<int>();
}

double require_number(const Json& j, const char* key) {
  const Json& v = require_field(j, key);
  if (!v.is_number()) {
    throw std::invalid_argument(std::string("field '") + key +
                                "' must be a number");
  }
  return v.get<double>();
}

const Json& require_array(const Json& j, const char* key) {
  const Json& v = require_field(j, key);
  if (!v.is_array()) {
    throw std::invalid_argument(std::string("field '") + key +
                                "' must be an array");
  }
  return v;
}

Complex entry_to_complex(const Json& v) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_object()) {
    double re = v.value("re", 0.0);
    double im = v.value("im", 0.0);
    return Complex(re, im);
  }
  throw std::invalid_argument(
      "matrix entry must be a number or an {\"re\",\"im\"} object");
}

/// JSON has no representation for non-finite doubles; emit strings.
Json json_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json term_re_im(Complex c) {
  return Json{{"re", c.real()}, {"im", c.imag()}};
}

LaurentMatrix parse_laurent_matrix(const Json& j) {
  int rows = require_int(j, "rows");
  int cols = require_int(j, "cols");
  int num_vars = require_int(j, "num_vars");
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("matrix dimensions must be non-negative");
  }
  if (num_vars < 1) {
    throw std::invalid_argument("num_vars must be at least 1");
  }
  LaurentMatrix m(rows, cols, num_vars);
  if (!j.contains("entries")) return m;
  const Json& entries = require_array(j, "entries");
  for (const Json& e : entries) {
    int r = require_int(e, "row");
    int c = require_int(e, "col");
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw std::invalid_argument("entry position out of range");
    }
    const Json& terms = require_array(e, "terms");
    LaurentPoly p(num_vars);
    for (const Json& t : terms) {
      const Json& exp = require_array(t, "exp");
      if (static_cast<int>(exp.size()) != num_vars) {
        throw std::invalid_argument("term exponent length must equal num_vars");
      }
      Exponents ev(static_cast<size_t>(num_vars));
      for (size_t k = 0; k < ev.size(); ++k) {
        if (!exp[k].is_number_integer()) {
          throw std::invalid_argument("exponents must be integers");
        }
        ev[k] = exp[k].get<int>();
      }
      double re = t.is_object() ? t.value("re", 0.0) : 0.0;
      double im = t.is_object() ? t.value("im", 0.0) : 0.0;
      p.add_term(ev, Complex(re, im));
    }
    m.set(r, c, p);
  }
  return m;
}

VirtualModule parse_module(const Json& j) {
  int rank_src = require_int(j, "rank_src");
  int rank_dst = require_int(j, "rank_dst");
  if (rank_src < 0 || rank_dst < 0) {
    throw std::invalid_argument("module ranks must be non-negative");
  }
  const Json& alpha = require_field(j, "alpha");
  VirtualModule x;
  x.rank_src = rank_src;
  x.rank_dst = rank_dst;
  if (alpha.is_object() && alpha.contains("symbol")) {
    const Json& kind = alpha.at("symbol");
    if (!kind.is_string() || kind.get<std::string>() != "abs_power") {
      throw std::invalid_argument("unknown symbol kind in module alpha");
    }
    double theta = alpha.value("center_angle", 0.0);
    double nu = require_number(alpha, "nu");
    if (!(nu > 0)) {
      throw std::invalid_argument("abs_power symbol requires nu > 0");
    }
    if (rank_src != 1 || rank_dst != 1) {
      throw std::invalid_argument("abs_power symbol is 1x1; ranks must be 1");
    }
    x.alpha = abs_power_symbol(theta, nu);
    return x;
  }
  LaurentMatrix m = parse_laurent_matrix(alpha);
  if (m.rows() != rank_dst) {
    throw std::invalid_argument("rank_dst must equal the rows of alpha");
  }
  if (rank_src > m.cols()) {
    throw std::invalid_argument("rank_src cannot exceed the columns of alpha");
  }
  x.alpha = make_symbol(m);
  return x;
}

FreeChainComplex parse_complex(const Json& j) {
  int num_vars = require_int(j, "num_vars");
  if (num_vars < 1) {
    throw std::invalid_argument("num_vars must be at least 1");
  }
  const Json& ranks_json = require_array(j, "ranks");
  if (ranks_json.empty()) {
    throw std::invalid_argument("ranks must be non-empty");
  }
  std::vector<int> ranks;
  ranks.reserve(ranks_json.size());
  for (const Json& r : ranks_json) {
    if (!r.is_number_integer() || r.get<int>() < 0) {
      throw std::invalid_argument("ranks must be non-negative integers");
    }
    ranks.push_back(r.get<int>());
  }
  int top = static_cast<int>(ranks.size()) - 1;
  std::vector<LaurentMatrix> boundaries;
  std::vector<bool> seen(static_cast<size_t>(top > 0 ? top : 0), false);
  boundaries.reserve(static_cast<size_t>(top > 0 ? top : 0));
  for (int i = 1; i <= top; ++i) {
    boundaries.emplace_back(ranks[static_cast<size_t>(i - 1)],
                            ranks[static_cast<size_t>(i)], num_vars);
  }
  if (j.contains("boundaries")) {
    const Json& bs = require_array(j, "boundaries");
    for (const Json& b : bs) {
      int degree = require_int(b, "degree");
      if (degree < 1 || degree > top) {
        throw std::invalid_argument("boundary degree out of range");
      }
      if (seen[static_cast<size_t>(degree - 1)]) {
        throw std::invalid_argument("duplicate boundary degree");
      }
      seen[static_cast<size_t>(degree - 1)] = true;
      boundaries[static_cast<size_t>(degree - 1)] =
          parse_laurent_matrix(require_field(b, "matrix"));
    }
  }
  FreeChainComplex c =
      make_complex(num_vars, std::move(ranks), std::move(boundaries));
  c.orientable_manifold = j.value("orientable_manifold", false);
  return c;
}

UnitaryRep parse_rep(const Json& j) {
  UnitaryRep rep;
  rep.dim = require_int(j, "dim");
  if (rep.dim < 1) {
    throw std::invalid_argument("representation dim must be at least 1");
  }
  const Json& gens = require_array(j, "generators");
  for (const Json& g : gens) {
    if (!g.is_array() || static_cast<int>(g.size()) != rep.dim) {
      throw std::invalid_argument("generator must be a dim x dim matrix");
    }
    Eigen::MatrixXcd u(rep.dim, rep.dim);
    for (int r = 0; r < rep.dim; ++r) {
      const Json& row = g[static_cast<size_t>(r)];
      if (!row.is_array() || static_cast<int>(row.size()) != rep.dim) {
        throw std::invalid_argument("generator must be a dim x dim matrix");
      }
      for (int c = 0; c < rep.dim; ++c) {
        u(r, c) = entry_to_complex(row[static_cast<size_t>(c)]);
      }
    }
    rep.generators.push_back(std::move(u));
  }
  validate_rep(rep);
  return rep;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("JSON parse error in ") + path +
                                ": " + e.what());
  }
}

LaurentMatrix laurent_matrix_from_json(const Json& j) {
  try {
    return parse_laurent_matrix(j);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

VirtualModule module_from_json(const Json& j) {
  try {
    return parse_module(j);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

FreeChainComplex complex_from_json(const Json& j) {
  try {
    return parse_complex(j);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

UnitaryRep rep_from_json(const Json& j) {
  try {
    return parse_rep(j);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

Json to_json(const LaurentMatrix& m) {
  Json entries = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const LaurentPoly& p = m.at(r, c);
      if (p.terms().empty()) continue;
      Json terms = Json::array();
      for (const auto& [exp, coeff] : p.terms()) {
        Json t = term_re_im(coeff);
        t["exp"] = exp;
        terms.push_back(std::move(t));
      }
      entries.push_back(
          Json{{"row", r}, {"col", c}, {"terms", std::move(terms)}});
    }
  }
  return Json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"num_vars", m.num_vars()},
              {"entries", std::move(entries)}};
}

Json to_json(const VirtualModule& x) {
  if (!x.alpha || x.alpha->as_laurent() == nullptr) {
    throw std::invalid_argument(
        "only modules with an exact Laurent symbol serialize to JSON");
  }
  return Json{{"rank_src", x.rank_src},
              {"rank_dst", x.rank_dst},
              {"alpha", to_json(*x.alpha->as_laurent())}};
}

Json to_json(const FreeChainComplex& c) {
  Json boundaries = Json::array();
  for (size_t i = 0; i < c.boundaries.size(); ++i) {
    boundaries.push_back(Json{{"degree", static_cast<int>(i) + 1},
                              {"matrix", to_json(c.boundaries[i])}});
  }
  return Json{{"num_vars", c.num_vars},
              {"ranks", c.ranks},
              {"boundaries", std::move(boundaries)},
              {"orientable_manifold", c.orientable_manifold}};
}

Json to_json(const UnitaryRep& rep) {
  Json gens = Json::array();
  for (const auto& u : rep.generators) {
    Json rows = Json::array();
    for (int r = 0; r < u.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < u.cols(); ++c) row.push_back(term_re_im(u(r, c)));
      rows.push_back(std::move(row));
    }
    gens.push_back(std::move(rows));
  }
  return Json{{"dim", rep.dim}, {"generators", std::move(gens)}};
}

Json to_json(const SpectralDensity& d) {
  Json lambdas = Json::array();
  Json values = Json::array();
  for (size_t i = 0; i < d.lambdas.size(); ++i) {
    lambdas.push_back(d.lambdas[i]);
    values.push_back(d.value(i));
  }
  return Json{{"lambda", std::move(lambdas)},
              {"F", std::move(values)},
              {"torsion_rank", d.torsion_rank}};
}

Json to_json(const NSFit& fit) {
  return Json{{"ns", json_double(fit.ns)},
              {"capacity", json_double(fit.capacity)},
              {"window", Json::array({fit.window_lo, fit.window_hi})},
              {"stderr", json_double(fit.slope_stderr)},
              {"points", fit.points},
              {"trivial", fit.trivial},
              {"degenerate", fit.degenerate},
              {"insufficient", fit.insufficient}};
}

Json to_json(const ValidationReport& r) {
  return Json{{"ok", r.ok},
              {"first_bad_degree", r.first_bad_degree},
              {"max_residual", r.max_residual},
              {"message", r.message}};
}

Json to_json(const DegreeHomology& h) {
  return Json{{"degree", h.degree},
              {"betti", h.betti},
              {"cycles_rank", h.cycles_rank},
              {"boundaries_rank", h.boundaries_rank},
              {"torsion_density", to_json(h.torsion_density)},
              {"ns_fit", to_json(h.ns_fit)}};
}

Json to_json(const HomologyReport& r) {
  Json degrees = Json::array();
  for (const auto& d : r.degrees) degrees.push_back(to_json(d));
  return Json{{"degrees", std::move(degrees)}};
}

Json to_json(const MuUpperCertificate& c) {
  return Json{{"generators", c.generators},
              {"cluster_count", c.cluster_count},
              {"center_indices", c.center_indices},
              {"strict_epi", c.strict_epi},
              {"summary", c.summary}};
}

Json to_json(const MuBounds& b) {
  Json j{{"lower", b.lower}};
  j["upper"] = b.upper ? Json(*b.upper) : Json(nullptr);
  j["certificate"] = b.certificate ? to_json(*b.certificate) : Json(nullptr);
  return j;
}

Json to_json(const MorseReport& r) {
  Json bounds = Json::array();
  for (const auto& b : r.bounds) {
    bounds.push_back(Json{{"degree", b.degree},
                          {"mu_homology", b.mu_homology},
                          {"mu_torsion_below", b.mu_torsion_below},
                          {"lower_bound", b.lower_bound}});
  }
  return Json{{"rep_dim", r.rep_dim}, {"bounds", std::move(bounds)}};
}

Json to_json(const TorModuleReport& r) {
  return Json{{"degree", r.degree},
              {"projective_dim", r.projective_dim},
              {"torsion_rank", r.torsion_rank},
              {"is_zero", r.is_zero},
              {"density", to_json(r.density)},
              {"ns_fit", to_json(r.fit)}};
}

Json to_json(const TorDecompositionReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"degree", row.degree},
                        {"middle_betti", row.middle_betti},
                        {"tor0_projective", row.tor0_projective},
                        {"tor1_projective", row.tor1_projective},
                        {"dims_ok", row.dims_ok},
                        {"density_gap", row.density_gap}});
  }
  return Json{{"rows", std::move(rows)},
              {"max_density_gap", r.max_density_gap},
              {"ok", r.ok}};
}

std::string density_csv(const SpectralDensity& d) {
  std::ostringstream out;
  out << "lambda,F\n" << std::setprecision(17);
  for (size_t i = 0; i < d.lambdas.size(); ++i) {
    out << d.lambdas[i] << ',' << d.value(i) << '\n';
  }
  return out.str();
}

}  // namespace novsh
