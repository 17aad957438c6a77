// Command-line surface for the extended-homology engine: ingest chain
// complexes and modules (JSON or built-in presets), compute invariants,
// and emit JSON/CSV reports.
//
// Exit codes: 0 success, 1 property-check failure, 2 parse error,
// 3 chain-condition violation, 4 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "novsh/json_io.hpp"
#include "novsh/parallel.hpp"

namespace {

using namespace novsh;

constexpr int kExitOk = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitChain = 3;
constexpr int kExitUsage = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainError {
  int degree = -1;
  double residual = 0.0;
  std::string message;
};

struct GlobalOpts {
  int grid = 0;  // 0: per-dimension default
  double rank_tol = kDefaultRankEps;
  std::string lambda_spec = "1e-3:2:64";
  std::string fit_window;
  std::string output = "json";
  std::string threads = "auto";
};

void add_common_options(CLI::App* sub, GlobalOpts& o) {
  sub->add_option("--grid", o.grid, "grid points per torus dimension");
  sub->add_option("--rank-tol", o.rank_tol,
                  "relative singular-value threshold for rank decisions");
  sub->add_option("--lambda", o.lambda_spec,
                  "density grid as min:max:points_per_decade");
  sub->add_option("--fit-window", o.fit_window,
                  "exponent-fit window as lo:hi");
  sub->add_option("--output", o.output, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", o.threads, "worker threads: auto or a count");
}

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ':')) parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

int parse_int(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

std::vector<double> parse_lambda_grid(const GlobalOpts& o) {
  auto parts = split_colon(o.lambda_spec);
  if (parts.size() != 3) {
    throw UsageError("--lambda expects min:max:points_per_decade");
  }
  double lo = parse_double(parts[0], "--lambda min");
  double hi = parse_double(parts[1], "--lambda max");
  int ppd = parse_int(parts[2], "--lambda points_per_decade");
  if (!(lo > 0.0) || !(hi > lo) || ppd < 1) {
    throw UsageError("--lambda range must satisfy 0 < min < max, ppd >= 1");
  }
  return make_lambda_grid(lo, hi, ppd);
}

std::optional<std::pair<double, double>> parse_fit_window(const GlobalOpts& o) {
  if (o.fit_window.empty()) return std::nullopt;
  auto parts = split_colon(o.fit_window);
  if (parts.size() != 2) throw UsageError("--fit-window expects lo:hi");
  double lo = parse_double(parts[0], "--fit-window lo");
  double hi = parse_double(parts[1], "--fit-window hi");
  if (!(lo > 0.0) || !(hi > lo)) {
    throw UsageError("--fit-window must satisfy 0 < lo < hi");
  }
  return std::make_pair(lo, hi);
}

void apply_threads(const GlobalOpts& o) {
  if (o.threads == "auto") {
    set_worker_threads(0);
    return;
  }
  int n = parse_int(o.threads, "--threads");
  if (n < 1) throw UsageError("--threads must be 'auto' or a positive count");
  set_worker_threads(n);
}

void check_rank_tol(const GlobalOpts& o) {
  if (!(o.rank_tol > 0.0)) throw UsageError("--rank-tol must be positive");
}

TorusGrid pick_grid(const GlobalOpts& o, int num_vars) {
  int n = o.grid > 0 ? o.grid : TorusGrid::default_points_per_dim(num_vars);
  if (n < 2) throw UsageError("--grid must be at least 2");
  return TorusGrid::with_size(num_vars, n);
}

bool looks_like_path(const std::string& s) {
  return s.find('/') != std::string::npos ||
         s.find(".json") != std::string::npos ||
         std::filesystem::exists(s);
}

/// Halts with exit code 3 semantics when the boundary condition fails.
void require_chain(const FreeChainComplex& c) {
  ValidationReport v = validate(c);
  if (!v.ok) throw ChainError{v.first_bad_degree, v.max_residual, v.message};
}

CWPreset wrap_user_complex(const std::string& name, FreeChainComplex c) {
  CWPreset p;
  p.name = name;
  p.fundamental_group_rank = c.num_vars;
  p.top_dim = c.top_degree();
  p.complex = std::move(c);
  return p;
}

/// A preset name or a chain-complex JSON file.
CWPreset load_complex_input(const std::string& arg) {
  if (!looks_like_path(arg)) {
    try {
      return preset_complex(arg);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(
          "'" + arg +
          "' is neither a preset (circle, circle_subdivided, torus2, torus3) "
          "nor an existing file");
    }
  }
  return wrap_user_complex(arg, complex_from_json(load_json_file(arg)));
}

struct AnyInput {
  std::optional<VirtualModule> module;
  std::optional<CWPreset> preset;
};

/// A preset name, a chain-complex JSON file, or a module JSON file
/// (distinguished by the presence of "alpha").
AnyInput load_any_input(const std::string& arg) {
  AnyInput in;
  if (!looks_like_path(arg)) {
    in.preset = load_complex_input(arg);
    return in;
  }
  Json j = load_json_file(arg);
  if (j.is_object() && j.contains("alpha")) {
    in.module = module_from_json(j);
  } else {
    in.preset = wrap_user_complex(arg, complex_from_json(j));
  }
  return in;
}

UnitaryRep parse_rep_spec(const std::string& spec, int num_vars) {
  if (spec == "trivial") return trivial_rep(num_vars);
  if (spec.rfind("trivial", 0) == 0) {
    int d = parse_int(spec.substr(7), "--rep dimension");
    if (d < 1) throw UsageError("--rep trivialN needs N >= 1");
    UnitaryRep rep;
    rep.dim = d;
    rep.generators.assign(static_cast<size_t>(num_vars),
                          Eigen::MatrixXcd::Identity(d, d));
    return rep;
  }
  return rep_from_json(load_json_file(spec));
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

bool integral(double v) { return v == std::floor(v); }

std::string betti_summary(const std::vector<long long>& betti) {
  std::ostringstream out;
  for (size_t i = 0; i < betti.size(); ++i) {
    if (i) out << ' ';
    out << 'b' << i << '=' << betti[i];
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// betti
// ---------------------------------------------------------------------------

int run_betti(const GlobalOpts& o, const std::string& input) {
  apply_threads(o);
  check_rank_tol(o);
  CWPreset p = load_complex_input(input);
  require_chain(p.complex);
  const FreeChainComplex& c = p.complex;
  TorusGrid grid = pick_grid(o, c.num_vars);
  int top = c.top_degree();
  std::vector<int> gr(static_cast<size_t>(top) + 2, 0);
  for (int i = 1; i <= top; ++i) {
    gr[static_cast<size_t>(i)] =
        rank_profile(sample(c.boundary_or_zero(i), grid), o.rank_tol)
            .generic_rank;
  }
  std::vector<long long> betti;
  for (int i = 0; i <= top; ++i) {
    betti.push_back(c.ranks[static_cast<size_t>(i)] -
                    gr[static_cast<size_t>(i)] -
                    gr[static_cast<size_t>(i) + 1]);
  }
  if (o.output == "csv") {
    std::cout << "degree,betti\n";
    for (size_t i = 0; i < betti.size(); ++i) {
      std::cout << i << ',' << betti[i] << '\n';
    }
  } else {
    emit(Json{{"betti", betti}, {"summary", betti_summary(betti)}});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// density / ns
// ---------------------------------------------------------------------------

struct DensityResult {
  SpectralDensity density;
  NSFit fit;
  bool torsion_trivial = false;
};

DensityResult compute_density(const GlobalOpts& o, const std::string& input,
                              int degree) {
  AnyInput in = load_any_input(input);
  std::vector<double> lambdas = parse_lambda_grid(o);
  auto window = parse_fit_window(o);
  DensityResult res;
  if (in.module) {
    TorusGrid grid = pick_grid(o, in.module->num_vars());
    res.density = density(*in.module, grid, lambdas, o.rank_tol);
    SplitReport sr = split(*in.module, grid, o.rank_tol);
    res.torsion_trivial = sr.torsion_rank == 0 || sr.is_null;
  } else {
    const FreeChainComplex& c = in.preset->complex;
    require_chain(c);
    if (degree < 0 || degree > c.top_degree()) {
      throw UsageError("degree out of range for this complex");
    }
    TorusGrid grid = pick_grid(o, c.num_vars);
    DegreeHomology h = homology(c, degree, grid, lambdas, o.rank_tol);
    res.density = std::move(h.torsion_density);
    res.torsion_trivial = res.density.torsion_rank == 0;
  }
  res.fit = window ? ns_estimate(res.density, window->first, window->second)
                   : ns_estimate(res.density);
  if (res.torsion_trivial) {
    res.fit.ns = std::numeric_limits<double>::infinity();
    res.fit.capacity = 0.0;
    res.fit.trivial = true;
  } else if (res.fit.trivial) {
    res.torsion_trivial = true;
  }
  return res;
}

int run_density(const GlobalOpts& o, const std::string& input, int degree) {
  apply_threads(o);
  check_rank_tol(o);
  DensityResult res = compute_density(o, input, degree);
  if (o.output == "csv") {
    std::cout << density_csv(res.density);
  } else {
    emit(Json{{"density", to_json(res.density)},
              {"ns_fit", to_json(res.fit)}});
  }
  return kExitOk;
}

int run_ns(const GlobalOpts& o, const std::string& input, int degree) {
  apply_threads(o);
  check_rank_tol(o);
  DensityResult res = compute_density(o, input, degree);
  static const char* kTrivialNote = "torsion trivial; capacity 0";
  if (o.output == "csv") {
    std::cout << "ns,capacity,window_lo,window_hi,stderr\n"
              << res.fit.ns << ',' << res.fit.capacity << ','
              << res.fit.window_lo << ',' << res.fit.window_hi << ','
              << res.fit.slope_stderr << '\n';
    if (res.torsion_trivial) std::cout << "# " << kTrivialNote << "\n";
  } else {
    Json j = to_json(res.fit);
    if (res.torsion_trivial) j["note"] = kTrivialNote;
    emit(j);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// morse
// ---------------------------------------------------------------------------

int run_morse(const GlobalOpts& o, const std::string& input,
              const std::string& rep_spec) {
  apply_threads(o);
  check_rank_tol(o);
  CWPreset p = load_complex_input(input);
  require_chain(p.complex);
  UnitaryRep rep = parse_rep_spec(rep_spec, p.complex.num_vars);
  TorusGrid grid = pick_grid(o, p.complex.num_vars);
  MorseReport report = morse_bounds(p, rep, grid, o.rank_tol);
  if (o.output == "csv") {
    std::cout << "degree,mu_homology,mu_torsion_below,lower_bound\n";
    for (const auto& b : report.bounds) {
      std::cout << b.degree << ',' << b.mu_homology << ','
                << b.mu_torsion_below << ',' << b.lower_bound << '\n';
    }
  } else {
    Json j = to_json(report);
    std::ostringstream summary;
    for (const auto& b : report.bounds) {
      if (b.degree) summary << ' ';
      summary << 'm' << b.degree << ">=" << b.lower_bound;
    }
    j["summary"] = summary.str();
    emit(j);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mu
// ---------------------------------------------------------------------------

int run_mu(const GlobalOpts& o, const std::string& input, int degree) {
  apply_threads(o);
  check_rank_tol(o);
  AnyInput in = load_any_input(input);
  VirtualModule x;
  if (in.module) {
    x = *in.module;
  } else {
    const FreeChainComplex& c = in.preset->complex;
    require_chain(c);
    if (degree < 0 || degree > c.top_degree()) {
      throw UsageError("degree out of range for this complex");
    }
    // Module presented at chain level by the incoming boundary.
    x = module_from(c.boundary_or_zero(degree + 1));
  }
  TorusGrid grid = pick_grid(o, x.num_vars());
  MuBounds b = mu_bounds(x, grid, o.rank_tol);
  if (o.output == "csv") {
    std::cout << "lower,upper\n" << b.lower << ',';
    if (b.upper) std::cout << *b.upper;
    std::cout << '\n';
  } else {
    emit(to_json(b));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// tor
// ---------------------------------------------------------------------------

int run_tor(const GlobalOpts& o, const std::string& input, int koszul_n,
            int degree) {
  apply_threads(o);
  check_rank_tol(o);
  if ((koszul_n > 0) == !input.empty()) {
    throw UsageError("tor needs exactly one of --koszul N or a resolution file");
  }
  FreeChainComplex resolution;
  if (koszul_n > 0) {
    resolution = koszul_resolution(koszul_n);
  } else {
    resolution = complex_from_json(load_json_file(input));
  }
  require_chain(resolution);
  if (degree < 0) throw UsageError("--degree must be non-negative");
  std::vector<double> lambdas = parse_lambda_grid(o);
  TorusGrid grid = pick_grid(o, resolution.num_vars);
  TorModuleReport report = tor(degree, resolution, grid, lambdas, o.rank_tol);
  if (auto window = parse_fit_window(o)) {
    report.fit = ns_estimate(report.density, window->first, window->second);
  }
  if (o.output == "csv") {
    std::cout << density_csv(report.density);
  } else {
    emit(to_json(report));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckItem {
  std::string name;
  bool pass = false;
  bool coarse = false;
  std::string detail;
};

LaurentPoly var_minus_one(int num_vars, int index) {
  LaurentPoly p = LaurentPoly::variable(num_vars, index);
  p.add_term(Exponents(static_cast<size_t>(num_vars), 0), Complex(-1.0, 0.0));
  return p;
}

LaurentMatrix random_laurent(std::mt19937& rng, int rows, int cols,
                             int num_vars) {
  std::uniform_int_distribution<int> expd(-2, 2);
  std::normal_distribution<double> coeff(0.0, 1.0);
  LaurentMatrix m(rows, cols, num_vars);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      LaurentPoly p(num_vars);
      for (int t = 0; t < 3; ++t) {
        Exponents e(static_cast<size_t>(num_vars));
        for (auto& x : e) x = expd(rng);
        p.add_term(e, Complex(coeff(rng), coeff(rng)));
      }
      m.set(r, c, p);
    }
  }
  return m;
}

CheckItem check_adjoint_involution() {
  CheckItem item{"adjoint_involution"};
  item.pass = true;
  std::vector<LaurentMatrix> cases;
  for (const char* name : {"circle", "torus2", "torus3"}) {
    for (const auto& b : preset_complex(name).complex.boundaries) {
      cases.push_back(b);
    }
  }
  std::mt19937 rng(7);
  cases.push_back(random_laurent(rng, 3, 2, 1));
  cases.push_back(random_laurent(rng, 2, 2, 2));
  cases.push_back(random_laurent(rng, 1, 4, 2));
  for (const auto& m : cases) {
    if (!(adjoint(adjoint(m)) == m)) {
      item.pass = false;
      item.detail = "double adjoint changed a matrix";
      break;
    }
  }
  return item;
}

std::vector<VirtualModule> density_check_modules() {
  std::vector<VirtualModule> mods;
  LaurentMatrix circle(1, 1, 1);
  circle.set(0, 0, var_minus_one(1, 0));
  mods.push_back(module_from(circle));
  CWPreset torus = preset_complex("torus2");
  mods.push_back(module_from(torus.complex.boundaries[0]));
  mods.push_back(module_from(torus.complex.boundaries[1]));
  std::mt19937 rng(11);
  mods.push_back(module_from(random_laurent(rng, 2, 2, 1)));
  return mods;
}

CheckItem check_density_monotonicity(const GlobalOpts& o,
                                     const std::vector<double>& lambdas) {
  CheckItem item{"density_monotonicity"};
  item.pass = true;
  std::vector<VirtualModule> mods = density_check_modules();
  mods.push_back(torsion_power_module(1.0, 0.0));
  mods.push_back(torsion_power_module(2.0, 2.0943951023931953));
  for (const auto& x : mods) {
    TorusGrid grid = pick_grid(o, x.num_vars());
    SpectralDensity d = density(x, grid, lambdas, o.rank_tol);
    for (size_t i = 1; i < d.counts.size(); ++i) {
      if (d.counts[i] < d.counts[i - 1]) {
        item.pass = false;
        item.detail = "density decreased between tabulated points";
        return item;
      }
    }
  }
  return item;
}

CheckItem check_dual_density_invariance(const GlobalOpts& o,
                                        const std::vector<double>& lambdas) {
  CheckItem item{"dual_density_invariance"};
  item.pass = true;
  for (const auto& x : density_check_modules()) {
    TorusGrid grid = pick_grid(o, x.num_vars());
    double tol = 2.0 * grid.weight() + 1e-12;
    if (grid.points_per_dim < 16) {
      tol *= 4.0;
      item.coarse = true;
    }
    const LaurentMatrix* m = x.alpha->as_laurent();
    VirtualModule dual = module_from(adjoint(*m));
    SpectralDensity da = density(x, grid, lambdas, o.rank_tol);
    SpectralDensity db = density(dual, grid, lambdas, o.rank_tol);
    for (size_t i = 0; i < da.counts.size(); ++i) {
      if (std::abs(da.value(i) - db.value(i)) > tol) {
        std::ostringstream msg;
        msg << "density of the adjoint deviates by "
            << std::abs(da.value(i) - db.value(i)) << " at lambda "
            << da.lambdas[i];
        item.pass = false;
        item.detail = msg.str();
        return item;
      }
    }
  }
  return item;
}

CheckItem check_betti_integrality(const GlobalOpts& o) {
  CheckItem item{"betti_integrality"};
  item.pass = true;
  for (const char* name : {"circle", "torus2"}) {
    FreeChainComplex c = preset_complex(name).complex;
    int top = c.top_degree();
    std::vector<long long> reference;
    for (int n : {4, 8, 16}) {
      TorusGrid grid = TorusGrid::with_size(c.num_vars, n);
      std::vector<int> gr(static_cast<size_t>(top) + 2, 0);
      for (int i = 1; i <= top; ++i) {
        gr[static_cast<size_t>(i)] =
            rank_profile(sample(c.boundary_or_zero(i), grid), o.rank_tol)
                .generic_rank;
      }
      std::vector<long long> betti;
      for (int i = 0; i <= top; ++i) {
        long long b = c.ranks[static_cast<size_t>(i)] -
                      gr[static_cast<size_t>(i)] -
                      gr[static_cast<size_t>(i) + 1];
        if (b < 0) {
          item.pass = false;
          item.detail = "negative betti number";
          return item;
        }
        betti.push_back(b);
      }
      if (reference.empty()) {
        reference = betti;
      } else if (betti != reference) {
        item.pass = false;
        item.detail = std::string("betti of ") + name +
                      " changed with the grid size";
        return item;
      }
    }
  }
  return item;
}

CheckItem check_mu_direct_sum_sandwich(const GlobalOpts& o) {
  CheckItem item{"mu_direct_sum_sandwich"};
  item.pass = true;
  std::vector<VirtualModule> mods = {
      torsion_power_module(1.0, 0.0),
      torsion_power_module(1.0, 3.141592653589793),
      torsion_power_module(2.0, 1.5707963267948966),
      free_module(2, 1),
  };
  TorusGrid grid = pick_grid(o, 1);
  for (const auto& x : mods) {
    for (const auto& y : mods) {
      int mx = mu_lower(x, grid, o.rank_tol);
      int my = mu_lower(y, grid, o.rank_tol);
      int msum = mu_lower(direct_sum(x, y), grid, o.rank_tol);
      if (msum < std::max(mx, my) || msum > mx + my) {
        std::ostringstream msg;
        msg << "mu(X+Y)=" << msum << " outside [" << std::max(mx, my) << ","
            << (mx + my) << "]";
        item.pass = false;
        item.detail = msg.str();
        return item;
      }
    }
  }
  return item;
}

int run_check(const GlobalOpts& o, const std::string& user_complex) {
  apply_threads(o);
  check_rank_tol(o);
  if (!user_complex.empty()) {
    FreeChainComplex c = complex_from_json(load_json_file(user_complex));
    require_chain(c);
    if (o.output == "csv") {
      std::cout << "name,pass\nuser_complex_valid,1\n";
    } else {
      emit(Json{{"items",
                 Json::array({Json{{"name", "user_complex_valid"},
                                   {"pass", true}}})},
                {"ok", true}});
    }
    return kExitOk;
  }

  std::vector<double> lambdas = parse_lambda_grid(o);
  std::vector<CheckItem> items;
  items.push_back(check_adjoint_involution());
  items.push_back(check_density_monotonicity(o, lambdas));
  items.push_back(check_dual_density_invariance(o, lambdas));
  items.push_back(check_betti_integrality(o));
  items.push_back(check_mu_direct_sum_sandwich(o));

  bool all_pass = true;
  for (const auto& it : items) all_pass = all_pass && it.pass;

  if (o.output == "csv") {
    std::cout << "name,pass,flags,detail\n";
    for (const auto& it : items) {
      std::cout << it.name << ',' << (it.pass ? 1 : 0) << ','
                << (it.coarse ? "coarse" : "") << ',' << it.detail << '\n';
    }
  } else {
    Json rows = Json::array();
    for (const auto& it : items) {
      Json row{{"name", it.name}, {"pass", it.pass}};
      if (it.coarse) row["coarse"] = true;
      if (!it.detail.empty()) row["detail"] = it.detail;
      rows.push_back(std::move(row));
    }
    emit(Json{{"items", std::move(rows)}, {"ok", all_pass}});
  }
  if (!all_pass) {
    for (const auto& it : items) {
      if (!it.pass) {
        std::cerr << "[FAIL] " << it.name << ": " << it.detail << "\n";
      }
    }
    return kExitCheckFail;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "invariants of chain complexes of free modules over Laurent "
      "polynomial rings, computed through torus fibers"};
  app.require_subcommand(1);

  GlobalOpts opts;
  int exit_code = kExitOk;

  std::string betti_input;
  CLI::App* betti = app.add_subcommand(
      "betti", "von Neumann Betti numbers of a complex or preset");
  betti->add_option("input", betti_input, "preset name or complex JSON file")
      ->required();
  add_common_options(betti, opts);
  betti->callback([&] { exit_code = run_betti(opts, betti_input); });

  std::string density_input;
  int density_degree = 0;
  CLI::App* density_cmd = app.add_subcommand(
      "density", "spectral density function of a torsion module or degree");
  density_cmd
      ->add_option("input", density_input,
                   "preset, complex JSON file, or module JSON file")
      ->required();
  density_cmd->add_option("--degree", density_degree,
                          "homology degree (complex inputs)");
  add_common_options(density_cmd, opts);
  density_cmd->callback(
      [&] { exit_code = run_density(opts, density_input, density_degree); });

  std::string ns_input;
  int ns_degree = 0;
  CLI::App* ns_cmd = app.add_subcommand(
      "ns", "density exponent near zero and its reciprocal capacity");
  ns_cmd
      ->add_option("input", ns_input,
                   "preset, complex JSON file, or module JSON file")
      ->required();
  ns_cmd->add_option("--degree", ns_degree, "homology degree (complex inputs)");
  add_common_options(ns_cmd, opts);
  ns_cmd->callback([&] { exit_code = run_ns(opts, ns_input, ns_degree); });

  std::string morse_input;
  std::string morse_rep = "trivial";
  CLI::App* morse = app.add_subcommand(
      "morse", "critical-point lower bounds from twisted homology");
  morse->add_option("input", morse_input, "preset name or complex JSON file")
      ->required();
  morse->add_option("--rep", morse_rep,
                    "coefficient twist: trivial, trivialN, or a rep JSON file");
  add_common_options(morse, opts);
  morse->callback([&] { exit_code = run_morse(opts, morse_input, morse_rep); });

  std::string mu_input;
  int mu_degree = 0;
  CLI::App* mu = app.add_subcommand(
      "mu", "minimal-generator bounds for a module");
  mu->add_option("input", mu_input,
                 "module JSON file, preset, or complex JSON file")
      ->required();
  mu->add_option("--degree", mu_degree,
                 "with complex inputs: bound the module presented by the "
                 "incoming boundary of this degree");
  add_common_options(mu, opts);
  mu->callback([&] { exit_code = run_mu(opts, mu_input, mu_degree); });

  std::string tor_input;
  int tor_koszul = 0;
  int tor_degree = 0;
  CLI::App* tor_cmd = app.add_subcommand(
      "tor", "derived functor of completion from a free resolution");
  tor_cmd->add_option("input", tor_input, "resolution JSON file");
  tor_cmd->add_option("--koszul", tor_koszul,
                      "use the built-in rank-N exterior resolution");
  tor_cmd->add_option("--degree", tor_degree, "derived-functor degree");
  add_common_options(tor_cmd, opts);
  tor_cmd->callback(
      [&] { exit_code = run_tor(opts, tor_input, tor_koszul, tor_degree); });

  std::string check_complex;
  CLI::App* check = app.add_subcommand(
      "check", "run the built-in property battery (or validate a user file)");
  check->add_option("--complex", check_complex,
                    "validate this complex JSON file instead");
  add_common_options(check, opts);
  check->callback([&] { exit_code = run_check(opts, check_complex); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const ChainError& e) {
    std::cerr << "chain condition failed at degree " << e.degree
              << ": residual " << e.residual;
    if (!e.message.empty()) std::cerr << " (" << e.message << ")";
    std::cerr << "\n";
    return kExitChain;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return exit_code;
}
