#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualq/cubature.hpp"
#include "dualq/distributions.hpp"
#include "dualq/error_metrics.hpp"
#include "dualq/errors.hpp"
#include "dualq/grid_io.hpp"
#include "dualq/optim1d.hpp"
#include "dualq/optimnd.hpp"
#include "dualq/svg.hpp"

namespace dualq::cli {
namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool json = false;
  std::string config;
};

json grid_json(const Grid& grid) {
  json pts = json::array();
  for (const auto& p : grid.points()) pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  return {{"dim", grid.dim()}, {"n", grid.size()}, {"points", pts}, {"pinned", grid.pinned()}};
}

json estimate_json(const ErrorEstimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"n_samples", e.n_samples}};
}

NormSpec make_spec(const std::string& norm, double p) {
  try {
    return NormSpec(parse_norm_kind(norm), p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Distribution make_dist(const std::string& text) {
  try {
    return parse_distribution(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void emit(std::ostream& out, const Common& common, const json& report,
          const std::function<void(std::ostream&)>& text) {
  if (common.json) {
    out << report.dump(2) << '\n';
  } else {
    text(out);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number list: " + text);
    }
  }
  return out;
}

// Flat key=value lines become "--key=value" arguments placed before the
// command line ones, so explicit flags win.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    out.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  return out;
}

// ---- train1d ----

struct Train1dArgs {
  std::string dist;
  int n = 0;
  std::string mode = "compact";
  double p = 2.0;
  std::string out;
  double tol = 1e-10;
  int max_iter = 100;
};

int cmd_train1d(const Train1dArgs& a, const Common& common, std::ostream& out) {
  if (a.p != 2.0) throw UsageError("train1d supports p = 2 only");
  const Distribution dist = make_dist(a.dist);
  if (dist.dim != 1) throw UsageError("train1d needs a one-dimensional distribution");
  const Mode1d mode = a.mode == "extended" ? Mode1d::extended : Mode1d::compact;
  NewtonOptions opt;
  opt.tol = a.tol;
  opt.max_iter = a.max_iter;
  const NewtonReport rep = newton_solve(dist, a.n, mode, opt);
  const double error = exact_1d_dq_error(rep.grid, dist, mode);
  if (!a.out.empty()) save_grid(a.out, rep.grid, GridMeta{a.dist, a.p, "l2"});
  const json report = {{"command", "train1d"},
                       {"distribution", a.dist},
                       {"mode", a.mode},
                       {"p", a.p},
                       {"n", a.n},
                       {"error", error},
                       {"iterations", rep.iterations},
                       {"gradient_norm", rep.final_gradient_norm},
                       {"converged", rep.converged},
                       {"grid", grid_json(rep.grid)}};
  emit(out, common, report, [&](std::ostream& o) {
    o << "train1d n=" << a.n << " mode=" << a.mode << " iterations=" << rep.iterations
      << " error=" << format_double(error) << '\n';
    write_grid_csv(o, rep.grid);
  });
  return kOk;
}

// ---- trainnd ----

struct TrainndArgs {
  std::string dist;
  int n = 0;
  std::size_t steps = 0;
  std::string pin = "none";
  bool refine = false;
  std::size_t refine_samples = 20000;
  int refine_iters = 10;
  std::size_t trace_every = 0;
  std::string trace_out;
  std::string out;
  double a = 1.0;
  double b = 100.0;
  std::size_t eval_samples = 20000;
  std::string norm = "l2";
  double p = 2.0;
};

int cmd_trainnd(const TrainndArgs& a, const Common& common, std::ostream& out) {
  const Distribution dist = make_dist(a.dist);
  TrainConfig cfg;
  cfg.steps = a.steps;
  cfg.schedule = {a.a, a.b};
  cfg.seed = common.seed;
  cfg.spec = make_spec(a.norm, a.p);
  cfg.trace_every = a.trace_every;
  cfg.eval_samples = a.eval_samples;
  if (a.pin == "corners") {
    if (!dist.support) throw UsageError("--pin corners needs a bounded support");
    cfg.anchors = box_corners(*dist.support);
  } else if (a.pin != "none") {
    throw UsageError("--pin must be corners or none");
  }
  if (a.refine) cfg.refine = RefineConfig{a.refine_samples, a.refine_iters, common.seed ^ 0x5eedULL, common.threads};
  if (a.n <= 0) throw UsageError("--n must be positive");
  const TrainReport rep = train(dist, static_cast<Index>(a.n), cfg);
  if (!a.out.empty()) save_grid(a.out, rep.grid, GridMeta{a.dist, a.p, a.norm});
  if (a.trace_every > 0) {
    const std::string path = !a.trace_out.empty() ? a.trace_out : (a.out.empty() ? "trace.csv" : a.out + ".trace.csv");
    std::ofstream trace(path);
    if (!trace) throw UsageError("cannot write " + path);
    trace << "step,value,std_error\n";
    for (const auto& t : rep.error_trace) {
      trace << t.step << ',' << format_double(t.error.value) << ',' << format_double(t.error.std_error) << '\n';
    }
  }
  json trace = json::array();
  for (const auto& t : rep.error_trace) trace.push_back({{"step", t.step}, {"error", estimate_json(t.error)}});
  const json report = {{"command", "trainnd"},
                       {"distribution", a.dist},
                       {"n", a.n},
                       {"steps", a.steps},
                       {"seed", common.seed},
                       {"pin", a.pin},
                       {"refine", a.refine},
                       {"outside_fraction", rep.outside_fraction},
                       {"lp_fallbacks", rep.lp_fallbacks},
                       {"error_trace", trace},
                       {"grid", grid_json(rep.grid)},
                       {"initial_grid", grid_json(rep.initial_grid)}};
  emit(out, common, report, [&](std::ostream& o) {
    o << "trainnd n=" << a.n << " steps=" << a.steps << " initial_error="
      << format_double(rep.error_trace.front().error.value)
      << " final_error=" << format_double(rep.error_trace.back().error.value) << '\n';
    write_grid_csv(o, rep.grid);
  });
  return kOk;
}

// ---- eval ----

struct EvalArgs {
  std::string grid;
  std::string dist;
  std::string norm = "l2";
  double p = 2.0;
  std::size_t samples = 100000;
  bool extended = false;
  bool compare_voronoi = false;
  bool exact = false;
};

int cmd_eval(const EvalArgs& a, const Common& common, std::ostream& out) {
  const Grid grid = load_grid(a.grid).grid;
  const Distribution dist = make_dist(a.dist);
  const NormSpec spec = make_spec(a.norm, a.p);
  json report = {{"command", "eval"}, {"p", a.p}, {"norm", a.norm}, {"extended", a.extended}};
  std::optional<double> voronoi;
  if (a.exact) {
    if (grid.dim() != 1 || !spec.is_quadratic_euclidean()) {
      throw UsageError("--exact needs a 1D grid and p = 2");
    }
    report["value"] = exact_1d_dq_error(grid, dist, a.extended ? Mode1d::extended : Mode1d::compact);
    report["std_error"] = 0.0;
    report["n_samples"] = 0;
    report["exact"] = true;
    if (a.compare_voronoi) voronoi = exact_1d_voronoi_error(grid, dist);
    if (voronoi) report["voronoi"] = {{"value", *voronoi}, {"std_error", 0.0}, {"n_samples", 0}};
  } else {
    RngStream rng(common.seed);
    const ErrorEstimate e = mc_dq_error(grid, dist, spec, a.samples, rng, a.extended, common.threads);
    report.update(estimate_json(e));
    report["exact"] = false;
    if (a.compare_voronoi) {
      RngStream vrng(common.seed);
      const ErrorEstimate v = mc_voronoi_error(grid, dist, spec, a.samples, vrng, common.threads);
      report["voronoi"] = estimate_json(v);
    }
  }
  emit(out, common, report, [&](std::ostream& o) {
    o << "dual_error=" << format_double(report["value"].get<double>())
      << " std_error=" << format_double(report["std_error"].get<double>());
    if (report.contains("voronoi")) {
      o << " voronoi_error=" << format_double(report["voronoi"]["value"].get<double>());
    }
    o << '\n';
  });
  return kOk;
}

// ---- cubature ----

struct CubatureArgs {
  std::string grid;
  std::string dist;
  std::string f = "quadratic";
  std::string coeffs;
  double lip = -1.0;
  std::size_t samples = 100000;
  bool extended = false;
};

struct Integrand {
  ScalarFunction f;
  double lip = 0.0;
};

// quadratic: ||x||^2; exp: exp(-||x||^2 / 2); cos: cos(x_1 + ... + x_d);
// custom-poly: sum_j sum_k c_k x_j^k.
Integrand make_integrand(const CubatureArgs& a, int dim) {
  if (a.f == "quadratic") return {[](const Point& x) { return x.squaredNorm(); }, 2.0};
  if (a.f == "exp") return {[](const Point& x) { return std::exp(-0.5 * x.squaredNorm()); }, 1.0};
  if (a.f == "cos") return {[](const Point& x) { return std::cos(x.sum()); }, static_cast<double>(dim)};
  if (a.f == "custom-poly") {
    const std::vector<double> c = parse_list(a.coeffs);
    if (c.empty()) throw UsageError("custom-poly needs --coeffs");
    if (a.lip < 0.0) throw UsageError("custom-poly needs --lip");
    return {[c](const Point& x) {
              double acc = 0.0;
              for (Eigen::Index j = 0; j < x.size(); ++j) {
                double term = 0.0;
                for (auto it = c.rbegin(); it != c.rend(); ++it) term = term * x(j) + *it;
                acc += term;
              }
              return acc;
            },
            a.lip};
  }
  throw UsageError("--f must be quadratic, exp, cos or custom-poly");
}

int cmd_cubature(const CubatureArgs& a, const Common& common, std::ostream& out) {
  const Grid grid = load_grid(a.grid).grid;
  const Distribution dist = make_dist(a.dist);
  const NormSpec spec = NormSpec::euclidean_quadratic();
  Integrand integrand = make_integrand(a, grid.dim());
  if (a.lip >= 0.0) integrand.lip = a.lip;
  RngStream wrng(common.seed);
  const WeightTable table = weights(grid, dist, spec, a.samples, wrng, a.extended, common.threads);
  const double value = expect(table, integrand.f);
  RngStream rrng = RngStream(common.seed).substream(1);
  const SecondOrderReport rep = second_order_report(grid, dist, spec, integrand.f, integrand.lip, a.samples, rrng);
  const json report = {{"command", "cubature"},
                       {"f", a.f},
                       {"expectation", value},
                       {"weights", std::vector<double>(table.weights.data(), table.weights.data() + table.weights.size())},
                       {"n_samples", a.samples},
                       {"second_order",
                        {{"cubature_error", rep.cubature_error},
                         {"cubature_std_error", rep.cubature_std_error},
                         {"dual_error", rep.dual_error},
                         {"dual_std_error", rep.dual_std_error},
                         {"lipschitz", integrand.lip},
                         {"bound", rep.bound},
                         {"satisfied", rep.satisfied}}}};
  emit(out, common, report, [&](std::ostream& o) {
    o << "expectation=" << format_double(value) << " cubature_error=" << format_double(rep.cubature_error)
      << " bound=" << format_double(rep.bound) << " satisfied=" << (rep.satisfied ? "true" : "false") << '\n';
  });
  return kOk;
}

// ---- rate-table ----

struct RateArgs {
  std::string dist;
  std::string sizes;
  std::size_t samples = 100000;
  std::string out;
};

int cmd_rate_table(const RateArgs& a, const Common& common, std::ostream& out) {
  const Distribution dist = make_dist(a.dist);
  const std::vector<double> sizes = parse_list(a.sizes);
  if (sizes.size() < 3) throw UsageError("rate-table needs at least three sizes");
  const NormSpec spec = NormSpec::euclidean_quadratic();
  const int d = dist.dim;
  std::vector<double> ns, cells, errors;
  for (double s : sizes) {
    const int k = static_cast<int>(s);
    if (k != s || k < 1) throw UsageError("sizes must be positive integers");
    if (d == 1) {
      if (k < 2) throw UsageError("1D sizes must be at least 2");
      const NewtonReport rep = newton_solve(dist, k, Mode1d::compact);
      ns.push_back(k);
      cells.push_back(k - 1);
      errors.push_back(exact_1d_dq_error(rep.grid, dist, Mode1d::compact));
    } else {
      if (!dist.support) throw UsageError("product ladders need a bounded support");
      const Grid grid = product_grid(*dist.support, k);
      RngStream rng = RngStream(common.seed).substream(static_cast<std::uint64_t>(k));
      ns.push_back(static_cast<double>(grid.size()));
      cells.push_back(std::pow(static_cast<double>(k), d));
      errors.push_back(mc_dq_error(grid, dist, spec, a.samples, rng, false, common.threads).value);
    }
  }
  const double slope_n = rate_fit(ns, errors, spec.p);
  const double slope_cells = rate_fit(cells, errors, spec.p);
  std::ostringstream csv;
  csv << "n,cells,d_root,scaled\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double root = std::sqrt(errors[i]);
    csv << format_double(ns[i]) << ',' << format_double(cells[i]) << ',' << format_double(root) << ','
        << format_double(std::pow(ns[i], 1.0 / d) * root) << '\n';
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw UsageError("cannot write " + a.out);
    f << csv.str();
  }
  const json report = {{"command", "rate-table"}, {"n", ns},           {"cells", cells},
                       {"error", errors},         {"slope_n", slope_n}, {"slope_cells", slope_cells}};
  emit(out, common, report, [&](std::ostream& o) {
    o << csv.str() << "slope_n=" << format_double(slope_n) << " slope_cells=" << format_double(slope_cells) << '\n';
  });
  return kOk;
}

// ---- export-svg ----

struct SvgArgs {
  std::string grid;
  std::string out;
  std::string title;
  bool hull = false;
  bool no_edges = false;
};

int cmd_export_svg(const SvgArgs& a, const Common& common, std::ostream& out) {
  const Grid grid = load_grid(a.grid).grid;
  if (grid.dim() != 2) throw UsageError("export-svg needs a 2D grid");
  export_svg(a.out, grid, SvgOptions{a.title, !a.no_edges, a.hull, 600});
  const json report = {{"command", "export-svg"}, {"svg", a.out}, {"csv", a.out + ".csv"}, {"points", grid.size()}};
  emit(out, common, report, [&](std::ostream& o) { o << "wrote " << a.out << " and " << a.out << ".csv\n"; });
  return kOk;
}

void log_options(std::ostream& err, const CLI::App& app, const std::string& prefix) {
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    if (value.empty() && opt->get_expected_min() == 0) value = "false";
    err << prefix << name << '=' << value << '\n';
  }
}

void log_config(std::ostream& err, const CLI::App& app) {
  err << "# effective configuration\n";
  log_options(err, app, "");
  for (const CLI::App* sub : app.get_subcommands()) log_options(err, *sub, sub->get_name() + ".");
}

}  // namespace

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual quantization grids: training, evaluation and cubature", "dualq"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  Common common;
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("--threads", common.threads, "Monte Carlo shards run in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--json", common.json, "Machine-readable JSON on stdout");
  app.add_option("--config", common.config, "Flat key=value file overlaid under the command line");

  Train1dArgs t1;
  auto* s_t1 = app.add_subcommand("train1d", "Newton solver for the optimal 1D quadratic dual grid");
  s_t1->add_option("--dist", t1.dist, "Distribution, e.g. uniform:0,1")->required();
  s_t1->add_option("--n", t1.n, "Grid size")->required();
  s_t1->add_option("--mode", t1.mode)->check(CLI::IsMember({"compact", "extended"}));
  s_t1->add_option("--p", t1.p);
  s_t1->add_option("--out", t1.out, "Grid file (.json or .csv)");
  s_t1->add_option("--tol", t1.tol);
  s_t1->add_option("--max-iter", t1.max_iter);

  TrainndArgs tn;
  auto* s_tn = app.add_subcommand("trainnd", "Stochastic gradient training (CVLQ) of a d-dimensional grid");
  s_tn->add_option("--dist", tn.dist)->required();
  s_tn->add_option("--n", tn.n)->required();
  s_tn->add_option("--steps", tn.steps)->required();
  s_tn->add_option("--pin", tn.pin)->check(CLI::IsMember({"corners", "none"}));
  s_tn->add_flag("--refine", tn.refine, "Quasi-Newton refinement after training");
  s_tn->add_option("--refine-samples", tn.refine_samples);
  s_tn->add_option("--refine-iters", tn.refine_iters);
  s_tn->add_option("--trace-every", tn.trace_every);
  s_tn->add_option("--trace-out", tn.trace_out);
  s_tn->add_option("--out", tn.out);
  s_tn->add_option("--a", tn.a, "Step size numerator");
  s_tn->add_option("--b", tn.b, "Step size offset");
  s_tn->add_option("--eval-samples", tn.eval_samples);
  s_tn->add_option("--norm", tn.norm);
  s_tn->add_option("--p", tn.p);

  EvalArgs ev;
  auto* s_ev = app.add_subcommand("eval", "Dual quantization error of a grid");
  s_ev->add_option("--grid", ev.grid)->required();
  s_ev->add_option("--dist", ev.dist)->required();
  s_ev->add_option("--norm", ev.norm);
  s_ev->add_option("--p", ev.p);
  s_ev->add_option("--samples", ev.samples);
  s_ev->add_flag("--extended", ev.extended, "Nearest-neighbour error outside the hull");
  s_ev->add_flag("--compare-voronoi", ev.compare_voronoi, "Also report the Voronoi error");
  s_ev->add_flag("--exact", ev.exact, "Closed form (1D, p = 2)");

  CubatureArgs cu;
  auto* s_cu = app.add_subcommand("cubature", "Cubature weights and the second-order error check");
  s_cu->add_option("--grid", cu.grid)->required();
  s_cu->add_option("--dist", cu.dist)->required();
  s_cu->add_option("--f", cu.f)->check(CLI::IsMember({"quadratic", "exp", "cos", "custom-poly"}));
  s_cu->add_option("--coeffs", cu.coeffs, "c0,c1,... for custom-poly");
  s_cu->add_option("--lip", cu.lip, "Lipschitz constant of the differential");
  s_cu->add_option("--samples", cu.samples);
  s_cu->add_flag("--extended", cu.extended);

  RateArgs ra;
  auto* s_ra = app.add_subcommand("rate-table", "Error ladder and fitted rate");
  s_ra->add_option("--dist", ra.dist)->required();
  s_ra->add_option("--sizes", ra.sizes, "Grid sizes (1D) or points per axis minus one (product grids)")->required();
  s_ra->add_option("--samples", ra.samples);
  s_ra->add_option("--out", ra.out, "CSV file");

  SvgArgs sv;
  auto* s_sv = app.add_subcommand("export-svg", "2D grid plot with its Delaunay edges");
  s_sv->add_option("--grid", sv.grid)->required();
  s_sv->add_option("--out", sv.out)->required();
  s_sv->add_option("--title", sv.title);
  s_sv->add_flag("--hull", sv.hull);
  s_sv->add_flag("--no-edges", sv.no_edges);

  try {
    std::vector<std::string> args = args_in;
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (path.empty()) continue;
      // Insert after the subcommand name so subcommand options resolve.
      const auto cmd = std::find_if(args.begin(), args.end(), [&](const std::string& s) {
        return app.get_subcommand_no_throw(s) != nullptr;
      });
      const auto extra = config_args(path);
      const auto pos = cmd == args.end() ? args.begin() : cmd + 1;
      args.insert(pos, extra.begin(), extra.end());
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  log_config(err, app);

  try {
    if (*s_t1) return cmd_train1d(t1, common, out);
    if (*s_tn) return cmd_trainnd(tn, common, out);
    if (*s_ev) return cmd_eval(ev, common, out);
    if (*s_cu) return cmd_cubature(cu, common, out);
    if (*s_ra) return cmd_rate_table(ra, common, out);
    if (*s_sv) return cmd_export_svg(sv, common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const Error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kUsage;
}

}  // namespace dualq::cli
