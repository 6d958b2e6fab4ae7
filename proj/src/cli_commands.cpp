#include "eqtrace/cli_commands.hpp"

#include "eqtrace/builtin_examples.hpp"
#include "eqtrace/economy_models.hpp"
#include "eqtrace/model_file.hpp"
#include "eqtrace/parallel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace eqtrace::cli {

namespace {

using nlohmann::json;

struct SolverFlags {
  std::string builtin;
  std::string model_path;
  std::vector<std::string> starts;
  double eps_lambda = 1e-6;
  double eps_res = 1e-5;
  double h0 = 0.3;
  int max_it = 1000;
  int restarts = 5;
  std::uint64_t seed = 0;
  std::string normalization;
  bool no_polish = false;
  std::string json_path;
  std::string csv_path;
};

void add_solver_flags(CLI::App* sub, SolverFlags& f) {
  sub->option_defaults()->always_capture_default();
  auto* b = sub->add_option("--builtin", f.builtin, "Builtin model: ex1, ex2, ex3 or ex4");
  auto* m = sub->add_option("--model", f.model_path, "JSON model file");
  b->excludes(m);
  sub->add_option("--start", f.starts,
                  "Comma-separated positive start prices (and activities); repeatable");
  sub->add_option("--eps-lambda", f.eps_lambda, "Stopping tolerance on lambda");
  sub->add_option("--eps-res", f.eps_res, "Corrector tolerance on ||H||");
  sub->add_option("--h0", f.h0, "Initial steplength");
  sub->add_option("--max-it", f.max_it, "Predictor step budget");
  sub->add_option("--restarts", f.restarts, "Restarts from random start points");
  sub->add_option("--seed", f.seed, "Seed for restart start points");
  sub->add_option("--normalization", f.normalization, "replace-last-row or none");
  sub->add_flag("--no-polish", f.no_polish, "Skip the final Newton polish at lambda = 0");
  sub->add_option("--json", f.json_path, "Write structured results to this file");
  sub->add_option("--trace-csv", f.csv_path, "Write the solution path of the first run as CSV");
}

EconomyModel load_model(const std::string& builtin, const std::string& path) {
  if (!builtin.empty()) return builtin_example(builtin);
  if (!path.empty()) return load_model_file(path);
  throw ModelError("one of --builtin or --model is required");
}

Vector parse_start(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v) || !(v > 0.0)) {
      throw std::invalid_argument("--start '" + text + "': entries must be positive reals");
    }
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("--start: empty");
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

std::string format_vector(const Vector& v, int precision) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(precision);
  for (Index i = 0; i < v.size(); ++i) os << (i ? "  " : "") << v[i];
  return os.str();
}

json to_array(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void print_run(std::ostream& out, std::size_t index, const std::optional<Vector>& start,
               const parallel::StartOutcome& outcome) {
  out << "run " << index << ": start "
      << (start ? "(" + format_vector(*start, 4) + ")" : std::string("all ones")) << " -> ";
  if (!outcome.ok()) {
    out << (outcome.no_convergence ? "no convergence" : "error") << ": " << outcome.error << '\n';
    return;
  }
  const EquilibriumReport& r = *outcome.report;
  std::ostringstream res;
  res.imbue(std::locale::classic());
  res << std::scientific << std::setprecision(3) << r.complementarity_residual;
  out << "converged\n";
  out << "  prices       " << format_vector(r.prices, 4) << '\n';
  if (r.activities) out << "  activities   " << format_vector(*r.activities, 4) << '\n';
  out << "  residual     " << res.str() << '\n';
  out << "  iterations   " << r.iterations << '\n';
  out << "  restarts     " << r.restarts << '\n';
  out << "  equilibrium  " << r.matched_known_equilibrium.value_or("-") << '\n';
  for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
}

json run_to_json(std::size_t index, const std::optional<Vector>& start,
                 const parallel::StartOutcome& outcome) {
  json j;
  j["index"] = index;
  j["start"] = start ? to_array(*start) : json(nullptr);
  if (!outcome.ok()) {
    j["status"] = outcome.no_convergence ? "no-convergence" : "error";
    j["error"] = outcome.error;
    return j;
  }
  const EquilibriumReport& r = *outcome.report;
  j["status"] = "converged";
  j["prices"] = to_array(r.prices);
  j["activities"] = r.activities ? to_array(*r.activities) : json(nullptr);
  j["complementarity_residual"] = r.complementarity_residual;
  j["solver_residual"] = r.solver_residual;
  j["iterations"] = r.iterations;
  j["corrector_steps"] = r.solution.trace.corrector_steps_total;
  j["restarts"] = r.restarts;
  j["label"] = r.matched_known_equilibrium ? json(*r.matched_known_equilibrium) : json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

int solve_command(const SolverFlags& f, const std::string& csv_path, std::ostream& out,
                  std::ostream& err) {
  std::optional<EconomyModel> loaded;
  TraceConfig cfg;
  EquilibriumOptions options;
  std::vector<std::optional<Vector>> starts;
  try {
    loaded = load_model(f.builtin, f.model_path);
    const EconomyModel& model = *loaded;
    cfg.eps_lambda = f.eps_lambda;
    cfg.eps_residual = f.eps_res;
    cfg.h0 = f.h0;
    cfg.max_iterations = f.max_it;
    cfg.restart_max = f.restarts;
    cfg.rng_seed = f.seed;
    cfg.final_polish = !f.no_polish;
    if (cfg.h0 > cfg.h_max) cfg.h_max = std::min(0.99, cfg.h0);
    if (cfg.h0 < cfg.h_min) cfg.h_min = cfg.h0;
    cfg.validate();
    if (!f.normalization.empty()) {
      options.normalization = parse_normalization(f.normalization);
      if (!options.normalization) {
        throw std::invalid_argument("--normalization must be replace-last-row or none");
      }
    }
    for (const auto& s : f.starts) {
      Vector v = parse_start(s);
      const bool fits = v.size() == model.dimension() ||
                        (model.is_production() && v.size() == model.goods());
      if (!fits) {
        throw std::invalid_argument("--start '" + s + "': expected " +
                                    std::to_string(model.dimension()) + " entries" +
                                    (model.is_production()
                                         ? " (or " + std::to_string(model.goods()) + " prices)"
                                         : std::string()));
      }
      starts.emplace_back(std::move(v));
    }
    if (starts.empty()) starts.emplace_back(std::nullopt);
  } catch (const std::exception& e) {
    err << "eqtrace: " << e.what() << '\n';
    return kExitInputError;
  }

  const EconomyModel& model = *loaded;
  const auto outcomes = parallel::solve_starts_omp(model, starts, cfg, options);
  const Normalization mode = options.normalization.value_or(model.default_normalization());

  out << "model " << model.name << " (" << (model.is_production() ? "production" : "exchange")
      << ", " << model.goods() << " goods";
  if (model.is_production()) out << ", " << model.activities() << " activities";
  out << "), normalization " << to_string(mode) << '\n';
  int code = kExitOk;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    print_run(out, i + 1, starts[i], outcomes[i]);
    if (!outcomes[i].ok()) {
      code = std::max(code, outcomes[i].no_convergence ? kExitNoConvergence : kExitInputError);
    }
  }
  if (code == kExitInputError) {
    // Input errors dominate: a bad start is the caller's problem.
    for (const auto& o : outcomes) {
      if (!o.ok() && !o.no_convergence) err << "eqtrace: " << o.error << '\n';
    }
  }

  if (!f.json_path.empty()) {
    json doc;
    doc["model"] = model.name;
    doc["kind"] = model.is_production() ? "production" : "exchange";
    doc["normalization"] = to_string(mode);
    doc["config"] = {{"eps_lambda", cfg.eps_lambda}, {"eps_residual", cfg.eps_residual},
                     {"h0", cfg.h0},                 {"max_iterations", cfg.max_iterations},
                     {"restart_max", cfg.restart_max}, {"rng_seed", cfg.rng_seed},
                     {"final_polish", cfg.final_polish}};
    json runs = json::array();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      runs.push_back(run_to_json(i + 1, starts[i], outcomes[i]));
    }
    doc["runs"] = std::move(runs);
    std::ofstream js(f.json_path);
    if (!js) {
      err << "eqtrace: cannot write '" << f.json_path << "'\n";
      return kExitInputError;
    }
    js << doc.dump(2) << '\n';
  }

  if (!csv_path.empty()) {
    if (!outcomes.front().ok()) {
      err << "eqtrace: first run did not converge; no trace written\n";
    } else {
      std::ofstream cs(csv_path);
      if (!cs) {
        err << "eqtrace: cannot write '" << csv_path << "'\n";
        return kExitInputError;
      }
      write_trace_csv(outcomes.front().report->solution.trace, cs);
    }
  }
  return code;
}

int validate_command(const std::string& path, std::ostream& out, std::ostream& err) {
  std::optional<EconomyModel> loaded;
  try {
    loaded = load_model_file(path);
  } catch (const std::exception& e) {
    err << "eqtrace: invalid model: " << e.what() << '\n';
    out << "FAIL parse: " << e.what() << '\n';
    return kExitInputError;
  }
  const EconomyModel& model = *loaded;
  out << "PASS parse: " << (model.is_production() ? "production" : "exchange") << ", "
      << model.goods() << " goods, " << model.exchange().consumers().size() << " consumers";
  if (model.is_production()) out << ", " << model.activities() << " activities";
  out << '\n';

  bool all_ok = true;
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> price(0.1, 2.0);
  std::uniform_real_distribution<double> scale(0.01, 10.0);
  const ExchangeEconomy& ex = model.exchange();
  double worst_walras = 0.0;
  double worst_homog = 0.0;
  bool eval_ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    Vector p(model.goods());
    for (Index d = 0; d < p.size(); ++d) p[d] = price(rng);
    const double c = scale(rng);
    try {
      const Vector xi = excess_demand(ex, p);
      worst_walras = std::max(worst_walras, std::abs(p.dot(xi)) / (1.0 + xi.lpNorm<1>()));
      for (const auto& con : ex.consumers()) {
        const Vector d1 = demand(con, p);
        const Vector d2 = demand(con, c * p);
        worst_homog = std::max(worst_homog, (d2 - d1).lpNorm<Eigen::Infinity>() /
                                                std::max(1.0, d1.lpNorm<Eigen::Infinity>()));
      }
    } catch (const std::exception& e) {
      eval_ok = false;
      out << "FAIL evaluation: " << e.what() << '\n';
    }
  }
  const bool walras_ok = eval_ok && worst_walras <= 1e-9;
  const bool homog_ok = eval_ok && worst_homog <= 1e-10;
  out << (walras_ok ? "PASS" : "FAIL") << " walras-law: max |p'xi|/(1+|xi|_1) = " << worst_walras
      << " over 10 price vectors\n";
  out << (homog_ok ? "PASS" : "FAIL") << " homogeneity: max relative change = " << worst_homog
      << " over 10 price vectors\n";
  all_ok = all_ok && walras_ok && homog_ok;

  int certified = 0;
  for (const auto& k : model.known_equilibria) {
    double r = std::numeric_limits<double>::infinity();
    try {
      r = equilibrium_residual(model, k.prices, k.activities);
    } catch (const std::exception&) {
    }
    const bool ok = r <= 2e-3;
    certified += ok ? 1 : 0;
    all_ok = all_ok && ok;
    out << (ok ? "PASS" : "FAIL") << " equilibrium " << k.label << ": ncp residual " << r << '\n';
  }
  out << (all_ok ? "PASS" : "FAIL") << " summary: " << certified << " of "
      << model.known_equilibria.size() << " known equilibria certified\n";
  return all_ok ? kExitOk : kExitInputError;
}

}  // namespace

void write_trace_csv(const TraceResult& trace, std::ostream& out) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  Index width = 0;
  if (!trace.path_log.empty()) width = trace.path_log.front().point.size() - 1;
  os << "step,lambda,residual,steplength";
  for (Index i = 1; i <= width; ++i) os << ",x" << i;
  os << '\n';
  for (const auto& rec : trace.path_log) {
    os << rec.step << ',' << rec.lambda << ',' << rec.residual << ',' << rec.steplength;
    for (Index i = 0; i < width; ++i) os << ',' << rec.point[i];
    os << '\n';
  }
  out << os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Economic equilibria by homotopy path following", "eqtrace"};
  app.require_subcommand(1);

  SolverFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Solve a model from one or more start points");
  add_solver_flags(solve, solve_flags);

  SolverFlags dump_flags;
  std::string dump_out;
  auto* dump = app.add_subcommand("trace-dump", "Solve and write the solution path as CSV");
  add_solver_flags(dump, dump_flags);
  dump->add_option("--out", dump_out, "CSV output path")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("model", validate_path, "JSON model file")->required();

  std::string export_builtin;
  std::string export_out;
  auto* exporter = app.add_subcommand("export", "Write a builtin model as a JSON model file");
  exporter->add_option("--builtin", export_builtin, "ex1, ex2, ex3 or ex4")->required();
  exporter->add_option("--out", export_out, "Output path")->required();

  std::vector<std::string> argv_storage{"eqtrace"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (solve->parsed()) return solve_command(solve_flags, solve_flags.csv_path, out, err);
  if (dump->parsed()) return solve_command(dump_flags, dump_out, out, err);
  if (validate->parsed()) return validate_command(validate_path, out, err);
  if (exporter->parsed()) {
    try {
      save_model_file(builtin_example(export_builtin), export_out);
    } catch (const std::exception& e) {
      err << "eqtrace: " << e.what() << '\n';
      return kExitInputError;
    }
    out << "wrote " << export_out << '\n';
    return kExitOk;
  }
  return kExitInputError;
}

}  // namespace eqtrace::cli
