#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "alp/approx.hpp"
#include "alp/convergence.hpp"
#include "alp/functionals.hpp"
#include "alp/gallery.hpp"
#include "alp/io.hpp"
#include "plot.hpp"

namespace alp::cli {

namespace {

struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string output;
  std::string csv;
  std::string plot;

  std::string space;
  std::string function;
  std::string sequence;
  std::string grid;
  std::string grid_csv;
  std::string input;
  std::vector<std::string> sets;

  double p = 1.0;
  double tol = 1e-6;
  Index n_max = 0;
  std::vector<double> deltas;
  double eps = 0.1;
  double h = 0.0;
  int k = 8;

  int trials = 1000;
  int identity_trials = 200;
  std::size_t cells = 16;
  std::vector<double> ps{1.0, 1.5, 2.0, 3.0};
  std::string suite = "all";

  std::string entry;
  std::vector<std::string> params;
  std::map<std::string, double> gallery_flags;
};

json estimate_json(const Estimate& e) { return {{"value", number_or_inf(e.value)}, {"error", e.error}}; }

json load(const std::string& path) {
  if (path.empty()) throw MissingInput("no input file given");
  if (!std::filesystem::exists(path)) throw MissingInput("input file '" + path + "' does not exist");
  return read_json_file(path);
}

void check_grid(const std::vector<double>& grid, const char* name) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0, std::string(name) + " values must be positive");
    if (i > 0) require(grid[i] < grid[i - 1], std::string(name) + " must be sorted descending");
  }
}

/// The function file may embed its space under "space" when --space is absent.
MeasurableFn load_function(const Options& o) {
  const json fj = load(o.function);
  SpacePtr space;
  if (!o.space.empty()) {
    space = parse_space(load(o.space));
  } else if (fj.contains("space")) {
    space = parse_space(fj.at("space"));
  } else {
    throw MissingInput("no space given: pass --space or embed \"space\" in the function file");
  }
  return parse_function(fj, space);
}

FnSequence load_sequence(const Options& o) {
  json sj = load(o.sequence);
  if (o.n_max > 0) sj["n_max"] = o.n_max;
  return parse_sequence(sj);
}

CheckOptions check_options(const Options& o) {
  require(o.tol > 0.0, "tolerance must be positive");
  CheckOptions c;
  c.tol = o.tol;
  if (!o.deltas.empty()) {
    check_grid(o.deltas, "--deltas");
    c.measure_deltas = o.deltas;
  }
  return c;
}

class Session {
 public:
  Session(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  void emit(const json& j) {
    if (o_.output.empty()) {
      out_ << j.dump(2) << '\n';
      return;
    }
    std::ofstream f(o_.output);
    require(static_cast<bool>(f), "cannot write '" + o_.output + "'");
    f << j.dump(2) << '\n';
  }

  void emit_text(const std::string& text) {
    if (o_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(o_.output);
    require(static_cast<bool>(f), "cannot write '" + o_.output + "'");
    f << text;
  }

  bool csv_format() const { return o_.format == "csv"; }

 private:
  const Options& o_;
  std::ostream& out_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  require(static_cast<bool>(f), "cannot write '" + path + "'");
  f << text;
}

/// Long-format trace table: mode,n,value.
std::string traces_csv(const json& modes) {
  std::ostringstream s;
  s << std::setprecision(17) << "mode,n,value\n";
  for (const auto& [name, m] : modes.items()) {
    Index n = 0;
    for (const json& v : m.at("trace")) {
      s << name << ',' << ++n << ',';
      if (v.is_string()) {
        s << v.get<std::string>();
      } else {
        s << v.get<double>();
      }
      s << '\n';
    }
  }
  return s.str();
}

std::string traces_svg(const json& modes, const std::string& title) {
  std::vector<Series> series;
  for (const auto& [name, m] : modes.items()) {
    Series s{name, {}};
    for (const json& v : m.at("trace")) s.values.push_back(v.is_string() ? kInf : v.get<double>());
    if (!s.values.empty()) series.push_back(std::move(s));
  }
  std::ostringstream svg;
  write_trace_svg(series, title, svg);
  return svg.str();
}

void export_traces(const Options& o, const json& modes, const std::string& title) {
  if (!o.csv.empty()) write_file(o.csv, traces_csv(modes));
  if (!o.plot.empty()) write_file(o.plot, traces_svg(modes, title));
}

// ------------------------------------------------------------- commands

int cmd_norm(const Options& o, Session& s) {
  const MeasurableFn f = load_function(o);
  json seminorms = json::array();
  for (const std::string& path : o.sets) {
    const MeasurableSet F = parse_set(load(path), f.space());
    seminorms.push_back({{"set", path}, {"measure", estimate_json(F.measure())},
                         {"alpha_seminorm", estimate_json(alpha_seminorm_on(f, o.p, F))}});
  }
  const Estimate lp = lp_norm(f, o.p);
  const Estimate alpha = alpha_norm(f, o.p);
  const double fr = frechet_mu(f);
  if (s.csv_format()) {
    std::ostringstream t;
    t << std::setprecision(17) << "quantity,value,error\n"
      << "lp," << lp.value << ',' << lp.error << '\n'
      << "alpha_p," << alpha.value << ',' << alpha.error << '\n'
      << "frechet_mu," << fr << ",0\n";
    for (const json& sn : seminorms) t << "seminorm:" << sn["set"].get<std::string>() << ',' << sn["alpha_seminorm"]["value"] << ',' << sn["alpha_seminorm"]["error"] << '\n';
    s.emit_text(t.str());
  } else {
    s.emit({{"p", o.p}, {"lp", estimate_json(lp)}, {"alpha_p", estimate_json(alpha)}, {"frechet_mu", fr},
            {"seminorms", seminorms}});
  }
  return kPass;
}

int cmd_member(const Options& o, Session& s) {
  const MeasurableFn f = load_function(o);
  std::vector<double> deltas = o.deltas.empty() ? default_member_deltas() : o.deltas;
  check_grid(deltas, "--deltas");
  const MembershipResult m = lambda_p_member(f, o.p, deltas);
  json witnesses = json::array();
  for (const MembershipWitness& w : m.witnesses) {
    witnesses.push_back({{"delta", w.delta},
                         {"set", to_json(w.set)},
                         {"set_measure", estimate_json(w.set_measure)},
                         {"complement_integral", estimate_json(w.complement_integral)}});
  }
  json modulus = json::array();
  for (const ModulusSample& x : ac_modulus(f, o.p, deltas).samples) {
    modulus.push_back({{"delta", x.delta}, {"omega", number_or_inf(x.omega)}, {"upper_bound_only", x.bound_not_value}});
  }
  json j{{"p", o.p},
         {"verdict", std::string(to_string(m.verdict))},
         {"reason", m.reason},
         {"lp_member", lp_member(f, o.p)},
         {"witnesses", witnesses},
         {"ac_modulus", modulus}};
  if (m.certificate_delta) j["certificate_delta"] = *m.certificate_delta;
  s.emit(j);
  return m.verdict == Membership::inconclusive ? kInconclusive : kPass;
}

bool all_inconclusive(const std::vector<ModeResult>& modes) {
  return std::all_of(modes.begin(), modes.end(), [](const ModeResult& m) { return m.verdict == Verdict::inconclusive; });
}

int cmd_classify(const Options& o, Session& s) {
  const FnSequence seq = load_sequence(o);
  const ConvergenceReport r = implication_matrix(seq, o.p, check_options(o), false);
  const json j = r.to_json();
  export_traces(o, j.at("modes"), seq.name());
  if (s.csv_format()) {
    s.emit_text(traces_csv(j.at("modes")));
  } else {
    s.emit(j);
  }
  if (!r.violations.empty()) return kViolation;
  return all_inconclusive(r.modes) ? kInconclusive : kPass;
}

int cmd_vitali(const std::string& variant, const Options& o, Session& s) {
  const FnSequence seq = load_sequence(o);
  const CheckOptions c = check_options(o);
  const VitaliReport r = variant == "classic" ? vitali_classic(seq, o.p, c)
                         : variant == "alpha" ? vitali_alpha(seq, o.p, c)
                                              : vitali_lambda(seq, o.p, c);
  json modes = json::object();
  modes[r.target.mode] = r.target.to_json();
  for (const ModeResult& leg : r.legs) modes[leg.mode] = leg.to_json();
  export_traces(o, modes, seq.name() + " (" + variant + ")");
  s.emit(r.to_json());
  return r.consistent ? kPass : kViolation;
}

int cmd_axioms(const Options& o, Session& s) {
  require(o.trials >= 1 && o.cells >= 1, "--trials and --cells must be positive");
  Rng rng(o.seed);
  json reports = json::array();
  bool ok = true;
  auto record = [&](const CheckReport& r, json extra) {
    json j = r.to_json();
    j.update(extra);
    reports.push_back(std::move(j));
    ok = ok && r.passed();
  };
  if (o.suite == "all" || o.suite == "fnorm") {
    for (double p : o.ps) {
      require(p >= 1.0, "exponents must be >= 1");
      record(fnorm_axioms_suite(o.cells, p, o.trials, rng), {{"p", p}, {"cells", o.cells}});
    }
  }
  if (o.suite == "all" || o.suite == "estimate") record(estimate_chain_suite(o.trials, rng), json::object());
  if (o.suite == "all" || o.suite == "variational") {
    record(variational_identity_suite(o.identity_trials, 10, rng), {{"max_cells", 10}});
  }
  require(!reports.empty(), "unknown suite '" + o.suite + "'");
  s.emit({{"seed", o.seed}, {"passed", ok}, {"reports", reports}});
  return ok ? kPass : kViolation;
}

int cmd_approx(const std::string& what, const Options& o, Session& s) {
  if (what == "mollify") {
    json header = load(o.grid);
    GridFn g{parse_grid_box(header), {}};
    if (!o.grid_csv.empty()) {
      if (!std::filesystem::exists(o.grid_csv)) throw MissingInput("grid file '" + o.grid_csv + "' does not exist");
      std::ifstream in(o.grid_csv);
      g = read_grid_csv(g.box, in);
    } else {
      g = parse_grid(header);
    }
    MollifyReport m;
    json j;
    if (o.h > 0.0) {
      m = mollify(g, o.p, o.h);
    } else {
      SmoothApproximation sa = smooth_approximation(g, o.p, o.eps);
      j["epsilon"] = o.eps;
      j["truncation_distance"] = estimate_json(sa.truncation.distance);
      j["distance"] = sa.distance;
      m = std::move(sa.smoothing);
    }
    j.update({{"grid", to_json(g.box)},
              {"h", m.h},
              {"alpha_distance", m.alpha_distance},
              {"lp_distance", m.lp_distance},
              {"tv_f", m.tv_f},
              {"tv_phi", m.tv_phi},
              {"support_within_h", m.support_within_h},
              {"max_difference_quotient", m.max_difference_quotient}});
    if (!o.csv.empty()) {
      std::ofstream f(o.csv);
      write_grid_csv(m.phi, f);
    }
    if (s.csv_format()) {
      std::ostringstream t;
      write_grid_csv(m.phi, t);
      s.emit_text(t.str());
    } else {
      s.emit(j);
    }
    return kPass;
  }

  const MeasurableFn f = load_function(o);
  if (what == "ladder") {
    const std::vector<MeasurableFn> ladder = simple_ladder(f, o.k);
    json steps = json::array();
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      json step{{"k", j + 1}, {"function", to_json(ladder[j])}};
      try {
        step["alpha_distance"] = estimate_json(alpha_norm(subtract(f, ladder[j]), o.p));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnsupportedFamilyCombination) throw;
        step["alpha_distance"] = nullptr;
        step["alpha_distance_note"] = e.what();
      }
      steps.push_back(std::move(step));
    }
    s.emit({{"p", o.p}, {"ladder", steps}});
    return kPass;
  }
  require(o.eps > 0.0, "--eps must be positive");
  if (what == "truncate") {
    const Truncation t = truncate_to_lp(f, o.p, o.eps);
    const bool ok = t.removed_measure.value + t.removed_measure.error < std::pow(o.eps, o.p) &&
                    t.distance.value + t.distance.error < o.eps && t.g_integral.finite();
    s.emit({{"p", o.p},
            {"epsilon", o.eps},
            {"g", to_json(t.g)},
            {"removed", to_json(t.removed)},
            {"removed_measure", estimate_json(t.removed_measure)},
            {"distance", estimate_json(t.distance)},
            {"g_integral", estimate_json(t.g_integral)},
            {"certificate_holds", ok}});
    return ok ? kPass : kViolation;
  }
  const NetElement n = rational_simple_net(f, o.p, o.eps);
  const bool ok = n.distance.value + n.distance.error < 2.0 * o.eps;
  s.emit({{"p", o.p},
          {"epsilon", o.eps},
          {"dyadic_level", n.dyadic_level},
          {"s", to_json(n.s)},
          {"distance", estimate_json(n.distance)},
          {"within_two_epsilon", ok}});
  return ok ? kPass : kViolation;
}

int cmd_gallery_list(Session& s) {
  json j = json::array();
  for (const GalleryInfo& e : list_entries()) j.push_back(e.to_json());
  s.emit(j);
  return kPass;
}

int cmd_gallery_run(const Options& o, bool seed_given, Session& s) {
  GalleryParams params;
  for (const auto& [k, v] : o.gallery_flags) params[k] = v;
  for (const std::string& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::Parse, "--param expects key=value, got '" + kv + "'");
    std::size_t used = 0;
    double v = 0.0;
    const std::string value = kv.substr(eq + 1);
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) fail(ErrorKind::Parse, "--param value '" + value + "' is not a number");
    params[kv.substr(0, eq)] = v;
  }
  if (seed_given && o.entry == "finite_collapse") params["seed"] = static_cast<double>(o.seed);
  const GalleryReport r = run_entry(o.entry, params);
  s.emit(r.to_json());
  return r.passed() ? kPass : kViolation;
}

int cmd_report(const Options& o, Session& s) {
  const json report = load(o.input);
  const auto bad = revalidate_report(report);
  json v = json::array();
  for (const auto& [a, b] : bad) v.push_back({a, b});
  export_traces(o, report.at("modes"), report.value("sequence", std::string("report")));
  if (s.csv_format()) {
    s.emit_text(traces_csv(report.at("modes")));
  } else {
    s.emit({{"sequence", report.value("sequence", std::string())}, {"valid", bad.empty()}, {"violations", v}});
  }
  return bad.empty() ? kPass : kViolation;
}

// ------------------------------------------------------------- wiring

void add_output_options(CLI::App* app, Options& o) {
  app->add_option("--csv", o.csv, "Also write traces or grid values as CSV to this path");
  app->add_option("--plot", o.plot, "Also write an SVG trace plot to this path");
}

void add_function_options(CLI::App* app, Options& o) {
  app->add_option("--space", o.space, "Space JSON file");
  app->add_option("--function,-f", o.function, "Function JSON file")->required();
  app->add_option("--p", o.p, "Exponent p >= 1")->check(CLI::Range(1.0, 1e6));
}

void add_sequence_options(CLI::App* app, Options& o) {
  app->add_option("--sequence,-s", o.sequence, "Sequence JSON file")->required();
  app->add_option("--p", o.p, "Exponent p >= 1")->check(CLI::Range(1.0, 1e6));
  app->add_option("--tol", o.tol, "Trace tolerance");
  app->add_option("--n-max", o.n_max, "Override the number of terms of a named family");
  app->add_option("--deltas", o.deltas, "Descending delta grid for the in-measure checks")->delimiter(',');
  add_output_options(app, o);
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ImplicationViolation:
    case ErrorKind::DominationViolated:
    case ErrorKind::NotMember:
      return kViolation;
    case ErrorKind::UnsupportedFamilyCombination:
    case ErrorKind::ToleranceNotReached:
    case ErrorKind::BruteForceTooLarge:
    case ErrorKind::GridTooCoarse:
      return kUnsupported;
    case ErrorKind::MissingLimit:
      return kMissingInput;
    case ErrorKind::InvalidArgument:
    case ErrorKind::Parse:
    case ErrorKind::InfiniteMeasureSet:
    case ErrorKind::UnknownEntry:
    case ErrorKind::ParamOutOfDomain:
      return kParseError;
  }
  return kParseError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::function<int(Session&)> action;

  CLI::App app{"Numerical laboratory for the spaces of functions almost in L_p", "alp"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Seed for every random draw");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output,-o", o.output, "Write the main output here instead of stdout");

  auto* norm = app.add_subcommand("norm", "L_p norm, alpha_p norm, Frechet functional and seminorms");
  add_function_options(norm, o);
  norm->add_option("--set", o.sets, "Set JSON file for an alpha_p seminorm (repeatable)");
  norm->callback([&] { action = [&](Session& s) { return cmd_norm(o, s); }; });

  auto* member = app.add_subcommand("member", "Lambda_p and L_p membership with witnesses");
  add_function_options(member, o);
  member->add_option("--deltas", o.deltas, "Descending delta grid")->delimiter(',');
  member->callback([&] { action = [&](Session& s) { return cmd_member(o, s); }; });

  auto* classify = app.add_subcommand("classify", "Convergence-mode matrix of a sequence");
  add_sequence_options(classify, o);
  classify->callback([&] { action = [&](Session& s) { return cmd_classify(o, s); }; });

  auto* vitali = app.add_subcommand("vitali", "Vitali-type decompositions");
  vitali->require_subcommand(1);
  for (const char* variant : {"classic", "alpha", "lambda"}) {
    auto* v = vitali->add_subcommand(variant, std::string(variant) + " variant");
    add_sequence_options(v, o);
    const std::string name = variant;
    v->callback([&, name] { action = [&, name](Session& s) { return cmd_vitali(name, o, s); }; });
  }

  auto* axioms = app.add_subcommand("axioms", "Randomized F-norm axiom, estimate-chain and variational suites");
  axioms->add_option("--trials", o.trials, "Trials per exponent (and for the estimate chain)");
  axioms->add_option("--identity-trials", o.identity_trials, "Trials of the variational identity");
  axioms->add_option("--cells", o.cells, "Cells per random space");
  axioms->add_option("--ps", o.ps, "Exponents")->delimiter(',');
  axioms->add_option("--suite", o.suite, "Suite to run")->check(CLI::IsMember({"all", "fnorm", "estimate", "variational"}));
  axioms->callback([&] { action = [&](Session& s) { return cmd_axioms(o, s); }; });

  auto* approx = app.add_subcommand("approx", "Constructive approximation");
  approx->require_subcommand(1);
  for (const char* what : {"ladder", "truncate", "net"}) {
    auto* a = approx->add_subcommand(what, std::string(what) + " approximation");
    add_function_options(a, o);
    a->add_option("--eps", o.eps, "Target accuracy");
    a->add_option("--k", o.k, "Number of ladder steps")->check(CLI::Range(1, 64));
    const std::string name = what;
    a->callback([&, name] { action = [&, name](Session& s) { return cmd_approx(name, o, s); }; });
  }
  auto* mollify_cmd = approx->add_subcommand("mollify", "Grid mollification");
  mollify_cmd->set_help_flag("--help", "Print this help message and exit");
  mollify_cmd->add_option("--grid,-g", o.grid, "Grid JSON header (with inline values unless --values is given)")
      ->required();
  mollify_cmd->add_option("--values", o.grid_csv, "Row-major CSV grid values");
  mollify_cmd->add_option("--p", o.p, "Exponent p >= 1")->check(CLI::Range(1.0, 1e6));
  mollify_cmd->add_option("--h", o.h, "Kernel radius; when absent it is chosen from --eps");
  mollify_cmd->add_option("--eps", o.eps, "Target accuracy for the automatic radius");
  add_output_options(mollify_cmd, o);
  mollify_cmd->callback([&] { action = [&](Session& s) { return cmd_approx("mollify", o, s); }; });

  auto* gallery = app.add_subcommand("gallery", "Named closed-form examples");
  gallery->require_subcommand(1);
  auto* glist = gallery->add_subcommand("list", "Catalog of entries");
  glist->callback([&] { action = [&](Session& s) { return cmd_gallery_list(s); }; });
  auto* grun = gallery->add_subcommand("run", "Run one entry");
  grun->add_option("name", o.entry, "Entry name")->required();
  grun->add_option("--param", o.params, "Entry parameter key=value (repeatable)");
  std::map<std::string, std::optional<double>> flags;
  for (const char* key : {"p", "eps", "R", "d", "n", "m", "trials", "cells"}) {
    grun->add_option(std::string("--") + key, flags[key], std::string("Shorthand for --param ") + key + "=...");
  }
  CLI::Option* seed_opt = app.get_option("--seed");
  grun->callback([&] {
    for (const auto& [k, v] : flags) {
      if (v) o.gallery_flags[k] = *v;
    }
    action = [&](Session& s) { return cmd_gallery_run(o, seed_opt->count() > 0, s); };
  });

  auto* report = app.add_subcommand("report", "Re-validate a classify report and export traces");
  report->add_option("--input,-i", o.input, "Report JSON file")->required();
  add_output_options(report, o);
  report->callback([&] { action = [&](Session& s) { return cmd_report(o, s); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::RequiredError& e) {
    err << "error: " << e.what() << '\n';
    return app.get_subcommands().empty() && !args.empty() ? kParseError : kMissingInput;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }

  Session session(o, out);
  try {
    return action(session);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kParseError;
  }
}

}  // namespace alp::cli
