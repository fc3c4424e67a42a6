#include "sublin/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <limits>
#include <new>
#include <ostream>
#include <sstream>

#include "sublin/error.hpp"
#include "sublin/gheat.hpp"
#include "sublin/independence.hpp"
#include "sublin/limits.hpp"
#include "sublin/model_io.hpp"
#include "sublin/phi.hpp"
#include "sublin/recursion.hpp"
#include "sublin/report.hpp"

namespace sublin::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct Common {
  bool exact = false;
  bool serial = false;
  std::string out_path;
  std::string json_path;
};

struct GridArgs {
  double dx = 0.01;
  double cfl = 0.4;
  double domain = 0;  // 0: automatic
  double T = 1.0;

  [[nodiscard]] GridConfig config(Exec exec) const {
    GridConfig g;
    g.dx = dx;
    g.cfl = cfl;
    if (domain > 0) g.domain = domain;
    g.T = T;
    g.exec = exec;
    return g;
  }
};

void add_grid_options(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--dx", g.dx, "spatial step of the PDE grid")->capture_default_str();
  cmd->add_option("--cfl", g.cfl, "dt = cfl dx^2 / sigma_hi^2, in (0, 1]")->capture_default_str();
  cmd->add_option("--domain", g.domain, "half-width L of the PDE domain (default automatic)");
  cmd->add_option("--T", g.T, "terminal time")->capture_default_str();
}

template <Scalar T>
std::string text_of(const T& v) {
  if constexpr (NumericTraits<T>::exact) {
    return to_string(v);
  } else {
    return format_double(v);
  }
}

template <Scalar T>
ojson json_of(const T& v) {
  if constexpr (NumericTraits<T>::exact) {
    return to_string(v);
  } else {
    return v;
  }
}

template <Scalar T>
ojson json_of(const std::vector<T>& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(json_of(x));
  return a;
}

std::vector<std::size_t> resolve_schedule(std::vector<std::size_t> schedule, std::size_t n_max) {
  if (!schedule.empty()) return schedule;
  if (n_max == 0) throw Error(ErrorKind::usage, "give --schedule or --n-max");
  return default_schedule(n_max);
}

void emit_table(const ExperimentTable& table, const Common& c, std::ostream& out) {
  for (const auto& r : table.rows()) {
    out << "n=" << r.n << " value=" << format_double(r.value);
    if (!r.exact_value.empty()) out << " (" << r.exact_value << ")";
    out << " prediction=" << format_double(r.prediction);
    if (r.lower != r.prediction) out << " lower=" << format_double(r.lower);
    out << " gap=" << format_double(r.gap) << "\n";
  }
  if (!c.out_path.empty()) write_text_file(c.out_path, table.to_csv());
  if (!c.json_path.empty()) write_text_file(c.json_path, table.to_json());
}

// CSV with a free header, for commands whose rows are not indexed by n.
void emit_records(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                  const ojson& doc, const Common& c) {
  if (!c.out_path.empty()) {
    std::ostringstream s;
    for (std::size_t i = 0; i < header.size(); ++i) s << (i ? "," : "") << header[i];
    s << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
      s << "\n";
    }
    write_text_file(c.out_path, s.str());
  }
  if (!c.json_path.empty()) write_text_file(c.json_path, doc.dump(2) + "\n");
}

Exec exec_of(const Common& c) { return c.serial ? Exec::serial : Exec::parallel; }

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string phi;
  std::size_t n = 1;
  std::string scale = "none";
  bool lower = false;
  std::string snap;
};

template <Scalar T>
int cmd_eval(const EvalArgs& a, const Common& c, std::ostream& out) {
  const auto phi = PhiExpression::parse(a.phi);
  const auto seq = parse_step_sequence<T>(read_text_file(a.config)).extended(a.n);
  T scale(1);
  if (a.scale == "n") {
    scale = T(static_cast<long>(a.n));
  } else if (a.scale == "sqrt-n") {
    scale = detail::sqrt_scale<T>(a.n);
  }
  std::optional<SnapOptions> snap;
  if (!a.snap.empty()) snap = SnapOptions{parse_rational(a.snap)};
  EvalOptions opts;
  opts.direction = a.lower ? Direction::lower : Direction::upper;
  opts.exec = exec_of(c);
  const auto result = sublinear_eval_sum<T>(seq, detail::scaled(phi, scale), opts, snap);

  out << "n=" << a.n << " " << (a.lower ? "lower" : "upper") << "=" << text_of(result.value)
      << " spacing=" << to_string(result.spacing) << " states=" << result.states << "\n";
  ojson doc;
  doc["command"] = "eval";
  doc["phi"] = phi.text();
  doc["n"] = a.n;
  doc["scale"] = a.scale;
  doc["direction"] = a.lower ? "lower" : "upper";
  doc["mode"] = NumericTraits<T>::exact ? "exact-rational" : "float64";
  doc["value"] = json_of(result.value);
  doc["spacing"] = to_string(result.spacing);
  doc["states"] = result.states;
  emit_records({"n", "value"}, {{std::to_string(a.n), format_double(to_double(result.value))}}, doc, c);
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::string phi;
  std::vector<std::size_t> schedule;
  std::size_t n_max = 0;
  bool truncate = false;
  GridArgs grid;
};

template <Scalar T>
int cmd_lln(const ExperimentArgs& a, const Common& c, std::ostream& out) {
  const auto phi = PhiExpression::parse(a.phi);
  const auto seq = parse_step_sequence<T>(read_text_file(a.config));
  EvalOptions opts;
  opts.exec = exec_of(c);
  emit_table(lln_experiment<T>(seq, phi, resolve_schedule(a.schedule, a.n_max), opts), c, out);
  return 0;
}

template <Scalar T>
int cmd_clt(const ExperimentArgs& a, const Common& c, std::ostream& out) {
  const auto phi = PhiExpression::parse(a.phi);
  const auto seq = parse_step_sequence<T>(read_text_file(a.config));
  CltOptions opts;
  opts.truncate_sqrt_n = a.truncate;
  opts.grid = a.grid.config(exec_of(c));
  opts.eval.exec = exec_of(c);
  emit_table(clt_experiment<T>(seq, phi, resolve_schedule(a.schedule, a.n_max), opts), c, out);
  return 0;
}

struct GnormalArgs {
  double sigma_lo = 1;
  double sigma_hi = 1;
  std::string phi;
  GridArgs grid;
};

int cmd_gnormal(const GnormalArgs& a, const Common& c, std::ostream& out) {
  if (c.exact) throw Error(ErrorKind::usage, "gnormal has no exact-rational mode");
  const auto phi = PhiExpression::parse(a.phi).as_function<double>();
  const GParams params(a.sigma_lo, a.sigma_hi);
  const GridConfig grid = a.grid.config(exec_of(c));
  const double upper = g_normal_expectation(phi, params, grid);
  const double lower = -g_normal_expectation([&](double x) { return -phi(x); }, params, grid);
  const double q_lo = gaussian_quadrature(phi, a.sigma_lo);
  const double q_hi = gaussian_quadrature(phi, a.sigma_hi);

  out << "upper=" << format_double(upper) << " lower=" << format_double(lower)
      << " quadrature(sigma_lo)=" << format_double(q_lo) << " quadrature(sigma_hi)=" << format_double(q_hi)
      << "\n";
  ojson doc;
  doc["command"] = "gnormal";
  doc["phi"] = a.phi;
  doc["sigma_lo"] = a.sigma_lo;
  doc["sigma_hi"] = a.sigma_hi;
  doc["dx"] = grid.dx;
  doc["cfl"] = grid.cfl;
  doc["upper"] = upper;
  doc["lower"] = lower;
  doc["quadrature_sigma_lo"] = q_lo;
  doc["quadrature_sigma_hi"] = q_hi;
  emit_records({"sigma_lo", "sigma_hi", "upper", "lower", "quadrature_sigma_lo", "quadrature_sigma_hi"},
               {{format_double(a.sigma_lo), format_double(a.sigma_hi), format_double(upper), format_double(lower),
                 format_double(q_lo), format_double(q_hi)}},
               doc, c);
  return 0;
}

struct CounterArgs {
  std::string which;
  std::vector<long> K;
  std::size_t n = 0;
  std::string M = "2";
  std::string floor;  // empty: unclamped 1 - |x|
};

template <Scalar T>
int cmd_counterexample(const CounterArgs& a, const Common& c, std::ostream& out) {
  EvalOptions opts;
  opts.exec = exec_of(c);
  std::vector<std::vector<std::string>> rows;
  ojson doc;
  doc["command"] = "counterexample";
  doc["which"] = a.which;
  doc["n"] = a.n;
  doc["mode"] = NumericTraits<T>::exact ? "exact-rational" : "float64";
  if (a.which == "lln") doc["M"] = a.M;
  std::optional<T> floor;
  if (a.which == "clt" && !a.floor.empty()) {
    floor = NumericTraits<T>::from_rational(parse_rational(a.floor));
    doc["floor"] = a.floor;
  }
  doc["rows"] = ojson::array();
  for (long K : a.K) {
    const auto r = a.which == "lln"
                       ? prop62_experiment<T>(K, a.n, NumericTraits<T>::from_rational(parse_rational(a.M)), opts)
                       : prop63_experiment<T>(K, a.n, floor, opts);
    out << "K=" << K << " n=" << a.n << " value=" << text_of(r.value) << " bracket=["
        << format_double(r.bracket_lo) << ", " << format_double(r.bracket_hi)
        << "] classical=" << format_double(r.classical);
    if (a.which == "clt") out << " c=" << format_double(r.constant);
    out << "\n";
    rows.push_back({std::to_string(K), std::to_string(a.n), format_double(to_double(r.value)),
                    format_double(r.bracket_lo), format_double(r.bracket_hi), format_double(r.classical)});
    ojson row;
    row["K"] = K;
    row["value"] = json_of(r.value);
    row["bracket_lo"] = r.bracket_lo;
    row["bracket_hi"] = r.bracket_hi;
    row["classical"] = r.classical;
    if (a.which == "clt") row["constant"] = r.constant;
    doc["rows"].push_back(std::move(row));
  }
  emit_records({"K", "n", "value", "bracket_lo", "bracket_hi", "classical"}, rows, doc, c);
  return 0;
}

struct IndependenceArgs {
  std::string config;
  std::string mode = "pseudo";
  std::size_t step = 0;
  std::vector<std::string> probes;
  std::size_t cell_cap = 10'000;
  std::size_t vertex_cap = 10'000;
};

template <Scalar T>
int cmd_independence(const IndependenceArgs& a, const Common& c, std::ostream& out) {
  const auto model = parse_joint_model<T>(read_text_file(a.config));
  const std::size_t step = a.step == 0 ? model.num_variables() : a.step;
  IndependenceReport<T> report;
  if (a.mode == "pseudo") {
    report = check_pseudo_independence(model, step);
  } else {
    PengOptions opts;
    opts.mode = a.mode == "peng-exact" ? PengMode::exact : PengMode::probe;
    opts.cell_cap = a.cell_cap;
    opts.vertex_cap = a.vertex_cap;
    std::vector<Probe<T>> probes;
    const std::vector<std::string> vars(model.names().begin(), model.names().begin() + static_cast<long>(step));
    for (const auto& text : a.probes) {
      auto e = PhiExpression::parse(text, vars);
      probes.push_back({text, [e](std::span<const T> x) { return e.template evaluate<T>(x); }});
    }
    report = check_peng_independence(model, step, opts, probes);
  }

  ojson doc;
  doc["command"] = "check-independence";
  doc["mode"] = a.mode;
  doc["step"] = step;
  doc["verdict"] = report.verdict;
  doc["definitive"] = report.definitive;
  doc["gap"] = json_of(report.gap);
  std::vector<std::vector<std::string>> rows;
  doc["probes"] = ojson::array();
  for (const auto& p : report.probes) {
    out << "probe " << p.name << " lhs=" << text_of(p.lhs) << " rhs=" << text_of(p.rhs) << "\n";
    doc["probes"].push_back({{"name", p.name}, {"lhs", json_of(p.lhs)}, {"rhs", json_of(p.rhs)}});
    rows.push_back({"\"" + p.name + "\"", format_double(to_double(p.lhs)), format_double(to_double(p.rhs))});
  }
  out << "verdict=" << (report.verdict ? "true" : "false")
      << (report.definitive ? "" : " (not refuted by probes)") << " gap=" << text_of(report.gap);
  if (report.witness) {
    const auto& w = *report.witness;
    ojson wj;
    wj["measure"] = w.measure;
    if (!w.history.empty()) wj["history"] = json_of(w.history);
    if (!w.direction.empty()) wj["direction"] = json_of(w.direction);
    if (!w.probe.empty()) wj["probe"] = w.probe;
    doc["witness"] = wj;
    out << " witness=" << wj.dump();
  }
  out << "\n";
  emit_records({"probe", "lhs", "rhs"}, rows, doc, c);
  return 0;
}

struct DiagnoseArgs {
  std::string config;
  long K = 0;
  std::size_t n_max = 10'000;
  std::vector<std::size_t> schedule;
};

template <Scalar T>
int cmd_diagnose(const DiagnoseArgs& a, const Common& c, std::ostream& out) {
  if (a.config.empty() == (a.K == 0)) throw Error(ErrorKind::usage, "give exactly one of --config and --K");
  const StepSequence<T> seq = a.K > 0 ? StepSequence<T>({counterexample_family<T>(a.K)})
                                      : parse_step_sequence<T>(read_text_file(a.config));
  const auto summary = moment_summary(seq, a.n_max, a.schedule);

  ojson doc;
  doc["command"] = "diagnose";
  doc["mu_bar"] = json_of(summary.mu_bar);
  doc["mu_lo"] = json_of(summary.mu_lo);
  doc["sigma2_bar"] = json_of(summary.sigma2_bar);
  doc["sigma2_lo"] = json_of(summary.sigma2_lo);
  doc["h1_decaying"] = summary.tail_abs_decaying;
  doc["h2_decaying"] = summary.tail_sq_decaying;
  doc["eq2_decaying"] = summary.eq2_decaying;
  doc["rows"] = ojson::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : summary.rows) {
    out << "n=" << r.n << " mean=[" << text_of(r.mean_lower) << ", " << text_of(r.mean_upper)
        << "] nV(|X|>=n)=" << text_of(r.tail_abs) << " nV(X^2>=n)=" << text_of(r.tail_sq)
        << " E[X^2 1{|X|<=n}]/n^2=" << text_of(r.eq2) << "\n";
    doc["rows"].push_back({{"n", r.n},
                           {"mean_upper", json_of(r.mean_upper)},
                           {"mean_lower", json_of(r.mean_lower)},
                           {"tail_abs", json_of(r.tail_abs)},
                           {"tail_sq", json_of(r.tail_sq)},
                           {"eq2", json_of(r.eq2)}});
    rows.push_back({std::to_string(r.n), format_double(to_double(r.mean_upper)),
                    format_double(to_double(r.mean_lower)), format_double(to_double(r.tail_abs)),
                    format_double(to_double(r.tail_sq)), format_double(to_double(r.eq2))});
  }
  out << "H1 " << (summary.tail_abs_decaying ? "holds" : "fails") << ", H2 "
      << (summary.tail_sq_decaying ? "holds" : "fails") << ", truncated second moment "
      << (summary.eq2_decaying ? "decays" : "does not decay") << " (sampled)\n";
  emit_records({"n", "mean_upper", "mean_lower", "tail_abs", "tail_sq", "eq2"}, rows, doc, c);
  return 0;
}

struct EnlargeArgs {
  std::string config;
  std::size_t cell_cap = 10'000;
  std::size_t vertex_cap = 10'000;
};

template <Scalar T>
int cmd_enlarge(const EnlargeArgs& a, const Common& c, std::ostream& out) {
  const auto model = parse_joint_model<T>(read_text_file(a.config));
  const auto vertices = enlarge_vertices(model, a.cell_cap, a.vertex_cap);
  out << "vertices=" << vertices.num_measures() << "\n";
  for (std::size_t i = 0; i < vertices.num_measures(); ++i) {
    out << "vertex " << i << ":";
    for (const auto& p : vertices.table(i)) out << " " << text_of(p);
    out << "\n";
  }
  const std::string doc = joint_model_to_json(vertices);
  if (!c.json_path.empty()) write_text_file(c.json_path, doc);
  if (!c.out_path.empty()) {
    std::ostringstream s;
    s << "vertex,cell,probability\n";
    for (std::size_t i = 0; i < vertices.num_measures(); ++i) {
      for (std::size_t j = 0; j < vertices.num_cells(); ++j) {
        s << i << "," << j << "," << format_double(to_double(vertices.table(i)[j])) << "\n";
      }
    }
    write_text_file(c.out_path, s.str());
  }
  return 0;
}

void apply_thread_cap(std::ostream& err) {
  const char* env = std::getenv("SUBLIN_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long t = std::strtol(env, &end, 10);
  if (*end != '\0' || t < 1) {
    err << "warning: ignoring SUBLIN_THREADS=" << env << "\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(t));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-model sublinear expectations: evaluation, independence checks and limit experiments"};
  app.name("sublin");
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_flag("--exact", common.exact, "exact rational arithmetic");
  app.add_flag("--serial", common.serial, "use the serial reference kernels");
  app.add_option("--out", common.out_path, "write the table as CSV");
  app.add_option("--json", common.json_path, "write the result as JSON");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "E[phi(S_n / scale)] by the backward recursion");
  c_eval->add_option("--config", eval.config, "model JSON")->required();
  c_eval->add_option("--phi", eval.phi, "test function of x")->required();
  c_eval->add_option("--n", eval.n, "number of summands")->check(CLI::PositiveNumber)->capture_default_str();
  c_eval->add_option("--scale", eval.scale, "divide S_n by 1, n or sqrt(n)")
      ->check(CLI::IsMember({"none", "n", "sqrt-n"}))
      ->capture_default_str();
  c_eval->add_flag("--lower", eval.lower, "lower expectation -E[-phi]");
  c_eval->add_option("--snap", eval.snap, "snap float atoms to this lattice spacing (p/q or decimal)");

  ExperimentArgs lln;
  auto* c_lln = app.add_subcommand("lln", "law of large numbers experiment E[phi(S_n / n)]");
  c_lln->add_option("--config", lln.config, "model JSON")->required();
  c_lln->add_option("--phi", lln.phi, "test function of x")->required();
  c_lln->add_option("--schedule", lln.schedule, "comma-separated n values")->delimiter(',');
  c_lln->add_option("--n-max", lln.n_max, "use 1, 2, 5, 10, ... up to n-max");

  ExperimentArgs clt;
  auto* c_clt = app.add_subcommand("clt", "central limit experiment E[phi(S_n / sqrt(n))]");
  c_clt->add_option("--config", clt.config, "model JSON")->required();
  c_clt->add_option("--phi", clt.phi, "test function of x")->required();
  c_clt->add_option("--schedule", clt.schedule, "comma-separated n values")->delimiter(',');
  c_clt->add_option("--n-max", clt.n_max, "use 1, 2, 5, 10, ... up to n-max");
  c_clt->add_flag("--truncate-sqrt-n", clt.truncate, "clamp atoms to [-sqrt(n), sqrt(n)]");
  add_grid_options(c_clt, clt.grid);

  GnormalArgs gn;
  auto* c_gn = app.add_subcommand("gnormal", "G-normal expectation by the G-heat equation");
  c_gn->add_option("--sigma-lo", gn.sigma_lo, "lower volatility")->required();
  c_gn->add_option("--sigma-hi", gn.sigma_hi, "upper volatility")->required();
  c_gn->add_option("--phi", gn.phi, "test function of x")->required();
  add_grid_options(c_gn, gn.grid);

  CounterArgs ce;
  auto* c_ce = app.add_subcommand("counterexample", "moment-condition counterexamples");
  c_ce->add_option("--which", ce.which, "lln or clt")->required()->check(CLI::IsMember({"lln", "clt"}));
  c_ce->add_option("--K", ce.K, "family size (comma-separated for several)")->required()->delimiter(',');
  c_ce->add_option("--n", ce.n, "number of summands")->required()->check(CLI::PositiveNumber);
  c_ce->add_option("--M", ce.M, "clamp level of phi for the LLN case")->capture_default_str();
  c_ce->add_option("--floor", ce.floor, "CLT case: use the bounded tent max(1-|x|, floor)");

  IndependenceArgs ind;
  auto* c_ind = app.add_subcommand("check-independence", "pseudo- or sequential independence of the last variable");
  c_ind->add_option("--config", ind.config, "joint model JSON")->required();
  c_ind->add_option("--mode", ind.mode, "pseudo, peng-probe or peng-exact")
      ->check(CLI::IsMember({"pseudo", "peng-probe", "peng-exact"}))
      ->capture_default_str();
  c_ind->add_option("--step", ind.step, "variable index n (1-based; default last)");
  c_ind->add_option("--probe", ind.probes, "probe expression in the variable names (repeatable)");
  c_ind->add_option("--cell-cap", ind.cell_cap, "largest grid for exact mode")->capture_default_str();
  c_ind->add_option("--vertex-cap", ind.vertex_cap, "largest vertex enumeration")->capture_default_str();

  DiagnoseArgs dg;
  auto* c_dg = app.add_subcommand("diagnose", "truncated means, tail products and second-moment table");
  c_dg->add_option("--config", dg.config, "model JSON");
  c_dg->add_option("--K", dg.K, "use the counterexample family of this size instead");
  c_dg->add_option("--n-max", dg.n_max, "largest n")->capture_default_str();
  c_dg->add_option("--schedule", dg.schedule, "comma-separated n values")->delimiter(',');

  EnlargeArgs en;
  auto* c_en = app.add_subcommand("enlarge", "vertices of the enlarged measure set");
  c_en->add_option("--config", en.config, "joint model JSON")->required();
  c_en->add_option("--cell-cap", en.cell_cap, "largest grid")->capture_default_str();
  c_en->add_option("--vertex-cap", en.vertex_cap, "largest vertex enumeration")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  apply_thread_cap(err);
  try {
    const bool x = common.exact;
    if (*c_eval) return x ? cmd_eval<Rational>(eval, common, out) : cmd_eval<double>(eval, common, out);
    if (*c_lln) return x ? cmd_lln<Rational>(lln, common, out) : cmd_lln<double>(lln, common, out);
    if (*c_clt) return x ? cmd_clt<Rational>(clt, common, out) : cmd_clt<double>(clt, common, out);
    if (*c_gn) return cmd_gnormal(gn, common, out);
    if (*c_ce) return x ? cmd_counterexample<Rational>(ce, common, out) : cmd_counterexample<double>(ce, common, out);
    if (*c_ind) return x ? cmd_independence<Rational>(ind, common, out) : cmd_independence<double>(ind, common, out);
    if (*c_dg) return x ? cmd_diagnose<Rational>(dg, common, out) : cmd_diagnose<double>(dg, common, out);
    if (*c_en) return x ? cmd_enlarge<Rational>(en, common, out) : cmd_enlarge<double>(en, common, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error (model_too_large): out of memory\n";
    return exit_code(ErrorKind::model_too_large);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::numerical_failure);
  }
  return 1;
}

}  // namespace sublin::cli
