#include "cli_app.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lightcone/bound.hpp"
#include "lightcone/decomposition.hpp"
#include "lightcone/dynamics.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/lattice.hpp"
#include "lightcone/report.hpp"
#include "lightcone/sequences.hpp"

namespace lightcone::cli {

namespace {

using nlohmann::json;
using report::Cell;
using report::Table;

const std::vector<std::string> kCommands = {"bound",     "curve",    "decompose", "thresholds",
                                            "enumerate", "simulate", "compare"};

struct Common {
  std::string config;
  std::string out = "-";
  std::string format = "csv";
  std::size_t dense_cap = kDefaultDenseCap;
  std::uint64_t budget = kDefaultEnumerationBudget;
};

struct BoundOpts {
  double alpha = 0.0;
  double h = 1.0;
  double delta = 0.5;
  std::string variant = "general";
  double K = 1.0;
  int r_min = 2;
  int r_max = 64;
  int r = 0;
  double t_max = 0.0;
  int samples = 101;

  BoundParams params() const {
    BoundParams p;
    p.alpha = alpha;
    p.h = h;
    p.delta = delta;
    p.variant = variant == "frustrated" ? NormVariant::frustrated(K) : NormVariant::general();
    return p;
  }
};

struct EnumOpts {
  int R = 0;
  int max_len = 0;
  double alpha_prime = 0.0;
  std::string check = "coverage";
  int q = 0;
  std::string rule = "midpoint";
  int threshold_scale = 1;
};

struct SimOpts {
  std::string family = "ising_lr";
  std::string families = "ising_lr,random_sign_xx";
  int n = 8;
  double alpha = 0.0;
  std::string alphas;
  double h = 1.0;
  double onsite_x = 1.0;
  double onsite_z = 0.5;
  std::uint64_t seed = 0;
  double delta = 0.5;
  std::string r_list;
  double t_max = 10.0;
  double dt = 0.05;
  double tol = 1e-4;
  std::string a_basis = "XYZ";
  std::string b_basis = "XYZ";
  std::string emit_curve;
  int curve_r = 0;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split_list(text)) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(s));
    } else {
      const int lo = std::stoi(s.substr(0, dots));
      const int hi = std::stoi(s.substr(dots + 2));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  return out;
}

std::vector<Pauli> parse_basis(const std::string& text) {
  std::vector<Pauli> out;
  for (char c : text) out.push_back(pauli_from_char(c));
  return out;
}

const CLI::Validator kPowerOfTwo(
    [](std::string& s) -> std::string {
      const long v = std::stol(s);
      if (v < 2 || (v & (v - 1)) != 0) return "must be a power of two >= 2";
      return {};
    },
    "POW2");

const CLI::Validator kIntList(
    [](std::string& s) -> std::string {
      try {
        parse_int_list(s);
      } catch (const std::exception&) {
        return "must be a comma list of integers or ranges a..b";
      }
      return {};
    },
    "LIST");

const CLI::Validator kBasis(
    [](std::string& s) -> std::string {
      if (s.empty()) return "must name at least one of X, Y, Z";
      for (char c : s)
        if (c != 'X' && c != 'Y' && c != 'Z') return "may only contain X, Y, Z";
      return {};
    },
    "XYZ");

json resolved_config(const CLI::App& app, const CLI::App& sub) {
  json cfg = json::object();
  auto collect = [&](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      const auto& names = o->get_lnames();
      if (names.empty() || names.front() == "help" || names.front() == "version" ||
          names.front() == "config")
        continue;
      std::string value;
      if (o->count() > 0) {
        const auto& res = o->results();
        value = res.empty() ? "true" : res.back();
      } else {
        value = o->get_default_str();
      }
      cfg[names.front()] = value;
    }
  };
  collect(app);
  collect(sub);
  return cfg;
}

json meta(const std::string& command, const json& config) {
  return {{"tool", "lightcone"}, {"version", kVersion}, {"command", command}, {"config", config}};
}

void emit_table(const Table& t, const Common& c, const json& m, std::ostream& out, std::ostream& err) {
  const auto format = report::format_from_string(c.format);
  report::write_text(c.out, report::render(t, format), out);
  const std::string m_text = m.dump(2) + "\n";
  if (c.out == "-")
    err << m.dump() << "\n";
  else
    report::write_text(c.out + ".meta.json", m_text, out);
}

void emit_document(json doc, const Common& c, const json& m, std::ostream& out) {
  doc["meta"] = m;
  report::write_text(c.out, doc.dump(2) + "\n", out);
}

Table bound_rows(const BoundOpts& o) {
  Table t{{"r", "R", "regime", "b", "c1", "c2", "ts_bound"}, {}};
  for (const auto& row : bound_table(o.params(), o.r_min, o.r_max))
    t.add_row({Cell{std::int64_t{row.r}}, Cell{std::int64_t{row.R}}, Cell{to_string(row.regime)},
               Cell{row.b}, Cell{row.c1}, Cell{row.c2}, Cell{row.ts_bound}});
  return t;
}

Table curve_rows(const BoundOpts& o) {
  if (o.samples < 2) throw ArgumentError("--samples must be at least 2");
  const BoundParams p = o.params();
  const CaseConstants cc = case_constants(p);
  const double validity = effective_distance(quantized_distance(o.r), cc) / cc.c1;
  const double t_max = o.t_max > 0.0 ? o.t_max : validity;
  std::vector<double> times;
  for (int k = 0; k < o.samples; ++k) times.push_back(t_max * k / (o.samples - 1));
  Table t{{"t", "bound"}, {}};
  for (const auto& [time, value] : bound_curve(o.r, p, times).samples) t.add_row({Cell{time}, Cell{value}});
  return t;
}

json thresholds_doc(double alpha_prime, int R) {
  const Thresholds th = long_thresholds(alpha_prime, R);
  return {{"alpha_prime", th.alpha_prime}, {"R", th.R},         {"n_star", th.n_star},
          {"N", th.N},                     {"M", th.M},         {"q_star", th.q_star},
          {"slack_sum", th.slack_sum()},   {"slack_ok", 2 * th.slack_sum() < th.R}};
}

json enumerate_doc(const EnumOpts& o, const Common& c) {
  Thresholds th = long_thresholds(o.alpha_prime, o.R);
  if (o.threshold_scale != 1)
    for (int& n : th.N) n *= o.threshold_scale;

  if (o.check == "coverage") return to_json(verify_coverage(th, o.max_len, c.budget));

  if (o.check == "resummation") {
    const FillerRule rule = filler_rule_from_string(o.rule);
    std::vector<int> scales;
    if (o.q > 0) scales.push_back(o.q);
    else
      for (int q = 1; q <= th.n_star; ++q) scales.push_back(q);
    json reports = json::array();
    json counterexamples = json::array();
    std::uint64_t checked = 0;
    bool ok = true;
    for (int q : scales) {
      const auto r = verify_resummation(th, q, o.max_len, rule, c.budget);
      checked += r.lhs_size;
      ok = ok && r.ok();
      for (const auto& [kind, list] : {std::pair{"missing", &r.missing_witnesses},
                                       std::pair{"double_counted", &r.double_witnesses},
                                       std::pair{"extra", &r.extra_witnesses}})
        for (const auto& s : *list)
          counterexamples.push_back({{"q", q}, {"kind", kind}, {"sequence", to_json(s)}});
      reports.push_back(to_json(r));
    }
    return {{"check", "resummation"}, {"R", o.R}, {"rule", o.rule}, {"ok", ok},
            {"checked", checked},     {"counterexamples", counterexamples}, {"reports", reports}};
  }

  // counts: closed forms against enumeration over the label alphabet.
  json counterexamples = json::array();
  std::uint64_t checked = 0;
  for (int q = 1; q <= th.n_star; ++q)
    for (int N = 0; N <= 3; ++N) {
      const auto exact = count_irreducible(o.R, q, N, CountMode::exact);
      const auto closed = count_irreducible(o.R, q, N, CountMode::closed_form);
      const auto walked = enumerate_irreducible(o.R, q, N);
      ++checked;
      if (exact != walked || closed < exact)
        counterexamples.push_back({{"q", q}, {"N", N}, {"exact", exact}, {"closed_form", closed}, {"enumerated", walked}});
    }
  for (int q1 = 1; q1 <= th.n_star; ++q1)
    for (int q2 = q1 + 1; q2 <= th.n_star; ++q2) {
      const std::vector<int> Z{q1, q2};
      const auto exact = count_irreducible_z(o.R, Z, th, CountMode::exact);
      const auto closed = count_irreducible_z(o.R, Z, th, CountMode::closed_form);
      const auto walked = enumerate_irreducible_z(o.R, {{q1, th.N_of(q1)}, {q2, th.N_of(q2)}});
      ++checked;
      if (exact != walked || closed < exact)
        counterexamples.push_back({{"Z", Z}, {"exact", exact}, {"closed_form", closed}, {"enumerated", walked}});
    }
  return {{"check", "counts"}, {"R", o.R}, {"N", th.N}, {"checked", checked}, {"counterexamples", counterexamples}};
}

ModelSpec model_spec(const SimOpts& o, const std::string& family, double alpha) {
  ModelSpec s;
  s.family = model_family_from_string(family);
  s.n_sites = o.n;
  s.alpha = alpha;
  s.h = o.h;
  s.onsite_x = o.onsite_x;
  s.onsite_z = o.onsite_z;
  s.seed = o.seed;
  s.validate();
  return s;
}

std::vector<int> r_values(const SimOpts& o) {
  if (!o.r_list.empty()) return parse_int_list(o.r_list);
  std::vector<int> rs;
  for (int r = 1; r < o.n; ++r) rs.push_back(r);
  return rs;
}

Table record_rows(const std::vector<LightConeRecord>& records) {
  Table t{{"model", "alpha", "n", "r", "delta", "ts_empirical", "ts_bound"}, {}};
  for (const auto& rec : records)
    t.add_row({Cell{rec.model}, Cell{rec.alpha}, Cell{std::int64_t{rec.n_sites}}, Cell{std::int64_t{rec.r}},
               Cell{rec.delta}, Cell{rec.ts_empirical}, Cell{rec.ts_bound}});
  return t;
}

SweepOptions sweep_options(const SimOpts& o, const Common& c) {
  SweepOptions s;
  s.A_basis = parse_basis(o.a_basis);
  s.B_basis = parse_basis(o.b_basis);
  s.refine_tolerance = o.tol;
  s.dense_cap = c.dense_cap;
  return s;
}

void write_curve(const SimOpts& o, const Common& c, const ModelSpec& spec, const std::vector<int>& rs,
                 const std::vector<double>& grid) {
  const int r = o.curve_r > 0 ? o.curve_r : rs.back();
  const CouplingSet cs = build_model(spec);
  const LightConeProbe probe(cs, 0, parse_basis(o.a_basis), parse_basis(o.b_basis), c.dense_cap);
  const auto prof = probe.profile(grid, {r});
  BoundParams p;
  p.alpha = spec.alpha;
  p.h = spec.h;
  p.delta = o.delta;
  Table t{{"t", "C(t)", "bound(t)"}, {}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double bound = r >= 2 ? commutator_bound_curve(r, grid[k], p).value : 2.0;
    t.add_row({Cell{grid[k]}, Cell{prof.values[0][k]}, Cell{bound}});
  }
  report::emit_report(t, report::Format::csv, o.emit_curve);
}

void add_bound_flags(CLI::App* sub, BoundOpts& o) {
  sub->add_option("--alpha", o.alpha, "Power-law exponent alpha (> 2)")->required();
  sub->add_option("--h", o.h, "Coupling scale h")->check(CLI::PositiveNumber);
  sub->add_option("--delta", o.delta, "Scrambling threshold delta in (0, 2)")->check(CLI::Range(0.0, 2.0));
  sub->add_option("--variant", o.variant, "Block norm variant")->check(CLI::IsMember({"general", "frustrated"}));
  sub->add_option("--K", o.K, "Frustration constant for the frustrated variant")->check(CLI::Range(0.0, 1.0));
}

void add_model_flags(CLI::App* sub, SimOpts& o) {
  sub->add_option("--n", o.n, "Chain length")->check(CLI::Range(2, 63));
  sub->add_option("--h", o.h, "Coupling scale h")->check(CLI::PositiveNumber);
  sub->add_option("--onsite-x", o.onsite_x, "On-site X field");
  sub->add_option("--onsite-z", o.onsite_z, "On-site Z field");
  sub->add_option("--seed", o.seed, "Seed for random_sign_xx");
  sub->add_option("--delta", o.delta, "Scrambling threshold delta in (0, 2)")->check(CLI::Range(0.0, 2.0));
  sub->add_option("--r-list", o.r_list, "Distances, e.g. 3,4,5 or 3..9 (default 1..n-1)")->check(kIntList);
  sub->add_option("--t-max", o.t_max, "End of the time grid")->check(CLI::PositiveNumber);
  sub->add_option("--dt", o.dt, "Time grid step")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "Bisection tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--a-basis", o.a_basis, "Pauli letters for A")->check(kBasis);
  sub->add_option("--b-basis", o.b_basis, "Pauli letters for B")->check(kBasis);
}

void apply_thread_cap(std::ostream& err) {
  const char* env = std::getenv("LIGHTCONE_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    err << "ignoring LIGHTCONE_THREADS='" << env << "'\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ArgumentError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ArgumentError("config file must hold a JSON object");

  std::vector<std::string> rest = args;
  std::string command;
  auto it = std::find_first_of(rest.begin(), rest.end(), kCommands.begin(), kCommands.end());
  if (it != rest.end()) {
    command = *it;
    rest.erase(it);
  } else if (doc.contains("command")) {
    command = doc.at("command").get<std::string>();
  }

  std::vector<std::string> flags;
  for (const auto& [key, value] : doc.items()) {
    if (key == "command" || key == "config") continue;
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_array()) {
      for (const auto& v : value) {
        if (!text.empty()) text += ",";
        text += v.is_string() ? v.get<std::string>() : v.dump();
      }
    } else text = value.dump();
    flags.push_back("--" + key);
    flags.push_back(text);
  }

  std::vector<std::string> out;
  if (!command.empty()) out.push_back(command);
  out.insert(out.end(), flags.begin(), flags.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lieb-Robinson scrambling bounds and exact light-cone checks for power-law spin chains",
               "lightcone"};
  app.set_version_flag("--version", std::string("lightcone ") + kVersion);
  // --h is the coupling scale, so help keeps only its long form.
  app.set_help_flag("--help", "Print this help message and exit");
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Common common;
  app.add_option("--config", common.config, "JSON file with flag values (command-line flags win)");
  app.add_option("--out", common.out, "Output path, '-' for stdout");
  app.add_option("--format", common.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--dense-cap", common.dense_cap, "Largest chain for dense matrices")->check(CLI::Range(1, 14));
  app.add_option("--budget", common.budget, "Enumeration budget (sequences)")->check(CLI::PositiveNumber);

  BoundOpts bound_opts;
  auto* bound = app.add_subcommand("bound", "Scrambling-time bound table over a range of distances");
  add_bound_flags(bound, bound_opts);
  bound->add_option("--r-min", bound_opts.r_min, "Smallest distance")->check(CLI::Range(2, 1 << 30));
  bound->add_option("--r-max", bound_opts.r_max, "Largest distance")->check(CLI::Range(2, 1 << 30));

  BoundOpts curve_opts;
  auto* curve = app.add_subcommand("curve", "Commutator bound as a function of time for one distance");
  add_bound_flags(curve, curve_opts);
  curve->add_option("--r", curve_opts.r, "Distance")->required()->check(CLI::Range(2, 1 << 30));
  curve->add_option("--t-max", curve_opts.t_max, "End time (default: validity time)")->check(CLI::NonNegativeNumber);
  curve->add_option("--samples", curve_opts.samples, "Number of time samples")->check(CLI::Range(2, 1000000));

  int decompose_R = 0;
  auto* decompose = app.add_subcommand("decompose", "Dyadic block decomposition of a window");
  decompose->add_option("--R", decompose_R, "Window size")->required()->check(kPowerOfTwo);

  double th_alpha_prime = 0.0;
  int th_R = 0;
  auto* thresholds = app.add_subcommand("thresholds", "Long-sequence thresholds N_q");
  thresholds->add_option("--alpha-prime", th_alpha_prime, "alpha' (> 1)")->required();
  thresholds->add_option("--R", th_R, "Window size")->required()->check(kPowerOfTwo);

  EnumOpts enum_opts;
  auto* enumerate = app.add_subcommand("enumerate", "Exhaustive checks over block sequences");
  enumerate->add_option("--R", enum_opts.R, "Window size")->required()->check(kPowerOfTwo);
  enumerate->add_option("--max-len", enum_opts.max_len, "Longest sequence")->required()->check(CLI::Range(0, 12));
  enumerate->add_option("--alpha-prime", enum_opts.alpha_prime, "alpha' (> 1)")->required();
  enumerate->add_option("--check", enum_opts.check, "What to verify")
      ->check(CLI::IsMember({"coverage", "resummation", "counts"}));
  enumerate->add_option("--q", enum_opts.q, "Scale for the resummation check (0: all)")->check(CLI::Range(0, 30));
  enumerate->add_option("--rule", enum_opts.rule, "Filler rule for the resummation check")
      ->check(CLI::IsMember({"midpoint", "unrestricted", "record_preserving"}));
  enumerate->add_option("--threshold-scale", enum_opts.threshold_scale, "Multiply every N_q (control runs)")
      ->check(CLI::Range(1, 64));

  SimOpts sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Empirical scrambling times of one model by exact dynamics");
  simulate->add_option("--family", sim_opts.family, "Model family")
      ->check(CLI::IsMember({"ising_lr", "xx_lr", "random_sign_xx"}));
  simulate->add_option("--alpha", sim_opts.alpha, "Power-law exponent alpha (> 2)")->required();
  add_model_flags(simulate, sim_opts);
  simulate->add_option("--emit-curve", sim_opts.emit_curve, "Also write t,C(t),bound(t) CSV here");
  simulate->add_option("--curve-r", sim_opts.curve_r, "Distance for --emit-curve (default: largest)");

  SimOpts cmp_opts;
  auto* compare = app.add_subcommand("compare", "Empirical vs rigorous scrambling times across models");
  compare->add_option("--families", cmp_opts.families, "Comma list of model families");
  compare->add_option("--alphas", cmp_opts.alphas, "Comma list of exponents")->required();
  add_model_flags(compare, cmp_opts);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  apply_thread_cap(err);
  const CLI::App* sub = app.get_subcommands().front();
  const json m = meta(sub->get_name(), resolved_config(app, *sub));

  try {
    if (sub == bound) {
      if (bound_opts.r_max < bound_opts.r_min) throw ArgumentError("--r-max must be >= --r-min");
      emit_table(bound_rows(bound_opts), common, m, out, err);
    } else if (sub == curve) {
      emit_table(curve_rows(curve_opts), common, m, out, err);
    } else if (sub == decompose) {
      emit_document(to_json(decompose_window(decompose_R)), common, m, out);
    } else if (sub == thresholds) {
      emit_document(thresholds_doc(th_alpha_prime, th_R), common, m, out);
    } else if (sub == enumerate) {
      emit_document(enumerate_doc(enum_opts, common), common, m, out);
    } else if (sub == simulate) {
      const ModelSpec spec = model_spec(sim_opts, sim_opts.family, sim_opts.alpha);
      const auto rs = r_values(sim_opts);
      const auto grid = uniform_grid(sim_opts.t_max, sim_opts.dt);
      const auto records = lightcone_sweep({spec}, rs, sim_opts.delta, grid, sweep_options(sim_opts, common));
      emit_table(record_rows(records), common, m, out, err);
      if (!sim_opts.emit_curve.empty() && !rs.empty()) write_curve(sim_opts, common, spec, rs, grid);
    } else if (sub == compare) {
      std::vector<ModelSpec> specs;
      for (const auto& fam : split_list(cmp_opts.families))
        for (const auto& a : split_list(cmp_opts.alphas)) specs.push_back(model_spec(cmp_opts, fam, std::stod(a)));
      const auto grid = uniform_grid(cmp_opts.t_max, cmp_opts.dt);
      const auto records =
          lightcone_sweep(specs, r_values(cmp_opts), cmp_opts.delta, grid, sweep_options(cmp_opts, common));
      emit_table(record_rows(records), common, m, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lightcone::cli
