#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmcomp/mmcomp.hpp"

using namespace mmcomp;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 1;

/// Bad flags, unwritable outputs and other input problems; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<long> paths;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<long> euler_steps;
  std::optional<long> omega_steps;
  std::optional<double> confidence;
  bool untruncated = false;
};

unsigned g_threads = 0;

RunConfig load(const CommonFlags& f) {
  RunConfig c = parse_config(f.config);
  std::vector<std::string> errs;
  if (f.paths) {
    if (*f.paths < 1) errs.push_back("--paths: must be >= 1");
    c.run.paths = *f.paths;
  }
  if (f.steps) {
    if (*f.steps < 1) errs.push_back("--steps: must be >= 1");
    c.run.steps = *f.steps;
  }
  if (f.seed) c.run.seed = *f.seed;
  if (f.strategy) {
    if (auto s = parse_strategy(*f.strategy)) c.run.strategy = *s;
    else errs.push_back("--strategy: expected closed-form, euler or constant:ASK:BID, got '" + *f.strategy + "'");
  }
  if (f.euler_steps) {
    if (*f.euler_steps < 1) errs.push_back("--euler-steps: must be >= 1");
    c.run.euler_steps = *f.euler_steps;
  }
  if (f.omega_steps) {
    if (*f.omega_steps < 1) errs.push_back("--omega-steps: must be >= 1");
    c.run.omega_steps = *f.omega_steps;
  }
  if (f.confidence) {
    if (!(*f.confidence > 0.0 && *f.confidence < 1.0)) errs.push_back("--confidence: must be in (0, 1)");
    c.run.confidence = *f.confidence;
  }
  if (f.untruncated) c.run.euler_truncated = false;
  if (!errs.empty()) throw ConfigError(errs);
  return c;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot open output file '" + path + "' for writing");
  out.precision(17);
  return out;
}

void csv_header(std::ostream& o, const RunConfig& c, const std::string& command) {
  o << "# mmcomp " << kVersion << "\n"
    << "# command: " << command << "\n"
    << "# seed: " << c.run.seed << "\n"
    << "# config_hash: " << config_hash(c) << "\n";
}

json json_header(const RunConfig& c, const std::string& command) {
  json meta;
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["seed"] = c.run.seed;
  meta["config_hash"] = config_hash(c);
  return meta;
}

long euler_stride(const RunConfig& c) {
  return c.run.euler_steps % c.run.steps == 0 ? c.run.euler_steps / c.run.steps : 1;
}

std::shared_ptr<const ValueGrid> euler_grid(const RunConfig& c, long stride) {
  const EulerOptions opts{c.run.euler_truncated ? HamiltonianMode::Truncated : HamiltonianMode::Untruncated, stride};
  return std::make_shared<const ValueGrid>(solve_backward(c.model, c.run.euler_steps, opts));
}

Strategy make_strategy(const RunConfig& c, const StrategySpec& spec) {
  switch (spec.kind) {
    case StrategyKind::ClosedForm:
      return closed_form_strategy(c.model, std::make_shared<const OmegaTable>(solve_omega(c.model, c.run.omega_steps)));
    case StrategyKind::Euler:
      return euler_strategy(c.model, euler_grid(c, euler_stride(c)));
    case StrategyKind::Constant:
      return constant_strategy(c.model, spec.ask, spec.bid);
  }
  throw std::logic_error("unknown strategy kind");
}

MonteCarloSpec mc_spec(const RunConfig& c) {
  return MonteCarloSpec{c.run.paths, c.run.steps, c.run.seed, g_threads};
}

json state_json(const SimState& s) {
  return json{{"t", s.t}, {"s", s.s}, {"x", s.x}, {"q", s.q}, {"q_tilde", s.q_tilde}, {"z", s.z},
              {"running_penalty", s.running_penalty}};
}

json record_json(const TrajectoryRecord& r) {
  const auto& e = r.events;
  json j = state_json(r.state);
  j["step"] = r.step;
  j["ask"] = e.mine.ask_posted ? json(e.mine.ask) : json(nullptr);
  j["bid"] = e.mine.bid_posted ? json(e.mine.bid) : json(nullptr);
  j["competitor_ask"] = e.competitor.ask;
  j["competitor_bid"] = e.competitor.bid;
  j["ask_truncated"] = e.ask_truncated;
  j["bid_truncated"] = e.bid_truncated;
  j["ask_fill"] = e.ask_fill;
  j["bid_fill"] = e.bid_fill;
  j["comp_ask_fill"] = e.comp_ask_fill;
  j["comp_bid_fill"] = e.comp_bid_fill;
  return j;
}

json stats_json(const StrategyStats& s) {
  return json{{"name", s.name},
              {"mean", s.mean},
              {"sd", s.sd},
              {"generosity_rate", s.generosity_rate},
              {"mean_fills_ask", s.mean_fills_ask},
              {"mean_fills_bid", s.mean_fills_bid}};
}

// ---------------------------------------------------------------------------

int cmd_solve_closed_form(const CommonFlags& f) {
  const RunConfig c = load(f);
  auto out = open_output(f.out);
  const OmegaTable w = solve_omega(c.model, c.run.omega_steps);
  csv_header(out, c, "solve-closed-form");
  out << "t,q,omega,g\n";
  const TimeGrid& grid = w.time_grid();
  for (long i = 0; i <= grid.n_steps(); ++i)
    for (int q = c.model.q_min; q <= c.model.q_max; ++q)
      out << grid.time(i) << ',' << q << ',' << w.omega(i, q) << ',' << w.g_at(i, q) << '\n';
  return kExitOk;
}

int cmd_solve_euler(const CommonFlags& f, const std::string& report_path, long rows) {
  const RunConfig c = load(f);
  if (rows < 1 || c.run.euler_steps % rows != 0)
    throw UsageError("--rows must be >= 1 and divide the number of Euler steps");
  auto out = open_output(f.out);
  std::optional<std::ofstream> report;
  if (!report_path.empty()) report = open_output(report_path);

  const long stride = c.run.euler_steps / rows;
  const auto grid = euler_grid(c, stride);
  csv_header(out, c, "solve-euler");
  out << "t,q,g\n";
  const TimeGrid& tg = grid->time_grid();
  for (long i = 0; i <= tg.n_steps(); ++i)
    for (int q = c.model.q_min; q <= c.model.q_max; ++q) out << tg.time(i) << ',' << q << ',' << grid->g_at(i, q) << '\n';

  if (report) {
    // Distance to the closed form on the stored rows, and to a sweep with half the steps.
    const OmegaTable w = solve_omega(c.model, rows);
    std::optional<ValueGrid> coarse;
    if (c.run.euler_steps % 2 == 0 && (c.run.euler_steps / 2) % rows == 0)
      coarse = solve_backward(c.model, c.run.euler_steps / 2, {grid->mode(), stride / 2});
    json by_q = json::array();
    double worst = 0.0, worst_half = 0.0;
    for (int q = c.model.q_min; q <= c.model.q_max; ++q) {
      double dq = 0.0;
      for (long i = 0; i <= rows; ++i) {
        dq = std::max(dq, std::abs(grid->g_at(i, q) - w.g_at(i, q)));
        if (coarse) worst_half = std::max(worst_half, std::abs(grid->g_at(i, q) - coarse->g_at(i, q)));
      }
      worst = std::max(worst, dq);
      by_q.push_back(json{{"q", q}, {"max_abs_diff", dq}});
    }
    json doc;
    doc["meta"] = json_header(c, "solve-euler");
    doc["euler_steps"] = c.run.euler_steps;
    doc["mode"] = c.run.euler_truncated ? "truncated" : "untruncated";
    doc["stored_rows"] = rows;
    doc["max_abs_diff_vs_closed_form"] = worst;
    doc["diff_vs_closed_form_by_q"] = by_q;
    doc["max_abs_diff_vs_half_steps"] = coarse ? json(worst_half) : json(nullptr);
    doc["g_0_0"] = grid->g_at(0, 0);
    doc["closed_form_g_0_0"] = w.g_at(0, 0);
    *report << doc.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const CommonFlags& f, long record) {
  const RunConfig c = load(f);
  if (record < 0) throw UsageError("--record-trajectories must be >= 0");
  auto out = open_output(f.out);
  const Strategy st = make_strategy(c, c.run.strategy);
  const auto paths = run_paths(c.model, st, mc_spec(c));
  const StrategyStats s = summarize_strategy(st.name, paths);

  json doc;
  doc["meta"] = json_header(c, "simulate");
  doc["strategy"] = to_string(c.run.strategy);
  doc["paths"] = c.run.paths;
  doc["steps"] = c.run.steps;
  doc["summary"] = stats_json(s);
  doc["objectives"] = objectives(paths);
  json trajectories = json::array();
  for (long k = 0; k < std::min(record, c.run.paths); ++k) {
    const PathResult r = run_path(c.model, st, c.run.steps, c.run.seed, static_cast<std::uint64_t>(k), true);
    json rows = json::array();
    for (const auto& rec : r.trajectory) rows.push_back(record_json(rec));
    trajectories.push_back(json{{"path", k}, {"objective", r.objective}, {"final", state_json(r.final_state)},
                                {"records", rows}});
  }
  doc["trajectories"] = trajectories;
  out << doc.dump(2) << "\n";
  return kExitOk;
}

void write_statics(std::ostream& o, const std::vector<StaticsRow>& rows) {
  o << "t,q_tilde,q,hat_ask,hat_bid,competitor_ask,competitor_bid,ask_truncated,bid_truncated\n";
  for (const auto& r : rows) {
    std::ostringstream line;
    line.precision(17);
    line << r.t << ',' << r.q_tilde << ',' << r.q << ',';
    if (r.hat.ask_posted) line << r.hat.ask;
    line << ',';
    if (r.hat.bid_posted) line << r.hat.bid;
    line << ',' << r.competitor.ask << ',' << r.competitor.bid << ',' << r.ask_truncated << ',' << r.bid_truncated;
    o << line.str() << '\n';
  }
}

int cmd_statics(const CommonFlags& f, double t_fixed, std::int64_t qt_lo, std::int64_t qt_hi, double z,
                const std::string& time_out, long every) {
  const RunConfig c = load(f);
  if (!(t_fixed >= 0.0 && t_fixed <= c.model.horizon)) throw UsageError("--t must lie in [0, horizon]");
  if (qt_hi < qt_lo) throw UsageError("--q-tilde-max must be >= --q-tilde-min");
  if (every < 1) throw UsageError("--every must be >= 1");
  auto out = open_output(f.out);
  std::optional<std::ofstream> tout;
  if (!time_out.empty()) tout = open_output(time_out);

  const OmegaTable w = solve_omega(c.model, c.run.omega_steps);
  csv_header(out, c, "statics");
  write_statics(out, statics_depth_surface(c.model, w, t_fixed, qt_lo, qt_hi, z));
  if (tout) {
    csv_header(*tout, c, "statics");
    write_statics(*tout, statics_time_surface(c.model, w, 0, z, every));
  }
  return kExitOk;
}

int cmd_compare(const CommonFlags& f, const std::vector<std::string>& names) {
  const RunConfig c = load(f);
  std::vector<StrategySpec> specs;
  for (const auto& n : names) {
    auto s = parse_strategy(n);
    if (!s) throw UsageError("--strategies: cannot parse '" + n + "'");
    specs.push_back(*s);
  }
  if (specs.size() < 2) throw UsageError("--strategies: need at least 2 strategies");
  if (c.run.paths < 2) throw UsageError("compare needs at least 2 paths");
  auto out = open_output(f.out);

  std::vector<Strategy> strategies;
  for (const auto& s : specs) strategies.push_back(make_strategy(c, s));
  const ComparisonReport rep = run_comparison(c.model, strategies, mc_spec(c), c.run.confidence);

  json doc;
  doc["meta"] = json_header(c, "compare");
  doc["paths"] = rep.n_paths;
  doc["steps"] = rep.n_steps;
  doc["seed"] = rep.seed;
  doc["confidence"] = rep.confidence;
  json ss = json::array();
  for (const auto& s : rep.strategies) ss.push_back(stats_json(s));
  doc["strategies"] = ss;
  const auto& t = rep.paired;
  doc["paired"] = json{{"first", rep.strategies[0].name},
                       {"second", rep.strategies[1].name},
                       {"mean_diff", t.mean_diff},
                       {"sd_diff", t.sd_diff},
                       {"t", std::isfinite(t.t) ? json(t.t) : json(t.t > 0 ? "inf" : "-inf")},
                       {"df", t.df},
                       {"p_value", t.p_value},
                       {"degenerate", t.degenerate},
                       {"significant", rep.significant}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

int cmd_census(const CommonFlags& f, long windows, long margin) {
  const RunConfig c = load(f);
  if (windows < 0 || margin < 0) throw UsageError("--windows and --margin must be >= 0");
  auto out = open_output(f.out);
  const Strategy st = make_strategy(c, c.run.strategy);
  const CensusResult r = generosity_census(c.model, st, mc_spec(c), static_cast<std::size_t>(windows), margin);

  json doc;
  doc["meta"] = json_header(c, "census");
  doc["strategy"] = st.name;
  doc["paths"] = r.n_paths;
  doc["events"] = r.n_events;
  doc["rate"] = r.rate;
  doc["flagged_paths"] = r.flagged_paths;
  json ws = json::array();
  for (const auto& w : r.windows) {
    json recs = json::array();
    for (const auto& rec : w.records) recs.push_back(record_json(rec));
    ws.push_back(json{{"path", w.path_index}, {"first_step", w.first_step}, {"begin", w.begin}, {"end", w.end},
                      {"records", recs}});
  }
  doc["windows"] = ws;
  out << doc.dump(2) << "\n";
  return kExitOk;
}

void add_common(CLI::App* sub, CommonFlags& f, bool sim_flags) {
  sub->add_option("-c,--config", f.config, "Config file (key = value lines)")->required();
  sub->add_option("-o,--out", f.out, "Output file")->required();
  sub->add_option("--omega-steps", f.omega_steps, "Time rows of the closed-form table");
  if (sim_flags) {
    sub->add_option("--paths", f.paths, "Number of simulated paths");
    sub->add_option("--steps", f.steps, "Time steps per path");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--euler-steps", f.euler_steps, "Steps of the Euler sweep used by the euler strategy");
    sub->add_flag("--untruncated", f.untruncated, "Euler sweep without the competitor floor");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Market-making under competition: closed-form and Euler policies, simulator and study harness"};
  app.set_version_flag("--version", std::string("mmcomp ") + kVersion);
  app.add_option("--threads", g_threads, "Worker threads for Monte Carlo (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);

  CommonFlags f;
  std::string report;
  long rows = 1000;
  long record = 0;
  double t_fixed = 0.5, z = 0.0;
  std::int64_t qt_lo = -10, qt_hi = 10;
  std::string time_out;
  long every = 10;
  std::vector<std::string> names = {"closed-form", "euler"};
  long windows = 5, margin = 50;

  auto* closed = app.add_subcommand("solve-closed-form", "Tabulate omega and g on the time grid (CSV)");
  add_common(closed, f, false);

  auto* euler = app.add_subcommand("solve-euler", "Backward Euler sweep for g (CSV) plus a convergence report");
  add_common(euler, f, false);
  euler->add_option("--euler-steps", f.euler_steps, "Number of Euler steps");
  euler->add_flag("--untruncated", f.untruncated, "Drop the competitor floor from the Hamiltonian");
  euler->add_option("--rows", rows, "Stored time rows; must divide the step count");
  euler->add_option("--report", report, "JSON convergence report");

  auto* simulate = app.add_subcommand("simulate", "Simulate one strategy (JSON)");
  add_common(simulate, f, true);
  simulate->add_option("--strategy", f.strategy, "closed-form | euler | constant:ASK:BID");
  simulate->add_option("--record-trajectories", record, "Record full trajectories of the first N paths");

  auto* statics = app.add_subcommand("statics", "Unrestrained depth surfaces (CSV)");
  add_common(statics, f, false);
  statics->add_option("--t", t_fixed, "Fixed time for the competitor-inventory surface");
  statics->add_option("--q-tilde-min", qt_lo, "Lowest competitor inventory");
  statics->add_option("--q-tilde-max", qt_hi, "Highest competitor inventory");
  statics->add_option("--z", z, "Competitor noise level");
  statics->add_option("--time-out", time_out, "Also write the time-axis surface at zero competitor inventory");
  statics->add_option("--every", every, "Time-row stride for the time-axis surface");

  auto* compare = app.add_subcommand("compare", "Compare strategies on common random numbers (JSON)");
  add_common(compare, f, true);
  compare->add_option("--strategies", names, "Strategies to compare; the paired test is second minus first")
      ->delimiter(',');
  compare->add_option("--confidence", f.confidence, "Confidence level of the paired test");

  auto* census = app.add_subcommand("census", "Count paths with a generosity event (JSON)");
  add_common(census, f, true);
  census->add_option("--strategy", f.strategy, "closed-form | euler | constant:ASK:BID");
  census->add_option("--windows", windows, "Number of flagged paths to dump");
  census->add_option("--margin", margin, "Steps kept on each side of the first flagged step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto extra = app.remaining();
    if (!extra.empty() && app.get_subcommands().empty())
      std::cerr << "error: unknown subcommand '" << extra.front() << "'\n\n" << app.help();
    else
      std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (closed->parsed()) return cmd_solve_closed_form(f);
    if (euler->parsed()) return cmd_solve_euler(f, report, rows);
    if (simulate->parsed()) return cmd_simulate(f, record);
    if (statics->parsed()) return cmd_statics(f, t_fixed, qt_lo, qt_hi, z, time_out, every);
    if (compare->parsed()) return cmd_compare(f, names);
    if (census->parsed()) return cmd_census(f, windows, margin);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cerr << app.help();
  return kExitInvalid;
}
