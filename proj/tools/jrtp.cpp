// Command-line front end: instance generation, graph inspection, solving,
// the exact oracle, training-label extraction, graph reduction and solution
// validation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "jrtp/jrtp.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

// Domain failures exit 1, usage failures exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string manifest;
  std::string log_level = "warn";
  std::optional<int> shift_step;
};

jrtp::Instance read_instance(const std::string& path, const Common& common) {
  if (!std::filesystem::exists(path)) throw UsageError("instance file not found: " + path);
  jrtp::Instance inst;
  try {
    inst = jrtp::load_instance(path);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("cannot parse " + path + ": " + e.what());
  }
  if (common.shift_step) {
    inst.shift_step = *common.shift_step;
    jrtp::validate(inst);
  }
  return inst;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const auto started = std::chrono::steady_clock::now();
  CLI::App app{"Joint rider trip planning and crew shift scheduling by column generation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  app.add_option("--manifest", common.manifest, "Write the run manifest here (default: stderr)");
  app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  // generate
  auto* gen = app.add_subcommand("generate", "Write a seeded synthetic instance");
  jrtp::GeneratorConfig gcfg;
  int gen_fleet = -1;
  std::string gen_out;
  gen->add_option("--n", gcfg.n_requests, "Number of trip requests")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gcfg.seed, "RNG seed");
  gen->add_option("--out", gen_out, "Output instance JSON")->required();
  gen->add_option("--fraction-paired", gcfg.fraction_paired, "Share of requests in outbound+return pairs")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--capacity", gcfg.capacity, "Vehicle capacity in seats")->check(CLI::PositiveNumber);
  gen->add_option("--fleet-size", gen_fleet, "Vehicles (default: ceil(n / omega))");
  gen->add_option("--omega", gcfg.omega, "Trips per driver used for automatic fleet sizing");
  gen->add_option("--shift-earliest", gcfg.shift_earliest, "Earliest shift start (minutes from midnight)");
  gen->add_option("--shift-latest", gcfg.shift_latest, "Latest shift end (minutes from midnight)");
  gen->add_option("--shift-duration", gcfg.shift_duration, "Shift length in minutes");
  gen->add_option("--shift-step", gcfg.shift_step, "Minutes between candidate shift starts");
  gen->add_option("--speed", gcfg.speed, "Vehicle speed in km per minute");
  gen->add_option("--service-time", gcfg.service_time, "Minutes spent at each stop");

  // graph dump
  auto* graph = app.add_subcommand("graph", "Inspect the routing graph");
  graph->require_subcommand(1);
  auto* dump = graph->add_subcommand("dump", "Write the edge list as i,j,t_ij");
  std::string dump_instance, dump_out;
  dump->add_option("--instance", dump_instance, "Instance JSON")->required();
  dump->add_option("--out", dump_out, "Output CSV")->required();
  dump->add_option("--shift-step", common.shift_step, "Override the shift step");

  // export
  auto* exp = app.add_subcommand("export", "Write an unlabeled graph sample for edge scoring");
  std::string exp_instance, exp_out;
  exp->add_option("--instance", exp_instance, "Instance JSON")->required();
  exp->add_option("--out", exp_out, "Output sample JSON")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Column generation with the fixing heuristic");
  std::string solve_instance, solve_out = "-", solve_scores, solve_trace, lp_backend = "bundled";
  double tau = 10.0;
  jrtp::SolveConfig scfg;
  int max_columns = 10, max_labels = 200;
  bool no_dominance = false;
  solve->add_option("--instance", solve_instance, "Instance JSON")->required();
  solve->add_option("--out", solve_out, "Solution JSON (default: stdout)");
  solve->add_option("--time-limit", scfg.time_limit_seconds, "Seconds before the fixing-only search phase")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--scores", solve_scores, "Edge scores i,j,score; solve on the reduced graph");
  solve->add_option("--tau", tau, "Percent of best-scored edges kept with --scores")->check(CLI::Range(0.0, 100.0));
  solve->add_option("--stall-iters", scfg.stall_iters, "Stop a phase after this many flat master objectives")
      ->check(CLI::PositiveNumber);
  solve->add_option("--max-columns", max_columns, "Routes per shift per pricing call (0: unlimited)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--max-labels", max_labels, "Labels kept per node (0: unlimited)")->check(CLI::NonNegativeNumber);
  solve->add_flag("--no-dominance", no_dominance, "Disable label dominance");
  solve->add_option("--polish-nodes", scfg.polish_nodes, "Branch-and-price nodes after fixing (0: off)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--jobs", scfg.jobs, "Shifts priced in parallel")->check(CLI::PositiveNumber);
  solve->add_option("--shift-step", common.shift_step, "Override the shift step");
  solve->add_option("--lp-backend", lp_backend, "LP engine")->check(CLI::IsMember({"bundled", "external"}));
  solve->add_option("--trace", solve_trace, "Record pooled columns and master solutions here");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exhaustive optimum for small instances");
  std::string orc_instance, orc_out = "-";
  int orc_max_requests = 6, orc_max_shifts = 4;
  orc->add_option("--instance", orc_instance, "Instance JSON")->required();
  orc->add_option("--out", orc_out, "Result JSON (default: stdout)");
  orc->add_option("--shift-step", common.shift_step, "Override the shift step");
  orc->add_option("--max-requests", orc_max_requests, "Refuse larger instances");
  orc->add_option("--max-shifts", orc_max_shifts, "Refuse more candidate shifts");

  // extract-labels
  auto* ext = app.add_subcommand("extract-labels", "Labeled training sample from a solve trace");
  std::string ext_trace, ext_class = "u50", ext_out;
  ext->add_option("--trace", ext_trace, "Trace written by solve --trace")->required();
  ext->add_option("--class", ext_class, "a, u, u80, u50 or u30")
      ->check(CLI::IsMember({"a", "u", "u80", "u50", "u30", "A", "U", "U80", "U50", "U30"}));
  ext->add_option("--out", ext_out, "Output sample JSON")->required();

  // reduce
  auto* red = app.add_subcommand("reduce", "Keep the top tau percent of scored edges plus mandatory edges");
  std::string red_instance, red_scores, red_out;
  double red_tau = 10.0;
  red->add_option("--instance", red_instance, "Instance JSON")->required();
  red->add_option("--scores", red_scores, "Edge scores i,j,score")->required();
  red->add_option("--tau", red_tau, "Percent of edges kept")->check(CLI::Range(0.0, 100.0));
  red->add_option("--out", red_out, "Reduced edge list CSV")->required();
  red->add_option("--shift-step", common.shift_step, "Override the shift step");

  // validate
  auto* val = app.add_subcommand("validate", "Check a solution file against an instance");
  std::string val_instance, val_solution;
  val->add_option("--instance", val_instance, "Instance JSON")->required();
  val->add_option("--solution", val_solution, "Solution JSON")->required();
  val->add_option("--shift-step", common.shift_step, "Override the shift step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto logger = spdlog::stderr_color_mt("jrtp");
  logger->set_level(spdlog::level::from_str(common.log_level));

  nlohmann::json manifest{{"tool", "jrtp"}, {"version", kVersion}};
  manifest["argv"] = std::vector<std::string>(argv, argv + argc);
  nlohmann::json result;
  int code = 0;

  try {
    if (*gen) {
      if (gen_fleet >= 0) gcfg.fleet_size = gen_fleet;
      const jrtp::Instance inst = jrtp::generate_instance(gcfg);
      jrtp::save_instance(inst, gen_out);
      result = {{"requests", inst.num_requests()}, {"riders", inst.riders.size()}, {"vehicles", inst.vehicles()}};
      manifest["command"] = "generate";
    } else if (*dump) {
      const jrtp::Instance inst = read_instance(dump_instance, common);
      const jrtp::RoutingGraph g = jrtp::build_graph(inst);
      jrtp::write_edges_csv(g, dump_out);
      result = {{"nodes", g.num_nodes()}, {"edges", g.num_edges()}};
      manifest["command"] = "graph dump";
    } else if (*exp) {
      const jrtp::Instance inst = read_instance(exp_instance, common);
      const jrtp::RoutingGraph g = jrtp::build_graph(inst);
      write_json(jrtp::export_training_sample(inst, g), exp_out);
      result = {{"edges", g.num_edges()}};
      manifest["command"] = "export";
    } else if (*solve) {
      const jrtp::Instance inst = read_instance(solve_instance, common);
      const jrtp::RoutingGraph full = jrtp::build_graph(inst);
      std::optional<jrtp::RoutingGraph> reduced;
      if (!solve_scores.empty()) {
        if (!std::filesystem::exists(solve_scores)) throw UsageError("score file not found: " + solve_scores);
        reduced = jrtp::reduce_graph(full, jrtp::read_scores_csv(solve_scores), tau);
        logger->info("reduced graph keeps {} of {} edges", reduced->num_edges(), full.num_edges());
      }
      std::unique_ptr<jrtp::lp::Backend> backend;
      try {
        backend = jrtp::lp::make_backend(lp_backend);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      scfg.pricing.max_columns = max_columns == 0 ? jrtp::kUnlimited : max_columns;
      scfg.pricing.max_labels_per_node = max_labels == 0 ? jrtp::kUnlimited : max_labels;
      scfg.pricing.dominance = !no_dominance;
      scfg.record_trace = !solve_trace.empty();
      const jrtp::RoutingGraph& g = reduced ? *reduced : full;
      const jrtp::SolveReport report = jrtp::solve(inst, g, scfg, *backend, &full);
      logger->info("status {} objective {} after {} master solves", jrtp::to_string(report.status),
                   report.objective, report.iterations);
      write_json(jrtp::solution_to_json(jrtp::to_solution(report), inst, full), solve_out);
      if (!solve_trace.empty()) write_json(jrtp::trace_to_json(report.trace, inst), solve_trace);
      manifest["command"] = "solve";
      manifest["config"] = {{"time_limit", scfg.time_limit_seconds},
                            {"stall_iters", scfg.stall_iters},
                            {"max_columns", max_columns},
                            {"max_labels", max_labels},
                            {"dominance", !no_dominance},
                            {"jobs", scfg.jobs},
                            {"polish_nodes", scfg.polish_nodes},
                            {"lp_backend", lp_backend},
                            {"seed", inst.seed},
                            {"scores", solve_scores},
                            {"tau", solve_scores.empty() ? nlohmann::json(nullptr) : nlohmann::json(tau)}};
      manifest["timings"] = {{"first_phase_seconds", report.first_phase_seconds},
                             {"solve_seconds", report.wall_time}};
      result = {{"status", jrtp::to_string(report.status)},
                {"objective", report.objective},
                {"lp_bound", report.first_phase_objective},
                {"iterations", report.iterations},
                {"pool_size", report.pool_size},
                {"polish_nodes", report.polish_nodes},
                {"polish_improved", report.polish_improved},
                {"edges", g.num_edges()}};
      if (report.status == jrtp::SolveStatus::Infeasible) code = 1;
    } else if (*orc) {
      const jrtp::Instance inst = read_instance(orc_instance, common);
      const jrtp::RoutingGraph g = jrtp::build_graph(inst);
      jrtp::oracle::ExactResult ex;
      try {
        ex = jrtp::oracle::solve_exact(inst, g, jrtp::enumerate_shifts(inst), {orc_max_requests, orc_max_shifts});
      } catch (const jrtp::oracle::CapExceeded& e) {
        throw DomainError(e.what());
      }
      jrtp::Solution s;
      s.status = "optimal";
      s.objective = ex.objective;
      s.lp_bound = ex.lp_bound;
      s.routes = ex.witness;
      write_json(jrtp::solution_to_json(s, inst, g), orc_out);
      manifest["command"] = "oracle";
      result = {{"objective", ex.objective}, {"lp_bound", ex.lp_bound}, {"routes_enumerated", ex.routes}};
    } else if (*ext) {
      if (!std::filesystem::exists(ext_trace)) throw UsageError("trace file not found: " + ext_trace);
      std::ifstream in(ext_trace);
      auto [inst, trace] = jrtp::trace_from_json(nlohmann::json::parse(in));
      const jrtp::RoutingGraph g = jrtp::build_graph(inst);
      const auto cls = jrtp::parse_label_class(ext_class);
      const jrtp::EdgeLabelSet labels = jrtp::extract_labels(trace);
      write_json(jrtp::export_training_sample(inst, g, &labels.of(cls), cls), ext_out);
      manifest["command"] = "extract-labels";
      result = {{"class", jrtp::to_string(cls)},
                {"positive_edges", labels.of(cls).size()},
                {"edges", g.num_edges()},
                {"positive_rate", g.num_edges() ? double(labels.of(cls).size()) / double(g.num_edges()) : 0.0}};
    } else if (*red) {
      const jrtp::Instance inst = read_instance(red_instance, common);
      const jrtp::RoutingGraph g = jrtp::build_graph(inst);
      if (!std::filesystem::exists(red_scores)) throw UsageError("score file not found: " + red_scores);
      const jrtp::RoutingGraph r = jrtp::reduce_graph(g, jrtp::read_scores_csv(red_scores), red_tau);
      jrtp::write_edges_csv(r, red_out);
      manifest["command"] = "reduce";
      result = {{"edges_before", g.num_edges()}, {"edges_after", r.num_edges()}, {"tau", red_tau}};
    } else if (*val) {
      const jrtp::Instance inst = read_instance(val_instance, common);
      const jrtp::RoutingGraph g = jrtp::build_graph(inst);
      if (!std::filesystem::exists(val_solution)) throw UsageError("solution file not found: " + val_solution);
      const jrtp::Solution s = jrtp::load_solution(val_solution);
      const jrtp::Verdict v = jrtp::validate_solution(s.routes, s.objective, inst, g);
      nlohmann::json issues = nlohmann::json::array();
      for (const auto& x : v.violations)
        issues.push_back({{"constraint", jrtp::to_string(x.constraint)}, {"column", x.column_id}, {"detail", x.detail}});
      std::cout << nlohmann::json{{"ok", v.ok()}, {"objective", v.recomputed_objective}, {"violations", issues}}.dump(2)
                << '\n';
      manifest["command"] = "validate";
      result = {{"ok", v.ok()}, {"violations", v.violations.size()}};
      if (!v.ok()) code = 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return 2;
  } catch (const jrtp::InvalidInstance& e) {
    std::cerr << "error: invalid instance: " << e.what() << '\n';
    code = 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = 1;
  }

  manifest["result"] = result;
  manifest["exit_code"] = code;
  manifest["timings"]["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (common.manifest.empty()) {
    std::cerr << manifest.dump() << '\n';
  } else {
    std::ofstream out(common.manifest);
    out << manifest.dump(2) << '\n';
  }
  return code;
}
