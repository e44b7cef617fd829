#include "wayfind/cli.hpp"

#include "wayfind/engine.hpp"
#include "wayfind/output.hpp"
#include "wayfind/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace wayfind {

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> agents;
  std::optional<double> dt;
  unsigned threads = 0;
  bool dump_views = false;
  bool dump_attention = false;
};

void add_common(CLI::App& sub, Options& o, bool runs) {
  sub.add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  if (!runs) return;
  sub.add_option("--out", o.out, "Output directory (created if absent)")->required();
  sub.add_option("--seed", o.seed, "Master seed (overrides config.master_seed)");
  sub.add_option("--replications", o.replications, "Replications (overrides config.replications)");
  sub.add_option("--agents", o.agents, "Agents per replication (overrides config.agents_per_replication)");
  sub.add_option("--dt", o.dt, "Time step in seconds (overrides config.dt)");
  sub.add_option("--threads", o.threads, "Worker threads; 0 uses every core");
  sub.add_flag("--dump-views", o.dump_views, "Write every rendered view and sign mask");
  sub.add_flag("--dump-attention", o.dump_attention, "Write every attention channel and the fused map");
}

std::string frame_stem(const PerceptionFrame& f) {
  return "r" + std::to_string(f.replication) + "_a" + std::to_string(f.agent) + "_k" + std::to_string(f.tick);
}

PerceptionObserver make_dumper(const std::filesystem::path& dir, bool views, bool attention) {
  return [=](const PerceptionFrame& f) {
    const std::string stem = frame_stem(f);
    const auto write = [&](const std::string& name, auto&& writer) {
      auto out = open_output(dir / (stem + "_" + name));
      writer(out);
      if (!out) throw OutputError("failed writing " + (dir / (stem + "_" + name)).string());
    };
    if (views) {
      write("view.ppm", [&](std::ostream& o) { write_ppm(o, f.view.raster); });
      write("mask.pgm", [&](std::ostream& o) { write_pgm16(o, f.view.mask.ids.cast<std::uint32_t>()); });
    }
    if (attention) {
      write("saliency.pgm", [&](std::ostream& o) { write_pgm(o, f.saliency); });
      write("semantic.pgm", [&](std::ostream& o) { write_pgm(o, f.semantic); });
      write("frustum.pgm", [&](std::ostream& o) { write_pgm(o, f.frustum); });
      write("fused.pgm", [&](std::ostream& o) { write_pgm(o, f.fused); });
    }
  };
}

int report_issues(const std::vector<Issue>& issues) {
  for (const auto& i : issues) std::cerr << "error: " << to_string(i) << '\n';
  return exit_validation;
}

int validate(const Options& o) {
  const Scenario s = load_scenario_file(o.scenario);
  std::cout << "ok: " << s.environment.floors.size() << " floors, " << s.environment.portals.size() << " portals, "
            << s.environment.signs.size() << " signs, " << s.environment.base_points.size() << " base points, "
            << s.environment.goal_points.size() << " goal points, " << s.task.legs.size() << " legs\n";
  return exit_ok;
}

int run(const Options& o, bool with_audit) {
  Scenario s = load_scenario_file(o.scenario);
  SimulationConfig& c = s.config;
  if (o.seed) c.master_seed = *o.seed;
  if (o.replications) c.replications = *o.replications;
  if (o.agents) c.agents_per_replication = *o.agents;
  if (o.dt) c.dt = *o.dt;
  if (auto issues = validate_scenario(s); !issues.empty()) return report_issues(issues);

  const std::filesystem::path out_dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw OutputError("cannot create output directory " + o.out);

  BatchOptions options;
  options.threads = o.threads;
  if (o.dump_views || o.dump_attention) {
    const auto dump_dir = out_dir / "dumps";
    std::filesystem::create_directories(dump_dir, ec);
    if (ec) throw OutputError("cannot create " + dump_dir.string());
    options.observer = make_dumper(dump_dir, o.dump_views, o.dump_attention);
    options.threads = 1;  // dump failures surface as exceptions on the calling thread
  }
  const BatchResult result = run_batch(s.environment, s.task, c, options);
  write_outputs(out_dir, result, c, with_audit);

  std::cout << result.all_legs_completed << " of " << result.agent_runs << " agent-runs completed all legs\n";
  for (const auto& l : result.legs) {
    std::cout << "leg " << l.leg << ": " << l.completed << "/" << l.attempted << " completed, median time "
              << format_double(l.travel_time_median) << " s, median path " << format_double(l.path_length_median)
              << " m\n";
  }
  return exit_ok;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Agent-based signage and wayfinding simulator", "wayfind"};
  app.require_subcommand(1);
  Options validate_opts, run_opts, audit_opts;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario against the schema and invariants");
  auto* run_cmd = app.add_subcommand("run", "Run all replications and write outputs");
  auto* audit_cmd = app.add_subcommand("audit", "Run and additionally write the per-sign audit table");
  add_common(*validate_cmd, validate_opts, false);
  add_common(*run_cmd, run_opts, true);
  add_common(*audit_cmd, audit_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*validate_cmd) return validate(validate_opts);
    if (*run_cmd) return run(run_opts, false);
    return run(audit_opts, true);
  } catch (const ValidationError& e) {
    return report_issues(e.issues());
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const ScenarioIoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("wayfind");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace wayfind
