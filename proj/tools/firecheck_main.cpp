// firecheck command-line front end.
//
// Subcommands: eval, verify, consistency, global, scan, simulate.
// Exit codes are a stable four-value contract:
//   0  success (eval/scan/simulate), property holds (verify/global), or
//      scene is consistent (consistency)
//   1  property violated: verify found SAT, consistency/global found a
//      counterexample
//   2  input or usage error (bad flags, missing files, malformed data)
//   3  undecided: the search budget ran out before a proof or witness
#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "firecheck/firecheck.hpp"

namespace {

using namespace firecheck;

std::string tensor_str(const Tensor& t) {
  std::string out = "[";
  for (std::size_t i = 0; i < t.data().size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(t.data()[i]);
  }
  return out + "]";
}

Shape parse_shape(const std::string& text) {
  Shape shape;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto part = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      shape.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad shape component '" + part + "' in '" + text +
                                  "' (want comma-separated positive integers)");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (shape.empty()) throw std::invalid_argument("shape must have at least one dimension");
  return shape;
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

// Shared flag bundle; each subcommand registers only the flags it uses.
struct Options {
  std::string model;
  std::string input;
  std::string query;
  std::string scenes;
  std::string signal;
  std::string background;
  std::string signal_box;
  std::string background_box;
  std::string out;
  std::string format = "csv";
  std::string shape;
  double eps_min = 0.0;
  double eps_max = 1.0;
  double delta = 0.5;
  std::int64_t max_splits = Budget{}.max_splits;
  double timeout = Budget{}.timeout_seconds;
  std::uint64_t seed = 0;
  std::int64_t signals = 1;
  std::int64_t backgrounds = 1;
  double amplitude = BackgroundParams{}.amplitude;
  double smoothness = BackgroundParams{}.smoothness;
  double radius = SignalParams{}.radius;
  double growth = SignalParams{}.growth;
};

int run_eval(const Options& o) {
  const auto net = load_network(o.model);
  const auto x = load_tensor(o.input);
  const auto r = classify(net, x, o.delta);
  std::cout << "logit: " << format_double(r.logit) << '\n';
  std::cout << "score: " << format_double(r.score) << '\n';
  std::cout << "label: " << (r.label == Classification::Fire ? "Fire" : "NoFire")
            << " (delta " << format_double(o.delta) << ")\n";
  return 0;
}

int run_verify(const Options& o) {
  const auto net = load_network(o.model);
  const auto query = load_query(o.query, net.input_shape);
  SearchParams params;
  params.seed = o.seed;
  const auto v = verify_query(net, query, Budget{o.max_splits, o.timeout}, params);

  std::cout << "status: " << query_status_str(v.status) << '\n';
  std::cout << "splits_used: " << v.splits_used << '\n';
  if (v.status == QueryStatus::Sat) {
    std::cout << "witness: " << tensor_str(*v.witness) << '\n';
    std::cout << "output: " << format_double(v.output) << '\n';
  }
  if (v.status == QueryStatus::Unknown)
    std::cout << "bound_gap: " << format_double(v.bound_gap) << '\n';
  std::cout << "note: the postcondition encodes the negation of the property under test:\n"
            << "note: SAT (exit 1) = property violated at the witness; "
            << "UNSAT (exit 0) = property holds over the whole box.\n";

  if (!o.out.empty()) save_json(o.out, query_verdict_to_json(v));
  switch (v.status) {
    case QueryStatus::Unsat: return 0;
    case QueryStatus::Sat: return 1;
    default: return 3;
  }
}

void print_consistency(const ConsistencyVerdict& v) {
  std::cout << "status: " << (v.consistent() ? "consistent" : "inconsistent") << '\n';
  std::cout << "segments: " << v.segments << '\n';
  if (!v.consistent()) {
    std::cout << "eps1: " << format_double(v.eps1) << " -> value1: " << format_double(v.value1)
              << '\n';
    std::cout << "eps2: " << format_double(v.eps2) << " -> value2: " << format_double(v.value2)
              << '\n';
    std::cout << "margin: " << format_double(v.margin)
              << " (higher intensity scored lower by this much)\n";
  }
}

int run_consistency(const Options& o) {
  const auto net = load_network(o.model);
  const Scene scene(load_tensor(o.signal), load_tensor(o.background), {o.eps_min, o.eps_max});
  const auto v = verify_local_consistency(net, scene);
  print_consistency(v);
  if (!o.out.empty()) save_json(o.out, consistency_verdict_to_json(v));
  return v.consistent() ? 0 : 1;
}

int run_global(const Options& o) {
  const auto net = load_network(o.model);

  const int modes = (!o.scenes.empty() ? 1 : 0) +
                    (!o.signal_box.empty() || !o.background_box.empty() ? 1 : 0) +
                    (!o.signal.empty() || !o.background.empty() ? 1 : 0);
  if (modes != 1)
    throw std::invalid_argument(
        "global needs exactly one input form: --scenes, or --signal-box with "
        "--background-box, or --signal with --background");

  if (!o.scenes.empty()) {
    // Finite scene set: every pair is decided exactly, so the aggregate is a
    // real verdict (an errored pair downgrades a would-be 'holds' to unknown).
    const auto report = scan_dataset_consistency(net, load_scene_set(o.scenes));
    std::cout << "pairs: " << report.entries.size() << '\n';
    std::cout << "consistent: " << report.consistent_count << '\n';
    std::cout << "inconsistent: " << report.inconsistent_count << '\n';
    std::cout << "errors: " << report.error_count << '\n';
    if (!o.out.empty()) save_json(o.out, scan_report_to_json(report));
    if (report.inconsistent_count > 0) {
      for (const auto& e : report.entries) {
        if (e.ok() && !e.verdict.consistent()) {
          std::cout << "status: violated (signal " << e.signal_idx << ", background "
                    << e.background_idx << ")\n";
          print_consistency(e.verdict);
          break;
        }
      }
      return 1;
    }
    if (report.error_count > 0) {
      std::cout << "status: unknown (some pairs failed to propagate)\n";
      return 3;
    }
    std::cout << "status: holds\n";
    return 0;
  }

  const Box signal_box = !o.signal_box.empty() ? load_box(o.signal_box)
                                               : Box::point(load_tensor(o.signal));
  const Box background_box = !o.background_box.empty() ? load_box(o.background_box)
                                                       : Box::point(load_tensor(o.background));
  SearchParams params;
  params.seed = o.seed;
  const auto v = verify_global_consistency(net, signal_box, background_box,
                                           {o.eps_min, o.eps_max},
                                           Budget{o.max_splits, o.timeout}, params);
  std::cout << "status: " << global_status_str(v.status) << '\n';
  std::cout << "splits_used: " << v.splits_used << '\n';
  if (v.status == GlobalStatus::Violated) {
    std::cout << "signal: " << tensor_str(*v.signal) << '\n';
    std::cout << "background: " << tensor_str(*v.background) << '\n';
    std::cout << "eps1: " << format_double(v.eps1) << " -> value1: " << format_double(v.value1)
              << '\n';
    std::cout << "eps2: " << format_double(v.eps2) << " -> value2: " << format_double(v.value2)
              << '\n';
    std::cout << "margin: " << format_double(v.margin) << '\n';
  }
  if (v.status == GlobalStatus::Unknown)
    std::cout << "bound_gap: " << format_double(v.bound_gap) << '\n';

  if (!o.out.empty()) save_json(o.out, global_verdict_to_json(v));
  switch (v.status) {
    case GlobalStatus::Holds: return 0;
    case GlobalStatus::Violated: return 1;
    default: return 3;
  }
}

int run_scan(const Options& o) {
  const auto net = load_network(o.model);
  const auto report = scan_dataset_consistency(net, load_scene_set(o.scenes));

  const std::string body =
      o.format == "json" ? scan_report_to_json(report).dump(2) + "\n" : scan_report_to_csv(report);
  if (o.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream file(o.out);
    if (!file) throw std::runtime_error("cannot write '" + o.out + "'");
    file << body;
    std::cout << "pairs: " << report.entries.size() << '\n';
    std::cout << "consistent: " << report.consistent_count << '\n';
    std::cout << "inconsistent: " << report.inconsistent_count << '\n';
    std::cout << "errors: " << report.error_count << '\n';
    std::cout << "consistent_fraction: " << format_double(report.consistent_fraction) << '\n';
    std::cout << "worst_margin: " << format_double(report.worst_margin) << '\n';
    std::cout << "wrote " << o.out << '\n';
  }
  return 0;
}

int run_simulate(const Options& o) {
  SimulateParams params;
  params.signal_count = o.signals;
  params.background_count = o.backgrounds;
  params.eps_range = {o.eps_min, o.eps_max};
  params.background.amplitude = o.amplitude;
  params.background.smoothness = o.smoothness;
  params.signal.radius = o.radius;
  params.signal.growth = o.growth;

  const auto set = generate_scene_set(o.seed, parse_shape(o.shape), params);
  save_scene_set(o.out, set);
  std::cout << "wrote " << set.signals.size() << " signals x " << set.backgrounds.size()
            << " backgrounds to " << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consistency and box-property verification for wildfire detection networks"};
  app.require_subcommand(1);
  Options o;

  const auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", o.model, "network JSON file")->required();
  };
  const auto add_eps = [&](CLI::App* cmd) {
    cmd->add_option("--eps-min", o.eps_min, "intensity range lower end (default 0)");
    cmd->add_option("--eps-max", o.eps_max, "intensity range upper end (default 1)");
  };
  const auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--max-splits", o.max_splits, "box split budget (default 10000)");
    cmd->add_option("--timeout", o.timeout, "search time budget in seconds (default 60)");
    cmd->add_option("--seed", o.seed, "seed for the falsification sampler (default 0)");
  };

  auto* c_eval = app.add_subcommand("eval", "run the network on one input tensor");
  add_model(c_eval);
  c_eval->add_option("--input", o.input, "input tensor JSON file")->required();
  c_eval->add_option("--delta", o.delta, "detection threshold on the score (default 0.5)");

  auto* c_verify = app.add_subcommand("verify", "decide a pre/post query (0 holds, 1 violated)");
  add_model(c_verify);
  c_verify->add_option("--query", o.query, "query text file (.vq)")->required();
  add_budget(c_verify);
  c_verify->add_option("--out", o.out, "write the verdict as JSON here");

  auto* c_cons = app.add_subcommand("consistency", "exact single-scene monotonicity check");
  add_model(c_cons);
  c_cons->add_option("--signal", o.signal, "signal tensor JSON file")->required();
  c_cons->add_option("--background", o.background, "background tensor JSON file")->required();
  add_eps(c_cons);
  c_cons->add_option("--out", o.out, "write the verdict as JSON here");

  auto* c_glob = app.add_subcommand("global", "sound monotonicity check over scene boxes");
  add_model(c_glob);
  c_glob->add_option("--scenes", o.scenes, "scene set JSON file (checked pair by pair)");
  c_glob->add_option("--signal-box", o.signal_box, "signal box JSON file");
  c_glob->add_option("--background-box", o.background_box, "background box JSON file");
  c_glob->add_option("--signal", o.signal, "signal tensor JSON file (treated as a point box)");
  c_glob->add_option("--background", o.background,
                     "background tensor JSON file (treated as a point box)");
  add_eps(c_glob);
  add_budget(c_glob);
  c_glob->add_option("--out", o.out, "write the verdict as JSON here");

  auto* c_scan = app.add_subcommand("scan", "per-pair consistency report over a scene set");
  add_model(c_scan);
  c_scan->add_option("--scenes", o.scenes, "scene set JSON file")->required();
  c_scan->add_option("--format", o.format, "report format: csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  c_scan->add_option("--out", o.out, "write the report here (default: print to stdout)");

  auto* c_sim = app.add_subcommand("simulate", "generate a synthetic scene set file");
  c_sim->add_option("--seed", o.seed, "generator seed (default 0)");
  c_sim->add_option("--shape", o.shape, "tensor shape, e.g. 3,5,5")->required();
  c_sim->add_option("--signals", o.signals, "number of signal tensors (default 1)");
  c_sim->add_option("--backgrounds", o.backgrounds, "number of background tensors (default 1)");
  add_eps(c_sim);
  c_sim->add_option("--amplitude", o.amplitude, "background amplitude (default 1)");
  c_sim->add_option("--smoothness", o.smoothness, "background smoothness (default 2)");
  c_sim->add_option("--radius", o.radius, "signal blob radius (default 1)");
  c_sim->add_option("--growth", o.growth, "per-channel signal growth factor (default 1.5)");
  c_sim->add_option("--out", o.out, "output scene set JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's exit codes into the documented contract: help stays
    // 0, every parse failure is an input error.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_eval)) return run_eval(o);
    if (app.got_subcommand(c_verify)) return run_verify(o);
    if (app.got_subcommand(c_cons)) return run_consistency(o);
    if (app.got_subcommand(c_glob)) return run_global(o);
    if (app.got_subcommand(c_scan)) return run_scan(o);
    return run_simulate(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
