#include "tta/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tta/agent.hpp"
#include "tta/baselines.hpp"
#include "tta/errors.hpp"
#include "tta/model.hpp"
#include "tta/objective.hpp"

namespace tta {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("TTA_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ArgumentError(std::string("TTA_SEED is not an unsigned integer: ") + s);
    }
  }
  return 0;
}

/// Collects the provenance of one run and writes it next to its artifact.
struct Manifest {
  std::string command;
  std::vector<std::string> arguments;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::string started = utc_now();

  void write(const std::string& artifact) const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["arguments"] = arguments;
    j["seed"] = seed;
    j["tool_version"] = kToolVersion;
    auto files = nlohmann::ordered_json::array();
    for (const auto& path : inputs) files.push_back({{"path", path}, {"fnv1a64", fnv1a_hex(read_file(path))}});
    j["inputs"] = files;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["started"] = started;
    j["finished"] = utc_now();
    write_file_atomic(artifact + ".manifest.json", j.dump(2) + "\n");
  }
};

nlohmann::ordered_json hyperparams_json(const Hyperparams& hp) {
  return {{"learning_rate", hp.learning_rate}, {"gamma", hp.gamma},       {"clip", hp.clip},
          {"value_coef", hp.value_coef},       {"entropy_coef", hp.entropy_coef},
          {"eval_ratio", hp.eval_ratio},       {"episodes", hp.episodes}, {"max_steps", hp.max_steps},
          {"epochs", hp.epochs},               {"hidden", hp.hidden}};
}

Strategy resolve_strategy(const std::string& name) {
  if (name == "avb-only") return {name, avb_only};
  if (name == "initial") return {name, [](const TestCase& tc) { return initial_solution(tc).assignment; }};
  if (name == "greedy") return {name, greedy_tt_first};
  if (name == "oracle") return {name, [](const TestCase& tc) { return exhaustive_oracle(tc).best_assignment; }};
  const std::string prefix = "checkpoint:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string path = name.substr(prefix.size());
    auto model = std::make_shared<PolicyModel>(load_checkpoint(path).model);
    return {name, [model](const TestCase& tc) {
              require_signature(*model, tc);
              return infer(*model, tc);
            }};
  }
  throw ArgumentError("unknown strategy '" + name + "' (avb-only | initial | greedy | oracle | checkpoint:<path>)");
}

std::string case_id(const std::string& path) { return std::filesystem::path(path).stem().string(); }

void emit_csv(const std::string& csv, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << csv;
  else
    write_file_atomic(path, csv);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traffic-type assignment for mixed-critical TSN flows"};
  app.name("tta");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::uint64_t seed = 0;
  std::string output;

  // gen
  int es = 0, sw = 0, hrt = 0, srt = 0;
  auto* gen = app.add_subcommand("gen", "Generate a ring test case");
  gen->add_option("--es", es, "End stations")->required();
  gen->add_option("--sw", sw, "Switches (ring needs at least 3)")->required();
  gen->add_option("--hrt", hrt, "Hard real-time flows")->required();
  gen->add_option("--srt", srt, "Soft real-time flows")->required();
  gen->add_option("--seed", seed, "Generator seed (default: TTA_SEED or 0)");
  gen->add_option("-o,--out", output, "Test case JSON")->required();

  // train
  std::vector<std::string> train_cases;
  std::string log_path;
  Hyperparams hp;
  int progress = 0;
  auto* tr = app.add_subcommand("train", "Train a policy on test cases of one topology");
  tr->add_option("testcases", train_cases, "Test case JSON files")->required();
  tr->add_option("--episodes", hp.episodes, "Training episodes M");
  tr->add_option("--lr", hp.learning_rate, "Adam learning rate");
  tr->add_option("--gamma", hp.gamma, "Discount factor");
  tr->add_option("--clip", hp.clip, "Surrogate clip range");
  tr->add_option("--value-coef", hp.value_coef, "Value loss coefficient c1");
  tr->add_option("--entropy-coef", hp.entropy_coef, "Entropy bonus coefficient c2");
  tr->add_option("--eval-ratio", hp.eval_ratio, "Episodes between greedy evaluations");
  tr->add_option("--max-steps", hp.max_steps, "Step cap per episode");
  tr->add_option("--epochs", hp.epochs, "Update epochs per trajectory");
  tr->add_option("--hidden", hp.hidden, "Hidden layer width");
  tr->add_option("--seed", seed, "Training seed (default: TTA_SEED or 0)");
  tr->add_option("--log", log_path, "Training log CSV (default: <out>.log.csv)");
  tr->add_option("--progress", progress, "Report every N episodes on stderr (0 = off)");
  tr->add_option("-o,--out", output, "Checkpoint path")->required();

  // assign
  std::string ckpt_path, tc_path;
  auto* as = app.add_subcommand("assign", "Assign traffic types with a trained policy");
  as->add_option("checkpoint", ckpt_path, "Checkpoint")->required();
  as->add_option("testcase", tc_path, "Test case JSON")->required();
  as->add_option("-o,--out", output, "Assignment + GCL JSON")->required();

  // eval
  std::string assignment_path;
  auto* ev = app.add_subcommand("eval", "Evaluate an assignment file against its test case");
  ev->add_option("testcase", tc_path, "Test case JSON")->required();
  ev->add_option("assignment", assignment_path, "Assignment + GCL JSON")->required();
  ev->add_option("-o,--out", output, "CSV path (default: stdout)");

  // compare
  std::vector<std::string> strategies;
  auto* cmp = app.add_subcommand("compare", "Compare assignment strategies on a test case");
  cmp->add_option("testcase", tc_path, "Test case JSON")->required();
  cmp->add_option("strategies", strategies, "avb-only | initial | greedy | oracle | checkpoint:<path>")->required();
  cmp->add_option("-o,--out", output, "CSV path (default: stdout)");

  std::vector<std::string> argv_store{"tta"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitArgs;
  }

  Manifest manifest;
  manifest.arguments = args;

  try {
    if (*gen) {
      if (gen->count("--seed") == 0) seed = default_seed();
      if (es < 0 || sw < 0 || hrt < 0 || srt < 0) throw ArgumentError("counts must be non-negative");
      const TestCase tc = gen_ring_testcase(es, sw, hrt, srt, seed);
      save_testcase(tc, output);
      manifest.command = "gen";
      manifest.seed = seed;
      manifest.write(output);
      err << "wrote " << output << ": " << tc.flow_count() << " flows, " << tc.topology().links().size()
          << " links\n";
      return kExitOk;
    }

    if (*tr) {
      hp.seed = tr->count("--seed") ? seed : default_seed();
      std::vector<TestCase> cases;
      for (const auto& p : train_cases) cases.push_back(load_testcase(p));
      std::function<void(const EpisodeLog&)> report;
      if (progress > 0)
        report = [&](const EpisodeLog& row) {
          if (row.episode % progress == 0) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "episode %d  reward %.3f  entropy %.4f\n", row.episode, row.reward,
                          row.stats.entropy);
            err << buf << std::flush;
          }
        };
      const TrainResult result = train(cases, hp, RewardConfig{}, report);
      save_checkpoint({result.best, hp, result.rng_state}, output);
      if (log_path.empty()) log_path = output + ".log.csv";
      write_file_atomic(log_path, training_log_csv(result.log));
      manifest.command = "train";
      manifest.seed = hp.seed;
      manifest.inputs = train_cases;
      manifest.extra["hyperparams"] = hyperparams_json(hp);
      manifest.write(output);
      err << "trained " << hp.episodes << " episodes, best evaluation reward " << result.best_eval_reward
          << ", checkpoint " << output << "\n";
      return kExitOk;
    }

    if (*as) {
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      const TestCase tc = load_testcase(tc_path);
      require_signature(ckpt.model, tc);
      const auto start = std::chrono::steady_clock::now();
      EvalReport report = evaluate_assignment(tc, infer(ckpt.model, tc));
      report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      save_assignment(tc, report.assignment, report.gcl, output);
      manifest.command = "assign";
      manifest.inputs = {ckpt_path, tc_path};
      manifest.write(output);
      char buf[200];
      std::snprintf(buf, sizeof buf, "delta_hrt %d/%zu  delta_srt %.4f  runtime %.3f s\n", report.delta_hrt,
                    report.hrt_count, report.delta_srt, report.runtime_s);
      err << buf;
      return kExitOk;
    }

    if (*ev) {
      const TestCase tc = load_testcase(tc_path);
      const auto [assignment, gcl] = restore_assignment(tc, load_assignment_file(assignment_path));
      const ConstraintReport constraints = check_constraints(tc, assignment, gcl);
      for (const auto& v : constraints.violations) err << "violation: " << v.subject << ": " << v.detail << "\n";
      const auto start = std::chrono::steady_clock::now();
      EvalReport report = evaluate_assignment(tc, assignment);
      report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::string csv = csv_header() + "\n" + csv_line(make_row(case_id(tc_path), "file", tc, report)) + "\n";
      emit_csv(csv, output, out);
      if (!output.empty()) {
        manifest.command = "eval";
        manifest.inputs = {tc_path, assignment_path};
        manifest.write(output);
      }
      return constraints.ok() ? kExitOk : kExitFailure;
    }

    if (*cmp) {
      const TestCase tc = load_testcase(tc_path);
      std::vector<Strategy> resolved;
      for (const auto& s : strategies) resolved.push_back(resolve_strategy(s));
      std::string csv = csv_header() + "\n";
      for (const auto& row : compare(case_id(tc_path), tc, resolved)) csv += csv_line(row) + "\n";
      emit_csv(csv, output, out);
      if (!output.empty()) {
        manifest.command = "compare";
        manifest.inputs = {tc_path};
        for (const auto& s : strategies)
          if (s.rfind("checkpoint:", 0) == 0) manifest.inputs.push_back(s.substr(11));
        manifest.write(output);
      }
      return kExitOk;
    }
  } catch (const TopologyMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTopology;
  } catch (const NaNError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNaN;
  } catch (const SignatureMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSignature;
  } catch (const TooLargeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitOracleCap;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitArgs;
}

}  // namespace tta
