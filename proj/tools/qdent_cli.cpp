// qdent: quantum dynamical entropy of coined walks.
//
//   qdent run <config.json> [--out DIR] [--strict] [--bits]
//   qdent paper-check [--bits]
//   qdent markov --n N --power M [--start uniform|point:K] [--bits]
//
// Exit codes: 0 success, 1 tolerance/accuracy failure, 2 usage/config error,
// 3 resource budget exceeded.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdent/experiment.hpp"

namespace {

int cmd_run(const std::string& config, const std::string& out, bool strict, bool bits) {
  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  const qdent::RunOutputs r = qdent::run_config(config, out_dir, strict);
  const double unit = bits ? 1.0 / std::log(2.0) : 1.0;
  const char* units = bits ? "bits" : "nats";

  const auto& rep = r.record.report;
  auto show = [&](const char* name, const qdent::ConvergenceReport& c) {
    std::cout << name << ": ";
    if (c.converged)
      std::cout << qdent::format_number(*c.converged_value * unit) << ' ' << units;
    else
      std::cout << "not converged (last a_n = "
                << qdent::format_number(c.direct_sequence.back() * unit) << ' ' << units << ")";
    std::cout << " after " << c.steps_used << " steps\n";
  };
  show("sz entropy", rep.sz_entropy);
  show("measurement entropy", rep.measurement_entropy);
  if (rep.dynamical_entropy)
    std::cout << "dynamical entropy: " << qdent::format_number(*rep.dynamical_entropy * unit) << ' '
              << units << '\n';
  else
    std::cout << "dynamical entropy: unavailable (a run did not converge)\n";
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << r.csv_path.string() << " and " << r.summary_path.string() << '\n';
  return rep.dynamical_entropy ? qdent::kExitOk : qdent::kExitTolerance;
}

int cmd_paper_check(bool bits) {
  const auto rows = qdent::paper_check();
  qdent::print_check_table(std::cout, rows, bits);
  for (const auto& r : rows) {
    if (!r.pass) return qdent::kExitTolerance;
  }
  return qdent::kExitOk;
}

int cmd_markov(int n, int power, const std::string& start, bool bits) {
  qdent::print_markov(std::cout, qdent::markov_cmd(n, power, start), bits);
  return qdent::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum dynamical entropy of coined quantum walks"};
  app.require_subcommand(1);
  bool bits = false;
  app.add_flag("--bits", bits, "Display entropies in bits (computation stays in nats)");

  std::string config, out;
  bool strict = false;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory (default: next to the config)");
  run->add_flag("--strict", strict, "Fail when pruned probability mass exceeds 1e-6");
  run->add_flag("--bits", bits, "Display entropies in bits");

  auto* check = app.add_subcommand("paper-check", "Reproduce the closed-form entropy values");
  check->add_flag("--bits", bits, "Display entropies in bits");

  int n = 0;
  int power = 1;
  std::string start = "uniform";
  auto* markov = app.add_subcommand("markov", "Entropy of the unbiased walk on the N-cycle");
  markov->add_option("--n", n, "Cycle length N (>= 3)")->required();
  markov->add_option("--power", power, "Matrix power M (>= 1)");
  markov->add_option("--start", start, "Initial distribution: uniform or point:K");
  markov->add_flag("--bits", bits, "Display entropies in bits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qdent::kExitUsage;
  }

  try {
    if (*run) return cmd_run(config, out, strict, bits);
    if (*check) return cmd_paper_check(bits);
    if (*markov) return cmd_markov(n, power, start, bits);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qdent::exit_code_for(e);
  }
  return qdent::kExitUsage;
}
