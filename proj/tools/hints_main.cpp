#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "hints/cli.hpp"
#include "hints/error.hpp"

namespace {

bool is_numerical(hints::ErrorCode c) {
  using hints::ErrorCode;
  switch (c) {
    case ErrorCode::NonFinite:
    case ErrorCode::SingularMatrix:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::NoConvergence:
    case ErrorCode::RejectionBudgetExceeded:
    case ErrorCode::DivergedLoss:
    case ErrorCode::ZeroDiagonal:
    case ErrorCode::SingularSplitting:
    case ErrorCode::NonPositiveResidual:
    case ErrorCode::ZeroImage:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid iterative solver with DeepONet corrections"};
  app.require_subcommand(1, 1);
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  for (const char* name : {"gen-data", "train", "solve", "sweep", "mode-transfer"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "INI run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "overrides run.seed");
    sub->add_option("--out", out, "output directory (overrides run.out)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hints::cli::kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = hints::cli::load_config(config, seed);
    if (!out.empty()) cfg.out = out;
    return hints::cli::run_command(command, cfg, std::cout);
  } catch (const hints::Error& e) {
    std::cerr << "hints " << command << ": " << e.what() << "\n";
    return is_numerical(e.code()) ? hints::cli::kExitNumerical : hints::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "hints " << command << ": " << e.what() << '\n';
    return hints::cli::kExitUsage;
  }
}
