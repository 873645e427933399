#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hints/dataset.hpp"
#include "hints/deeponet.hpp"
#include "hints/solver.hpp"

namespace hints::cli {

enum class Domain { Interval, Square, LShape };

/// Parsed INI run description. See configs/README for the schema.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";

  data::ProblemFamily family;
  Domain domain = Domain::Interval;
  std::size_t n = 30;    // system subdivisions
  std::size_t n_d = 30;  // model grid subdivisions

  std::size_t samples = 1000;
  std::filesystem::path dataset_path;  // empty: <out>/dataset.bin
  std::filesystem::path model_path;    // empty: <out>/model.bin

  deeponet::TrainConfig train;
  solver::SolverConfig solver;
  bool truth = true;
  std::string source = "grf";  // grf | dataset
  std::size_t case_index = 0;

  std::vector<std::size_t> periods{2, 4, 6, 8, 12, 16, 25, 40};
  std::size_t sweep_cases = 20;
  std::size_t modes = 15;
  std::size_t transfer_cases = 100;

  discretize::Grid system_grid() const;
  discretize::Grid model_grid() const;
  std::filesystem::path dataset_file() const { return dataset_path.empty() ? out / "dataset.bin" : dataset_path; }
  std::filesystem::path model_file() const { return model_path.empty() ? out / "model.bin" : model_path; }
  /// Seed of fresh test problems; distinct from the training stream.
  std::uint64_t test_seed() const;
};

/// Throws ConfigError on unknown sections or keys, naming the offending key.
/// `seed` overrides run.seed; one of the two must be present.
RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

int cmd_gen_data(const RunConfig& cfg, std::ostream& log);
int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_mode_transfer(const RunConfig& cfg, std::ostream& log);

/// Dispatches by command name; returns the process exit code.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

/// Loss history as epoch,learning_rate,train_loss,test_loss.
std::string loss_csv(const std::vector<deeponet::EpochLoss>& history);

}  // namespace hints::cli
