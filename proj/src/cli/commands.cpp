#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hints/analysis.hpp"
#include "hints/cli.hpp"
#include "hints/error.hpp"
#include "hints/io.hpp"

namespace hints::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::string loss_csv(const std::vector<deeponet::EpochLoss>& history) {
  io::CsvWriter w({"epoch", "learning_rate", "train_loss", "test_loss"});
  for (const auto& h : history)
    w.add_row({std::to_string(h.epoch), io::format_double(h.learning_rate), io::format_double(h.train_loss),
               io::format_double(h.test_loss)});
  return w.str();
}

int cmd_gen_data(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto data = data::generate_dataset(cfg.family, cfg.model_grid(), cfg.samples, cfg.seed);
  data::save_dataset(data, cfg.dataset_file());
  log << "gen-data: " << data.samples.size() << " samples on " << data.grid.describe() << " -> "
      << cfg.dataset_file().string() << " (" << seconds_since(t0) << " s)\n";
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto data = data::load_dataset(cfg.dataset_file());
  require(data.grid == cfg.model_grid(), ErrorCode::GridMismatch,
          "dataset grid " + data.grid.describe() + " differs from the configured model grid " +
              cfg.model_grid().describe());
  deeponet::DeepOnetModel model(deeponet::Architecture::for_grid(data.grid), data.grid,
                                deeponet::default_mask(data.grid), cfg.train.alpha, cfg.train.eps, cfg.seed);
  const auto result = deeponet::train(std::move(model), data.samples, cfg.train);
  deeponet::save_model(result.model, cfg.model_file());
  io::write_file(cfg.out / "loss.csv", loss_csv(result.history));
  const auto& first = result.history.front();
  const auto& last = result.history.back();
  log << "train: " << result.model.parameter_count() << " parameters, " << cfg.train.epochs << " epochs, test loss "
      << first.test_loss << " -> " << last.test_loss << " (" << seconds_since(t0) << " s)\n";
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  auto t0 = Clock::now();
  const auto grid = cfg.system_grid();
  discretize::ProblemSpec spec;
  if (cfg.source == "dataset") {
    const auto data = data::load_dataset(cfg.dataset_file());
    require(cfg.case_index < data.samples.size(), ErrorCode::InvalidArgument, "solver.case exceeds the dataset");
    const auto& s = data.samples[cfg.case_index];
    spec = discretize::ProblemSpec(data.family.equation, discretize::FieldSample(data.grid, s.k),
                                   discretize::FieldSample(data.grid, s.f));
  } else {
    spec = data::draw_problem(cfg.family, grid, cfg.test_seed(), cfg.case_index);
  }
  const auto system = discretize::assemble(spec, grid);

  std::optional<deeponet::DeepOnetModel> model;
  std::optional<solver::DeepOnetCorrector> corrector;
  if (solver::is_hybrid(cfg.solver.kind)) {
    model.emplace(deeponet::load_model(cfg.model_file()));
    corrector.emplace(*model);
  }

  std::optional<solver::Truth> truth;
  std::optional<linalg::EigenDecomposition> eig;
  if (cfg.truth) {
    truth.emplace();
    truth->u = linalg::direct_solve(system.a, system.f);
    if (!cfg.solver.tracked_modes.empty()) {
      const auto lines = discretize::sign_change_lines(system);
      eig.emplace(linalg::symmetric_eig(system.a.to_dense(), &lines));
      truth->eig = &*eig;
    }
  }
  const double setup_s = seconds_since(t0);
  t0 = Clock::now();
  const auto result =
      solver::hints_solve(system, cfg.solver, corrector ? &*corrector : nullptr, truth ? &*truth : nullptr);
  const double solve_s = seconds_since(t0);

  result.trace.save(cfg.out / "trace.csv");
  io::CsvWriter sol({"row", "node", "x", "y", "v", "u"});
  const auto pts = system.interior_points();
  for (std::size_t r = 0; r < system.size(); ++r)
    sol.add_row({std::to_string(r), std::to_string(system.interior[r]), io::format_double(pts[r].x),
                 io::format_double(pts[r].y), io::format_double(result.v[r]),
                 truth ? io::format_double(truth->u[r]) : std::string()});
  sol.save(cfg.out / "solution.csv");

  const auto& tr = result.trace;
  std::ostringstream summary;
  summary << "kind=" << solver::to_string(cfg.solver.kind) << '\n'
          << "grid=" << grid.describe() << '\n'
          << "status=" << solver::to_string(tr.status) << '\n'
          << "iterations=" << tr.iterations() << '\n'
          << "deeponet_calls=" << tr.deeponet_calls << '\n'
          << "f_l2=" << io::format_double(tr.f_norm) << '\n'
          << "final_res_l2=" << io::format_double(tr.final_residual()) << '\n'
          << "final_relative_residual=" << io::format_double(tr.final_residual() / tr.f_norm) << '\n';
  if (tr.records.back().err_l2) summary << "final_err_l2=" << io::format_double(*tr.records.back().err_l2) << '\n';
  io::write_file(cfg.out / "summary.txt", summary.str());
  log << "solve: " << solver::to_string(cfg.solver.kind) << " " << solver::to_string(tr.status) << " after "
      << tr.iterations() << " iterations, |r|/|f| = " << tr.final_residual() / tr.f_norm << " (setup " << setup_s
      << " s, solve " << solve_s << " s)\n";
  return tr.status == solver::SolveStatus::Diverged ? kExitNumerical : kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  require(solver::is_hybrid(cfg.solver.kind), ErrorCode::ConfigError, "sweep needs a hybrid solver.kind");
  const auto model = deeponet::load_model(cfg.model_file());
  const solver::DeepOnetCorrector corrector(model);
  const auto systems = data::draw_systems(cfg.family, cfg.system_grid(), cfg.test_seed(), 0, cfg.sweep_cases);
  const auto r = analysis::rate_sweep(systems, corrector, cfg.periods, cfg.solver);
  r.save(cfg.out / "sweep.csv");
  log << "sweep: " << systems.size() << " cases x " << cfg.periods.size() << " periods, best mean n_r = "
      << r.periods[r.best_mean_index()] << " (" << seconds_since(t0) << " s)\n";
  return kExitOk;
}

int cmd_mode_transfer(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto model = deeponet::load_model(cfg.model_file());
  const solver::DeepOnetCorrector corrector(model);
  const auto systems = data::draw_systems(cfg.family, cfg.system_grid(), cfg.test_seed(), 0, cfg.transfer_cases);
  std::vector<std::uint64_t> seeds(systems.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  const auto m = analysis::mode_transfer(corrector, systems, cfg.modes, seeds);
  m.save(cfg.out / "mode_transfer.csv");
  log << "mode-transfer: " << cfg.modes << " modes over " << systems.size() << " cases (" << seconds_since(t0)
      << " s)\n";
  return kExitOk;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  if (command == "gen-data") return cmd_gen_data(cfg, log);
  if (command == "train") return cmd_train(cfg, log);
  if (command == "solve") return cmd_solve(cfg, log);
  if (command == "sweep") return cmd_sweep(cfg, log);
  if (command == "mode-transfer") return cmd_mode_transfer(cfg, log);
  fail(ErrorCode::ConfigError, "unknown command '" + command + "'");
}

}  // namespace hints::cli
