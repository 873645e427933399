#include <cmath>
#include <sstream>

#include "hints/error.hpp"
#include "hints/io.hpp"
#include "hints/solver.hpp"

namespace hints::solver {

std::string_view to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Jacobi: return "Jacobi";
    case SolverKind::GaussSeidel: return "GS";
    case SolverKind::Multigrid: return "MG";
    case SolverKind::HintsJacobi: return "HINTS-Jacobi";
    case SolverKind::HintsGaussSeidel: return "HINTS-GS";
    case SolverKind::HintsMultigrid: return "HINTS-MG";
  }
  return "?";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (auto k : {SolverKind::Jacobi, SolverKind::GaussSeidel, SolverKind::Multigrid, SolverKind::HintsJacobi,
                 SolverKind::HintsGaussSeidel, SolverKind::HintsMultigrid})
    if (to_string(k) == name) return k;
  fail(ErrorCode::InvalidArgument, "unknown solver kind '" + std::string(name) + "'");
}

bool is_hybrid(SolverKind k) {
  return k == SolverKind::HintsJacobi || k == SolverKind::HintsGaussSeidel || k == SolverKind::HintsMultigrid;
}

bool is_multigrid(SolverKind k) { return k == SolverKind::Multigrid || k == SolverKind::HintsMultigrid; }

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::Init: return "init";
    case StepKind::Relax: return "relax";
    case StepKind::DeepOnet: return "deeponet";
    case StepKind::Cycle: return "cycle";
  }
  return "?";
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::Diverged: return "Diverged";
  }
  return "?";
}

void SolverConfig::validate() const {
  require(omega > 0.0 && omega <= 1.0, ErrorCode::InvalidArgument, "omega must be in (0, 1]");
  require(tolerance > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  require(!is_hybrid(kind) || period >= 2, ErrorCode::InvalidArgument, "hybrid period n_r must be at least 2");
  require(levels >= 1, ErrorCode::InvalidArgument, "levels must be at least 1");
  require(!is_multigrid(kind) || relaxations >= 1, ErrorCode::InvalidArgument, "relaxations must be positive");
  require(divergence_factor > 0.0, ErrorCode::InvalidArgument, "divergence factor must be positive");
  for (auto m : tracked_modes) require(m >= 1, ErrorCode::InvalidArgument, "mode indices are 1-based");
}

std::string SolveTrace::csv() const {
  std::vector<std::string> header{"iter", "step_kind", "res_l2", "err_l2"};
  for (auto m : tracked_modes) header.push_back("mode_" + std::to_string(m));
  io::CsvWriter w(header);
  for (const auto& r : records) {
    std::vector<std::string> row{std::to_string(r.iter), std::string(to_string(r.kind)), io::format_double(r.res_l2),
                                 r.err_l2 ? io::format_double(*r.err_l2) : std::string()};
    for (std::size_t i = 0; i < tracked_modes.size(); ++i)
      row.push_back(i < r.modes.size() ? io::format_double(r.modes[i]) : std::string());
    w.add_row(std::move(row));
  }
  return w.str();
}

void SolveTrace::save(const std::filesystem::path& path) const { io::write_file(path, csv()); }

SolveResult hints_solve(const LinearSystem& system, const SolverConfig& cfg, const Corrector* corrector,
                        const Truth* truth) {
  cfg.validate();
  const bool hybrid = is_hybrid(cfg.kind);
  require(!hybrid || corrector != nullptr, ErrorCode::ModelMissing,
          std::string(to_string(cfg.kind)) + " needs a trained model");
  const std::size_t n = system.size();
  if (truth) require(truth->u.size() == n, ErrorCode::DimensionMismatch, "reference solution size mismatch");

  std::vector<Vector> modes;
  if (truth && truth->eig) {
    for (auto m : cfg.tracked_modes) {
      require(m <= truth->eig->frequency_order.size(), ErrorCode::InvalidArgument,
              "tracked mode " + std::to_string(m) + " exceeds the system dimension");
      modes.push_back(truth->eig->mode(m - 1));
    }
  }

  SolveResult out;
  out.v.assign(n, 0.0);
  SolveTrace& trace = out.trace;
  if (!modes.empty()) trace.tracked_modes = cfg.tracked_modes;
  trace.f_norm = linalg::norm2(system.f);

  auto record = [&](std::size_t iter, StepKind kind, double res) {
    TraceRecord rec{iter, kind, res, std::nullopt, {}};
    if (truth) {
      Vector e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = truth->u[i] - out.v[i];
      rec.err_l2 = linalg::norm2(e);
      for (const auto& phi : modes) rec.modes.push_back(linalg::dot(phi, e));
    }
    trace.records.push_back(std::move(rec));
  };
  // Returns true when the run stops.
  auto check = [&](double res) {
    if (!std::isfinite(res) || res > cfg.divergence_factor * trace.f_norm) {
      trace.status = SolveStatus::Diverged;
      return true;
    }
    if (res <= cfg.tolerance * trace.f_norm) {
      trace.status = SolveStatus::Converged;
      return true;
    }
    return false;
  };

  record(0, StepKind::Init, trace.f_norm);
  if (trace.f_norm == 0.0) {
    trace.status = SolveStatus::Converged;
    return out;
  }
  trace.status = SolveStatus::MaxIterations;

  if (is_multigrid(cfg.kind)) {
    const Hierarchy h(system, cfg.levels, cfg.direct_limit);
    std::vector<std::unique_ptr<BoundCorrector>> bound;
    if (hybrid) {
      for (std::size_t l = 0; l < h.levels(); ++l) {
        const bool coarsest = l + 1 == h.levels();
        bound.push_back(coarsest && !cfg.deeponet_on_coarsest ? nullptr : corrector->bind(h.system(l)));
      }
    }
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
      out.v = v_cycle(h, system.f, out.v, cfg, hybrid ? &bound : nullptr, &trace.deeponet_calls);
      const double res = linalg::norm2(linalg::residual(system.a, system.f, out.v));
      record(it, StepKind::Cycle, res);
      if (check(res)) break;
    }
    return out;
  }

  const auto bound = hybrid ? corrector->bind(system) : nullptr;
  const bool jacobi = cfg.kind == SolverKind::Jacobi || cfg.kind == SolverKind::HintsJacobi;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    StepKind kind = StepKind::Relax;
    if (hybrid && cfg.period != kNever && it % cfg.period == 0) {
      const Vector dv = bound->apply(linalg::residual(system.a, system.f, out.v));
      for (std::size_t i = 0; i < n; ++i) out.v[i] += dv[i];
      kind = StepKind::DeepOnet;
      ++trace.deeponet_calls;
    } else if (jacobi) {
      out.v = jacobi_step(system.a, system.f, out.v, cfg.omega);
    } else {
      out.v = gs_step(system.a, system.f, out.v);
    }
    const double res = linalg::norm2(linalg::residual(system.a, system.f, out.v));
    record(it, kind, res);
    if (check(res)) break;
  }
  return out;
}

}  // namespace hints::solver
