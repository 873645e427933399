#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hints/deeponet.hpp"
#include "hints/discretize.hpp"
#include "hints/linalg.hpp"

namespace hints::solver {

using discretize::LinearSystem;
using linalg::DenseMatrix;
using linalg::SparseMatrix;
using linalg::Vector;

enum class Splitting { Jacobi, GaussSeidel };

/// (1-w) v - w D^{-1} (L+U) v + w D^{-1} f.
Vector jacobi_step(const SparseMatrix& a, std::span<const double> f, std::span<const double> v, double omega);
/// One forward sweep: (L+D)^{-1} (f - U v).
Vector gs_step(const SparseMatrix& a, std::span<const double> f, std::span<const double> v);

/// G = I - w M^{-1} A with M = D (Jacobi) or L + D (Gauss-Seidel).
/// For Gauss-Seidel, w != 1 describes v + w (gs_step(v) - v).
DenseMatrix amplification_matrix(const DenseMatrix& a, double omega, Splitting splitting);

/// Full weighting on interior-node vectors: fine count 2m+1 per axis maps
/// to m, coarse node i sitting on fine node 2i+1. `dimension` is 1 or 2.
Vector restrict_full_weighting(std::span<const double> fine, int dimension);
/// Linear (bilinear) interpolation; the restriction transpose scaled by 2 per axis.
Vector prolong_linear(std::span<const double> coarse, int dimension);

/// Rediscretized operator hierarchy; level 0 is the input system.
class Hierarchy {
 public:
  Hierarchy(const LinearSystem& fine, std::size_t levels, std::size_t direct_limit);

  std::size_t levels() const noexcept { return systems_.size(); }
  const LinearSystem& system(std::size_t level) const { return level == 0 ? *fine_ : systems_[level]; }
  /// LU of the coarsest operator when it is small enough for a direct solve.
  const std::optional<linalg::LuFactorization>& coarse_lu() const noexcept { return coarse_lu_; }

 private:
  const LinearSystem* fine_;
  std::vector<LinearSystem> systems_;  // entry 0 unused
  std::optional<linalg::LuFactorization> coarse_lu_;
};

/// A correction operator applied to residuals of one fixed system.
class BoundCorrector {
 public:
  virtual ~BoundCorrector() = default;
  /// Returns dv such that v + dv approximates the solution of A e = r added to v.
  virtual Vector apply(std::span<const double> residual) const = 0;
};

class Corrector {
 public:
  virtual ~Corrector() = default;
  virtual std::unique_ptr<BoundCorrector> bind(const LinearSystem& system) const = 0;
};

/// DeepONet correction: revert the residual to a field, interpolate k and the
/// field to the model grid when needed, evaluate at the system's interior nodes.
class DeepOnetCorrector final : public Corrector {
 public:
  explicit DeepOnetCorrector(const deeponet::DeepOnetModel& model) : model_(&model) {}
  std::unique_ptr<BoundCorrector> bind(const LinearSystem& system) const override;
  const deeponet::DeepOnetModel& model() const { return *model_; }

 private:
  const deeponet::DeepOnetModel* model_;
};

/// Exact solve of A e = r; stands in for a perfect operator network.
class ExactCorrector final : public Corrector {
 public:
  std::unique_ptr<BoundCorrector> bind(const LinearSystem& system) const override;
};

enum class SolverKind { Jacobi, GaussSeidel, Multigrid, HintsJacobi, HintsGaussSeidel, HintsMultigrid };

std::string_view to_string(SolverKind k);
SolverKind parse_solver_kind(std::string_view name);
bool is_hybrid(SolverKind k);
bool is_multigrid(SolverKind k);

inline constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

struct SolverConfig {
  SolverKind kind = SolverKind::Jacobi;
  double omega = 2.0 / 3.0;
  /// DeepONet period n_r; kNever disables it.
  std::size_t period = kNever;
  /// Iterations, or V-cycles for multigrid kinds.
  std::size_t max_iterations = 1000;
  /// Relaxations per level and per side of a V-cycle.
  std::size_t relaxations = 3;
  std::size_t levels = 1;
  /// Smoother inside V-cycles.
  Splitting smoother = Splitting::Jacobi;
  double tolerance = 1e-12;
  bool deeponet_on_coarsest = true;
  /// Coarsest operators up to this dimension are solved directly (multilevel runs only).
  std::size_t direct_limit = 32;
  double divergence_factor = 1e12;
  /// 1-based frequency-ordered mode indices recorded in the trace.
  std::vector<std::size_t> tracked_modes;

  void validate() const;
  /// 2/3 in 1D, 4/5 in 2D.
  static double default_omega(int dimension) { return dimension == 1 ? 2.0 / 3.0 : 4.0 / 5.0; }
};

enum class StepKind { Init, Relax, DeepOnet, Cycle };
std::string_view to_string(StepKind k);

enum class SolveStatus { Converged, MaxIterations, Diverged };
std::string_view to_string(SolveStatus s);

struct TraceRecord {
  std::size_t iter = 0;
  StepKind kind = StepKind::Init;
  double res_l2 = 0.0;
  std::optional<double> err_l2;
  std::vector<double> modes;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  SolveStatus status = SolveStatus::MaxIterations;
  std::vector<std::size_t> tracked_modes;
  double f_norm = 0.0;

  std::size_t iterations() const { return records.empty() ? 0 : records.back().iter; }
  double final_residual() const { return records.empty() ? 0.0 : records.back().res_l2; }
  std::size_t deeponet_calls = 0;

  /// iter,step_kind,res_l2,err_l2,mode_<i>... at 17 significant digits.
  std::string csv() const;
  void save(const std::filesystem::path& path) const;
};

/// Reference solution and modal basis for error tracking.
struct Truth {
  Vector u;
  const linalg::EigenDecomposition* eig = nullptr;
};

struct SolveResult {
  Vector v;
  SolveTrace trace;
};

/// Classical or hybrid iteration from v0 = 0. Iterations are numbered from 1;
/// hybrid kinds apply the corrector when n_r divides the iteration (or the
/// step index within a multigrid relaxation block).
SolveResult hints_solve(const LinearSystem& system, const SolverConfig& cfg, const Corrector* corrector = nullptr,
                        const Truth* truth = nullptr);

/// One V-cycle on a prebuilt hierarchy (level 0 = finest).
Vector v_cycle(const Hierarchy& h, std::span<const double> f, std::span<const double> v, const SolverConfig& cfg,
               const std::vector<std::unique_ptr<BoundCorrector>>* correctors = nullptr,
               std::size_t* deeponet_calls = nullptr);

}  // namespace hints::solver
