#include "hints/error.hpp"
#include "hints/solver.hpp"

namespace hints::solver {

Hierarchy::Hierarchy(const LinearSystem& fine, std::size_t levels, std::size_t direct_limit) : fine_(&fine) {
  require(levels >= 1, ErrorCode::InvalidArgument, "multigrid needs at least one level");
  systems_.resize(levels);
  const discretize::ProblemSpec spec(fine.equation, fine.k, discretize::FieldSample::constant(fine.grid, 0.0));
  discretize::Grid grid = fine.grid;
  for (std::size_t l = 1; l < levels; ++l) {
    require(grid.kind() != discretize::GridKind::LShapedTriangulation, ErrorCode::InvalidArgument,
            "multigrid coarsening supports interval and square grids");
    require(grid.subdivisions() % 2 == 0 && grid.subdivisions() >= 4, ErrorCode::InvalidArgument,
            "grid " + grid.describe() + " cannot be coarsened further");
    grid = discretize::coarsen(grid);
    systems_[l] = discretize::assemble(spec, grid);
  }
  if (levels > 1 && systems_.back().size() <= direct_limit) coarse_lu_.emplace(systems_.back().a.to_dense());
}

namespace {

struct CycleContext {
  const Hierarchy& h;
  const SolverConfig& cfg;
  const std::vector<std::unique_ptr<BoundCorrector>>* correctors;
  std::size_t* calls;
};

void relax_block(const CycleContext& ctx, std::size_t level, std::span<const double> f, Vector& v) {
  const LinearSystem& sys = ctx.h.system(level);
  const BoundCorrector* corr =
      ctx.correctors && level < ctx.correctors->size() ? (*ctx.correctors)[level].get() : nullptr;
  for (std::size_t j = 1; j <= ctx.cfg.relaxations; ++j) {
    if (corr && ctx.cfg.period != kNever && j % ctx.cfg.period == 0) {
      const Vector dv = corr->apply(linalg::residual(sys.a, f, v));
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += dv[i];
      if (ctx.calls) ++*ctx.calls;
    } else if (ctx.cfg.smoother == Splitting::Jacobi) {
      v = jacobi_step(sys.a, f, v, ctx.cfg.omega);
    } else {
      v = gs_step(sys.a, f, v);
    }
  }
}

Vector cycle(const CycleContext& ctx, std::size_t level, std::span<const double> f, Vector v) {
  const std::size_t last = ctx.h.levels() - 1;
  if (level == last && ctx.h.coarse_lu()) return ctx.h.coarse_lu()->solve(f);
  relax_block(ctx, level, f, v);
  if (level < last) {
    const LinearSystem& sys = ctx.h.system(level);
    const int dim = sys.grid.dimension();
    const Vector rc = restrict_full_weighting(linalg::residual(sys.a, f, v), dim);
    const Vector ec = cycle(ctx, level + 1, rc, Vector(rc.size(), 0.0));
    const Vector ef = prolong_linear(ec, dim);
    require(ef.size() == v.size(), ErrorCode::SizeMismatch, "prolonged correction does not fit the fine level");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += ef[i];
  }
  relax_block(ctx, level, f, v);
  return v;
}

}  // namespace

Vector v_cycle(const Hierarchy& h, std::span<const double> f, std::span<const double> v, const SolverConfig& cfg,
               const std::vector<std::unique_ptr<BoundCorrector>>* correctors, std::size_t* deeponet_calls) {
  require(f.size() == h.system(0).size() && v.size() == f.size(), ErrorCode::DimensionMismatch,
          "V-cycle vectors do not match the finest level");
  const CycleContext ctx{h, cfg, correctors, deeponet_calls};
  return cycle(ctx, 0, f, Vector(v.begin(), v.end()));
}

}  // namespace hints::solver
