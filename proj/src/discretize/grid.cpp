#include <charconv>
#include <string>

#include "hints/discretize.hpp"
#include "hints/error.hpp"

namespace hints::discretize {

std::string_view to_string(Equation e) { return e == Equation::Poisson ? "poisson" : "helmholtz"; }

Equation parse_equation(std::string_view name) {
  if (name == "poisson") return Equation::Poisson;
  if (name == "helmholtz") return Equation::Helmholtz;
  fail(ErrorCode::InvalidArgument, "unknown equation '" + std::string(name) + "'");
}

Grid Grid::interval(std::size_t intervals) {
  require(intervals >= 1, ErrorCode::InvalidArgument, "interval grid needs at least one interval");
  Grid g;
  g.kind_ = GridKind::UniformInterval;
  g.n_ = intervals;
  const double h = g.spacing();
  for (std::size_t i = 0; i <= intervals; ++i) {
    g.nodes_.push_back({static_cast<double>(i) * h, 0.0});
    g.boundary_.push_back(i == 0 || i == intervals);
    g.lattice_.push_back({i, 0});
    g.lattice_to_node_.push_back(static_cast<std::ptrdiff_t>(i));
  }
  return g;
}

Grid Grid::square(std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "square grid needs at least one interval per axis");
  Grid g;
  g.kind_ = GridKind::UniformSquare;
  g.n_ = n;
  const double h = g.spacing();
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i <= n; ++i) {
      g.lattice_to_node_.push_back(static_cast<std::ptrdiff_t>(g.nodes_.size()));
      g.nodes_.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
      g.boundary_.push_back(i == 0 || j == 0 || i == n || j == n);
      g.lattice_.push_back({i, j});
    }
  return g;
}

Grid Grid::l_shape(std::size_t resolution, bool notch) {
  require(resolution >= 4 && resolution % 2 == 0, ErrorCode::InvalidArgument,
          "L-shape resolution must be even and >= 4");
  Grid g;
  g.kind_ = GridKind::LShapedTriangulation;
  g.n_ = resolution;
  g.notch_ = notch;
  const std::size_t half = resolution / 2;
  const double h = g.spacing();
  auto in_notch_interior = [&](std::size_t i, std::size_t j) { return notch && i > half && j > half; };
  for (std::size_t j = 0; j <= resolution; ++j)
    for (std::size_t i = 0; i <= resolution; ++i) {
      if (in_notch_interior(i, j)) {
        g.lattice_to_node_.push_back(-1);
        continue;
      }
      g.lattice_to_node_.push_back(static_cast<std::ptrdiff_t>(g.nodes_.size()));
      g.nodes_.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
      const bool outer = i == 0 || j == 0 || i == resolution || j == resolution;
      const bool notch_edge = notch && i >= half && j >= half;
      g.boundary_.push_back(outer || notch_edge);
      g.lattice_.push_back({i, j});
    }
  for (std::size_t j = 0; j < resolution; ++j)
    for (std::size_t i = 0; i < resolution; ++i) {
      if (notch && i >= half && j >= half) continue;
      const std::size_t v00 = *g.node_at(i, j);
      const std::size_t v10 = *g.node_at(i + 1, j);
      const std::size_t v11 = *g.node_at(i + 1, j + 1);
      const std::size_t v01 = *g.node_at(i, j + 1);
      g.triangles_.push_back({v00, v10, v11});
      g.triangles_.push_back({v00, v11, v01});
    }
  return g;
}

Grid Grid::parse(std::string_view description) {
  const auto colon = description.find(':');
  require(colon != std::string_view::npos, ErrorCode::InvalidArgument,
          "grid description '" + std::string(description) + "' lacks ':'");
  const auto kind = description.substr(0, colon);
  const auto count = description.substr(colon + 1);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
  require(ec == std::errc() && ptr == count.data() + count.size(), ErrorCode::InvalidArgument,
          "grid description '" + std::string(description) + "' has a bad count");
  if (kind == "interval") return interval(n);
  if (kind == "square") return square(n);
  if (kind == "lshape") return l_shape(n, true);
  if (kind == "lshape-full") return l_shape(n, false);
  fail(ErrorCode::InvalidArgument, "unknown grid kind '" + std::string(kind) + "'");
}

std::optional<std::size_t> Grid::node_at(std::size_t ix, std::size_t iy) const {
  const std::size_t stride = n_ + 1;
  if (ix > n_ || (kind_ != GridKind::UniformInterval && iy > n_)) return std::nullopt;
  if (kind_ == GridKind::UniformInterval && iy != 0) return std::nullopt;
  const std::ptrdiff_t idx = lattice_to_node_[iy * stride + ix];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::vector<std::size_t> Grid::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!boundary_[i]) out.push_back(i);
  return out;
}

std::vector<Point> Grid::interior_points() const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!boundary_[i]) out.push_back(nodes_[i]);
  return out;
}

std::string Grid::describe() const {
  switch (kind_) {
    case GridKind::UniformInterval: return "interval:" + std::to_string(n_);
    case GridKind::UniformSquare: return "square:" + std::to_string(n_);
    case GridKind::LShapedTriangulation: return (notch_ ? "lshape:" : "lshape-full:") + std::to_string(n_);
  }
  return {};
}

Grid coarsen(const Grid& grid) {
  require(grid.subdivisions() % 2 == 0 && grid.subdivisions() >= 2, ErrorCode::SizeMismatch,
          "cannot coarsen " + grid.describe() + ": subdivisions must be even");
  switch (grid.kind()) {
    case GridKind::UniformInterval: return Grid::interval(grid.subdivisions() / 2);
    case GridKind::UniformSquare: return Grid::square(grid.subdivisions() / 2);
    case GridKind::LShapedTriangulation: break;
  }
  fail(ErrorCode::GridIncompatible, "multigrid coarsening supports uniform grids only");
}

FieldSample::FieldSample(Grid g, Vector v) : grid(std::move(g)), values(std::move(v)) {
  require(values.size() == grid.node_count(), ErrorCode::DimensionMismatch,
          "field has " + std::to_string(values.size()) + " values for " + std::to_string(grid.node_count()) +
              " nodes");
}

FieldSample FieldSample::constant(const Grid& g, double value) { return FieldSample(g, Vector(g.node_count(), value)); }

ProblemSpec::ProblemSpec(Equation eq, FieldSample k_field, FieldSample f_field)
    : equation(eq), k(std::move(k_field)), f(std::move(f_field)) {
  require(k.grid == f.grid, ErrorCode::GridMismatch, "k and f must share one grid");
  if (equation == Equation::Poisson)
    for (double v : k.values)
      require(v > 0.0, ErrorCode::NonPositiveCoefficient, "Poisson coefficient must be positive");
}

std::vector<Point> LinearSystem::interior_points() const {
  std::vector<Point> out;
  out.reserve(interior.size());
  for (std::size_t node : interior) out.push_back(grid.node(node));
  return out;
}

}  // namespace hints::discretize
