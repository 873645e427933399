#include <cmath>
#include <string>

#include "hints/discretize.hpp"
#include "hints/error.hpp"

namespace hints::discretize {

namespace {

using linalg::SparseMatrix;
using Triplet = SparseMatrix::Triplet;

FieldSample on_grid(const FieldSample& field, const Grid& grid) {
  return field.grid == grid ? field : interpolate_field(field, grid);
}

void check_positive(const FieldSample& k) {
  for (double v : k.values)
    require(v > 0.0, ErrorCode::NonPositiveCoefficient, "Poisson coefficient must be positive at every node");
}

/// Maps node index to system row; -1 on boundary nodes.
std::vector<std::ptrdiff_t> row_of_node(const Grid& grid, const std::vector<std::size_t>& interior) {
  std::vector<std::ptrdiff_t> rows(grid.node_count(), -1);
  for (std::size_t r = 0; r < interior.size(); ++r) rows[interior[r]] = static_cast<std::ptrdiff_t>(r);
  return rows;
}

LinearSystem begin_system(const Grid& grid, Equation eq, FieldSample k) {
  LinearSystem sys;
  sys.grid = grid;
  sys.equation = eq;
  sys.k = std::move(k);
  sys.interior = grid.interior_nodes();
  return sys;
}

}  // namespace

LinearSystem assemble_poisson_1d(const ProblemSpec& spec, std::size_t n) {
  require(spec.equation == Equation::Poisson, ErrorCode::InvalidArgument, "expected a Poisson problem");
  require(spec.dimension() == 1, ErrorCode::DomainMismatch, "1D Poisson assembly needs a 1D problem");
  require(n >= 2, ErrorCode::InvalidArgument, "need at least two elements");
  const Grid grid = Grid::interval(n);
  FieldSample k = on_grid(spec.k, grid);
  check_positive(k);
  const FieldSample f = on_grid(spec.f, grid);

  // Linear elements with midpoint coefficient; the 1/h load scale is folded into A.
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> k_mid(n);
  for (std::size_t e = 0; e < n; ++e) k_mid[e] = 0.5 * (k.values[e] + k.values[e + 1]);

  const std::size_t m = n - 1;
  std::vector<Triplet> t;
  t.reserve(3 * m);
  for (std::size_t r = 0; r < m; ++r) {
    // row r <-> node r + 1, elements r (left) and r + 1 (right)
    if (r > 0) t.push_back({r, r - 1, -k_mid[r] * inv_h2});
    t.push_back({r, r, (k_mid[r] + k_mid[r + 1]) * inv_h2});
    if (r + 1 < m) t.push_back({r, r + 1, -k_mid[r + 1] * inv_h2});
  }
  LinearSystem sys = begin_system(grid, Equation::Poisson, std::move(k));
  sys.a = SparseMatrix::from_triplets(m, m, std::move(t));
  sys.f = load_vector(f, sys);
  return sys;
}

LinearSystem assemble_helmholtz_fd(const ProblemSpec& spec, std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "need at least two intervals per axis");
  const Grid grid = spec.dimension() == 1 ? Grid::interval(n) : Grid::square(n);
  require(spec.k.grid.kind() != GridKind::LShapedTriangulation || !spec.k.grid.has_notch(), ErrorCode::DomainMismatch,
          "finite differences are defined on the unit interval or square");
  FieldSample k = on_grid(spec.k, grid);
  const FieldSample f = on_grid(spec.f, grid);
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);

  LinearSystem sys = begin_system(grid, Equation::Helmholtz, std::move(k));
  const auto rows = row_of_node(grid, sys.interior);
  std::vector<Triplet> t;
  const int neighbours = grid.dimension() == 1 ? 2 : 4;
  for (std::size_t r = 0; r < sys.interior.size(); ++r) {
    const std::size_t node = sys.interior[r];
    const double kv = sys.k.values[node];
    t.push_back({r, r, -static_cast<double>(neighbours) * inv_h2 + kv * kv});
    const auto [ix, iy] = grid.lattice(node);
    auto couple = [&](std::size_t jx, std::size_t jy) {
      const auto other = grid.node_at(jx, jy);
      if (other && rows[*other] >= 0) t.push_back({r, static_cast<std::size_t>(rows[*other]), inv_h2});
    };
    couple(ix - 1, iy);
    couple(ix + 1, iy);
    if (grid.dimension() == 2) {
      couple(ix, iy - 1);
      couple(ix, iy + 1);
    }
  }
  const std::size_t m = sys.interior.size();
  sys.a = SparseMatrix::from_triplets(m, m, std::move(t));
  sys.f = load_vector(f, sys);
  return sys;
}

LinearSystem assemble_poisson_2d_fem(const ProblemSpec& spec, std::size_t resolution, bool notch) {
  require(spec.equation == Equation::Poisson, ErrorCode::InvalidArgument, "expected a Poisson problem");
  require(spec.dimension() == 2, ErrorCode::DomainMismatch, "2D FEM assembly needs a 2D problem");
  const Grid grid = Grid::l_shape(resolution, notch);
  FieldSample k = on_grid(spec.k, grid);
  check_positive(k);
  const FieldSample f = on_grid(spec.f, grid);

  LinearSystem sys = begin_system(grid, Equation::Poisson, std::move(k));
  const auto rows = row_of_node(grid, sys.interior);
  std::vector<Triplet> t;
  sys.incident_area.assign(sys.interior.size(), 0.0);
  for (const auto& tri : grid.triangles()) {
    const Point& p0 = grid.node(tri[0]);
    const Point& p1 = grid.node(tri[1]);
    const Point& p2 = grid.node(tri[2]);
    const double area = 0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    const double k_centroid = (sys.k.values[tri[0]] + sys.k.values[tri[1]] + sys.k.values[tri[2]]) / 3.0;
    for (int a = 0; a < 3; ++a) {
      const std::ptrdiff_t ra = rows[tri[a]];
      if (ra < 0) continue;
      sys.incident_area[static_cast<std::size_t>(ra)] += area;
      for (int bb = 0; bb < 3; ++bb) {
        const std::ptrdiff_t rb = rows[tri[bb]];
        if (rb < 0) continue;
        const double kab = k_centroid * (b[a] * b[bb] + c[a] * c[bb]) / (4.0 * area);
        t.push_back({static_cast<std::size_t>(ra), static_cast<std::size_t>(rb), kab});
      }
    }
  }
  const std::size_t m = sys.interior.size();
  sys.a = SparseMatrix::from_triplets(m, m, std::move(t));
  sys.f = load_vector(f, sys);
  return sys;
}

LinearSystem assemble(const ProblemSpec& spec, const Grid& grid) {
  switch (grid.kind()) {
    case GridKind::UniformInterval:
      if (spec.equation == Equation::Poisson) return assemble_poisson_1d(spec, grid.subdivisions());
      return assemble_helmholtz_fd(spec, grid.subdivisions());
    case GridKind::UniformSquare:
      require(spec.equation == Equation::Helmholtz, ErrorCode::InvalidArgument,
              "2D Poisson is discretized on the triangulated grid");
      return assemble_helmholtz_fd(spec, grid.subdivisions());
    case GridKind::LShapedTriangulation:
      require(spec.equation == Equation::Poisson, ErrorCode::InvalidArgument,
              "triangulated grids carry the Poisson FEM discretization");
      return assemble_poisson_2d_fem(spec, grid.subdivisions(), grid.has_notch());
  }
  fail(ErrorCode::InvalidArgument, "unsupported grid");
}

Vector load_vector(const FieldSample& f_field, const LinearSystem& system) {
  const FieldSample f = on_grid(f_field, system.grid);
  Vector load(system.interior.size(), 0.0);
  if (system.grid.kind() != GridKind::LShapedTriangulation) {
    for (std::size_t r = 0; r < load.size(); ++r) load[r] = f.values[system.interior[r]];
    return load;
  }
  const auto rows = row_of_node(system.grid, system.interior);
  for (const auto& tri : system.grid.triangles()) {
    const Point& p0 = system.grid.node(tri[0]);
    const Point& p1 = system.grid.node(tri[1]);
    const Point& p2 = system.grid.node(tri[2]);
    const double area = 0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    const double f_centroid = (f.values[tri[0]] + f.values[tri[1]] + f.values[tri[2]]) / 3.0;
    for (int a = 0; a < 3; ++a)
      if (rows[tri[a]] >= 0) load[static_cast<std::size_t>(rows[tri[a]])] += f_centroid * area / 3.0;
  }
  return load;
}

FieldSample revert_residual(std::span<const double> r, const LinearSystem& system) {
  require(r.size() == system.interior.size(), ErrorCode::DimensionMismatch,
          "residual has " + std::to_string(r.size()) + " entries for " + std::to_string(system.interior.size()) +
              " unknowns");
  Vector values(system.grid.node_count(), 0.0);
  const bool triangulated = system.grid.kind() == GridKind::LShapedTriangulation;
  for (std::size_t i = 0; i < r.size(); ++i)
    values[system.interior[i]] = triangulated ? nodal_value_from_load(r[i], system.incident_area[i]) : r[i];
  return FieldSample(system.grid, std::move(values));
}

linalg::SignChangeLines sign_change_lines(const LinearSystem& system) {
  const Grid& g = system.grid;
  const auto rows = row_of_node(g, system.interior);
  linalg::SignChangeLines lines;
  if (g.dimension() == 1) {
    lines.emplace_back();
    for (std::size_t r = 0; r < system.interior.size(); ++r) lines.back().push_back(r);
    return lines;
  }
  const std::size_t n = g.subdivisions();
  for (int axis = 0; axis < 2; ++axis)
    for (std::size_t a = 0; a <= n; ++a) {
      std::vector<std::size_t> line;
      for (std::size_t b = 0; b <= n; ++b) {
        const auto node = axis == 0 ? g.node_at(b, a) : g.node_at(a, b);
        if (node && rows[*node] >= 0) line.push_back(static_cast<std::size_t>(rows[*node]));
      }
      if (line.size() > 1) lines.push_back(std::move(line));
    }
  return lines;
}

}  // namespace hints::discretize
