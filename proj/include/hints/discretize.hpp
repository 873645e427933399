#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hints/linalg.hpp"

namespace hints::discretize {

using linalg::Vector;

enum class GridKind { UniformInterval, UniformSquare, LShapedTriangulation };
enum class Equation { Poisson, Helmholtz };

std::string_view to_string(Equation e);
Equation parse_equation(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Node set on the unit interval, the unit square, or a structured
/// right-triangle mesh of the L-shape (0,1)^2 \ [0.5,1)^2. Nodes carry
/// integer lattice coordinates; spacing is 1/subdivisions on every axis.
class Grid {
 public:
  static Grid interval(std::size_t intervals);
  static Grid square(std::size_t intervals_per_axis);
  /// `notch = false` triangulates the full unit square with the same pattern.
  static Grid l_shape(std::size_t resolution, bool notch = true);
  /// Inverse of describe().
  static Grid parse(std::string_view description);

  GridKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return kind_ == GridKind::UniformInterval ? 1 : 2; }
  std::size_t subdivisions() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(n_); }
  bool has_notch() const noexcept { return notch_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const Point& node(std::size_t i) const { return nodes_[i]; }
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
  std::array<std::size_t, 2> lattice(std::size_t i) const { return lattice_[i]; }
  /// Node index at lattice position, if the node exists.
  std::optional<std::size_t> node_at(std::size_t ix, std::size_t iy) const;

  /// Triangles as node-index triples (l-shaped-triangulation only).
  const std::vector<std::array<std::size_t, 3>>& triangles() const noexcept { return triangles_; }

  std::vector<std::size_t> interior_nodes() const;
  std::vector<Point> interior_points() const;

  /// "interval:30", "square:32", "lshape:30", "lshape-full:30".
  std::string describe() const;

  bool operator==(const Grid& other) const {
    return kind_ == other.kind_ && n_ == other.n_ && notch_ == other.notch_;
  }

 private:
  GridKind kind_ = GridKind::UniformInterval;
  std::size_t n_ = 0;
  bool notch_ = false;
  std::vector<Point> nodes_;
  std::vector<char> boundary_;
  std::vector<std::array<std::size_t, 2>> lattice_;
  std::vector<std::ptrdiff_t> lattice_to_node_;
  std::vector<std::array<std::size_t, 3>> triangles_;
};

/// Uniform grid with half the subdivisions (multigrid coarsening).
Grid coarsen(const Grid& grid);

/// Values of a scalar function at every node of a grid, boundary included.
struct FieldSample {
  Grid grid;
  Vector values;

  FieldSample() = default;
  FieldSample(Grid g, Vector v);
  static FieldSample constant(const Grid& g, double value);
};

struct ProblemSpec {
  Equation equation = Equation::Poisson;
  FieldSample k;
  FieldSample f;

  ProblemSpec() = default;
  ProblemSpec(Equation eq, FieldSample k_field, FieldSample f_field);
  int dimension() const { return k.grid.dimension(); }
};

/// Assembled system over the interior nodes; homogeneous Dirichlet nodes eliminated.
struct LinearSystem {
  linalg::SparseMatrix a;
  Vector f;
  Grid grid;
  Equation equation = Equation::Poisson;
  /// Coefficient field on `grid`.
  FieldSample k;
  /// Row r of the system is node interior[r] of `grid`.
  std::vector<std::size_t> interior;
  /// Summed area of triangles incident to each row (triangulated grids only).
  Vector incident_area;

  std::size_t size() const noexcept { return f.size(); }
  std::vector<Point> interior_points() const;
};

LinearSystem assemble_poisson_1d(const ProblemSpec& spec, std::size_t n);
LinearSystem assemble_helmholtz_fd(const ProblemSpec& spec, std::size_t n);
LinearSystem assemble_poisson_2d_fem(const ProblemSpec& spec, std::size_t resolution, bool notch = true);

/// Dispatches on equation and target grid kind; fields are interpolated to
/// `grid` when they live elsewhere.
LinearSystem assemble(const ProblemSpec& spec, const Grid& grid);

/// Load vector of a forcing field under the system's discretization.
Vector load_vector(const FieldSample& f, const LinearSystem& system);

/// Piecewise-linear interpolation (segment-linear, bilinear on squares,
/// barycentric on triangles). Points of the unit square outside an L-shaped
/// source domain receive 0.
FieldSample interpolate_field(const FieldSample& src, const Grid& dst);

/// Function-form field of an algebraic residual; boundary nodes are 0.
FieldSample revert_residual(std::span<const double> r, const LinearSystem& system);

/// Nodal function value of a triangulated load entry: 3 * load / incident area.
inline double nodal_value_from_load(double load, double incident_area) { return 3.0 * load / incident_area; }

/// Lattice rows and columns of the interior unknowns, for mode frequency ordering.
linalg::SignChangeLines sign_change_lines(const LinearSystem& system);

}  // namespace hints::discretize
