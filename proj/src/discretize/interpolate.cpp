#include <algorithm>
#include <cmath>

#include "hints/discretize.hpp"
#include "hints/error.hpp"

namespace hints::discretize {

namespace {

/// Cell index and local coordinate in [0,1] for a point on a uniform axis.
std::pair<std::size_t, double> locate(double x, std::size_t n) {
  const double s = std::clamp(x, 0.0, 1.0) * static_cast<double>(n);
  std::size_t cell = static_cast<std::size_t>(std::floor(s));
  if (cell >= n) cell = n - 1;
  return {cell, s - static_cast<double>(cell)};
}

double eval_interval(const FieldSample& src, const Point& p) {
  const auto [i, t] = locate(p.x, src.grid.subdivisions());
  return (1.0 - t) * src.values[i] + t * src.values[i + 1];
}

double eval_square(const FieldSample& src, const Point& p) {
  const std::size_t n = src.grid.subdivisions();
  const auto [i, tx] = locate(p.x, n);
  const auto [j, ty] = locate(p.y, n);
  const auto& g = src.grid;
  const double v00 = src.values[*g.node_at(i, j)];
  const double v10 = src.values[*g.node_at(i + 1, j)];
  const double v01 = src.values[*g.node_at(i, j + 1)];
  const double v11 = src.values[*g.node_at(i + 1, j + 1)];
  return (1.0 - tx) * (1.0 - ty) * v00 + tx * (1.0 - ty) * v10 + (1.0 - tx) * ty * v01 + tx * ty * v11;
}

double eval_triangulated(const FieldSample& src, const Point& p) {
  const auto& g = src.grid;
  const std::size_t n = g.subdivisions();
  const auto [i, dx] = locate(p.x, n);
  const auto [j, dy] = locate(p.y, n);
  if (g.has_notch() && i >= n / 2 && j >= n / 2) {
    // Point lies in the removed quadrant unless it sits on the notch edges.
    const double half = 0.5;
    if (p.x > half + 1e-14 && p.y > half + 1e-14) return 0.0;
  }
  const auto n00 = g.node_at(i, j);
  const auto n10 = g.node_at(i + 1, j);
  const auto n01 = g.node_at(i, j + 1);
  const auto n11 = g.node_at(i + 1, j + 1);
  auto value = [&](const std::optional<std::size_t>& node) { return node ? src.values[*node] : 0.0; };
  if (dx >= dy) return (1.0 - dx) * value(n00) + (dx - dy) * value(n10) + dy * value(n11);
  return (1.0 - dy) * value(n00) + dx * value(n11) + (dy - dx) * value(n01);
}

}  // namespace

FieldSample interpolate_field(const FieldSample& src, const Grid& dst) {
  if (src.grid == dst) return src;
  require(src.grid.dimension() == dst.dimension(), ErrorCode::DomainMismatch,
          "cannot interpolate " + src.grid.describe() + " onto " + dst.describe());
  Vector out(dst.node_count());
  for (std::size_t i = 0; i < dst.node_count(); ++i) {
    const Point& p = dst.node(i);
    switch (src.grid.kind()) {
      case GridKind::UniformInterval: out[i] = eval_interval(src, p); break;
      case GridKind::UniformSquare: out[i] = eval_square(src, p); break;
      case GridKind::LShapedTriangulation: out[i] = eval_triangulated(src, p); break;
    }
  }
  return FieldSample(dst, std::move(out));
}

}  // namespace hints::discretize
