#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hints/deeponet.hpp"
#include "hints/discretize.hpp"
#include "hints/grf.hpp"

namespace hints::data {

/// Equation plus the random-field laws of k and f.
struct ProblemFamily {
  discretize::Equation equation = discretize::Equation::Poisson;
  grf::GrfConfig k;
  grf::GrfConfig f;

  /// Rows of the standard parameter table: "poisson-1d", "helmholtz-1d",
  /// "poisson-lshape", "helmholtz-2d".
  static ProblemFamily preset(std::string_view name);
};

/// A random problem on `grid`. Fields for index i depend only on
/// (seed, i), with independent streams for k and f.
discretize::ProblemSpec draw_problem(const ProblemFamily& family, const discretize::Grid& grid, std::uint64_t seed,
                                     std::uint64_t index);

/// Draws `count` problems in one pass (shares the Cholesky factors).
std::vector<discretize::ProblemSpec> draw_problems(const ProblemFamily& family, const discretize::Grid& grid,
                                                   std::uint64_t seed, std::uint64_t first, std::size_t count);

/// Assembled systems of draw_problems.
std::vector<discretize::LinearSystem> draw_systems(const ProblemFamily& family, const discretize::Grid& grid,
                                                   std::uint64_t seed, std::uint64_t first, std::size_t count);

/// Nodal solution (boundary zeros included) of the assembled system.
linalg::Vector solve_nodal(const discretize::LinearSystem& system);

struct Dataset {
  ProblemFamily family;
  discretize::Grid grid = discretize::Grid::interval(2);
  std::uint64_t seed = 0;
  std::vector<deeponet::TrainingSample> samples;

  std::string metadata() const;
};

/// k, f from the random fields on `grid`, u by a direct solve of the assembled system.
Dataset generate_dataset(const ProblemFamily& family, const discretize::Grid& grid, std::size_t count,
                         std::uint64_t seed);

inline constexpr char kDatasetMagic[8] = {'H', 'N', 'T', 'S', 'D', 'S', '1', '\0'};
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace hints::data
