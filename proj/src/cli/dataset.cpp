#include "hints/dataset.hpp"

#include <sstream>

#include "hints/error.hpp"
#include "hints/io.hpp"
#include "hints/parallel.hpp"
#include "hints/random.hpp"

namespace hints::data {

namespace {

constexpr std::uint64_t kStreamK = 0x6B;
constexpr std::uint64_t kStreamF = 0x66;

grf::GrfConfig law(double mean, std::optional<double> k_min, double sigma, double length) {
  grf::GrfConfig c;
  c.mean = mean;
  c.k_min = k_min;
  c.sigma = sigma;
  c.length_scale = length;
  return c;
}

void write_law(std::ostream& os, const std::string& prefix, const grf::GrfConfig& c) {
  os << prefix << ".mean=" << io::format_double(c.mean) << '\n';
  os << prefix << ".sigma=" << io::format_double(c.sigma) << '\n';
  os << prefix << ".length_scale=" << io::format_double(c.length_scale) << '\n';
  os << prefix << ".k_min=" << (c.k_min ? io::format_double(*c.k_min) : std::string("none")) << '\n';
}

grf::GrfConfig read_law(const std::map<std::string, std::string>& md, const std::string& prefix) {
  grf::GrfConfig c;
  c.mean = io::parse_double(io::metadata_value(md, prefix + ".mean"));
  c.sigma = io::parse_double(io::metadata_value(md, prefix + ".sigma"));
  c.length_scale = io::parse_double(io::metadata_value(md, prefix + ".length_scale"));
  const auto& kmin = io::metadata_value(md, prefix + ".k_min");
  if (kmin != "none") c.k_min = io::parse_double(kmin);
  return c;
}

}  // namespace

ProblemFamily ProblemFamily::preset(std::string_view name) {
  using discretize::Equation;
  if (name == "poisson-1d") return {Equation::Poisson, law(1.0, 0.3, 0.3, 0.1), law(0.0, std::nullopt, 1.0, 0.1)};
  if (name == "helmholtz-1d") return {Equation::Helmholtz, law(8.0, 3.0, 2.0, 0.2), law(0.0, std::nullopt, 1.0, 0.1)};
  if (name == "poisson-lshape") return {Equation::Poisson, law(1.0, 0.3, 0.3, 0.1), law(0.0, std::nullopt, 1.0, 0.1)};
  if (name == "helmholtz-2d") return {Equation::Helmholtz, law(6.0, 3.0, 0.5, 0.3), law(0.0, std::nullopt, 1.0, 0.1)};
  fail(ErrorCode::InvalidArgument, "unknown problem preset '" + std::string(name) + "'");
}

std::vector<discretize::ProblemSpec> draw_problems(const ProblemFamily& family, const discretize::Grid& grid,
                                                   std::uint64_t seed, std::uint64_t first, std::size_t count) {
  grf::GrfConfig kc = family.k;
  grf::GrfConfig fc = family.f;
  kc.seed = splitmix64(seed ^ kStreamK);
  fc.seed = splitmix64(seed ^ kStreamF);
  const grf::GaussianRandomField kf(grid, kc);
  const grf::GaussianRandomField ff(grid, fc);
  std::vector<discretize::ProblemSpec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.emplace_back(family.equation, kf.draw(first + i), ff.draw(first + i));
  return out;
}

discretize::ProblemSpec draw_problem(const ProblemFamily& family, const discretize::Grid& grid, std::uint64_t seed,
                                     std::uint64_t index) {
  return std::move(draw_problems(family, grid, seed, index, 1).front());
}

std::vector<discretize::LinearSystem> draw_systems(const ProblemFamily& family, const discretize::Grid& grid,
                                                   std::uint64_t seed, std::uint64_t first, std::size_t count) {
  const auto specs = draw_problems(family, grid, seed, first, count);
  std::vector<discretize::LinearSystem> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = discretize::assemble(specs[i], grid); });
  return out;
}

linalg::Vector solve_nodal(const discretize::LinearSystem& system) {
  const auto v = linalg::direct_solve(system.a, system.f);
  linalg::Vector u(system.grid.node_count(), 0.0);
  for (std::size_t r = 0; r < v.size(); ++r) u[system.interior[r]] = v[r];
  return u;
}

std::string Dataset::metadata() const {
  std::ostringstream os;
  os << "equation=" << discretize::to_string(family.equation) << '\n';
  os << "dimension=" << grid.dimension() << '\n';
  os << "grid=" << grid.describe() << '\n';
  os << "sample_count=" << samples.size() << '\n';
  os << "node_count=" << grid.node_count() << '\n';
  os << "layout=per sample: k[nodes], f[nodes], u[nodes]\n";
  write_law(os, "grf_k", family.k);
  write_law(os, "grf_f", family.f);
  os << "generator=squared-exponential GRF (Cholesky), u by banded direct solve\n";
  os << "seed=" << seed << '\n';
  return os.str();
}

Dataset generate_dataset(const ProblemFamily& family, const discretize::Grid& grid, std::size_t count,
                         std::uint64_t seed) {
  Dataset d;
  d.family = family;
  d.grid = grid;
  d.seed = seed;
  const auto specs = draw_problems(family, grid, seed, 0, count);
  d.samples.resize(count);
  parallel_for(count, [&](std::size_t i) {
    const auto sys = discretize::assemble(specs[i], grid);
    d.samples[i] = {specs[i].k.values, specs[i].f.values, solve_nodal(sys)};
  });
  return d;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  const std::size_t nodes = data.grid.node_count();
  std::vector<double> payload;
  payload.reserve(3 * nodes * data.samples.size());
  for (const auto& s : data.samples) {
    require(s.k.size() == nodes && s.f.size() == nodes && s.u.size() == nodes, ErrorCode::SizeMismatch,
            "dataset sample does not match its grid");
    payload.insert(payload.end(), s.k.begin(), s.k.end());
    payload.insert(payload.end(), s.f.begin(), s.f.end());
    payload.insert(payload.end(), s.u.begin(), s.u.end());
  }
  io::write_file(path, io::encode_container(kDatasetMagic, kDatasetVersion, data.metadata(), payload));
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto c = io::decode_container(io::read_file(path), kDatasetMagic, kDatasetVersion);
  const auto md = io::parse_metadata(c.metadata);
  Dataset d;
  d.family.equation = discretize::parse_equation(io::metadata_value(md, "equation"));
  d.family.k = read_law(md, "grf_k");
  d.family.f = read_law(md, "grf_f");
  d.grid = discretize::Grid::parse(io::metadata_value(md, "grid"));
  d.seed = std::stoull(io::metadata_value(md, "seed"));
  const std::size_t count = std::stoull(io::metadata_value(md, "sample_count"));
  const std::size_t nodes = d.grid.node_count();
  require(c.values.size() == 3 * nodes * count, ErrorCode::CorruptChecksum,
          "dataset payload does not match sample count and grid");
  d.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double* base = c.values.data() + 3 * nodes * i;
    d.samples[i].k.assign(base, base + nodes);
    d.samples[i].f.assign(base + nodes, base + 2 * nodes);
    d.samples[i].u.assign(base + 2 * nodes, base + 3 * nodes);
  }
  require(d.metadata() == c.metadata, ErrorCode::CorruptChecksum, "dataset metadata is inconsistent");
  return d;
}

}  // namespace hints::data
