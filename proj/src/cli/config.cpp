#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <functional>
#include <map>
#include <sstream>

#include "hints/cli.hpp"
#include "hints/error.hpp"
#include "hints/io.hpp"
#include "hints/random.hpp"

namespace hints::cli {

namespace {

namespace pt = boost::property_tree;

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos == v.size() && x >= 0) return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ConfigError, key + ": expected a nonnegative integer, got '" + v + "'");
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return io::parse_double(v);
  } catch (const Error&) {
    fail(ErrorCode::ConfigError, key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(ErrorCode::ConfigError, key + ": expected true or false, got '" + v + "'");
}

std::vector<std::size_t> to_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(to_count(key, item.substr(b, e - b + 1)));
  }
  return out;
}

std::size_t to_period(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "never") return solver::kNever;
  return to_count(key, v);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> s = {
      {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_count(k, v); }},
      {"run.out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
      {"problem.n", [](RunConfig& c, auto& k, auto& v) { c.n = to_count(k, v); }},
      {"problem.n_d", [](RunConfig& c, auto& k, auto& v) { c.n_d = to_count(k, v); }},
      {"grf.k.mean", [](RunConfig& c, auto& k, auto& v) { c.family.k.mean = to_real(k, v); }},
      {"grf.k.sigma", [](RunConfig& c, auto& k, auto& v) { c.family.k.sigma = to_real(k, v); }},
      {"grf.k.length_scale", [](RunConfig& c, auto& k, auto& v) { c.family.k.length_scale = to_real(k, v); }},
      {"grf.k.k_min",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "none")
           c.family.k.k_min.reset();
         else
           c.family.k.k_min = to_real(k, v);
       }},
      {"grf.f.mean", [](RunConfig& c, auto& k, auto& v) { c.family.f.mean = to_real(k, v); }},
      {"grf.f.sigma", [](RunConfig& c, auto& k, auto& v) { c.family.f.sigma = to_real(k, v); }},
      {"grf.f.length_scale", [](RunConfig& c, auto& k, auto& v) { c.family.f.length_scale = to_real(k, v); }},
      {"data.samples", [](RunConfig& c, auto& k, auto& v) { c.samples = to_count(k, v); }},
      {"data.path", [](RunConfig& c, auto&, auto& v) { c.dataset_path = v; }},
      {"model.path", [](RunConfig& c, auto&, auto& v) { c.model_path = v; }},
      {"train.epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs = to_count(k, v); }},
      {"train.batch_size", [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = to_count(k, v); }},
      {"train.learning_rate", [](RunConfig& c, auto& k, auto& v) { c.train.learning_rate = to_real(k, v); }},
      {"train.decay_factor", [](RunConfig& c, auto& k, auto& v) { c.train.decay_factor = to_real(k, v); }},
      {"train.decay_interval", [](RunConfig& c, auto& k, auto& v) { c.train.decay_interval = to_count(k, v); }},
      {"train.alpha", [](RunConfig& c, auto& k, auto& v) { c.train.alpha = to_real(k, v); }},
      {"train.eps", [](RunConfig& c, auto& k, auto& v) { c.train.eps = to_real(k, v); }},
      {"train.test_fraction", [](RunConfig& c, auto& k, auto& v) { c.train.test_fraction = to_real(k, v); }},
      {"solver.kind",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           c.solver.kind = solver::parse_solver_kind(v);
         } catch (const Error&) {
           fail(ErrorCode::ConfigError, k + ": unknown solver kind '" + v + "'");
         }
       }},
      {"solver.omega", [](RunConfig& c, auto& k, auto& v) { c.solver.omega = to_real(k, v); }},
      {"solver.n_r", [](RunConfig& c, auto& k, auto& v) { c.solver.period = to_period(k, v); }},
      {"solver.max_iterations", [](RunConfig& c, auto& k, auto& v) { c.solver.max_iterations = to_count(k, v); }},
      {"solver.relaxations", [](RunConfig& c, auto& k, auto& v) { c.solver.relaxations = to_count(k, v); }},
      {"solver.levels", [](RunConfig& c, auto& k, auto& v) { c.solver.levels = to_count(k, v); }},
      {"solver.smoother",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "Jacobi")
           c.solver.smoother = solver::Splitting::Jacobi;
         else if (v == "GS")
           c.solver.smoother = solver::Splitting::GaussSeidel;
         else
           fail(ErrorCode::ConfigError, k + ": expected Jacobi or GS, got '" + v + "'");
       }},
      {"solver.tolerance", [](RunConfig& c, auto& k, auto& v) { c.solver.tolerance = to_real(k, v); }},
      {"solver.deeponet_on_coarsest",
       [](RunConfig& c, auto& k, auto& v) { c.solver.deeponet_on_coarsest = to_bool(k, v); }},
      {"solver.direct_limit", [](RunConfig& c, auto& k, auto& v) { c.solver.direct_limit = to_count(k, v); }},
      {"solver.tracked_modes", [](RunConfig& c, auto& k, auto& v) { c.solver.tracked_modes = to_list(k, v); }},
      {"solver.truth", [](RunConfig& c, auto& k, auto& v) { c.truth = to_bool(k, v); }},
      {"solver.source",
       [](RunConfig& c, auto& k, auto& v) {
         if (v != "grf" && v != "dataset") fail(ErrorCode::ConfigError, k + ": expected grf or dataset");
         c.source = v;
       }},
      {"solver.case", [](RunConfig& c, auto& k, auto& v) { c.case_index = to_count(k, v); }},
      {"sweep.periods", [](RunConfig& c, auto& k, auto& v) { c.periods = to_list(k, v); }},
      {"sweep.cases", [](RunConfig& c, auto& k, auto& v) { c.sweep_cases = to_count(k, v); }},
      {"mode_transfer.modes", [](RunConfig& c, auto& k, auto& v) { c.modes = to_count(k, v); }},
      {"mode_transfer.cases", [](RunConfig& c, auto& k, auto& v) { c.transfer_cases = to_count(k, v); }},
  };
  return s;
}

std::string preset_for(discretize::Equation eq, Domain d) {
  using discretize::Equation;
  if (d == Domain::Interval) return eq == Equation::Poisson ? "poisson-1d" : "helmholtz-1d";
  if (d == Domain::Square) {
    require(eq == Equation::Helmholtz, ErrorCode::ConfigError, "problem.equation: the square domain is Helmholtz only");
    return "helmholtz-2d";
  }
  require(eq == Equation::Poisson, ErrorCode::ConfigError, "problem.equation: the L-shaped domain is Poisson only");
  return "poisson-lshape";
}

}  // namespace

discretize::Grid RunConfig::system_grid() const {
  switch (domain) {
    case Domain::Interval: return discretize::Grid::interval(n);
    case Domain::Square: return discretize::Grid::square(n);
    case Domain::LShape: return discretize::Grid::l_shape(n);
  }
  return discretize::Grid::interval(n);
}

discretize::Grid RunConfig::model_grid() const {
  switch (domain) {
    case Domain::Interval: return discretize::Grid::interval(n_d);
    case Domain::Square: return discretize::Grid::square(n_d);
    case Domain::LShape: return discretize::Grid::l_shape(n_d);
  }
  return discretize::Grid::interval(n_d);
}

std::uint64_t RunConfig::test_seed() const { return splitmix64(seed ^ 0x7465737463617365ULL); }

RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::ConfigError, std::string("config syntax: ") + e.what());
  }

  std::map<std::string, std::string> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      fail(ErrorCode::ConfigError, "key '" + section + "' must be inside a section");
    for (const auto& [key, value] : body) entries[section + "." + key] = value.data();
  }

  RunConfig cfg;
  // The problem section picks the defaults everything else refines.
  const auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = entries.find(k);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  };
  discretize::Equation eq = discretize::Equation::Poisson;
  if (auto v = get("problem.equation")) {
    try {
      eq = discretize::parse_equation(*v);
    } catch (const Error&) {
      fail(ErrorCode::ConfigError, "problem.equation: expected poisson or helmholtz, got '" + *v + "'");
    }
  }
  if (auto v = get("problem.domain")) {
    if (*v == "interval")
      cfg.domain = Domain::Interval;
    else if (*v == "square")
      cfg.domain = Domain::Square;
    else if (*v == "lshape")
      cfg.domain = Domain::LShape;
    else
      fail(ErrorCode::ConfigError, "problem.domain: expected interval, square or lshape, got '" + *v + "'");
  }
  cfg.family = data::ProblemFamily::preset(preset_for(eq, cfg.domain));
  const int dim = cfg.domain == Domain::Interval ? 1 : 2;
  cfg.solver.omega = solver::SolverConfig::default_omega(dim);
  if (cfg.domain == Domain::Interval) {
    cfg.train.alpha = eq == discretize::Equation::Poisson ? 0.0 : 1.0;
  } else {
    cfg.train.alpha = 2.0;
  }
  cfg.train.eps = cfg.train.alpha == 0.0 ? 0.0 : 1e-2;
  if (cfg.domain == Domain::Square) cfg.n = 32;

  bool have_seed = false;
  for (const auto& [key, value] : entries) {
    if (key == "problem.equation" || key == "problem.domain") continue;
    const auto it = schema().find(key);
    if (it == schema().end()) fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    it->second(cfg, key, value);
    if (key == "run.seed") have_seed = true;
  }
  if (seed) {
    cfg.seed = *seed;
    have_seed = true;
  }
  require(have_seed, ErrorCode::ConfigError, "run.seed is required");
  require(cfg.n >= 2 && cfg.n_d >= 2, ErrorCode::ConfigError, "problem.n and problem.n_d must be at least 2");
  cfg.train.seed = cfg.seed;
  try {
    cfg.train.validate();
    cfg.solver.validate();
    cfg.family.k.validate();
    cfg.family.f.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  return parse_config(text, seed);
}

}  // namespace hints::cli
