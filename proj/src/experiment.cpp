#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "util.hpp"

namespace fraclab {

namespace {

using nlohmann::ordered_json;

// ---------------------------------------------------------------- parsing

struct RawConfig {
  // section -> key -> value (last wins), plus seen-order for diagnostics
  std::map<std::string, std::map<std::string, std::string>> sections;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

bool parse_raw(const std::string& text, RawConfig& raw, std::vector<std::string>& errors) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": unterminated section header");
        return false;
      }
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      return false;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": key outside of any [section]");
      return false;
    }
    raw.sections[section][key] = value;
  }
  return true;
}

class ConfigReader {
 public:
  ConfigReader(RawConfig raw, std::vector<std::string>& errors)
      : raw_(std::move(raw)), errors_(errors) {}

  bool has(const std::string& section, const std::string& key) {
    auto s = raw_.sections.find(section);
    if (s == raw_.sections.end()) return false;
    return s->second.count(key) != 0;
  }

  std::string str(const std::string& section, const std::string& key,
                  const std::string& fallback) {
    auto s = raw_.sections.find(section);
    if (s == raw_.sections.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
  }

  double number(const std::string& section, const std::string& key, double fallback) {
    std::string v = str(section, key, "");
    if (v.empty()) return fallback;
    try {
      std::size_t pos = 0;
      double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      errors_.push_back(section + "." + key + ": not a number: '" + v + "'");
      return fallback;
    }
  }

  std::int64_t integer(const std::string& section, const std::string& key,
                       std::int64_t fallback) {
    std::string v = str(section, key, "");
    if (v.empty()) return fallback;
    try {
      std::size_t pos = 0;
      long long out = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      errors_.push_back(section + "." + key + ": not an integer: '" + v + "'");
      return fallback;
    }
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(str(section, key, ""))) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        errors_.push_back(section + "." + key + ": not a number: '" + item + "'");
      }
    }
    return out;
  }

  void check_unknown() {
    static const std::map<std::string, std::vector<std::string>> known = {
        {"domain", {"label", "radius", "semi_axes", "half_widths", "half_length", "cap_radius"}},
        {"grid", {"dim", "h", "extent"}},
        {"kernel", {"s", "R", "c"}},
        {"solver",
         {"tolerance", "max_iterations", "seed", "initial_guess", "threads"}},
        {"tasks",
         {"run", "eig_count", "p", "constrained", "cinf", "small_volume_levels",
          "sweep_pairs"}},
        {"output", {"dir"}}};
    for (const auto& [section, keys] : raw_.sections) {
      auto k = known.find(section);
      if (k == known.end()) {
        errors_.push_back("unknown section [" + section + "]");
        continue;
      }
      for (const auto& [key, value] : keys)
        if (std::find(k->second.begin(), k->second.end(), key) == k->second.end())
          errors_.push_back(section + "." + key + ": unknown key");
    }
  }

 private:
  RawConfig raw_;
  std::vector<std::string>& errors_;
};

}  // namespace

ParseResult parse_config_text(const std::string& text) {
  ParseResult result;
  RawConfig raw;
  if (!parse_raw(text, raw, result.errors)) return result;
  ConfigReader reader(raw, result.errors);
  reader.check_unknown();

  ExperimentConfig cfg;

  // grid
  cfg.dim = static_cast<int>(reader.integer("grid", "dim", 2));
  if (cfg.dim < 1 || cfg.dim > kMaxDim)
    result.errors.push_back("grid.dim: must be in [1," + std::to_string(kMaxDim) + "]");
  cfg.h = reader.number("grid", "h", 0.0);
  if (!(cfg.h > 0.0)) result.errors.push_back("grid.h: must be positive");
  {
    auto ext = reader.numbers("grid", "extent");
    if (ext.empty()) {
      result.errors.push_back("grid.extent: required (cells per axis)");
    } else {
      if (ext.size() == 1) ext.assign(static_cast<std::size_t>(std::max(cfg.dim, 1)), ext[0]);
      if (static_cast<int>(ext.size()) != cfg.dim)
        result.errors.push_back("grid.extent: expected 1 or dim entries");
      for (std::size_t a = 0; a < ext.size() && a < kMaxDim; ++a) {
        int e = static_cast<int>(ext[a]);
        if (e < 2 || e % 2 != 0)
          result.errors.push_back("grid.extent: entries must be even and >= 2");
        cfg.extent[a] = e;
      }
    }
  }

  // domain
  std::string label = reader.str("domain", "label", "");
  if (label == "disk") label = "ball";
  if (label == "ball") cfg.label = DomainLabel::kBall;
  else if (label == "ellipse") cfg.label = DomainLabel::kEllipse;
  else if (label == "rectangle") cfg.label = DomainLabel::kRectangle;
  else if (label == "stadium") cfg.label = DomainLabel::kStadium;
  else if (label.empty()) result.errors.push_back("domain.label: required");
  else result.errors.push_back("domain.label: unknown label '" + label +
                               "' (valid: ball, disk, ellipse, rectangle, stadium)");

  cfg.shape.radius = reader.number("domain", "radius", 0.0);
  {
    auto axes = reader.numbers("domain", "semi_axes");
    for (std::size_t a = 0; a < axes.size() && a < kMaxDim; ++a) cfg.shape.semi_axes[a] = axes[a];
    auto widths = reader.numbers("domain", "half_widths");
    for (std::size_t a = 0; a < widths.size() && a < kMaxDim; ++a)
      cfg.shape.half_widths[a] = widths[a];
  }
  cfg.shape.stadium_half_length = reader.number("domain", "half_length", 0.0);
  cfg.shape.stadium_cap_radius = reader.number("domain", "cap_radius", 0.0);
  if (cfg.label == DomainLabel::kBall && !(cfg.shape.radius > 0.0))
    result.errors.push_back("domain.radius: must be positive for ball domains");
  if (cfg.label == DomainLabel::kEllipse)
    for (int a = 0; a < cfg.dim; ++a)
      if (!(cfg.shape.semi_axes[a] > 0.0)) {
        result.errors.push_back("domain.semi_axes: need dim positive entries");
        break;
      }
  if (cfg.label == DomainLabel::kRectangle)
    for (int a = 0; a < cfg.dim; ++a)
      if (!(cfg.shape.half_widths[a] > 0.0)) {
        result.errors.push_back("domain.half_widths: need dim positive entries");
        break;
      }
  if (cfg.label == DomainLabel::kStadium &&
      !(cfg.shape.stadium_cap_radius > 0.0 && cfg.shape.stadium_half_length >= 0.0))
    result.errors.push_back("domain.cap_radius/half_length: stadium needs cap_radius > 0");

  // kernel
  cfg.s = reader.number("kernel", "s", 0.5);
  if (!(cfg.s > 0.0 && cfg.s < 1.0))
    result.errors.push_back("kernel.s: must lie in the open interval (0,1)");
  cfg.truncation_radius = reader.number("kernel", "R", 0.0);
  if (reader.has("kernel", "R") && cfg.h > 0.0 && cfg.truncation_radius < 3.0 * cfg.h)
    result.errors.push_back("kernel.R: must be at least 3h");
  cfg.kernel_constant = reader.number("kernel", "c", 0.0);
  if (reader.has("kernel", "c") && !(cfg.kernel_constant > 0.0))
    result.errors.push_back("kernel.c: override must be positive");

  // solver
  cfg.solver.tolerance = reader.number("solver", "tolerance", 1e-9);
  if (!(cfg.solver.tolerance > 0.0))
    result.errors.push_back("solver.tolerance: must be positive");
  cfg.solver.max_iterations =
      static_cast<int>(reader.integer("solver", "max_iterations", 600));
  cfg.seed = static_cast<std::uint64_t>(reader.integer("solver", "seed", 1));
  cfg.solver.seed = cfg.seed;
  std::string guess = reader.str("solver", "initial_guess", "default");
  if (guess == "default") cfg.solver.initial_guess = SolverOptions::InitialGuess::kDefault;
  else if (guess == "random") cfg.solver.initial_guess = SolverOptions::InitialGuess::kRandom;
  else result.errors.push_back("solver.initial_guess: must be 'default' or 'random'");
  cfg.threads = static_cast<int>(reader.integer("solver", "threads", 1));
  if (cfg.threads < 1) result.errors.push_back("solver.threads: must be >= 1");

  // tasks
  for (const auto& name : split_list(reader.str("tasks", "run", ""))) {
    if (std::find(known_tasks().begin(), known_tasks().end(), name) == known_tasks().end()) {
      std::string valid;
      for (const auto& t : known_tasks()) valid += (valid.empty() ? "" : ", ") + t;
      result.errors.push_back("tasks.run: unknown task '" + name + "' (valid: " + valid + ")");
    } else {
      cfg.tasks.push_back(name);
    }
  }
  cfg.eig_count = static_cast<int>(reader.integer("tasks", "eig_count", 1));
  if (cfg.eig_count < 1) result.errors.push_back("tasks.eig_count: must be >= 1");
  cfg.p = reader.number("tasks", "p", 2.0);
  bool needs_p = std::find(cfg.tasks.begin(), cfg.tasks.end(), "minimize-p") != cfg.tasks.end() ||
                 std::find(cfg.tasks.begin(), cfg.tasks.end(), "verify-all") != cfg.tasks.end() ||
                 std::find(cfg.tasks.begin(), cfg.tasks.end(), "moving-plane") != cfg.tasks.end();
  if (needs_p && cfg.s > 0.0 && cfg.s < 1.0 && cfg.dim >= 1) {
    if (2.0 * cfg.s < cfg.dim) {
      double critical = 2.0 * cfg.dim / (cfg.dim - 2.0 * cfg.s);
      if (!(cfg.p > 1.0 && cfg.p < critical))
        result.errors.push_back("tasks.p: must lie in (1, " + std::to_string(critical) +
                                ") for dim " + std::to_string(cfg.dim) + ", s " +
                                std::to_string(cfg.s));
    } else if (!(cfg.p > 1.0)) {
      result.errors.push_back("tasks.p: must exceed 1");
    }
  }
  std::string constrained = reader.str("tasks", "constrained", "true");
  if (constrained == "true") cfg.constrained = true;
  else if (constrained == "false") cfg.constrained = false;
  else result.errors.push_back("tasks.constrained: must be true or false");
  cfg.c_inf = reader.number("tasks", "cinf", 8.0);
  if (!(cfg.c_inf >= 0.0)) result.errors.push_back("tasks.cinf: must be nonnegative");
  cfg.small_volume_levels =
      static_cast<int>(reader.integer("tasks", "small_volume_levels", 4));
  if (cfg.small_volume_levels < 2)
    result.errors.push_back("tasks.small_volume_levels: must be >= 2");
  cfg.sweep_pairs = static_cast<std::uint64_t>(reader.integer("tasks", "sweep_pairs", 100000));

  // output
  cfg.output_dir = reader.str("output", "dir", "out");

  if (!result.errors.empty()) return result;
  result.config = cfg;
  return result;
}

ParseResult parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult result;
    result.errors.push_back("cannot read config file: " + path);
    return result;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ---------------------------------------------------------------- running

namespace {

ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json j;
  j["domain"]["label"] = to_string(cfg.label);
  switch (cfg.label) {
    case DomainLabel::kBall: j["domain"]["radius"] = cfg.shape.radius; break;
    case DomainLabel::kEllipse: {
      std::vector<double> axes(cfg.shape.semi_axes.begin(),
                               cfg.shape.semi_axes.begin() + cfg.dim);
      j["domain"]["semi_axes"] = axes;
      break;
    }
    case DomainLabel::kRectangle: {
      std::vector<double> widths(cfg.shape.half_widths.begin(),
                                 cfg.shape.half_widths.begin() + cfg.dim);
      j["domain"]["half_widths"] = widths;
      break;
    }
    case DomainLabel::kStadium:
      j["domain"]["half_length"] = cfg.shape.stadium_half_length;
      j["domain"]["cap_radius"] = cfg.shape.stadium_cap_radius;
      break;
    case DomainLabel::kCustom: break;
  }
  j["grid"]["dim"] = cfg.dim;
  j["grid"]["h"] = cfg.h;
  j["grid"]["extent"] = std::vector<int>(cfg.extent.begin(), cfg.extent.begin() + cfg.dim);
  j["kernel"]["s"] = cfg.s;
  j["kernel"]["R"] = cfg.truncation_radius;
  j["kernel"]["c"] = cfg.kernel_constant;
  j["solver"]["tolerance"] = cfg.solver.tolerance;
  j["solver"]["max_iterations"] = cfg.solver.max_iterations;
  j["solver"]["seed"] = cfg.seed;
  j["solver"]["initial_guess"] =
      cfg.solver.initial_guess == SolverOptions::InitialGuess::kDefault ? "default" : "random";
  j["solver"]["threads"] = cfg.threads;
  j["tasks"]["run"] = cfg.tasks;
  j["tasks"]["eig_count"] = cfg.eig_count;
  j["tasks"]["p"] = cfg.p;
  j["tasks"]["constrained"] = cfg.constrained;
  j["tasks"]["cinf"] = cfg.c_inf;
  j["tasks"]["small_volume_levels"] = cfg.small_volume_levels;
  j["tasks"]["sweep_pairs"] = cfg.sweep_pairs;
  j["output"]["dir"] = cfg.output_dir;
  return j;
}

ordered_json report_to_json(const VerificationReport& r) {
  ordered_json j;
  j["check"] = r.name;
  j["pass"] = r.pass;
  j["margin"] = r.margin;
  j["tolerance"] = r.tolerance;
  j["worst_cell"] = r.worst_cell;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

struct TaskContext {
  const ExperimentConfig& cfg;
  const Domain& domain;
  const NonlocalOperator& op;
  std::vector<std::string>& manifest;
  std::string out_dir;

  void dump_field(const Field& f, const std::string& name) const {
    std::filesystem::create_directories(out_dir);
    std::string csv = name + ".csv";
    std::string bin = name + ".fgrid";
    std::ofstream c(std::filesystem::path(out_dir) / csv, std::ios::trunc);
    c << field_to_csv(f);
    save_field_binary(f, (std::filesystem::path(out_dir) / bin).string());
    manifest.push_back(csv);
    manifest.push_back(bin);
  }
};

Reflection last_axis_reflection(const ExperimentConfig& cfg) {
  return Reflection{cfg.dim - 1, 0.0};
}

// solves the model problem at the configured exponent: the p = 2 case goes
// through the eigen path, other exponents through the constrained flow
struct ModelSolve {
  double value = 0.0;
  Field u;
  double residual = 0.0;
  int iterations = 0;
};

ModelSolve solve_model(const TaskContext& ctx) {
  ModelSolve out;
  Reflection rN = last_axis_reflection(ctx.cfg);
  if (ctx.cfg.p == 2.0) {
    SpectralResult eig = antisym_eig(ctx.op, rN, ctx.domain, ctx.cfg.solver);
    out.value = eig.eigenvalues.front();
    out.u = eig.eigenfields.front();
    out.residual = eig.residuals.front();
    out.iterations = eig.iterations;
  } else {
    MinimizerResult min =
        p_minimize(ctx.op, ctx.cfg.p, rN, ctx.domain, ctx.cfg.solver);
    out.value = min.value;
    out.u = min.minimizer;
    out.residual = min.residual;
    out.iterations = min.iterations;
  }
  return out;
}

ordered_json task_eig(const TaskContext& ctx, bool& ok) {
  ordered_json j;
  SpectralResult eig =
      dirichlet_eig(ctx.op, ctx.domain.region(), ctx.cfg.eig_count, ctx.cfg.solver);
  j["eigenvalues"] = eig.eigenvalues;
  j["residuals"] = eig.residuals;
  j["iterations"] = eig.iterations;
  j["converged"] = eig.converged;
  for (std::size_t i = 0; i < eig.eigenfields.size(); ++i)
    ctx.dump_field(eig.eigenfields[i], "eig_field_" + std::to_string(i));
  ok = eig.converged;
  return j;
}

ordered_json task_antisym_eig(const TaskContext& ctx, bool& ok) {
  ordered_json j;
  Reflection rN = last_axis_reflection(ctx.cfg);
  SpectralResult odd = antisym_eig(ctx.op, rN, ctx.domain, ctx.cfg.solver);
  SpectralResult full = dirichlet_eig(ctx.op, ctx.domain.region(), 1, ctx.cfg.solver);
  j["lambda_minus"] = odd.eigenvalues.front();
  j["lambda_1"] = full.eigenvalues.front();
  j["margin"] = odd.eigenvalues.front() - full.eigenvalues.front();
  j["residual"] = odd.residuals.front();
  j["iterations"] = odd.iterations;
  ctx.dump_field(odd.eigenfields.front(), "antisym_eig_field");
  ok = odd.converged && full.converged && j["margin"].get<double>() > 0.0;
  return j;
}

ordered_json task_minimize(const TaskContext& ctx, bool& ok) {
  ordered_json j;
  std::optional<Reflection> rN;
  if (ctx.cfg.constrained) rN = last_axis_reflection(ctx.cfg);
  MinimizerResult min = p_minimize(ctx.op, ctx.cfg.p, rN, ctx.domain, ctx.cfg.solver);
  j["p"] = ctx.cfg.p;
  j["constrained"] = ctx.cfg.constrained;
  j["value"] = min.value;
  j["residual"] = min.residual;
  j["iterations"] = min.iterations;
  bool monotone = true;
  for (std::size_t i = 1; i < min.energy_history.size(); ++i)
    if (min.energy_history[i] > min.energy_history[i - 1] * (1.0 + 1e-12)) monotone = false;
  j["energy_monotone"] = monotone;
  ctx.dump_field(min.minimizer, "minimizer");
  ok = min.converged && monotone;
  return j;
}

ordered_json task_torsion(const TaskContext& ctx, bool& ok) {
  ordered_json j;
  CgResult stats;
  Field psi = torsion(ctx.op, ctx.domain.region(), ctx.cfg.solver, &stats);
  j["residual"] = stats.residual;
  j["iterations"] = stats.iterations;
  double lowest = 0.0;
  bool positive = true;
  for (auto flat : ctx.domain.region().cells()) {
    lowest = std::min(lowest, psi[flat]);
    if (!(psi[flat] > 0.0)) positive = false;
  }
  j["positive"] = positive;
  j["min_value"] = lowest;
  DecayFitResult fit = hopf_decay_fit(psi, ctx.domain.region(), ctx.op.table().params.s);
  j["hopf_exponent"] = fit.exponent;
  j["hopf_min_ratio"] = fit.min_ratio;
  j["hopf_consistent"] = fit.consistent;
  ctx.dump_field(psi, "torsion");
  ok = stats.converged && positive;
  return j;
}

ordered_json task_moving_plane(const TaskContext& ctx, bool& ok,
                               std::vector<VerificationReport>& checks) {
  ordered_json j;
  ModelSolve solved = solve_model(ctx);
  Nonlinearity f = Nonlinearity::power(ctx.cfg.p, solved.value);
  MovingPlaneResult scan = moving_plane_scan(solved.u, f, ctx.domain);
  j["value"] = solved.value;
  j["lambda_0"] = scan.lambda0;
  j["lambda_1"] = scan.lambda1;
  j["c_inf"] = scan.c_inf;
  j["levels"] = scan.levels;
  j["minima"] = scan.minima;
  VerificationReport report;
  report.name = "moving-plane";
  report.margin = scan.lambda0;
  report.tolerance = ctx.op.grid().h;
  report.pass = scan.lambda0 <= ctx.op.grid().h;
  checks.push_back(report);
  ok = report.pass;
  return j;
}

Field random_doubly_odd_field(const TaskContext& ctx, std::uint64_t seed) {
  const GridSpec& g = ctx.op.grid();
  Reflection r1{0, 0.0}, rN = last_axis_reflection(ctx.cfg);
  RegionMask quadrant(g);
  for (auto flat : ctx.domain.region().cells()) {
    auto idx = g.unflatten(flat);
    if (g.coord(0, idx[0]) > 0.0 && g.coord(rN.axis, idx[rN.axis]) > 0.0)
      quadrant.mask[static_cast<std::size_t>(flat)] = 1;
  }
  Rng rng(seed);
  Field gen(quadrant);
  for (auto flat : quadrant.cells()) gen.set(flat, rng.uniform(-1.0, 1.0));
  return doubly_odd_extension(gen, r1, rN);
}

ordered_json task_verify_all(const TaskContext& ctx, bool& ok,
                             std::vector<VerificationReport>& checks) {
  ordered_json j;
  Reflection r1{0, 0.0}, rN = last_axis_reflection(ctx.cfg);
  ModelSolve solved = solve_model(ctx);
  j["value"] = solved.value;
  j["residual"] = solved.residual;
  ctx.dump_field(solved.u, "verify_solution");

  checks.push_back(check_symmetry(solved.u, r1));
  RegionMask upper = halfspace_mask(ctx.op.grid(), rN.axis, rN.level);
  checks.push_back(check_sign(solved.u, upper));
  checks.push_back(check_monotonicity(solved.u, ctx.domain));

  Nonlinearity f = Nonlinearity::power(ctx.cfg.p, solved.value);
  MovingPlaneResult scan = moving_plane_scan(solved.u, f, ctx.domain);
  VerificationReport mp;
  mp.name = "moving-plane";
  mp.margin = scan.lambda0;
  mp.tolerance = ctx.op.grid().h;
  mp.pass = scan.lambda0 <= ctx.op.grid().h;
  checks.push_back(mp);
  j["lambda_0"] = scan.lambda0;
  j["c_inf"] = scan.c_inf;

  checks.push_back(polarization_identity_check(ctx.op, solved.u, rN));
  Field w = random_doubly_odd_field(ctx, ctx.cfg.seed + 17);
  checks.push_back(lemma22_check(ctx.op, w, r1, rN));

  ok = true;
  for (const auto& c : checks) ok = ok && c.pass;
  return j;
}

ordered_json task_kernel_sweep(const TaskContext& ctx, bool& ok) {
  ordered_json j;
  // surrogate sweep: a, b log-spaced with zero included, M over decades
  double worst_f = std::numeric_limits<double>::infinity();
  double worst_zero = 0.0;
  std::vector<double> grid_ab = {0.0};
  for (int i = 0; i <= 45; ++i) grid_ab.push_back(std::pow(10.0, -6.0 + 9.0 * i / 45.0));
  std::int64_t violations = 0, samples = 0;
  for (int dim : {1, 2, 3})
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (int e = -3; e <= 3; ++e) {
        double M = std::pow(10.0, e);
        for (double a : grid_ab)
          for (double b : grid_ab) {
            double value = f_surrogate(a, b, M, dim, s);
            worst_f = std::min(worst_f, value);
            if (a == 0.0) worst_zero = std::max(worst_zero, std::abs(value));
            if (value < -1e-12) ++violations;
            ++samples;
          }
      }
  j["surrogate_samples"] = samples;
  j["surrogate_min"] = worst_f;
  j["surrogate_zero_edge_max"] = worst_zero;
  j["surrogate_violations"] = violations;

  // four-point deficit over random pairs in the open quadrant
  Rng rng(ctx.cfg.seed + 5);
  Reflection r1{0, 0.0}, r2{1, 0.0};
  double worst_deficit = std::numeric_limits<double>::infinity();
  std::int64_t deficit_violations = 0;
  for (int dim : {1, 2, 3})
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      KernelParams params = resolve_kernel_params({dim, s, 0.0});
      for (std::uint64_t i = 0; i < ctx.cfg.sweep_pairs; ++i) {
        std::array<double, 2> x{rng.uniform(1e-3, 10.0), rng.uniform(1e-3, 10.0)};
        std::array<double, 2> y{rng.uniform(1e-3, 10.0), rng.uniform(1e-3, 10.0)};
        if (x == y) continue;
        double d = four_point_deficit(params, x, y, r1, r2);
        worst_deficit = std::min(worst_deficit, d);
        if (d < -1e-12) ++deficit_violations;
      }
    }
  j["deficit_pairs_per_case"] = ctx.cfg.sweep_pairs;
  j["deficit_min"] = worst_deficit;
  j["deficit_violations"] = deficit_violations;
  ok = violations == 0 && deficit_violations == 0 && worst_zero <= 1e-15;
  return j;
}

ordered_json task_small_volume(const TaskContext& ctx, bool& ok) {
  ordered_json j;
  const GridSpec& g = ctx.op.grid();
  Reflection r1{0, 0.0}, r2 = last_axis_reflection(ctx.cfg);
  auto square_family = [&](bool slab) {
    std::vector<RegionMask> family;
    int quarter0 = g.extent[0] / 2;
    int quarterN = g.extent[r2.axis] / 2;
    int base = static_cast<int>(std::floor(0.9 * std::min(quarter0, quarterN)));
    for (int level = 0; level < ctx.cfg.small_volume_levels; ++level) {
      int cells0 = std::max(2, base >> level);
      int cellsN = slab ? std::max(2, cells0 / 4) : cells0;
      RegionMask U(g);
      for (std::int64_t flat = 0; flat < g.cell_count(); ++flat) {
        auto idx = g.unflatten(flat);
        double x0 = g.coord(0, idx[0]);
        double xN = g.coord(r2.axis, idx[r2.axis]);
        bool inside = x0 > 0.0 && x0 < cells0 * g.h && xN > 0.0 && xN < cellsN * g.h;
        for (int a = 1; a < g.dim - 1; ++a) {
          double xa = g.coord(a, idx[a]);
          inside = inside && std::abs(xa) < cells0 * g.h;
        }
        U.mask[static_cast<std::size_t>(flat)] = inside ? 1 : 0;
      }
      family.push_back(U);
    }
    return family;
  };

  ok = true;
  for (bool slab : {false, true}) {
    SmallVolumeResult result = small_volume_threshold(
        ctx.op, ctx.cfg.c_inf, square_family(slab), r1, r2, ctx.cfg.solver);
    ordered_json entry;
    entry["shape"] = slab ? "slab" : "square";
    entry["c_inf"] = result.c_inf;
    entry["measures"] = result.measures;
    entry["lambda_minus"] = result.lambda_minus;
    entry["delta_star"] = result.delta_star;
    entry["validation_pass"] = result.validation_pass;
    entry["worst_supersolution_min"] = result.worst_supersolution_min;
    if (!result.note.empty()) entry["note"] = result.note;
    j["families"].push_back(entry);
    ok = ok && result.validation_pass;
  }
  return j;
}

}  // namespace

std::string weight_cache_dir() {
  if (const char* env = std::getenv("FRACLAB_CACHE_DIR"); env && *env) return env;
  return ".fraclab-cache";
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport report;
  report.body["schema_version"] = 1;
  report.body["config"] = config_echo(cfg);
  report.body["tasks"] = ordered_json::array();

  GridSpec grid(cfg.dim, cfg.h, cfg.extent);
  Domain domain = build_domain(cfg.label, cfg.shape, grid);
  KernelParams params{cfg.dim, cfg.s, cfg.kernel_constant};
  params = resolve_kernel_params(params);
  double radius = cfg.truncation_radius > 0.0 ? cfg.truncation_radius
                                              : default_truncation_radius(grid);

  std::shared_ptr<const WeightTable> table;
  {
    std::string cache_dir = weight_cache_dir();
    std::filesystem::create_directories(cache_dir);
    std::string cache_path =
        (std::filesystem::path(cache_dir) / weight_table_cache_name(params, grid.h, radius))
            .string();
    auto cached = load_weight_table(cache_path, grid, params, radius);
    if (cached) {
      table = std::make_shared<const WeightTable>(std::move(*cached));
    } else {
      WeightTable built = build_weight_table(grid, params, radius);
      save_weight_table(built, cache_path);
      table = std::make_shared<const WeightTable>(std::move(built));
    }
  }
  NonlocalOperator op(grid, table, cfg.threads);

  TaskContext ctx{cfg, domain, op, report.manifest, cfg.output_dir};
  report.ok = true;
  ordered_json wall;
  for (std::size_t index = 0; index < cfg.tasks.size(); ++index) {
    const std::string& task = cfg.tasks[index];
    ordered_json entry;
    entry["task"] = task;
    bool ok = false;
    std::vector<VerificationReport> checks;
    auto start = std::chrono::steady_clock::now();
    try {
      if (task == "eig") entry["result"] = task_eig(ctx, ok);
      else if (task == "antisym-eig") entry["result"] = task_antisym_eig(ctx, ok);
      else if (task == "minimize-p") entry["result"] = task_minimize(ctx, ok);
      else if (task == "torsion") entry["result"] = task_torsion(ctx, ok);
      else if (task == "moving-plane") entry["result"] = task_moving_plane(ctx, ok, checks);
      else if (task == "verify-all") entry["result"] = task_verify_all(ctx, ok, checks);
      else if (task == "kernel-sweep") entry["result"] = task_kernel_sweep(ctx, ok);
      else if (task == "small-volume") entry["result"] = task_small_volume(ctx, ok);
      else throw std::invalid_argument("unknown task: " + task);
    } catch (const std::exception& e) {
      entry["error"] = std::string("task ") + std::to_string(index) + " (" + task +
                       "): " + e.what();
      ok = false;
    }
    auto stop = std::chrono::steady_clock::now();
    wall[task + "#" + std::to_string(index)] =
        std::chrono::duration<double, std::milli>(stop - start).count();
    entry["ok"] = ok;
    if (!checks.empty()) {
      entry["checks"] = ordered_json::array();
      for (const auto& c : checks) entry["checks"].push_back(report_to_json(c));
    }
    report.body["tasks"].push_back(entry);
    report.ok = report.ok && ok;
  }
  report.body["ok"] = report.ok;

  auto now = std::chrono::system_clock::now();
  report.meta["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  report.meta["task_wall_ms"] = wall;
  return report;
}

std::string summary_text(const RunReport& report) {
  std::ostringstream out;
  out << "run summary: " << (report.ok ? "PASS" : "FAIL") << "\n";
  for (const auto& task : report.body["tasks"]) {
    out << "  task " << task["task"].get<std::string>() << ": "
        << (task["ok"].get<bool>() ? "ok" : "FAILED") << "\n";
    if (task.contains("error"))
      out << "    error: " << task["error"].get<std::string>() << "\n";
    if (task.contains("checks"))
      for (const auto& check : task["checks"]) {
        out << "    [" << (check["pass"].get<bool>() ? "PASS" : "FAIL") << "] "
            << check["check"].get<std::string>() << " margin=" << check["margin"].dump()
            << " tolerance=" << check["tolerance"].dump() << "\n";
      }
  }
  return out.str();
}

std::vector<std::string> emit_report(const RunReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  ordered_json full = report.body;
  full["meta"] = report.meta;
  full["manifest"] = report.manifest;
  {
    std::ofstream out(std::filesystem::path(out_dir) / "report.json", std::ios::trunc);
    out << full.dump(2) << "\n";
    written.push_back("report.json");
  }
  {
    std::ofstream out(std::filesystem::path(out_dir) / "checks.csv", std::ios::trunc);
    out << "task,check,pass,margin,tolerance,worst_cell\n";
    for (const auto& task : report.body["tasks"]) {
      if (!task.contains("checks")) continue;
      for (const auto& check : task["checks"])
        out << task["task"].get<std::string>() << "," << check["check"].get<std::string>()
            << "," << (check["pass"].get<bool>() ? 1 : 0) << "," << check["margin"].dump()
            << "," << check["tolerance"].dump() << "," << check["worst_cell"].dump() << "\n";
    }
    written.push_back("checks.csv");
  }
  {
    std::ofstream out(std::filesystem::path(out_dir) / "values.csv", std::ios::trunc);
    out << "task,quantity,value\n";
    for (const auto& task : report.body["tasks"]) {
      if (!task.contains("result")) continue;
      for (const auto& [key, value] : task["result"].items())
        if (value.is_number())
          out << task["task"].get<std::string>() << "," << key << "," << value.dump() << "\n";
    }
    written.push_back("values.csv");
  }
  {
    std::ofstream out(std::filesystem::path(out_dir) / "summary.txt", std::ios::trunc);
    out << summary_text(report);
    written.push_back("summary.txt");
  }
  return written;
}

}  // namespace fraclab
