#include "nehari/cli_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "nehari/error.hpp"

namespace nehari {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"model", "a", "q", "gamma", "mu", "dim", "n", "length"}},
      {"optimizer", {"max_iter", "grad_tol", "restarts", "seed", "initial_step", "shrink", "sufficient_increase"}},
      {"sweep", {"spacing", "count", "lo", "hi", "values", "relative", "margin", "warm_start"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;  // 0 for inline overrides
};

double to_double(const std::string& key, const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    const std::string msg = "'" + key + "' expects a number, got '" + e.value + "'";
    if (e.line > 0) throw ParseError(msg, e.line);
    throw ValidationError(msg);
  }
  return v;
}

long long to_int(const std::string& key, const Entry& e) {
  const double v = to_double(key, e);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    const std::string msg = "'" + key + "' expects an integer, got '" + e.value + "'";
    if (e.line > 0) throw ParseError(msg, e.line);
    throw ValidationError(msg);
  }
  return static_cast<long long>(v);
}

bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  const std::string msg = "'" + key + "' expects true/false, got '" + e.value + "'";
  if (e.line > 0) throw ParseError(msg, e.line);
  throw ValidationError(msg);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::snapshot() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, KirchhoffModel>) {
          os << "model.model=kirchhoff\nmodel.a=" << format_number(m.a) << "\nmodel.q=" << format_number(m.q)
             << "\n";
        } else {
          os << "model.model=nep\nmodel.gamma=" << format_number(m.gamma) << "\nmodel.q=" << format_number(m.q)
             << "\nmodel.mu=" << format_number(m.mu) << "\n";
        }
        os << "model.dim=" << m.grid.dim << "\nmodel.n=" << m.grid.n << "\nmodel.length=" << format_number(m.grid.length)
           << "\n";
      },
      model);
  const auto& o = optimizer;
  os << "optimizer.max_iter=" << o.max_iter << "\noptimizer.grad_tol=" << format_number(o.grad_tol)
     << "\noptimizer.restarts=" << o.restarts << "\noptimizer.seed=" << o.seed
     << "\noptimizer.initial_step=" << format_number(o.initial_step) << "\noptimizer.shrink=" << format_number(o.shrink)
     << "\noptimizer.sufficient_increase=" << format_number(o.sufficient_increase) << "\n";
  const auto& s = sweep;
  os << "sweep.grid=" << s.grid.describe(s.margin) << "\n";
  if (s.grid.spacing == LambdaGrid::Spacing::kExplicit) {
    os << "sweep.values=";
    for (size_t i = 0; i < s.grid.values.size(); ++i) os << (i ? "," : "") << format_number(s.grid.values[i]);
    os << "\n";
  }
  os << "sweep.margin=" << format_number(s.margin) << "\nsweep.warm_start=" << (s.warm_start ? "true" : "false")
     << "\n";
  return os.str();
}

std::string config_reference() {
  return R"([model]
  model = kirchhoff        kirchhoff | nep
  a = 1                    kirchhoff coefficient a > 0
  q = 3                    2 < q < gamma (kirchhoff: gamma = 4)
  gamma = 4                nep only (kirchhoff fixes 4)
  mu = 1                   nep only, mu > 0
  dim = 1                  1 or 2
  n = 200                  interior points per axis (>= 2)
  length = 1               side of the domain box
[optimizer]
  max_iter = 5000
  grad_tol = 1e-9          relative projected-gradient tolerance
  restarts = 8
  seed = 1
  initial_step = 1
  shrink = 0.5             backtracking factor in (0,1)
  sufficient_increase = 1e-4
[sweep]
  spacing = geometric      geometric | linear | explicit
  count = 64
  lo = 0.05                lower bound (multiple of lambda* when relative)
  hi = 1 + margin          upper bound
  values =                 comma-separated list for spacing = explicit
  relative = true          grid values are multiples of lambda*
  margin = 0.1             overshoot past lambda*
  warm_start = true
)";
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section = "model";
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header '" + line + "'", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw ParseError("unknown section [" + section + "]", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value, got '" + line + "'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", lineno);
    entries[section + "." + key] = {value, lineno};
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ValidationError("override '" + ov + "' is not key=value");
    std::string key = trim(ov.substr(0, eq));
    if (key.find('.') == std::string::npos) key = "model." + key;
    entries[key] = {trim(ov.substr(eq + 1)), 0};
  }

  std::vector<std::string> unknown;
  for (const auto& [k, e] : entries) {
    const auto dot = k.find('.');
    const auto sec = known_keys().find(k.substr(0, dot));
    if (sec == known_keys().end() || !sec->second.count(k.substr(dot + 1))) unknown.push_back(k);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ValidationError(msg);
  }

  auto has = [&](const std::string& k) { return entries.count(k) > 0; };
  auto num = [&](const std::string& k, double def) { return has(k) ? to_double(k, entries.at(k)) : def; };
  auto integer = [&](const std::string& k, long long def) { return has(k) ? to_int(k, entries.at(k)) : def; };

  RunConfig cfg;
  Grid grid{static_cast<int>(integer("model.dim", 1)), static_cast<int>(integer("model.n", 200)),
            num("model.length", 1.0)};
  const std::string kind = has("model.model") ? entries.at("model.model").value : "kirchhoff";
  const double q = num("model.q", 3.0);
  if (has("model.gamma") && !(q < num("model.gamma", 4.0))) {
    throw ValidationError("hypothesis (H): requires q < gamma");
  }
  if (kind == "kirchhoff") {
    if (has("model.gamma") && num("model.gamma", 4.0) != 4.0) {
      throw ValidationError("hypothesis (H): kirchhoff fixes gamma = 4");
    }
    if (has("model.mu")) throw ValidationError("key model.mu does not apply to the kirchhoff model");
    cfg.model = KirchhoffModel{num("model.a", 1.0), q, grid};
  } else if (kind == "nep") {
    if (has("model.a")) throw ValidationError("key model.a does not apply to the nep model");
    cfg.model = NepModel{num("model.gamma", 4.0), q, num("model.mu", 1.0), grid};
  } else {
    throw ValidationError("unknown model '" + kind + "' (expected kirchhoff or nep)");
  }
  try {
    validate(cfg.model);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("requires", 0) == 0) throw ValidationError("hypothesis (H): " + what);
    throw;
  }

  auto& o = cfg.optimizer;
  o.max_iter = static_cast<int>(integer("optimizer.max_iter", o.max_iter));
  o.grad_tol = num("optimizer.grad_tol", o.grad_tol);
  o.restarts = static_cast<int>(integer("optimizer.restarts", o.restarts));
  const long long seed = integer("optimizer.seed", static_cast<long long>(o.seed));
  if (seed < 0) throw ValidationError("optimizer.seed must be non-negative");
  o.seed = static_cast<std::uint64_t>(seed);
  o.initial_step = num("optimizer.initial_step", o.initial_step);
  o.shrink = num("optimizer.shrink", o.shrink);
  o.sufficient_increase = num("optimizer.sufficient_increase", o.sufficient_increase);
  o.validate();

  auto& s = cfg.sweep;
  s.margin = num("sweep.margin", s.margin);
  if (!(s.margin >= 0.0)) throw ValidationError("sweep.margin must be non-negative");
  s.warm_start = has("sweep.warm_start") ? to_bool("sweep.warm_start", entries.at("sweep.warm_start")) : true;
  s.grid.relative = has("sweep.relative") ? to_bool("sweep.relative", entries.at("sweep.relative")) : true;
  const std::string spacing = has("sweep.spacing") ? entries.at("sweep.spacing").value : "geometric";
  if (spacing == "geometric") {
    s.grid.spacing = LambdaGrid::Spacing::kGeometric;
  } else if (spacing == "linear") {
    s.grid.spacing = LambdaGrid::Spacing::kLinear;
  } else if (spacing == "explicit") {
    s.grid.spacing = LambdaGrid::Spacing::kExplicit;
  } else {
    throw ValidationError("sweep.spacing must be geometric, linear or explicit");
  }
  s.grid.count = static_cast<int>(integer("sweep.count", s.grid.count));
  s.grid.lo = num("sweep.lo", s.grid.lo);
  if (has("sweep.hi")) s.grid.hi = num("sweep.hi", 1.0);
  if (has("sweep.values")) {
    const Entry& e = entries.at("sweep.values");
    std::istringstream vs(e.value);
    std::string item;
    while (std::getline(vs, item, ',')) {
      item = trim(item);
      if (!item.empty()) s.grid.values.push_back(to_double("sweep.values", {item, e.line}));
    }
  }
  s.grid.resolve(1.0, s.margin);  // validates ordering and positivity
  s.solver_opts = o;
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

std::string RunManifest::hash() const {
  return fnv1a_hex(command + "\n" + config_snapshot + "\nseed=" + std::to_string(seed) + "\nversion=" + tool_version);
}

std::string RunManifest::to_text() const {
  std::ostringstream os;
  os << "command = " << command << "\n";
  os << "seed = " << seed << "\n";
  os << "tool_version = " << tool_version << "\n";
  os << "manifest_hash = " << hash() << "\n";
  os << "started_at = " << started_at << "\n";
  os << "finished_at = " << finished_at << "\n";
  for (const auto& p : outputs) os << "output = " << p << "\n";
  os << "[config]\n" << config_snapshot;
  return os.str();
}

CsvWriter::CsvWriter(const std::string& manifest_hash) { text_ = "# manifest=" + manifest_hash + "\n"; }

void CsvWriter::comment(const std::string& key, const std::string& value) {
  text_ += "# " + key + "=" + value + "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

std::string CsvWriter::str() const { return text_; }

void CsvWriter::write_file(const std::string& path) const { write_text(path, text_); }

std::string grid_function_csv(const GridFunction& u, const std::string& manifest_hash) {
  CsvWriter w(manifest_hash);
  w.header({"dim", "n", "h"});
  w.row({std::to_string(u.grid.dim), std::to_string(u.grid.n), format_number(u.grid.h())});
  w.header({"value"});
  for (Eigen::Index i = 0; i < u.values.size(); ++i) w.row({format_number(u.values[i])});
  return w.str();
}

GridFunction read_grid_function_csv(const std::string& path, double length) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read grid function " + path);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    rows.push_back(line);
  }
  if (rows.size() < 3 || rows[0] != "dim,n,h" || rows[2] != "value") {
    throw IoError(path + " is not a nodal grid-function CSV");
  }
  Grid g;
  double h = 0.0;
  if (std::sscanf(rows[1].c_str(), "%d,%d,%lf", &g.dim, &g.n, &h) != 3) throw IoError(path + ": bad dim,n,h row");
  g.length = length;
  g.validate();
  if (std::abs(g.h() - h) > 1e-12 * h) throw IoError(path + ": mesh width does not match length " +
                                                    format_number(length));
  Eigen::VectorXd v(g.unknowns());
  if (static_cast<int>(rows.size()) - 3 != g.unknowns()) throw IoError(path + ": wrong number of values");
  for (int i = 0; i < g.unknowns(); ++i) v[i] = std::strtod(rows[3 + i].c_str(), nullptr);
  return GridFunction(g, std::move(v));
}

std::string sweep_csv(const DiagramReport& rep, const SweepConfig& cfg, std::uint64_t seed,
                      const std::string& manifest_hash) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  CsvWriter w(manifest_hash);
  w.comment("model", rep.model_id);
  w.comment("lambda0_star", format_number(rep.lambda0_star));
  w.comment("lambda_star", format_number(rep.lambda_star));
  w.comment("seed", std::to_string(seed));
  w.comment("grid", cfg.grid.describe(cfg.margin));
  w.comment("lambda_b_bracket", "[" + opt(rep.lambda_b_empirical) + ";" + opt(rep.lambda_b_upper) + "]");
  w.comment("limit_energy_predicted", opt(rep.limit_energy_predicted));
  w.comment("limit_energy_observed", opt(rep.limit_energy_observed));
  w.comment("minus_branch_target", branch_target_label(Branch::kMinus));
  w.header({"lambda", "energy_plus", "energy_minus", "P_plus", "P_minus", "residual_plus", "residual_minus", "exists",
            "fiber_case"});
  for (const auto& r : rep.records) {
    auto field = [](const std::optional<BranchSummary>& b, double BranchSummary::*m) {
      return b ? format_number((*b).*m) : std::string();
    };
    w.row({format_number(r.lambda), field(r.plus, &BranchSummary::energy), field(r.minus, &BranchSummary::energy),
           field(r.plus, &BranchSummary::P), field(r.minus, &BranchSummary::P),
           field(r.plus, &BranchSummary::residual), field(r.minus, &BranchSummary::residual),
           r.exists ? "1" : "0", r.fiber_case_at_maximizer});
  }
  return w.str();
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kValidation:
      return 2;
    case ErrorKind::kNonConvergence:
    case ErrorKind::kNumerical:
      return 3;
    case ErrorKind::kHypothesis:
      return 4;
    case ErrorKind::kIo:
      return 1;
  }
  return 1;
}

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out = "nehari";
  long long seed = -1;
  int threads = 0;
};

int default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

RunConfig load(const CommonArgs& a) {
  std::vector<std::string> ov = a.overrides;
  if (a.seed >= 0) ov.push_back("optimizer.seed=" + std::to_string(a.seed));
  RunConfig cfg = a.config_path.empty() ? parse_config_text("", ov) : parse_config_file(a.config_path, ov);
  cfg.optimizer.threads = a.threads > 0 ? a.threads : default_threads();
  cfg.sweep.solver_opts.threads = cfg.optimizer.threads;
  return cfg;
}

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-c,--config", a.config_path, "config file ([model]/[optimizer]/[sweep] key = value)");
  sub->add_option("--set", a.overrides, "override, section.key=value (repeatable)");
  sub->add_option("-o,--out", a.out, "output path prefix")->capture_default_str();
  sub->add_option("--seed", a.seed, "optimizer seed (overrides optimizer.seed)");
  sub->add_option("--threads", a.threads,
                  std::string("worker threads for restarts (default $") + kThreadsEnv + " or 1)");
}

class Run {
 public:
  Run(std::string command, const RunConfig& cfg, std::string out)
      : cfg_(cfg), out_(std::move(out)) {
    manifest_.command = std::move(command);
    manifest_.config_snapshot = cfg.snapshot();
    manifest_.seed = cfg.optimizer.seed;
    manifest_.started_at = utc_now();
  }
  std::string hash() const { return manifest_.hash(); }
  std::string path(const std::string& suffix) const { return out_ + suffix; }
  void emit(const std::string& suffix, const std::string& text) {
    write_text(path(suffix), text);
    manifest_.outputs.push_back(path(suffix));
  }
  void finish() {
    manifest_.finished_at = utc_now();
    write_text(path("_manifest.txt"), manifest_.to_text());
  }

 private:
  const RunConfig& cfg_;
  std::string out_;
  RunManifest manifest_;
};

std::string fiber_shape_text(const FiberClassification& fc) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* c = std::get_if<CaseI>(&fc.shape)) {
    os << "case I: t_minus=" << c->t_minus << " t_plus=" << c->t_plus;
  } else if (const auto* c2 = std::get_if<CaseII>(&fc.shape)) {
    os << "case II: t_deg=" << c2->t_deg;
  } else {
    os << "case III: no critical point";
  }
  return os.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fibering/Nehari bifurcation toolkit for P(u) + lambda T(u) - Q(u) = 0"};
  app.footer("Config keys and defaults:\n" + config_reference() + "\nExit codes: 0 ok, 1 I/O, 2 validation, "
             "3 non-convergence, 4 hypothesis violation.");
  app.require_subcommand(1);

  // fiber
  FiberCoefficients fc;
  std::string fiber_out = "nehari";
  auto* fiber = app.add_subcommand("fiber", "classify one fiber map and print its Rayleigh values");
  fiber->add_option("--A", fc.A, "p-homogeneous coefficient P(u)")->required();
  fiber->add_option("--B", fc.B, "gamma-homogeneous coefficient T(u)")->required();
  fiber->add_option("--C", fc.C, "q-homogeneous coefficient Q(u)")->required();
  fiber->add_option("--p", fc.exps.p)->required();
  fiber->add_option("--q", fc.exps.q)->required();
  fiber->add_option("--gamma", fc.exps.gamma)->required();
  fiber->add_option("--lambda", fc.lambda)->required();
  fiber->add_option("-o,--out", fiber_out, "output path prefix")->capture_default_str();

  CommonArgs ext_args, solve_args, sweep_args, check_args;
  auto* extremal = app.add_subcommand("extremal", "estimate lambda0* and lambda*");
  add_common(extremal, ext_args);

  double solve_lambda = 0.0;
  std::string solve_branch = "plus";
  auto* solve = app.add_subcommand("solve", "solve one branch at fixed lambda");
  add_common(solve, solve_args);
  solve->add_option("--lambda", solve_lambda, "parameter lambda > 0")->required();
  solve->add_option("--branch", solve_branch, "plus | minus")->capture_default_str();

  bool gnuplot = false;
  auto* sw = app.add_subcommand("sweep", "bifurcation diagram over a lambda grid");
  add_common(sw, sweep_args);
  sw->add_flag("--gnuplot", gnuplot, "also write two-column (lambda, energy) files per branch");

  int samples = 100;
  auto* check = app.add_subcommand("check", "verify the model hypotheses on random samples");
  add_common(check, check_args);
  check->add_option("--samples", samples, "number of random fields")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fiber) {
      fc.validate();
      const FiberClassification cls = classify_fiber(fc);
      const double lam = rayleigh_lambda(fc.A, fc.B, fc.C, fc.exps);
      const double lam0 = rayleigh_lambda0(fc.A, fc.B, fc.C, fc.exps);
      const double t = rayleigh_t(fc.A, fc.B, fc.C, fc.lambda, fc.exps);
      const double t0 = rayleigh_t0(fc.A, fc.B, fc.C, fc.lambda, fc.exps);
      out << fiber_shape_text(cls) << "\n";
      out << "lambda(u)=" << format_number(lam) << " lambda0(u)=" << format_number(lam0)
          << " t(u)=" << format_number(t) << " t0(u)=" << format_number(t0) << "\n";
      std::ostringstream cmd;
      cmd << "A=" << format_number(fc.A) << "\nB=" << format_number(fc.B) << "\nC=" << format_number(fc.C)
          << "\np=" << format_number(fc.exps.p) << "\nq=" << format_number(fc.exps.q)
          << "\ngamma=" << format_number(fc.exps.gamma) << "\nlambda=" << format_number(fc.lambda) << "\n";
      RunManifest m;
      m.command = "fiber";
      m.config_snapshot = cmd.str();
      m.started_at = utc_now();
      CsvWriter w(m.hash());
      w.header({"case", "t_minus", "t_plus", "t_deg", "margin", "lambda_u", "lambda0_u", "t_u", "t0_u"});
      std::string tm, tp, td;
      if (const auto* c = std::get_if<CaseI>(&cls.shape)) {
        tm = format_number(c->t_minus);
        tp = format_number(c->t_plus);
      } else if (const auto* c2 = std::get_if<CaseII>(&cls.shape)) {
        td = format_number(c2->t_deg);
      }
      w.row({cls.tag(), tm, tp, td, format_number(cls.margin), format_number(lam), format_number(lam0),
             format_number(t), format_number(t0)});
      w.write_file(fiber_out + "_fiber.csv");
      m.outputs.push_back(fiber_out + "_fiber.csv");
      m.finished_at = utc_now();
      write_text(fiber_out + "_manifest.txt", m.to_text());
      return 0;
    }

    if (*extremal) {
      const RunConfig cfg = load(ext_args);
      const Model model(cfg.model);
      Run run("extremal", cfg, ext_args.out);
      const ExtremalReport rep = maximize_lambda(model, cfg.optimizer);
      CsvWriter w(run.hash());
      w.header({"model", "lambda0_star", "lambda_star", "ratio_residual", "iterations", "seed"});
      w.row({model.id(), format_number(rep.lambda0_star), format_number(rep.lambda_star),
             format_number(rep.ratio_residual), std::to_string(rep.iterations), std::to_string(cfg.optimizer.seed)});
      run.emit("_extremal.csv", w.str());
      run.emit("_maximizer.csv", grid_function_csv(rep.maximizer, run.hash()));
      run.finish();
      out << model.id() << ": lambda0*=" << format_number(rep.lambda0_star)
          << " lambda*=" << format_number(rep.lambda_star) << " ratio_residual=" << format_number(rep.ratio_residual)
          << " iterations=" << rep.iterations << "\n";
      return 0;
    }

    if (*solve) {
      const RunConfig cfg = load(solve_args);
      const Model model(cfg.model);
      const Branch branch = parse_branch(solve_branch);
      if (!(solve_lambda > 0.0)) throw ValidationError("--lambda must be positive");
      Run run("solve:lambda=" + format_number(solve_lambda) + ";branch=" + branch_name(branch), cfg, solve_args.out);
      const ExtremalReport ex = maximize_lambda(model, cfg.optimizer);
      BranchHints hints;
      hints.seeds = {ex.maximizer.values};
      hints.lambda0_star = ex.lambda0_star;
      const SolveReport r = minimize_branch(model, solve_lambda, branch, cfg.optimizer, hints);
      CsvWriter w(run.hash());
      w.comment("lambda0_star", format_number(ex.lambda0_star));
      w.comment("lambda_star", format_number(ex.lambda_star));
      w.header({"model", "lambda", "branch", "target", "energy", "residual", "nehari_residual", "second_order_sign",
                "P", "T", "Q", "converged", "iterations", "seed"});
      w.row({model.id(), format_number(r.lambda), branch_name(branch), branch_target_label(branch),
             format_number(r.energy), format_number(r.residual), format_number(r.nehari_residual),
             format_number(r.second_order_sign), format_number(r.P), format_number(r.T), format_number(r.Q),
             r.converged ? "1" : "0", std::to_string(r.iterations), std::to_string(cfg.optimizer.seed)});
      run.emit("_solve.csv", w.str());
      run.emit("_solution.csv", grid_function_csv(r.solution, run.hash()));
      run.finish();
      out << branch_name(branch) << " branch (" << branch_target_label(branch) << ") at lambda="
          << format_number(r.lambda) << ": energy=" << format_number(r.energy)
          << " residual=" << format_number(r.residual) << " converged=" << (r.converged ? "yes" : "no") << "\n";
      return r.converged ? 0 : 3;
    }

    if (*sw) {
      const RunConfig cfg = load(sweep_args);
      const Model model(cfg.model);
      Run run("sweep", cfg, sweep_args.out);
      const ExtremalReport ex = maximize_lambda(model, cfg.optimizer);
      const DiagramReport rep = sweep(model, cfg.sweep, ex);
      run.emit("_sweep.csv", sweep_csv(rep, cfg.sweep, cfg.optimizer.seed, run.hash()));
      if (gnuplot) {
        for (Branch b : {Branch::kPlus, Branch::kMinus}) {
          std::string dat = "# lambda energy (" + std::string(branch_target_label(b)) + ")\n";
          for (const auto& r : rep.records) {
            const auto& s = b == Branch::kPlus ? r.plus : r.minus;
            if (s) dat += format_number(r.lambda) + " " + format_number(s->energy) + "\n";
          }
          run.emit(std::string("_") + branch_name(b) + ".dat", dat);
        }
      }
      run.finish();
      int existing = 0;
      for (const auto& r : rep.records) existing += r.exists ? 1 : 0;
      out << model.id() << ": " << rep.records.size() << " lambda values, " << existing << " with solutions; "
          << "lambda0*=" << format_number(rep.lambda0_star) << " lambda*=" << format_number(rep.lambda_star);
      if (rep.lambda_b_empirical) {
        out << " lambda_b in [" << format_number(*rep.lambda_b_empirical) << ", "
            << (rep.lambda_b_upper ? format_number(*rep.lambda_b_upper) : std::string("?")) << "]";
      }
      out << "\n";
      return 0;
    }

    if (*check) {
      const RunConfig cfg = load(check_args);
      const Model model(cfg.model);
      Run run("check:samples=" + std::to_string(samples), cfg, check_args.out);
      const HypothesisReport hr = verify_hypotheses(model, samples, cfg.optimizer.seed);
      CsvWriter w(run.hash());
      w.header({"model", "samples", "C1", "C2", "C_E3", "max_homogeneity_error", "max_euler_error",
                "max_gradient_error", "max_structure_error", "status"});
      w.row({model.id(), std::to_string(hr.samples), format_number(hr.constants.C1), format_number(hr.constants.C2),
             format_number(hr.constants.C_E3), format_number(hr.max_homogeneity_error),
             format_number(hr.max_euler_error), format_number(hr.max_gradient_error),
             format_number(hr.max_kirchhoff_structure_error), "pass"});
      run.emit("_check.csv", w.str());
      run.finish();
      out << model.id() << ": hypotheses (H), (E1)-(E3) hold on " << hr.samples
          << " samples; C1=" << format_number(hr.constants.C1) << " C2=" << format_number(hr.constants.C2)
          << " C_E3=" << format_number(hr.constants.C_E3) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace nehari
