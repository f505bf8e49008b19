#include "lirr/harness.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace lirr {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, "config field '" + field + "': " + what);
}

template <class T>
T get_field(const json& j, const std::string& field, const T& fallback) {
  if (!j.contains(field) || j.at(field).is_null()) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    field_error(field, std::string("wrong type (") + e.what() + ")");
  }
}

std::vector<Symbol> get_word(const json& j, const std::string& field, int alphabet_size) {
  if (!j.contains(field)) field_error(field, "missing");
  const auto w = get_field<std::vector<long long>>(j, field, {});
  if (w.empty()) field_error(field, "must be a non-empty list of symbols");
  std::vector<Symbol> out;
  for (long long s : w) {
    if (s < 0 || s >= alphabet_size) field_error(field, "symbol " + std::to_string(s) + " outside the alphabet");
    out.push_back(static_cast<Symbol>(s));
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string word_text(const std::vector<Symbol>& w) { return Word(w).to_string(); }

bool is_rotation(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    bool same = true;
    for (std::size_t i = 0; i < a.size() && same; ++i) same = a[(i + r) % a.size()] == b[i];
    if (same) return true;
  }
  return false;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header, RunResult& result) : path_(path) {
    out_.open(path, std::ios::binary);
    if (!out_) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out_ << header << '\n';
    result.files.push_back(path.string());
  }
  std::ostream& stream() { return out_; }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const Index& v) { return to_string(v); }
  template <class I, std::enable_if_t<std::is_integral_v<I> && !std::is_same_v<I, bool>, int> = 0>
  static std::string cell(I v) { return std::to_string(v); }

  std::filesystem::path path_;
  std::ofstream out_;
};

template <class F>
auto map_indices(std::size_t n, bool parallel, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out;
  out.reserve(n);
  if (!parallel) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
    return out;
  }
  std::vector<std::future<R>> futures;
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, f, i));
  for (auto& fut : futures) out.push_back(fut.get());
  return out;
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir + ": " + ec.message());
  return std::filesystem::path(dir);
}

void write_summary(const std::filesystem::path& dir, Command command, const json& summary, RunResult& result) {
  const auto path = dir / (std::string(to_string(command)) + "_summary.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  result.summary_json = summary.dump(2);
  out << result.summary_json << '\n';
  result.files.push_back(path.string());
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  ExperimentConfig c;
  c.schema_version = get_field<int>(j, "schema_version", -1);
  if (c.schema_version != kSchemaVersion)
    field_error("schema_version", "expected " + std::to_string(kSchemaVersion) + ", got " + std::to_string(c.schema_version));
  c.alphabet_size = get_field<int>(j, "alphabet_size", c.alphabet_size);
  if (c.alphabet_size < 2) field_error("alphabet_size", "must be >= 2");
  c.metric_base = get_field<double>(j, "metric_base", c.metric_base);
  if (!(c.metric_base > 1.0)) field_error("metric_base", "must exceed 1");
  const long long fill = get_field<long long>(j, "fill_symbol", c.fill_symbol);
  if (fill < 0 || fill >= c.alphabet_size) field_error("fill_symbol", "outside the alphabet");
  c.fill_symbol = static_cast<Symbol>(fill);

  if (!j.contains("cocycle") || !j.at("cocycle").is_object()) field_error("cocycle", "missing or not an object");
  const json& cj = j.at("cocycle");
  c.dimension = get_field<int>(cj, "dimension", -1);
  if (c.dimension < 1) field_error("cocycle.dimension", "must be >= 1");
  c.window_radius = get_field<int>(cj, "window_radius", 0);
  if (c.window_radius < 0) field_error("cocycle.window_radius", "must be >= 0");
  if (!cj.contains("entries") || !cj.at("entries").is_array()) field_error("cocycle.entries", "missing or not a list");
  for (std::size_t e = 0; e < cj.at("entries").size(); ++e) {
    const json& ej = cj.at("entries").at(e);
    const std::string name = "cocycle.entries[" + std::to_string(e) + "]";
    if (!ej.is_object()) field_error(name, "must be an object with word and matrix");
    CocycleEntryConfig entry;
    entry.word = get_word(ej, "word", c.alphabet_size);
    entry.matrix = get_field<std::vector<double>>(ej, "matrix", {});
    if (entry.word.size() != static_cast<std::size_t>(2 * c.window_radius + 1))
      field_error(name + ".word", "length must be " + std::to_string(2 * c.window_radius + 1));
    if (entry.matrix.size() != static_cast<std::size_t>(c.dimension * c.dimension))
      field_error(name + ".matrix", "needs " + std::to_string(c.dimension * c.dimension) + " row-major entries");
    c.cocycle.push_back(std::move(entry));
  }
  c.exterior_degree = get_field<int>(j, "exterior_degree", c.exterior_degree);
  if (c.exterior_degree < 0 || c.exterior_degree > c.dimension)
    field_error("exterior_degree", "must be 0 (auto) or in [1, " + std::to_string(c.dimension) + "]");

  if (!j.contains("measures") || !j.at("measures").is_object()) field_error("measures", "missing or not an object");
  c.nu = get_word(j.at("measures"), "nu", c.alphabet_size);
  c.omega = get_word(j.at("measures"), "omega", c.alphabet_size);
  c.x = j.contains("x") ? get_word(j, "x", c.alphabet_size) : c.nu;
  c.z = j.contains("z") ? get_word(j, "z", c.alphabet_size) : c.omega;

  c.tau = get_field<double>(j, "tau", c.tau);
  if (!(c.tau > 0.0)) field_error("tau", "must be positive");
  c.epsilon = get_field<double>(j, "epsilon", c.epsilon);
  if (!(c.epsilon > 0.0)) field_error("epsilon", "must be positive");
  c.delta = get_field<double>(j, "delta", c.delta);
  if (!(c.delta > 0.0 && c.delta < 1.0)) field_error("delta", "must lie in (0, 1)");
  if (j.contains("xi")) {
    const json& xj = j.at("xi");
    if (!xj.is_object()) field_error("xi", "must be an object with a rule");
    c.xi.rule = get_field<std::string>(xj, "rule", c.xi.rule);
    c.xi.ratio = get_field<double>(xj, "ratio", c.xi.ratio);
    c.xi.values = get_field<std::vector<double>>(xj, "values", {});
    if (c.xi.rule != "power2" && c.xi.rule != "geometric" && c.xi.rule != "explicit")
      field_error("xi.rule", "must be power2, geometric or explicit");
  }
  c.stages = get_field<int>(j, "stages", c.stages);
  if (c.stages < 1) field_error("stages", "must be >= 1");
  if (j.contains("horizon") && !j.at("horizon").is_null()) {
    const json& h = j.at("horizon");
    if (h.is_string()) c.horizon = h.get<std::string>();
    else if (h.is_number_integer()) c.horizon = std::to_string(h.get<long long>());
    else field_error("horizon", "must be an integer or a decimal string");
    try {
      if (parse_index(*c.horizon) < 0) field_error("horizon", "must be >= 0");
    } catch (const Error&) {
      field_error("horizon", "not an integer: '" + *c.horizon + "'");
    }
  }
  c.p_sequences = get_field<std::vector<std::vector<int>>>(j, "p_sequences", {});
  for (std::size_t i = 0; i < c.p_sequences.size(); ++i) {
    const auto& p = c.p_sequences[i];
    const std::string name = "p_sequences[" + std::to_string(i) + "]";
    if (p.empty() || p[0] != 0) field_error(name, "must start with p_1 = 0");
    for (int v : p)
      if (v != 0 && v != 1) field_error(name, "must be binary");
  }
  c.t_list = get_field<std::vector<double>>(j, "t_list", c.t_list);
  for (double t : c.t_list)
    if (!(t >= 0.0)) field_error("t_list", "thresholds must be >= 0 (0 selects 4 delta_{k+1})");
  c.kappa = get_field<double>(j, "kappa", c.kappa);
  if (!(c.kappa > 0.0)) field_error("kappa", "must be positive");
  c.cone_samples = get_field<int>(j, "cone_samples", c.cone_samples);
  if (c.cone_samples < 1) field_error("cone_samples", "must be >= 1");
  c.cone_step_cap = get_field<std::int64_t>(j, "cone_step_cap", c.cone_step_cap);
  if (c.cone_step_cap < 1) field_error("cone_step_cap", "must be >= 1");
  c.sandwich_samples = get_field<int>(j, "sandwich_samples", c.sandwich_samples);
  if (c.sandwich_samples < 1) field_error("sandwich_samples", "must be >= 1");
  c.grouping_tolerance = get_field<double>(j, "grouping_tolerance", c.grouping_tolerance);
  if (!(c.grouping_tolerance > 0.0)) field_error("grouping_tolerance", "must be positive");
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.parallel = get_field<bool>(j, "parallel", c.parallel);
  c.output_dir = get_field<std::string>(j, "output_dir", c.output_dir);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["alphabet_size"] = c.alphabet_size;
  j["metric_base"] = c.metric_base;
  j["fill_symbol"] = c.fill_symbol;
  json entries = json::array();
  for (const auto& e : c.cocycle) entries.push_back({{"word", e.word}, {"matrix", e.matrix}});
  j["cocycle"] = {{"dimension", c.dimension}, {"window_radius", c.window_radius}, {"entries", entries}};
  j["exterior_degree"] = c.exterior_degree;
  j["measures"] = {{"nu", c.nu}, {"omega", c.omega}};
  j["x"] = c.x;
  j["z"] = c.z;
  j["tau"] = c.tau;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["xi"] = {{"rule", c.xi.rule}, {"ratio", c.xi.ratio}, {"values", c.xi.values}};
  j["stages"] = c.stages;
  j["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
  j["p_sequences"] = c.p_sequences;
  j["t_list"] = c.t_list;
  j["kappa"] = c.kappa;
  j["cone_samples"] = c.cone_samples;
  j["cone_step_cap"] = c.cone_step_cap;
  j["sandwich_samples"] = c.sandwich_samples;
  j["grouping_tolerance"] = c.grouping_tolerance;
  j["seed"] = c.seed;
  j["parallel"] = c.parallel;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

Command parse_command(const std::string& name) {
  if (name == "spectrum") return Command::Spectrum;
  if (name == "construct") return Command::Construct;
  if (name == "dc1") return Command::Dc1;
  if (name == "diverge") return Command::Diverge;
  if (name == "audit") return Command::Audit;
  throw Error(ErrorCode::Config, "unknown command '" + name + "'");
}

const char* to_string(Command command) {
  switch (command) {
    case Command::Spectrum: return "spectrum";
    case Command::Construct: return "construct";
    case Command::Dc1: return "dc1";
    case Command::Diverge: return "diverge";
    case Command::Audit: return "audit";
  }
  return "unknown";
}

namespace {

XiRule make_xi(const XiConfig& x) {
  if (x.rule == "power2") return XiRule::power2();
  if (x.rule == "geometric") return XiRule::geometric(x.ratio);
  return XiRule::explicit_values(x.values);
}

}  // namespace

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  const ExperimentConfig& c = config_;
  std::map<Word, Matrix> table;
  for (const auto& e : c.cocycle) {
    Matrix m(c.dimension, c.dimension);
    for (int r = 0; r < c.dimension; ++r)
      for (int col = 0; col < c.dimension; ++col) m(r, col) = e.matrix[r * c.dimension + col];
    if (!table.emplace(Word(e.word), m).second) field_error("cocycle.entries", "duplicate word " + word_text(e.word));
  }
  base_ = std::make_unique<Cocycle>(Cocycle::from_words(c.alphabet_size, c.dimension, c.window_radius, table));

  if (!is_rotation(c.x, c.nu)) field_error("x", "must be a point on the orbit of nu (a rotation of " + word_text(c.nu) + ")");
  if (!is_rotation(c.z, c.omega)) field_error("z", "must be a point on the orbit of omega (a rotation of " + word_text(c.omega) + ")");
  const PeriodicMeasure nu{Word(c.nu)}, omega{Word(c.omega)};

  degree_ = c.exterior_degree;
  if (degree_ == 0) {
    const auto chosen = select_exterior_degree(exact_spectrum(*base_, nu, c.grouping_tolerance),
                                               exact_spectrum(*base_, omega, c.grouping_tolerance), 1e-9);
    if (!chosen) field_error("exterior_degree", "nu and omega have equal spectra; no degree separates them");
    degree_ = *chosen;
  }
  working_ = std::make_unique<Cocycle>(exterior_power(*base_, degree_));
  nu_spectrum_ = exact_spectrum(*working_, nu, c.grouping_tolerance);
  omega_spectrum_ = exact_spectrum(*working_, omega, c.grouping_tolerance);
  a_ = nu_spectrum_.top();
  b_ = omega_spectrum_.top();
  const bool degenerate = std::abs(a_ - b_) <= 1e-9 * std::max(1.0, std::abs(a_));
  if (!degenerate && !(a_ - 2.0 * c.tau > b_ + c.tau)) {
    throw Error(ErrorCode::Config, "measures too close: a - 2 tau = " + fmt(a_ - 2.0 * c.tau) +
                                       " must exceed b + tau = " + fmt(b_ + c.tau) + " (a = " + fmt(a_) +
                                       ", b = " + fmt(b_) + ")");
  }
  const ShiftMetric metric(c.metric_base);
  const double eps0 = epsilon0(nu_spectrum_, metric.natural_exponent(), base_->holder_exponent());
  if (!(c.epsilon < std::min(c.tau, eps0)))
    field_error("epsilon", "must be below min(tau, epsilon0(nu)) = " + fmt(std::min(c.tau, eps0)));
  const Distality dist = distality_constant(Word(c.x), metric);
  if (!(c.kappa < dist.zeta)) field_error("kappa", "must be below zeta = " + fmt(dist.zeta) + " of x");

  const OrbitMetrics nu_metrics(*working_, Word(c.x), c.epsilon, c.grouping_tolerance);
  const OrbitMetrics omega_metrics(*working_, Word(c.z), c.epsilon, c.grouping_tolerance);
  l_ = std::ceil(std::max(nu_metrics.k_epsilon(), omega_metrics.k_epsilon()));

  ScheduleParams sp;
  sp.xi = make_xi(c.xi);
  sp.x_period = c.x.size();
  sp.z_period = c.z.size();
  sp.delta = c.delta;
  sp.k_max = c.stages;
  sp.metric_base = c.metric_base;
  schedule_ = std::make_shared<const Schedule>(make_schedule(sp));
}

std::vector<ConstructedPoint> Experiment::build_points() const {
  std::vector<std::vector<int>> ps = config_.p_sequences;
  if (ps.empty()) ps.push_back({0});
  BuildOptions o;
  o.fill = config_.fill_symbol;
  if (config_.horizon) o.horizon = parse_index(*config_.horizon);
  return map_indices(ps.size(), config_.parallel, [&](std::size_t i) {
    return build_point(Word(config_.x), Word(config_.z), schedule_, ps[i], o);
  });
}

RunResult Experiment::run(Command command) const {
  switch (command) {
    case Command::Spectrum: return spectrum();
    case Command::Construct: return construct();
    case Command::Dc1: return dc1();
    case Command::Diverge: return diverge();
    case Command::Audit: return audit();
  }
  throw Error(ErrorCode::Config, "unknown command");
}

RunResult Experiment::spectrum() const {
  RunResult result;
  const auto dir = prepare_dir(config_.output_dir);
  const double tol = config_.grouping_tolerance;
  const std::vector<std::pair<std::string, std::vector<Symbol>>> measures{{"nu", config_.nu}, {"omega", config_.omega}};
  CsvFile spectra(dir / "spectra.csv", "measure,degree,exponent,multiplicity", result);
  CsvFile sums(dir / "partial_sums.csv", "measure,i,partial_sum,exterior_max,abs_diff,pass", result);
  CsvFile qr(dir / "benettin.csv", "measure,exponent,multiplicity,benettin,abs_diff,pass", result);
  json summary;
  bool pass = true;
  std::vector<LyapunovSpectrum> base_spectra;
  for (const auto& [name, word] : measures) {
    const PeriodicMeasure mu{Word(word)};
    const LyapunovSpectrum s = exact_spectrum(*base_, mu, tol);
    base_spectra.push_back(s);
    for (const auto& e : s.entries()) spectra.row(name, 1, e.exponent, e.multiplicity);
    if (degree_ != 1) {
      const LyapunovSpectrum& w = name == "nu" ? nu_spectrum_ : omega_spectrum_;
      for (const auto& e : w.entries()) spectra.row(name, degree_, e.exponent, e.multiplicity);
    }
    for (int i = 1; i <= base_->dimension(); ++i) {
      const double lam = lambda_partial_sum(s, i);
      const double top = max_lyapunov(exterior_power(*base_, i), mu, tol);
      const double diff = std::abs(lam - top);
      const bool ok = diff <= 1e-9;
      pass = pass && ok;
      sums.row(name, i, lam, top, diff, ok);
    }
    // Determinant identity: sum of m_i chi_i = (1/p) log |det A(x, p)|.
    const ScaledMatrix pm = period_matrix(*base_, mu);
    const double logdet = (std::log(std::abs(determinant(pm.unit()))) + base_->dimension() * pm.log_scale()) / mu.period();
    const double full = lambda_partial_sum(s, base_->dimension());
    pass = pass && std::abs(full - logdet) <= 1e-9 * std::max(1.0, std::abs(logdet));

    const std::int64_t n = 10000 * static_cast<std::int64_t>(mu.period());
    const auto est = benettin_spectrum(*base_, mu.sequence(), n, n);
    std::size_t pos = 0;
    for (auto it = s.entries().rbegin(); it != s.entries().rend(); ++it) {
      long double mean = 0.0L;
      for (int k = 0; k < it->multiplicity; ++k) mean += est[pos++];
      mean /= it->multiplicity;
      const double diff = std::abs(static_cast<double>(mean) - it->exponent);
      const bool ok = diff <= 1e-6;
      pass = pass && ok;
      qr.row(name, it->exponent, it->multiplicity, static_cast<double>(mean), diff, ok);
    }
    summary[name] = {{"word", word_text(word)}, {"max_exponent", s.top()}, {"log_det_rate", logdet}};
  }
  const SpectrumComparison cmp = compare_spectra(base_spectra[0], base_spectra[1], 1e-9);
  pass = pass && cmp.routes_agree;
  summary["spectra_equal"] = cmp.equal();
  summary["comparison_routes_agree"] = cmp.routes_agree;
  summary["first_differing_partial_sum"] = cmp.first_lambda_difference ? json(*cmp.first_lambda_difference) : json(nullptr);
  summary["exterior_degree"] = degree_;
  summary["a"] = a_;
  summary["b"] = b_;
  summary["l"] = l_;
  summary["pass"] = pass;
  write_summary(dir, Command::Spectrum, summary, result);
  result.pass = pass;
  result.exit_code = pass ? 0 : 2;
  return result;
}

RunResult Experiment::construct() const {
  RunResult result;
  const auto dir = prepare_dir(config_.output_dir);
  const Schedule& s = *schedule_;
  {
    CsvFile sched(dir / "schedule.csv", "stage,delta,window,gap,xi,L,sigma,pi", result);
    for (int k = 1; k <= s.stages(); ++k)
      sched.row(k, s.delta(k), s.window(k), s.gap(k), s.xi(k), s.L(k), s.sigma(k), s.pi(k - 1));
    CsvFile hs(dir / "x_blocks.csv", "stage,i,H,pi_ki", result);
    for (int k = 0; k < s.stages(); ++k)
      for (int i = 1; i <= k + 1; ++i) hs.row(k + 1, i, s.H(Schedule::h_index(k, i)), s.pi_ki(k, i));
  }
  const auto points = build_points();
  const auto audits = map_indices(points.size(), config_.parallel, [&](std::size_t i) { return audit_containment(points[i]); });
  CsvFile prov(dir / "provenance.csv", "point,stage,start,end,source", result);
  CsvFile cps(dir / "checkpoints.csv", "point,kind,k,time", result);
  CsvFile cont(dir / "containment.csv", "point,stage,kind,index,start,length,delta_pass,double_delta_pass", result);
  CsvFile pre(dir / "prefix.csv", "point,stage,holds", result);
  bool pass = s.verify_conditions();
  std::size_t checked = 0;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const ConstructedPoint& g = points[pi];
    for (const auto& e : g.provenance()) {
      std::string tag = to_string(e.kind);
      if (e.kind == BlockKind::X) tag = "x(" + std::to_string(e.index) + ";" + std::to_string(e.shift) + ")";
      prov.row(pi, e.stage, e.start, e.end, tag);
    }
    for (const auto& c : g.checkpoints(CheckpointKind::Low)) cps.row(pi, "low", c.k, c.time);
    for (const auto& c : g.checkpoints(CheckpointKind::High)) cps.row(pi, "high", c.k, c.time);
    for (int sd = 2; sd <= g.stages(); ++sd)
      for (const auto& c : g.checkpoints(CheckpointKind::Distal, sd)) cps.row(pi, "distal(" + std::to_string(sd) + ")", c.k, c.time);
    for (const auto& b : audits[pi].blocks) {
      cont.row(pi, b.stage, to_string(b.kind), b.index, b.start, b.length, b.at_delta, b.at_double_delta);
      ++checked;
    }
    for (const auto& p : audits[pi].prefixes) pre.row(pi, p.stage, p.holds);
    pass = pass && audits[pi].pass;
  }
  json summary;
  summary["stages"] = s.stages();
  summary["k_max"] = s.k_max();
  summary["partial_schedule"] = s.partial();
  summary["total_length"] = to_string(s.sigma(s.stages()));
  summary["points"] = points.size();
  summary["blocks_checked"] = checked;
  summary["conditions_hold"] = s.verify_conditions();
  summary["pass"] = pass;
  write_summary(dir, Command::Construct, summary, result);
  result.pass = pass;
  result.exit_code = pass ? 0 : 2;
  return result;
}

RunResult Experiment::dc1() const {
  RunResult result;
  const auto dir = prepare_dir(config_.output_dir);
  const auto points = build_points();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) pairs.emplace_back(i, j);
  const auto reports = map_indices(pairs.size(), config_.parallel, [&](std::size_t n) {
    return dc1_report(points[pairs[n].first], points[pairs[n].second], config_.t_list, config_.kappa);
  });
  CsvFile out(dir / "dc1.csv", "p,q,trace,k,time,value,bound,pass,slack", result);
  bool pass = !pairs.empty();
  std::size_t failures = 0;
  double min_upper = 1.0, max_lower = 0.0;
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const Dc1Report& r = reports[n];
    for (const auto& t : r.upper)
      for (const auto& row : t.rows) {
        out.row(pairs[n].first, pairs[n].second, t.label, row.k, row.time, row.value, row.bound, row.pass, row.slack);
        min_upper = std::min(min_upper, row.value);
      }
    for (const auto& row : r.lower.rows) {
      out.row(pairs[n].first, pairs[n].second, r.lower.label, row.k, row.time, row.value, row.bound, row.pass, row.slack);
      max_lower = std::max(max_lower, row.value);
    }
    if (!r.pass) ++failures;
    pass = pass && r.pass;
  }
  json summary;
  summary["pairs"] = pairs.size();
  summary["failures"] = failures;
  summary["zeta"] = distality_constant(Word(config_.x), ShiftMetric(config_.metric_base)).zeta;
  summary["kappa"] = config_.kappa;
  summary["min_high_density"] = min_upper;
  summary["max_distal_density"] = max_lower;
  summary["pass"] = pass;
  write_summary(dir, Command::Dc1, summary, result);
  result.pass = pass;
  result.exit_code = pass ? 0 : 2;
  if (pairs.empty()) result.message = "dc1 needs at least two p_sequences";
  return result;
}

RunResult Experiment::diverge() const {
  RunResult result;
  const auto dir = prepare_dir(config_.output_dir);
  const auto points = build_points();
  const DivergenceParams params{a_, b_, config_.tau, config_.epsilon, l_};
  const auto traces = map_indices(points.size(), config_.parallel,
                                  [&](std::size_t i) { return divergence_report(*working_, points[i], params); });
  CsvFile out(dir / "divergence.csv", "point,side,k,time,value,bound,pass,slack", result);
  json summary;
  json per_point = json::array();
  bool pass = true;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const DivergenceTrace& t = traces[i];
    for (const auto& r : t.low) out.row(i, "low", r.k, r.time, r.value, r.bound, r.pass, r.slack);
    for (const auto& r : t.high) out.row(i, "high", r.k, r.time, r.value, r.bound, r.pass, r.slack);
    per_point.push_back({{"point", i},
                         {"limsup_estimate", t.limsup_estimate},
                         {"liminf_estimate", t.liminf_estimate},
                         {"gap", t.gap},
                         {"required_gap", t.required_gap},
                         {"max_slack", t.max_slack},
                         {"final_slack", std::max(t.low.back().slack, t.high.back().slack)},
                         {"verdict", t.verdict}});
    pass = pass && t.pass;
  }
  summary["a"] = a_;
  summary["b"] = b_;
  summary["tau"] = config_.tau;
  summary["epsilon"] = config_.epsilon;
  summary["l"] = l_;
  summary["log_c"] = std::log(working_->bound_c());
  summary["exterior_degree"] = degree_;
  summary["points"] = per_point;
  summary["pass"] = pass;
  write_summary(dir, Command::Diverge, summary, result);
  result.pass = pass;
  result.exit_code = pass ? 0 : 2;
  return result;
}

RunResult Experiment::audit() const {
  RunResult result;
  const auto dir = prepare_dir(config_.output_dir);
  const double tol = config_.grouping_tolerance;
  const OrbitMetrics x_metrics(*working_, Word(config_.x), config_.epsilon, tol);
  const OrbitMetrics z_metrics(*working_, Word(config_.z), config_.epsilon, tol);
  bool pass = true;

  // Norm sandwich |u| <= |u|_L <= K |u| on random vectors at every phase.
  CsvFile sand(dir / "sandwich.csv", "orbit,phase,samples,min_lower_ratio,max_upper_ratio,k_epsilon,pass", result);
  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> gauss;
  for (const auto& [name, metrics] : {std::pair<std::string, const OrbitMetrics*>{"x", &x_metrics}, {"z", &z_metrics}}) {
    for (std::size_t ph = 0; ph < metrics->period(); ++ph) {
      const LyapunovMetric& m = metrics->at(static_cast<std::int64_t>(ph));
      double lo = INFINITY, hi = 0.0;
      for (int s = 0; s < config_.sandwich_samples; ++s) {
        Vector u(working_->dimension());
        for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = gauss(rng);
        const double ln = m.norm(u);
        lo = std::min(lo, ln / u.norm());
        hi = std::max(hi, ln / (m.k_epsilon() * u.norm()));
      }
      const bool ok = lo >= 1.0 - 1e-12 && hi <= 1.0 + 1e-12;
      pass = pass && ok;
      sand.row(name, ph, config_.sandwich_samples, lo, hi, m.k_epsilon(), ok);
    }
  }

  const auto points = build_points();
  struct PointAudit {
    std::vector<std::tuple<int, int, std::int64_t, ConeReport>> cones;
    std::vector<std::tuple<int, std::string, int, Index, NormBoundReport>> bounds;
  };
  const auto audits = map_indices(points.size(), config_.parallel, [&](std::size_t pi) {
    PointAudit out;
    const ConstructedPoint& g = points[pi];
    std::mt19937_64 prng(config_.seed + 1 + pi);
    for (const auto& e : g.provenance()) {
      if (e.kind != BlockKind::X && e.kind != BlockKind::Z) continue;
      const Index len = e.end - e.start;
      if (e.kind == BlockKind::X) {
        const std::int64_t n = len < config_.cone_step_cap ? len.convert_to<std::int64_t>() : config_.cone_step_cap;
        out.cones.emplace_back(e.stage, e.index, n,
                               check_cone_growth(*working_, x_metrics, g.sequence(), e.start, e.shift, n,
                                                 config_.cone_samples, prng));
      }
      const double chi = e.kind == BlockKind::X ? a_ : b_;
      const NormBoundReport nb = check_norm_bound(*working_, chi, g.sequence().shifted(e.start), len, config_.epsilon,
                                                  l_, g.schedule().delta(e.stage), base_->holder_exponent());
      out.bounds.emplace_back(e.stage, to_string(e.kind), e.index, len, nb);
    }
    return out;
  });

  CsvFile cone(dir / "cone.csv", "point,stage,index,steps,failures,worst_margin,pass", result);
  CsvFile steps(dir / "cone_steps.csv", "point,stage,index,step,flag,margin", result);
  CsvFile norm(dir / "norm_bound.csv",
               "point,stage,kind,index,n,log_norm,implied_c,bound_holds,rate_excess,rate_bound,rate_holds", result);
  std::int64_t cone_steps = 0, cone_failures = 0;
  for (std::size_t pi = 0; pi < audits.size(); ++pi) {
    for (const auto& [stage, index, n, rep] : audits[pi].cones) {
      cone.row(pi, stage, index, n, rep.failures, rep.worst_margin, rep.pass);
      cone_steps += n;
      cone_failures += rep.failures;
      pass = pass && rep.pass;
      if (pi == 0)
        for (const auto& st : rep.steps) steps.row(pi, stage, index, st.step, st.contained && st.margin >= 0.0, st.margin);
    }
    for (const auto& [stage, kind, index, n, nb] : audits[pi].bounds) {
      norm.row(pi, stage, kind, index, n, nb.log_norm, nb.implied_c, nb.bound_holds, nb.rate_excess, nb.rate_bound,
               nb.rate_holds);
      pass = pass && nb.rate_holds;
    }
  }
  json summary;
  summary["l"] = l_;
  summary["k_epsilon_x"] = x_metrics.k_epsilon();
  summary["k_epsilon_z"] = z_metrics.k_epsilon();
  summary["cone_steps"] = cone_steps;
  summary["cone_failures"] = cone_failures;
  summary["pass"] = pass;
  write_summary(dir, Command::Audit, summary, result);
  result.pass = pass;
  result.exit_code = pass ? 0 : 2;
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, Command command) {
  try {
    const Experiment e(config);
    return e.run(command);
  } catch (const Error& err) {
    RunResult r;
    r.pass = false;
    r.message = std::string(to_string(err.code())) + " error: " + err.what();
    const bool config_like = err.code() == ErrorCode::Config || err.code() == ErrorCode::Precondition ||
                             err.code() == ErrorCode::Range;
    r.exit_code = config_like ? 1 : 2;
    return r;
  }
}

}  // namespace lirr
