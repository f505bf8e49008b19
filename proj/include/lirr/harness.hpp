#pragma once

// JSON experiment configs and the five experiment commands.

#include "lirr/dc1.hpp"
#include "lirr/lyapunov_metric.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lirr {

constexpr int kSchemaVersion = 1;

struct CocycleEntryConfig {
  std::vector<Symbol> word;
  std::vector<double> matrix;  // row-major m x m
  bool operator==(const CocycleEntryConfig&) const = default;
};

struct XiConfig {
  std::string rule = "power2";  // power2 | geometric | explicit
  double ratio = 0.5;
  std::vector<double> values;
  bool operator==(const XiConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  int alphabet_size = 2;
  double metric_base = 2.0;
  Symbol fill_symbol = 1;
  int dimension = 2;
  int window_radius = 0;
  std::vector<CocycleEntryConfig> cocycle;
  int exterior_degree = 1;  // 0 selects the least separating degree
  std::vector<Symbol> nu;
  std::vector<Symbol> omega;
  std::vector<Symbol> x;
  std::vector<Symbol> z;
  double tau = 0.15;
  double epsilon = 0.1;
  double delta = 0.125;
  XiConfig xi;
  int stages = 6;  // k_max
  std::optional<std::string> horizon;
  std::vector<std::vector<int>> p_sequences;
  std::vector<double> t_list{0.0};
  double kappa = 0.5;
  int cone_samples = 32;
  std::int64_t cone_step_cap = 10000;
  int sandwich_samples = 1000;
  double grouping_tolerance = 1e-9;
  std::uint64_t seed = 0;
  bool parallel = false;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Field-level validation errors are reported as Config errors naming the field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

enum class Command { Spectrum, Construct, Dc1, Diverge, Audit };
Command parse_command(const std::string& name);
const char* to_string(Command command);

struct RunResult {
  int exit_code = 0;  // 0 pass, 2 checks failed, 1 configuration error
  bool pass = true;
  std::string message;
  std::string summary_json;
  std::vector<std::string> files;
};

/// A validated experiment: cocycle, the working exterior power, spectra of
/// both measures, the derived constants a, b, l and the schedule.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const Cocycle& base_cocycle() const { return *base_; }
  const Cocycle& cocycle() const { return *working_; }
  int degree() const { return degree_; }
  const LyapunovSpectrum& nu_spectrum() const { return nu_spectrum_; }
  const LyapunovSpectrum& omega_spectrum() const { return omega_spectrum_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double l() const { return l_; }
  const Schedule& schedule() const { return *schedule_; }
  std::shared_ptr<const Schedule> schedule_ptr() const { return schedule_; }

  std::vector<ConstructedPoint> build_points() const;

  /// Writes artifacts under output_dir; never throws for failed checks.
  RunResult run(Command command) const;

 private:
  RunResult spectrum() const;
  RunResult construct() const;
  RunResult dc1() const;
  RunResult diverge() const;
  RunResult audit() const;

  ExperimentConfig config_;
  std::unique_ptr<Cocycle> base_;
  std::unique_ptr<Cocycle> working_;
  int degree_ = 1;
  LyapunovSpectrum nu_spectrum_;
  LyapunovSpectrum omega_spectrum_;
  double a_ = 0.0;
  double b_ = 0.0;
  double l_ = 1.0;
  std::shared_ptr<const Schedule> schedule_;
};

/// Validate and run; configuration problems become exit code 1.
RunResult run_experiment(const ExperimentConfig& config, Command command);

}  // namespace lirr
