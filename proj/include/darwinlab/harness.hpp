#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "darwinlab/abraham.hpp"
#include "darwinlab/darwin.hpp"

namespace darwinlab {

// Scaled seed data of one charge: position r0 and velocity u0 in macroscopic units.
struct SeedParticle {
  double charge = 1.0;
  double bare_mass = 1.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  bool operator==(const SeedParticle&) const = default;
};

struct GridSpec {
  bool automatic = true;
  double length = 0.0;
  int points = 0;

  bool operator==(const GridSpec&) const = default;
};

// How the effective dynamics is seeded at the end of the initial slip.
enum class Adjustment {
  exact,       // Darwin starts from the Abraham phase point at t0
  unadjusted,  // Darwin starts from the unadjusted seed data at t = 0
};

// Ceilings on the eps-normalized bound monitors; unset entries are not enforced.
struct MonitorCeilings {
  std::optional<double> min_separation;  // floor on eps * min |q_a - q_b|
  std::optional<double> max_speed;       // ceiling on max |v| / sqrt(eps)
  std::optional<double> max_acceleration;  // ceiling on max |dv/dt| / eps^2

  bool operator==(const MonitorCeilings&) const = default;
};

struct ResourceLimits {
  int max_grid = 256;
  long long max_steps = 1'000'000;

  bool operator==(const ResourceLimits&) const = default;
};

struct ExperimentConfig {
  double epsilon = 0.1;
  double horizon = 1.0;  // rescaled time
  std::vector<SeedParticle> particles;
  ProfileKind profile = ProfileKind::smooth_bump;
  double support_radius = 1.0;
  GridSpec grid;
  bool waive_no_wrap = false;
  double abraham_dt = 0.1;
  double darwin_tolerance = 1e-10;
  RadiationReaction radiation = RadiationReaction::off;
  bool coulomb_comparison = true;
  Adjustment adjustment = Adjustment::exact;
  int samples = 200;
  MonitorCeilings ceilings;
  ResourceLimits limits;
  std::string output_dir;  // empty disables file output

  bool operator==(const ExperimentConfig&) const = default;
};

// Two unit charges with r0 = +-0.5 x and u0 = +-0.5 y.
ExperimentConfig two_body_config(double epsilon);

std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

// t0 = 4 (R + C* / eps).
double slip_time(double epsilon, double support_radius, double c_star);

// Smallest box edge that keeps periodic images causally disconnected over the run.
double no_wrap_length(const ExperimentConfig& config);

struct ExperimentSetup {
  FormFactor form_factor;
  BoxSpec box;
  ParticleSet particles;
  SpectralField field;
  MassConstants masses;
  double c_star = 0.0;
  double slip_time = 0.0;
  double physical_horizon = 0.0;
  std::vector<std::string> warnings;
};

// Physical initial data q = r0 / eps, v = sqrt(eps) u0 with the superposed soliton field.
ExperimentSetup setup_scaled_experiment(const ExperimentConfig& config);

// Eps-normalized a-priori bounds along a run.
struct MonitorSample {
  double time = 0.0;  // physical
  double separation = 0.0;
  double speed = 0.0;
  double acceleration = 0.0;
};

struct MonitorReport {
  std::vector<MonitorSample> series;
  double min_separation = 0.0;
  double max_speed = 0.0;
  double max_acceleration = 0.0;
  std::optional<double> first_violation;
  std::string violated;
};

class BoundMonitor {
 public:
  BoundMonitor(double epsilon, MonitorCeilings ceilings);

  void observe(double time, std::span<const Vec3> positions, std::span<const Vec3> velocities,
               std::span<const Vec3> accelerations);
  const MonitorReport& report() const { return report_; }

 private:
  double eps_;
  MonitorCeilings ceilings_;
  MonitorReport report_;
};

struct TrajectoryRow {
  double time = 0.0;
  std::size_t particle = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct EnergyRow {
  double time = 0.0;
  double total = 0.0;
  double field = 0.0;
  double gauss_residual = 0.0;
  double solenoidal_residual = 0.0;
};

// Per sample time, the max over particles of each model's distance to the Abraham state.
struct ErrorSample {
  double time = 0.0;  // rescaled
  double position = 0.0;
  double velocity = 0.0;
  double coulomb_position = 0.0;
  double coulomb_velocity = 0.0;
};

struct ComparisonReport {
  double epsilon = 0.0;
  double slip_time = 0.0;
  double physical_horizon = 0.0;
  BoxSpec box;
  std::vector<ErrorSample> errors;
  double max_position_error = 0.0;
  double max_velocity_error = 0.0;
  double max_coulomb_position_error = 0.0;
  double max_coulomb_velocity_error = 0.0;
  double max_energy_drift = 0.0;  // relative, Abraham model
  double max_gauss_residual = 0.0;
  MonitorReport monitors;
  std::vector<TrajectoryRow> abraham;
  std::vector<TrajectoryRow> darwin;
  std::vector<TrajectoryRow> coulomb;
  std::vector<EnergyRow> energy;
  std::vector<std::string> warnings;
  bool aborted = false;
  std::string abort_reason;
  double abort_time = 0.0;
};

// Refuses configurations whose grid or projected step count exceed the limits.
void check_resources(const ExperimentConfig& config, const BoxSpec& box);

// Abraham from t = 0, Darwin seeded at t0, both compared on a uniform grid of rescaled times.
ComparisonReport run_comparison(const ExperimentConfig& config);

struct AbrahamRun {
  std::vector<TrajectoryRow> trajectory;
  std::vector<EnergyRow> energy;
  MonitorReport monitors;
};

AbrahamRun simulate_abraham(const ExperimentConfig& config);

struct DarwinRun {
  Frame frame = Frame::physical;
  std::vector<TrajectoryRow> trajectory;
  std::vector<double> energy;
  bool aborted = false;
  std::string abort_reason;
};

DarwinRun simulate_darwin(const ExperimentConfig& config, Frame frame);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> residuals;  // in log space
};

// Least-squares fit of log y = intercept + slope log x with a Student-t confidence interval.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, double confidence = 0.95);

enum class ErrorMetric { position, velocity, coulomb_position, coulomb_velocity };

ErrorMetric parse_error_metric(const std::string& name);
std::string to_string(ErrorMetric metric);

struct SweepReport {
  ErrorMetric metric = ErrorMetric::position;
  std::vector<double> epsilons;
  std::vector<double> values;
  std::vector<ComparisonReport> runs;
  PowerLawFit fit;
};

SweepReport sweep_and_fit(const ExperimentConfig& base, std::span<const double> epsilons, ErrorMetric metric);

// File output: CSV tables and JSON summaries.
void write_trajectory_csv(const std::filesystem::path& path, std::span<const TrajectoryRow> rows,
                          std::optional<Frame> frame = std::nullopt);
void write_energy_csv(const std::filesystem::path& path, std::span<const EnergyRow> rows);
void write_monitor_csv(const std::filesystem::path& path, const MonitorReport& monitors);
void write_error_csv(const std::filesystem::path& path, std::span<const ErrorSample> rows);
std::string comparison_json(const ComparisonReport& report);
std::string sweep_json(const SweepReport& report);
void write_comparison_outputs(const std::filesystem::path& dir, const ComparisonReport& report);

}  // namespace darwinlab
