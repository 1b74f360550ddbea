#include "darwinlab/harness.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace darwinlab {

namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) fail(ErrorKind::configuration, "'" + key + "' must be an array of three numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void expect_keys(const json& table, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!table.is_object()) fail(ErrorKind::configuration, "'" + where + "' must be a table");
  for (const auto& [key, value] : table.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(ErrorKind::configuration, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_optional(const json& table, const char* key, T& out) {
  if (table.contains(key)) out = table.at(key).get<T>();
}

void read_ceiling(const json& table, const char* key, std::optional<double>& out) {
  if (table.contains(key) && !table.at(key).is_null()) out = table.at(key).get<double>();
}

json ceiling_json(const std::optional<double>& value) { return value ? json(*value) : json(nullptr); }

const char* to_string(Adjustment a) { return a == Adjustment::exact ? "exact" : "unadjusted"; }

Adjustment parse_adjustment(const std::string& name) {
  if (name == "exact") return Adjustment::exact;
  if (name == "unadjusted") return Adjustment::unadjusted;
  fail(ErrorKind::configuration, "unknown adjustment '" + name + "' (expected exact or unadjusted)");
}

double max_seed_distance(const ExperimentConfig& config) {
  double c = 0.0;
  for (std::size_t a = 0; a < config.particles.size(); ++a)
    for (std::size_t b = a + 1; b < config.particles.size(); ++b)
      c = std::max(c, (config.particles[a].position - config.particles[b].position).norm());
  return c;
}

void validate(const ExperimentConfig& config) {
  auto bad = [](const std::string& what) { fail(ErrorKind::configuration, what); };
  if (!(config.epsilon > 0.0)) bad("epsilon must be positive");
  if (!(config.horizon > 0.0)) bad("horizon must be positive");
  if (config.particles.empty()) bad("at least one particle is required");
  if (!(config.support_radius > 0.0)) bad("form factor radius must be positive");
  if (!(config.abraham_dt > 0.0)) bad("abraham_dt must be positive");
  if (!(config.darwin_tolerance > 0.0)) bad("darwin_tolerance must be positive");
  if (config.samples < 2) bad("at least two sample times are required");
  for (std::size_t a = 0; a < config.particles.size(); ++a) {
    const SeedParticle& p = config.particles[a];
    if (!(p.bare_mass > 0.0)) bad("particle " + std::to_string(a) + " needs a positive bare mass");
    if (!(std::sqrt(config.epsilon) * p.velocity.norm() < 1.0))
      bad("particle " + std::to_string(a) + " would start at or above the speed of light");
    for (std::size_t b = a + 1; b < config.particles.size(); ++b)
      if (p.position == config.particles[b].position)
        bad("particles " + std::to_string(a) + " and " + std::to_string(b) + " share a seed position");
  }
  if (!config.grid.automatic && (!(config.grid.length > 0.0) || config.grid.points < 4 || config.grid.points % 2 != 0))
    bad("explicit grid needs a positive length and an even point count of at least 4");
}

std::vector<Vec3> positions_of(const ParticleSet& ps) {
  std::vector<Vec3> out;
  for (const Particle& p : ps) out.push_back(p.position);
  return out;
}

std::vector<Vec3> velocities_of(const ParticleSet& ps) {
  std::vector<Vec3> out;
  for (const Particle& p : ps) out.push_back(p.velocity);
  return out;
}

void append_rows(std::vector<TrajectoryRow>& rows, double t, std::span<const Vec3> q, std::span<const Vec3> v) {
  for (std::size_t a = 0; a < q.size(); ++a) rows.push_back({t, a, q[a], v[a]});
}

EnergyRow energy_row(double t, const SpectralField& field, const ParticleSet& ps) {
  const FieldDiagnostics d = field.diagnostics(ps);
  double kinetic = 0.0;
  for (const Particle& p : ps) kinetic += p.bare_mass * lorentz_gamma(p.velocity);
  return {t, kinetic + d.energy, d.energy, d.gauss_residual, d.solenoidal_residual};
}

// Steps the coupled Abraham system with substeps no longer than the configured dt.
class AbrahamDriver {
 public:
  AbrahamDriver(ExperimentSetup& setup, double dt, BoundMonitor& monitor)
      : setup_(setup), dt_(dt), monitor_(monitor) {
    observe(std::vector<Vec3>(setup.particles.size(), Vec3::Zero()));
  }

  double time() const { return time_; }

  void advance_to(double target) {
    const double span = target - time_;
    if (span <= 0.0) return;
    const auto steps = static_cast<long long>(std::ceil(span / dt_ - 1e-9));
    const double h = span / static_cast<double>(steps);
    const double start = time_;
    for (long long i = 0; i < steps; ++i) {
      const std::vector<Vec3> before = velocities_of(setup_.particles);
      step_abraham(setup_.field, setup_.particles, h);
      time_ = start + static_cast<double>(i + 1) * h;
      std::vector<Vec3> acc = velocities_of(setup_.particles);
      for (std::size_t a = 0; a < acc.size(); ++a) acc[a] = (acc[a] - before[a]) / h;
      observe(acc);
      const double overlap = 2.0 * setup_.form_factor.support_radius();
      const double sep = min_separation(positions_of(setup_.particles));
      if (sep < overlap)
        throw SentinelError(ErrorKind::collision, time_,
                            "Abraham charges overlap at t = " + std::to_string(time_) + " (separation " +
                                std::to_string(sep) + ")");
    }
    time_ = target;
  }

 private:
  void observe(const std::vector<Vec3>& acc) {
    monitor_.observe(time_, positions_of(setup_.particles), velocities_of(setup_.particles), acc);
  }

  ExperimentSetup& setup_;
  double dt_;
  BoundMonitor& monitor_;
  double time_ = 0.0;
};

DarwinState darwin_seed(const ParticleSet& ps, double time) {
  DarwinState s;
  s.time = time;
  s.position = positions_of(ps);
  s.velocity = velocities_of(ps);
  return s;
}

DarwinOptions darwin_options(const ExperimentConfig& config) {
  DarwinOptions o;
  o.tolerance = config.darwin_tolerance;
  o.collision_distance = 2.0 * config.support_radius;
  return o;
}

DarwinState advance_darwin(const DarwinState& s, const DarwinSystem& sys, double target, const DarwinOptions& o) {
  return target > s.time ? step_darwin(s, sys, target - s.time, o) : s;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorKind::configuration, "cannot open output file " + path.string());
  out << std::setprecision(17);
  return out;
}

json monitors_json(const MonitorReport& m) {
  json j{{"min_separation", m.min_separation},
         {"max_speed", m.max_speed},
         {"max_acceleration", m.max_acceleration},
         {"first_violation", m.first_violation ? json(*m.first_violation) : json(nullptr)},
         {"violated", m.violated}};
  return j;
}

json fit_json(const PowerLawFit& f) {
  return {{"slope", f.slope},   {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr},
          {"ci_low", f.ci_low}, {"ci_high", f.ci_high},     {"residuals", f.residuals}};
}

}  // namespace

ExperimentConfig two_body_config(double epsilon) {
  ExperimentConfig c;
  c.epsilon = epsilon;
  c.particles = {{1.0, 1.0, Vec3(0.5, 0, 0), Vec3(0, 0.5, 0)}, {1.0, 1.0, Vec3(-0.5, 0, 0), Vec3(0, -0.5, 0)}};
  return c;
}

std::string serialize_config(const ExperimentConfig& config) {
  json particles = json::array();
  for (const SeedParticle& p : config.particles)
    particles.push_back({{"charge", p.charge},
                         {"bare_mass", p.bare_mass},
                         {"position", vec_json(p.position)},
                         {"velocity", vec_json(p.velocity)}});
  json grid = config.grid.automatic ? json{{"mode", "auto"}}
                                    : json{{"mode", "explicit"}, {"length", config.grid.length}, {"points", config.grid.points}};
  json j{
      {"epsilon", config.epsilon},
      {"horizon", config.horizon},
      {"particles", particles},
      {"form_factor", {{"profile", to_string(config.profile)}, {"radius", config.support_radius}}},
      {"grid", grid},
      {"waive_no_wrap", config.waive_no_wrap},
      {"integrator", {{"abraham_dt", config.abraham_dt}, {"darwin_tolerance", config.darwin_tolerance}}},
      {"radiation_reaction", to_string(config.radiation)},
      {"comparison",
       {{"coulomb", config.coulomb_comparison}, {"adjustment", to_string(config.adjustment)}, {"samples", config.samples}}},
      {"monitors",
       {{"min_separation", ceiling_json(config.ceilings.min_separation)},
        {"max_speed", ceiling_json(config.ceilings.max_speed)},
        {"max_acceleration", ceiling_json(config.ceilings.max_acceleration)}}},
      {"limits", {{"max_grid", config.limits.max_grid}, {"max_steps", config.limits.max_steps}}},
      {"output_dir", config.output_dir},
  };
  return j.dump(2);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::configuration, std::string("malformed config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    expect_keys(j,
                {"epsilon", "horizon", "particles", "form_factor", "grid", "waive_no_wrap", "integrator",
                 "radiation_reaction", "comparison", "monitors", "limits", "output_dir"},
                "config");
    read_optional(j, "epsilon", c.epsilon);
    read_optional(j, "horizon", c.horizon);
    read_optional(j, "waive_no_wrap", c.waive_no_wrap);
    read_optional(j, "output_dir", c.output_dir);
    if (j.contains("radiation_reaction")) c.radiation = parse_radiation_reaction(j.at("radiation_reaction").get<std::string>());
    if (!j.contains("particles") || !j.at("particles").is_array()) fail(ErrorKind::configuration, "'particles' array is required");
    for (const json& p : j.at("particles")) {
      expect_keys(p, {"charge", "bare_mass", "position", "velocity"}, "particle");
      SeedParticle s;
      read_optional(p, "charge", s.charge);
      read_optional(p, "bare_mass", s.bare_mass);
      if (p.contains("position")) s.position = vec_from(p.at("position"), "position");
      if (p.contains("velocity")) s.velocity = vec_from(p.at("velocity"), "velocity");
      c.particles.push_back(s);
    }
    if (j.contains("form_factor")) {
      const json& f = j.at("form_factor");
      expect_keys(f, {"profile", "radius"}, "form_factor");
      if (f.contains("profile")) {
        try {
          c.profile = parse_profile_kind(f.at("profile").get<std::string>());
        } catch (const Error& e) {
          fail(ErrorKind::configuration, e.what());
        }
      }
      read_optional(f, "radius", c.support_radius);
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      expect_keys(g, {"mode", "length", "points"}, "grid");
      const std::string mode = g.value("mode", g.contains("length") ? "explicit" : "auto");
      if (mode != "auto" && mode != "explicit") fail(ErrorKind::configuration, "grid mode must be auto or explicit");
      c.grid.automatic = mode == "auto";
      read_optional(g, "length", c.grid.length);
      read_optional(g, "points", c.grid.points);
    }
    if (j.contains("integrator")) {
      const json& i = j.at("integrator");
      expect_keys(i, {"abraham_dt", "darwin_tolerance"}, "integrator");
      read_optional(i, "abraham_dt", c.abraham_dt);
      read_optional(i, "darwin_tolerance", c.darwin_tolerance);
    }
    if (j.contains("comparison")) {
      const json& m = j.at("comparison");
      expect_keys(m, {"coulomb", "adjustment", "samples"}, "comparison");
      read_optional(m, "coulomb", c.coulomb_comparison);
      read_optional(m, "samples", c.samples);
      if (m.contains("adjustment")) c.adjustment = parse_adjustment(m.at("adjustment").get<std::string>());
    }
    if (j.contains("monitors")) {
      const json& m = j.at("monitors");
      expect_keys(m, {"min_separation", "max_speed", "max_acceleration"}, "monitors");
      read_ceiling(m, "min_separation", c.ceilings.min_separation);
      read_ceiling(m, "max_speed", c.ceilings.max_speed);
      read_ceiling(m, "max_acceleration", c.ceilings.max_acceleration);
    }
    if (j.contains("limits")) {
      const json& l = j.at("limits");
      expect_keys(l, {"max_grid", "max_steps"}, "limits");
      read_optional(l, "max_grid", c.limits.max_grid);
      read_optional(l, "max_steps", c.limits.max_steps);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::configuration, std::string("config value has the wrong type: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::configuration, "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << serialize_config(config) << '\n';
}

double slip_time(double epsilon, double support_radius, double c_star) {
  require(epsilon > 0.0, "epsilon must be positive");
  return 4.0 * (support_radius + c_star / epsilon);
}

double no_wrap_length(const ExperimentConfig& config) {
  const double horizon = config.horizon / std::pow(config.epsilon, 1.5);
  return 2.0 * (horizon + max_seed_distance(config) / config.epsilon + 2.0 * config.support_radius);
}

void check_resources(const ExperimentConfig& config, const BoxSpec& box) {
  if (box.grid > config.limits.max_grid)
    fail(ErrorKind::resource_guard, "grid " + std::to_string(box.grid) + "^3 exceeds the cap " +
                                        std::to_string(config.limits.max_grid) + "^3");
  const double horizon = config.horizon / std::pow(config.epsilon, 1.5);
  const double steps = std::ceil(horizon / config.abraham_dt);
  if (steps > static_cast<double>(config.limits.max_steps)) {
    std::ostringstream msg;
    msg << "projected " << steps << " Abraham steps exceed the cap " << config.limits.max_steps;
    fail(ErrorKind::resource_guard, msg.str());
  }
}

ExperimentSetup setup_scaled_experiment(const ExperimentConfig& config) {
  validate(config);
  const double eps = config.epsilon;
  const double speed_scale = std::sqrt(eps);
  std::vector<Particle> particles;
  for (const SeedParticle& s : config.particles)
    particles.push_back({s.charge, s.bare_mass, s.position / eps, speed_scale * s.velocity});
  ParticleSet ps(particles);
  FormFactor ff = build_form_factor(config.support_radius, config.profile);

  std::vector<std::string> warnings;
  const double needed = no_wrap_length(config);
  BoxSpec box;
  if (config.grid.automatic) {
    box = {needed, minimal_grid(needed, config.support_radius)};
    if (box.grid > config.limits.max_grid)
      fail(ErrorKind::configuration, "auto-sized box of edge " + std::to_string(needed) + " needs a grid of at least " +
                                         std::to_string(box.grid) + "^3, above the cap " +
                                         std::to_string(config.limits.max_grid) + "^3");
  } else {
    box = {config.grid.length, config.grid.points};
    if (box.length < needed) {
      const std::string what = "box edge " + std::to_string(box.length) + " is below the no-wrap length " +
                               std::to_string(needed) + " for this horizon";
      if (!config.waive_no_wrap) fail(ErrorKind::configuration, what);
      warnings.push_back(what + " (waived)");
      std::clog << "warning: " << warnings.back() << '\n';
    }
  }
  check_resources(config, box);

  SpectralField field = init_field_from_solitons(ff, ps, box);
  MassConstants masses = mass_constants(ff, ps, field.band_limit());
  const double c_star = max_seed_distance(config);
  return ExperimentSetup{std::move(ff),
                         box,
                         std::move(ps),
                         std::move(field),
                         std::move(masses),
                         c_star,
                         slip_time(eps, config.support_radius, c_star),
                         config.horizon / std::pow(eps, 1.5),
                         std::move(warnings)};
}

BoundMonitor::BoundMonitor(double epsilon, MonitorCeilings ceilings) : eps_(epsilon), ceilings_(ceilings) {
  require(epsilon > 0.0, "epsilon must be positive");
  report_.min_separation = std::numeric_limits<double>::infinity();
}

void BoundMonitor::observe(double time, std::span<const Vec3> positions, std::span<const Vec3> velocities,
                           std::span<const Vec3> accelerations) {
  MonitorSample s;
  s.time = time;
  s.separation = eps_ * min_separation(positions);
  for (const Vec3& v : velocities) s.speed = std::max(s.speed, v.norm() / std::sqrt(eps_));
  for (const Vec3& a : accelerations) s.acceleration = std::max(s.acceleration, a.norm() / (eps_ * eps_));
  report_.series.push_back(s);
  report_.min_separation = std::min(report_.min_separation, s.separation);
  report_.max_speed = std::max(report_.max_speed, s.speed);
  report_.max_acceleration = std::max(report_.max_acceleration, s.acceleration);
  if (report_.first_violation) return;
  auto flag = [&](const char* name) {
    report_.first_violation = time;
    report_.violated = name;
  };
  if (ceilings_.min_separation && s.separation < *ceilings_.min_separation) flag("min_separation");
  else if (ceilings_.max_speed && s.speed > *ceilings_.max_speed) flag("max_speed");
  else if (ceilings_.max_acceleration && s.acceleration > *ceilings_.max_acceleration) flag("max_acceleration");
}

ComparisonReport run_comparison(const ExperimentConfig& config) {
  ExperimentSetup setup = setup_scaled_experiment(config);
  const double eps = config.epsilon;
  const double time_scale = std::pow(eps, 1.5);
  ComparisonReport report;
  report.epsilon = eps;
  report.slip_time = setup.slip_time;
  report.physical_horizon = setup.physical_horizon;
  report.box = setup.box;
  report.warnings = setup.warnings;
  if (!(setup.slip_time < setup.physical_horizon))
    fail(ErrorKind::configuration, "horizon " + std::to_string(setup.physical_horizon) +
                                       " ends before the initial slip t0 = " + std::to_string(setup.slip_time));

  DarwinSystem darwin = make_darwin_system(setup.particles, setup.masses);
  darwin.radiation = config.radiation;
  DarwinSystem coulomb = darwin;
  coulomb.coulomb_only = true;
  const DarwinOptions options = darwin_options(config);

  BoundMonitor monitor(eps, config.ceilings);
  const double h0 = energy_row(0.0, setup.field, setup.particles).total;
  try {
    DarwinState darwin_state = darwin_seed(setup.particles, 0.0);
    DarwinState coulomb_state = darwin_state;
    AbrahamDriver abraham(setup, config.abraham_dt, monitor);
    abraham.advance_to(setup.slip_time);
    if (config.adjustment == Adjustment::exact) {
      darwin_state = darwin_seed(setup.particles, setup.slip_time);
      coulomb_state = darwin_state;
    } else {
      darwin_state = advance_darwin(darwin_state, darwin, setup.slip_time, options);
      if (config.coulomb_comparison) coulomb_state = advance_darwin(coulomb_state, coulomb, setup.slip_time, options);
    }

    const double span = setup.physical_horizon - setup.slip_time;
    for (int i = 0; i < config.samples; ++i) {
      const double t = i + 1 == config.samples ? setup.physical_horizon
                                                : setup.slip_time + span * i / (config.samples - 1);
      abraham.advance_to(t);
      darwin_state = advance_darwin(darwin_state, darwin, t, options);
      if (config.coulomb_comparison) coulomb_state = advance_darwin(coulomb_state, coulomb, t, options);

      ErrorSample e;
      e.time = t * time_scale;
      for (std::size_t a = 0; a < setup.particles.size(); ++a) {
        const Particle& p = setup.particles[a];
        e.position = std::max(e.position, (p.position - darwin_state.position[a]).norm());
        e.velocity = std::max(e.velocity, (p.velocity - darwin_state.velocity[a]).norm());
        if (config.coulomb_comparison) {
          e.coulomb_position = std::max(e.coulomb_position, (p.position - coulomb_state.position[a]).norm());
          e.coulomb_velocity = std::max(e.coulomb_velocity, (p.velocity - coulomb_state.velocity[a]).norm());
        }
      }
      report.errors.push_back(e);
      report.max_position_error = std::max(report.max_position_error, e.position);
      report.max_velocity_error = std::max(report.max_velocity_error, e.velocity);
      report.max_coulomb_position_error = std::max(report.max_coulomb_position_error, e.coulomb_position);
      report.max_coulomb_velocity_error = std::max(report.max_coulomb_velocity_error, e.coulomb_velocity);

      append_rows(report.abraham, t, positions_of(setup.particles), velocities_of(setup.particles));
      append_rows(report.darwin, t, darwin_state.position, darwin_state.velocity);
      if (config.coulomb_comparison) append_rows(report.coulomb, t, coulomb_state.position, coulomb_state.velocity);
      const EnergyRow row = energy_row(t, setup.field, setup.particles);
      report.energy.push_back(row);
      report.max_energy_drift = std::max(report.max_energy_drift, std::abs(row.total - h0) / std::abs(h0));
      report.max_gauss_residual = std::max(report.max_gauss_residual, row.gauss_residual);
    }
  } catch (const SentinelError& e) {
    report.aborted = true;
    report.abort_reason = e.what();
    report.abort_time = e.time();
  }
  report.monitors = monitor.report();
  if (!config.output_dir.empty()) write_comparison_outputs(config.output_dir, report);
  return report;
}

AbrahamRun simulate_abraham(const ExperimentConfig& config) {
  ExperimentSetup setup = setup_scaled_experiment(config);
  BoundMonitor monitor(config.epsilon, config.ceilings);
  AbrahamRun run;
  AbrahamDriver driver(setup, config.abraham_dt, monitor);
  try {
    for (int i = 0; i < config.samples; ++i) {
      const double t = setup.physical_horizon * i / (config.samples - 1);
      driver.advance_to(t);
      append_rows(run.trajectory, t, positions_of(setup.particles), velocities_of(setup.particles));
      run.energy.push_back(energy_row(t, setup.field, setup.particles));
    }
  } catch (const SentinelError& e) {
    std::clog << "warning: " << e.what() << '\n';
  }
  run.monitors = monitor.report();
  return run;
}

DarwinRun simulate_darwin(const ExperimentConfig& config, Frame frame) {
  validate(config);
  const double eps = config.epsilon;
  ParticleSet ps;
  for (const SeedParticle& s : config.particles)
    ps.add({s.charge, s.bare_mass, s.position / eps, std::sqrt(eps) * s.velocity});
  const FormFactor ff = build_form_factor(config.support_radius, config.profile);
  DarwinSystem sys = make_darwin_system(ps, mass_constants(ff, ps));
  sys.radiation = config.radiation;

  DarwinState state = darwin_seed(ps, 0.0);
  DarwinOptions options = darwin_options(config);
  double horizon = config.horizon / std::pow(eps, 1.5);
  if (frame == Frame::rescaled) {
    state = rescale_map(state, eps, Frame::rescaled);
    options.collision_distance *= eps;
    horizon = config.horizon;
  }
  DarwinRun run;
  run.frame = frame;
  try {
    for (int i = 0; i < config.samples; ++i) {
      state = advance_darwin(state, sys, horizon * i / (config.samples - 1), options);
      append_rows(run.trajectory, state.time, state.position, state.velocity);
      run.energy.push_back(darwin_energy(state, sys));
    }
  } catch (const SentinelError& e) {
    run.aborted = true;
    run.abort_reason = e.what();
  }
  return run;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, double confidence) {
  require(x.size() == y.size(), "fit needs matching x and y");
  require(x.size() >= 3, "power-law fit needs at least three points");
  require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, "power-law fit needs distinct x values");
  PowerLawFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals.push_back(ly[i] - fit.intercept - fit.slope * lx[i]);
    sse += fit.residuals.back() * fit.residuals.back();
  }
  fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double t = boost::math::quantile(dist, 0.5 + 0.5 * confidence);
  fit.ci_low = fit.slope - t * fit.slope_stderr;
  fit.ci_high = fit.slope + t * fit.slope_stderr;
  return fit;
}

ErrorMetric parse_error_metric(const std::string& name) {
  if (name == "position") return ErrorMetric::position;
  if (name == "velocity") return ErrorMetric::velocity;
  if (name == "coulomb_position") return ErrorMetric::coulomb_position;
  if (name == "coulomb_velocity") return ErrorMetric::coulomb_velocity;
  fail(ErrorKind::configuration, "unknown metric '" + name + "'");
}

std::string to_string(ErrorMetric metric) {
  switch (metric) {
    case ErrorMetric::position: return "position";
    case ErrorMetric::velocity: return "velocity";
    case ErrorMetric::coulomb_position: return "coulomb_position";
    case ErrorMetric::coulomb_velocity: return "coulomb_velocity";
  }
  return "position";
}

SweepReport sweep_and_fit(const ExperimentConfig& base, std::span<const double> epsilons, ErrorMetric metric) {
  require(epsilons.size() >= 3, "a sweep needs at least three epsilon values");
  SweepReport sweep;
  sweep.metric = metric;
  for (double eps : epsilons) {
    ExperimentConfig config = base;
    config.epsilon = eps;
    if (!base.output_dir.empty()) {
      std::ostringstream sub;
      sub << "eps_" << eps;
      config.output_dir = (std::filesystem::path(base.output_dir) / sub.str()).string();
    }
    ComparisonReport run = run_comparison(config);
    double value = 0.0;
    switch (metric) {
      case ErrorMetric::position: value = run.max_position_error; break;
      case ErrorMetric::velocity: value = run.max_velocity_error; break;
      case ErrorMetric::coulomb_position: value = run.max_coulomb_position_error; break;
      case ErrorMetric::coulomb_velocity: value = run.max_coulomb_velocity_error; break;
    }
    sweep.epsilons.push_back(eps);
    sweep.values.push_back(value);
    sweep.runs.push_back(std::move(run));
  }
  sweep.fit = fit_power_law(sweep.epsilons, sweep.values);
  return sweep;
}

void write_trajectory_csv(const std::filesystem::path& path, std::span<const TrajectoryRow> rows,
                          std::optional<Frame> frame) {
  std::ofstream out = open_output(path);
  out << "t,alpha,qx,qy,qz,vx,vy,vz" << (frame ? ",frame" : "") << '\n';
  for (const TrajectoryRow& r : rows) {
    out << r.time << ',' << r.particle << ',' << r.position.x() << ',' << r.position.y() << ',' << r.position.z()
        << ',' << r.velocity.x() << ',' << r.velocity.y() << ',' << r.velocity.z();
    if (frame) out << ',' << to_string(*frame);
    out << '\n';
  }
}

void write_energy_csv(const std::filesystem::path& path, std::span<const EnergyRow> rows) {
  std::ofstream out = open_output(path);
  out << "t,H,H_F,gauss_residual,solenoidal_residual\n";
  for (const EnergyRow& r : rows)
    out << r.time << ',' << r.total << ',' << r.field << ',' << r.gauss_residual << ',' << r.solenoidal_residual
        << '\n';
}

void write_monitor_csv(const std::filesystem::path& path, const MonitorReport& monitors) {
  std::ofstream out = open_output(path);
  out << "t,separation,speed,acceleration\n";
  for (const MonitorSample& s : monitors.series)
    out << s.time << ',' << s.separation << ',' << s.speed << ',' << s.acceleration << '\n';
}

void write_error_csv(const std::filesystem::path& path, std::span<const ErrorSample> rows) {
  std::ofstream out = open_output(path);
  out << "t,position,velocity,coulomb_position,coulomb_velocity\n";
  for (const ErrorSample& e : rows)
    out << e.time << ',' << e.position << ',' << e.velocity << ',' << e.coulomb_position << ',' << e.coulomb_velocity
        << '\n';
}

std::string comparison_json(const ComparisonReport& r) {
  json j{{"epsilon", r.epsilon},
         {"slip_time", r.slip_time},
         {"physical_horizon", r.physical_horizon},
         {"box", {{"length", r.box.length}, {"grid", r.box.grid}}},
         {"max_position_error", r.max_position_error},
         {"max_velocity_error", r.max_velocity_error},
         {"max_coulomb_position_error", r.max_coulomb_position_error},
         {"max_coulomb_velocity_error", r.max_coulomb_velocity_error},
         {"max_energy_drift", r.max_energy_drift},
         {"max_gauss_residual", r.max_gauss_residual},
         {"samples", r.errors.size()},
         {"monitors", monitors_json(r.monitors)},
         {"warnings", r.warnings},
         {"aborted", r.aborted},
         {"abort_reason", r.abort_reason},
         {"abort_time", r.abort_time}};
  return j.dump(2);
}

std::string sweep_json(const SweepReport& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.epsilons.size(); ++i)
    rows.push_back({{"epsilon", s.epsilons[i]}, {"value", s.values[i]}, {"aborted", s.runs[i].aborted}});
  return json{{"metric", to_string(s.metric)}, {"points", rows}, {"fit", fit_json(s.fit)}}.dump(2);
}

void write_comparison_outputs(const std::filesystem::path& dir, const ComparisonReport& report) {
  write_trajectory_csv(dir / "abraham_trajectory.csv", report.abraham);
  write_trajectory_csv(dir / "darwin_trajectory.csv", report.darwin, Frame::physical);
  if (!report.coulomb.empty()) write_trajectory_csv(dir / "coulomb_trajectory.csv", report.coulomb, Frame::physical);
  write_energy_csv(dir / "energy.csv", report.energy);
  write_error_csv(dir / "errors.csv", report.errors);
  write_monitor_csv(dir / "monitors.csv", report.monitors);
  std::ofstream out = open_output(dir / "report.json");
  out << comparison_json(report) << '\n';
}

}  // namespace darwinlab
