#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "darwinlab/error.hpp"
#include "darwinlab/harness.hpp"
#include "darwinlab/verification.hpp"

namespace fs = std::filesystem;
using namespace darwinlab;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
};

ExperimentConfig load_for_run(const CommonOptions& common) {
  ExperimentConfig config = load_config(common.config_path);
  if (!common.output_dir.empty()) config.output_dir = common.output_dir;
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorKind::configuration, "cannot write " + path.string());
  out << text << '\n';
}

void emit_json(const std::string& output_dir, const std::string& file, const std::string& text) {
  if (output_dir.empty()) {
    std::cout << text << '\n';
    return;
  }
  write_text(fs::path(output_dir) / file, text);
  std::cout << "wrote " << (fs::path(output_dir) / file).string() << '\n';
}

int run_simulate_abraham(const CommonOptions& common) {
  const ExperimentConfig config = load_for_run(common);
  const AbrahamRun run = simulate_abraham(config);
  if (config.output_dir.empty()) {
    std::cout << "samples " << run.energy.size() << ", min separation " << run.monitors.min_separation << '\n';
    return 0;
  }
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_trajectory_csv(dir / "abraham_trajectory.csv", run.trajectory);
  write_energy_csv(dir / "energy.csv", run.energy);
  write_monitor_csv(dir / "monitors.csv", run.monitors);
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

int run_simulate_darwin(const CommonOptions& common, const std::string& frame_name) {
  const ExperimentConfig config = load_for_run(common);
  Frame frame = Frame::physical;
  if (frame_name == "rescaled")
    frame = Frame::rescaled;
  else if (frame_name != "physical")
    fail(ErrorKind::configuration, "unknown frame '" + frame_name + "'");
  const DarwinRun run = simulate_darwin(config, frame);
  if (!config.output_dir.empty()) {
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    write_trajectory_csv(dir / "darwin_trajectory.csv", run.trajectory, run.frame);
    std::ofstream energy(dir / "darwin_energy.csv");
    energy << "sample,H_D\n";
    energy.precision(17);
    for (std::size_t i = 0; i < run.energy.size(); ++i) energy << i << ',' << run.energy[i] << '\n';
    std::cout << "wrote " << dir.string() << '\n';
  }
  if (run.aborted) {
    std::cerr << "sentinel: " << run.abort_reason << '\n';
    return exit_code(ErrorKind::collision);
  }
  if (config.output_dir.empty() && !run.energy.empty())
    std::cout << "H_D drift " << std::abs(run.energy.back() - run.energy.front()) << '\n';
  return 0;
}

int run_compare(const CommonOptions& common) {
  const ExperimentConfig config = load_for_run(common);
  const ComparisonReport report = run_comparison(config);
  if (config.output_dir.empty()) std::cout << comparison_json(report) << '\n';
  if (report.aborted) {
    std::cerr << "sentinel: " << report.abort_reason << '\n';
    return exit_code(ErrorKind::collision);
  }
  return 0;
}

int run_sweep(const CommonOptions& common, const std::vector<double>& epsilons, const std::string& metric) {
  const ExperimentConfig config = load_for_run(common);
  const SweepReport report = sweep_and_fit(config, epsilons, parse_error_metric(metric));
  emit_json(config.output_dir, "sweep.json", sweep_json(report));
  return 0;
}

int run_verify_kernels(const std::string& output_dir, double support_radius, const std::vector<double>& far,
                       const std::vector<double>& gradient) {
  const Autocorrelation ac(build_form_factor(support_radius));
  emit_json(output_dir, "kernels.json", kernel_report_json(verify_kernels(ac, far, gradient)));
  return 0;
}

int run_verify_forces(const std::string& output_dir, double support_radius, const std::vector<double>& epsilons) {
  const Autocorrelation ac(build_form_factor(support_radius));
  emit_json(output_dir, "forces.json", force_report_json(verify_forces(ac, epsilons)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abraham vs Darwin dynamics of extended charges"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (default: OMP_NUM_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  CommonOptions common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", common.config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", common.output_dir, "output directory, overrides output_dir in the config");
  };

  auto* abraham = app.add_subcommand("simulate-abraham", "integrate the coupled field-particle system");
  add_common(abraham);

  std::string frame = "physical";
  auto* darwin = app.add_subcommand("simulate-darwin", "integrate the effective Darwin dynamics");
  add_common(darwin);
  darwin->add_option("--frame", frame, "physical or rescaled")->check(CLI::IsMember({"physical", "rescaled"}));

  auto* compare = app.add_subcommand("compare", "Abraham vs Darwin and Coulomb-only comparison");
  add_common(compare);

  std::vector<double> sweep_eps;
  std::string metric = "velocity";
  auto* sweep = app.add_subcommand("sweep", "comparison over several eps with a power-law fit");
  add_common(sweep);
  sweep->add_option("--eps", sweep_eps, "epsilon values")->required()->expected(3, -1);
  sweep->add_option("--metric", metric, "position, velocity, coulomb_position or coulomb_velocity");

  std::string verify_output;
  double radius = 1.0;
  std::vector<double> far{3.0, 5.0, 10.0, 25.0, 50.0};
  std::vector<double> gradient{10.0, 20.0, 40.0};
  auto* kernels = app.add_subcommand("verify-kernels", "far-field kernel identities");
  kernels->add_option("-o,--output", verify_output, "output directory for kernels.json");
  kernels->add_option("--radius", radius, "form-factor support radius")->check(CLI::PositiveNumber);
  kernels->add_option("--separations", far, "separations for the A_1 identity");
  kernels->add_option("--gradient-separations", gradient, "separations for the Coulomb gradient residual");

  std::vector<double> force_eps{0.02, 0.04, 0.08};
  auto* forces = app.add_subcommand("verify-forces", "retarded forces against the closed-form expansions");
  forces->add_option("-o,--output", verify_output, "output directory for forces.json");
  forces->add_option("--radius", radius, "form-factor support radius")->check(CLI::PositiveNumber);
  forces->add_option("--eps", force_eps, "epsilon values")->expected(3, -1);

  std::string template_path;
  double template_eps = 0.2;
  auto* templ = app.add_subcommand("template", "write the two-body example config");
  templ->add_option("path", template_path, "destination file")->required();
  templ->add_option("--eps", template_eps, "epsilon")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*abraham) return run_simulate_abraham(common);
    if (*darwin) return run_simulate_darwin(common, frame);
    if (*compare) return run_compare(common);
    if (*sweep) return run_sweep(common, sweep_eps, metric);
    if (*kernels) return run_verify_kernels(verify_output, radius, far, gradient);
    if (*forces) return run_verify_forces(verify_output, radius, force_eps);
    if (*templ) {
      save_config(two_body_config(template_eps), template_path);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
