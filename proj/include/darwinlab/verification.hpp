#pragma once

#include <span>
#include <string>
#include <vector>

#include "darwinlab/harness.hpp"
#include "darwinlab/kernels.hpp"

namespace darwinlab {

struct KernelReport {
  std::vector<double> a1_separations;
  std::vector<double> a1_relative_errors;
  std::vector<double> gradient_separations;
  std::vector<double> gradient_residuals;  // |grad A0 + xi / 4 pi |xi|^3|
  double max_transverse_residual = 0.0;    // residual components off the separation axis
  // Fit of residual against 1/|xi|; unset when some residual is exactly zero.
  std::optional<PowerLawFit> gradient_fit;
};

KernelReport verify_kernels(const Autocorrelation& ac, std::span<const double> a1_separations,
                            std::span<const double> gradient_separations);

struct ForceSweep {
  std::vector<double> epsilons;
  std::vector<double> residuals;  // sup over the comparison window
  PowerLawFit fit;
};

struct ForceReport {
  ForceSweep mutual;
  ForceSweep self;
  double free_self_force = 0.0;  // worst |F| / (m_e |v|) for constant velocity
};

// Retarded forces by direct quadrature against the closed forms on prescribed scaled paths,
// with residuals taken as the sup over rescaled times in [1.5, 3].
ForceReport verify_forces(const Autocorrelation& ac, std::span<const double> epsilons);

struct EnergyBalance {
  double epsilon = 0.0;
  double field_energy = 0.0;  // H_F of the superposed solitons
  double self_energy = 0.0;   // sum of single-soliton field energies in the same box
  double gap = 0.0;
  double continuum_pair = 0.0;  // pair energy of the same solitons in free space
};

// Field energy of the two-body seed configuration minus the single-soliton energies, in a box
// whose edge scales as 1/eps so that the periodic geometry is eps-independent.
EnergyBalance soliton_energy_balance(const FormFactor& ff, double epsilon, double box_factor, int grid);

std::string kernel_report_json(const KernelReport& report);
std::string force_report_json(const ForceReport& report);

}  // namespace darwinlab
