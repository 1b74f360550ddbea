#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <optional>
#include <vector>

#include "darwinlab/formfactor.hpp"
#include "darwinlab/particles.hpp"

namespace darwinlab {

using Complex = std::complex<double>;
using CVec3 = Eigen::Vector3cd;

struct BoxSpec {
  double length = 0.0;
  int grid = 0;  // even number of points per axis
};

// Smallest even grid whose band limit reaches 20 / R for a box of edge `length`.
int minimal_grid(double length, double support_radius);

struct SmearedField {
  Vec3 electric;
  Vec3 magnetic;
};

struct FieldDiagnostics {
  double energy = 0.0;
  double gauss_residual = 0.0;       // relative to the charge density norm (absolute if it vanishes)
  double solenoidal_residual = 0.0;  // relative to the magnetic norm (absolute if it vanishes)
};

// Maxwell field on a periodic box as Fourier-series coefficients, E(x) = sum_k E_k exp(i k.x).
//
// Only one mode of each +-k pair is stored (the other is its conjugate), and only modes inside
// the ball |k| <= band_limit(), which keeps the field isotropically band limited. The k = 0
// mode carries a constant imposed uniform field and is not driven by the sources.
class SpectralField {
 public:
  SpectralField(const FormFactor& ff, const BoxSpec& box);

  const BoxSpec& box() const { return box_; }
  double volume() const { return volume_; }
  double band_limit() const { return band_limit_; }
  double time() const { return time_; }
  std::size_t mode_count() const { return k_.size(); }

  const Vec3& wavevector(std::size_t m) const { return k_[m]; }
  std::array<int, 3> index(std::size_t m) const { return {ix_[m], iy_[m], iz_[m]}; }
  // Series coefficient of a unit charge centered at the origin.
  double charge_profile(std::size_t m) const { return profile_[m]; }
  std::optional<std::size_t> find_mode(int i, int j, int l) const;

  const CVec3& electric(std::size_t m) const { return e_[m]; }
  const CVec3& magnetic(std::size_t m) const { return b_[m]; }
  void set_mode(std::size_t m, const CVec3& electric, const CVec3& magnetic);
  const Vec3& uniform_electric() const { return e0_; }
  const Vec3& uniform_magnetic() const { return b0_; }
  void set_uniform(const Vec3& electric, const Vec3& magnetic);

  // Advances by h with every source charge on the straight line q + v s, s in [0, h].
  // Free rotation and the forced response are both integrated exactly per mode.
  void advance(const ParticleSet& sources, double h);

  // Average of E and B over the unit profile centered at q.
  SmearedField sample(const Vec3& q) const;

  FieldDiagnostics diagnostics(const ParticleSet& sources) const;

  // Charge-density coefficient of all sources for mode m.
  Complex charge_density(std::size_t m, const ParticleSet& sources) const;

 private:
  struct Rotation {
    double step = -1.0;
    std::vector<double> cosine, sine;
  };
  const Rotation& rotation_for(double h);

  BoxSpec box_;
  double volume_;
  double band_limit_;
  double time_ = 0.0;
  std::vector<int> ix_, iy_, iz_;
  std::vector<Vec3> k_;
  std::vector<double> omega_, profile_;
  std::vector<CVec3> e_, b_;
  Vec3 e0_ = Vec3::Zero(), b0_ = Vec3::Zero();
  Rotation rotation_;
};

// Superposed comoving soliton fields of all charges; rejects overlapping periodic images.
SpectralField init_field_from_solitons(const FormFactor& ff, const ParticleSet& particles, const BoxSpec& box);

void step_field(SpectralField& field, const ParticleSet& sources, double dt);

FieldDiagnostics field_diagnostics(const SpectralField& field, const ParticleSet& sources);

// Writes <stem>.bin (per stored mode: i, j, l, then Re/Im of Ex..Ez, Bx..Bz, as little-endian
// float64) and <stem>.json describing the layout, box and time.
void write_snapshot(const SpectralField& field, const std::filesystem::path& stem);

}  // namespace darwinlab
