#include "darwinlab/maxwell.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

namespace darwinlab {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr std::size_t reduction_chunks = 64;

// exp(-i 2 pi j x / L) for j in [-n/2, n/2] on each axis, so that exp(-i k.x) is a product.
class PhaseTable {
 public:
  PhaseTable(const Vec3& x, double length, int grid) : half_(grid / 2) {
    for (int d = 0; d < 3; ++d) {
      axis_[d].resize(grid + 1);
      const double base = -2.0 * pi * x[d] / length;
      for (int j = -half_; j <= half_; ++j) axis_[d][j + half_] = std::polar(1.0, base * j);
    }
  }
  Complex operator()(int i, int j, int l) const {
    return axis_[0][i + half_] * axis_[1][j + half_] * axis_[2][l + half_];
  }

 private:
  int half_;
  std::array<std::vector<Complex>, 3> axis_;
};

// (exp(i a h) - exp(i b h)) / (i (a - b)), stable when (a - b) h is small.
Complex divided_exp(double a, double b, double h, Complex exp_a, Complex exp_b) {
  const double x = (a - b) * h;
  if (std::abs(x) > 1e-3) return (exp_a - exp_b) / (I * (a - b));
  const Complex ix = I * x;
  const Complex series = 1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0 + ix * ix * ix * ix / 120.0;
  return exp_b * h * series;
}

// Fixed chunking keeps reductions bit-identical for any thread count.
template <class T, class F>
T chunked_sum(std::size_t count, T zero, F&& term) {
  std::vector<T> partial(reduction_chunks, zero);
  const std::size_t per = (count + reduction_chunks - 1) / reduction_chunks;
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < reduction_chunks; ++c) {
    const std::size_t lo = c * per, hi = std::min(count, lo + per);
    T sum = zero;
    for (std::size_t m = lo; m < hi; ++m) sum += term(m);
    partial[c] = sum;
  }
  T total = zero;
  for (const T& p : partial) total += p;
  return total;
}

// Eigen's cross() conjugates complex results, so the real-by-complex product is spelled out.
CVec3 cross(const Vec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

bool stored_half(int i, int j, int l) {
  return i > 0 || (i == 0 && (j > 0 || (j == 0 && l > 0)));
}

double min_image_distance(const Vec3& d, double length) {
  Vec3 r = d;
  for (int a = 0; a < 3; ++a) r[a] -= length * std::round(r[a] / length);
  return r.norm();
}

void write_le(std::ofstream& out, double value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

}  // namespace

int minimal_grid(double length, double support_radius) {
  require(length > 0.0 && support_radius > 0.0, "box length and support radius must be positive");
  // band limit 2 pi (n/2 - 1) / L >= 20 / R
  const int half = static_cast<int>(std::ceil(20.0 * length / (2.0 * pi * support_radius))) + 1;
  return 2 * half;
}

SpectralField::SpectralField(const FormFactor& ff, const BoxSpec& box) : box_(box) {
  require(box.length > 0.0, "box length must be positive");
  require(box.grid >= 4 && box.grid % 2 == 0, "grid must be even and at least 4");
  volume_ = std::pow(box.length, 3);
  const int half = box.grid / 2 - 1;
  const double dk = 2.0 * pi / box.length;
  band_limit_ = dk * half;
  const double scale = std::pow(2.0 * pi, 1.5) / volume_;
  for (int i = 0; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      for (int l = -half; l <= half; ++l) {
        if (!stored_half(i, j, l) || i * i + j * j + l * l > half * half) continue;
        const Vec3 k = dk * Vec3(i, j, l);
        ix_.push_back(i);
        iy_.push_back(j);
        iz_.push_back(l);
        k_.push_back(k);
        omega_.push_back(k.norm());
        profile_.push_back(scale * ff.fourier(k.norm()));
      }
    }
  }
  e_.assign(k_.size(), CVec3::Zero());
  b_.assign(k_.size(), CVec3::Zero());
}

std::optional<std::size_t> SpectralField::find_mode(int i, int j, int l) const {
  for (std::size_t m = 0; m < k_.size(); ++m) {
    if (ix_[m] == i && iy_[m] == j && iz_[m] == l) return m;
  }
  return std::nullopt;
}

void SpectralField::set_mode(std::size_t m, const CVec3& electric, const CVec3& magnetic) {
  e_.at(m) = electric;
  b_.at(m) = magnetic;
}

void SpectralField::set_uniform(const Vec3& electric, const Vec3& magnetic) {
  e0_ = electric;
  b0_ = magnetic;
}

const SpectralField::Rotation& SpectralField::rotation_for(double h) {
  if (rotation_.step != h) {
    rotation_.step = h;
    rotation_.cosine.resize(k_.size());
    rotation_.sine.resize(k_.size());
    for (std::size_t m = 0; m < k_.size(); ++m) {
      rotation_.cosine[m] = std::cos(omega_[m] * h);
      rotation_.sine[m] = std::sin(omega_[m] * h);
    }
  }
  return rotation_;
}

Complex SpectralField::charge_density(std::size_t m, const ParticleSet& sources) const {
  Complex rho = 0.0;
  for (const Particle& p : sources) rho += p.charge * std::polar(1.0, -k_[m].dot(p.position));
  return profile_[m] * rho;
}

void SpectralField::advance(const ParticleSet& sources, double h) {
  require(h > 0.0, "field step must be positive");
  const Rotation& rot = rotation_for(h);
  const std::size_t count = sources.size();
  std::vector<PhaseTable> start, drift;
  start.reserve(count);
  drift.reserve(count);
  for (const Particle& p : sources) {
    start.emplace_back(p.position, box_.length, box_.grid);
    drift.emplace_back(p.velocity * h, box_.length, box_.grid);
  }

#pragma omp parallel for schedule(static)
  for (std::size_t m = 0; m < k_.size(); ++m) {
    const Vec3& k = k_[m];
    const double w = omega_[m];
    const Vec3 unit = k / w;
    const double c = rot.cosine[m], s = rot.sine[m];
    const Complex exp_w(c, s);

    CVec3 jc = CVec3::Zero(), js = CVec3::Zero();
    Complex drho = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
      const Particle& p = sources[a];
      const Complex amp = p.charge * profile_[m] * start[a](ix_[m], iy_[m], iz_[m]);
      if (amp == 0.0) continue;
      const Complex decay = drift[a](ix_[m], iy_[m], iz_[m]);  // exp(-i lambda h)
      const double lambda = k.dot(p.velocity);
      const Complex plus = divided_exp(w, -lambda, h, exp_w, decay);
      const Complex minus = divided_exp(-lambda, -w, h, decay, std::conj(exp_w));
      const Complex ic = 0.5 * (plus + minus);
      const Complex is = (plus - minus) / (2.0 * I * w);
      jc += (amp * ic) * p.velocity.cast<Complex>();
      js += (amp * is) * p.velocity.cast<Complex>();
      drho += amp * (decay - 1.0);
    }

    const CVec3 kc = k.cast<Complex>(), uc = unit.cast<Complex>();
    const CVec3& e = e_[m];
    const CVec3& b = b_[m];
    const CVec3 e_long = uc * uc.dot(e);  // uc is real, so dot()'s conjugation is harmless
    const CVec3 e_trans = e - e_long;
    const CVec3 jc_trans = jc - uc * uc.dot(jc);
    const CVec3 e_new = e_long - I * kc * (drho / (w * w)) + c * e_trans + (I * s) * cross(unit, b) - jc_trans;
    const CVec3 b_new = c * b - (I * s) * cross(unit, e_trans) + I * cross(k, js);
    e_[m] = e_new;
    b_[m] = b_new;
  }
  time_ += h;
}

SmearedField SpectralField::sample(const Vec3& q) const {
  const PhaseTable phase(q, box_.length, box_.grid);
  using Pair = Eigen::Matrix<double, 6, 1>;
  const Pair sum = chunked_sum(k_.size(), Pair(Pair::Zero()), [&](std::size_t m) {
    const Complex w = profile_[m] * std::conj(phase(ix_[m], iy_[m], iz_[m]));
    Pair out;
    out.head<3>() = (w * e_[m]).real();
    out.tail<3>() = (w * b_[m]).real();
    return out;
  });
  return {e0_ + 2.0 * volume_ * sum.head<3>(), b0_ + 2.0 * volume_ * sum.tail<3>()};
}

FieldDiagnostics SpectralField::diagnostics(const ParticleSet& sources) const {
  std::vector<PhaseTable> tables;
  for (const Particle& p : sources) tables.emplace_back(p.position, box_.length, box_.grid);
  using Sums = Eigen::Matrix<double, 5, 1>;
  const Sums sums = chunked_sum(k_.size(), Sums(Sums::Zero()), [&](std::size_t m) {
    Complex rho = 0.0;
    for (std::size_t a = 0; a < tables.size(); ++a)
      rho += sources[a].charge * tables[a](ix_[m], iy_[m], iz_[m]);
    rho *= profile_[m];
    const CVec3 kc = k_[m].cast<Complex>();
    const Complex div_e = I * (kc.transpose() * e_[m])(0);
    const Complex div_b = (kc.transpose() * b_[m])(0);
    Sums out;
    out << e_[m].squaredNorm() + b_[m].squaredNorm(), std::norm(div_e - rho), std::norm(rho),
        std::norm(div_b), k_[m].squaredNorm() * b_[m].squaredNorm();
    return out;
  });
  FieldDiagnostics d;
  d.energy = 0.5 * volume_ * (e0_.squaredNorm() + b0_.squaredNorm() + 2.0 * sums[0]);
  d.gauss_residual = std::sqrt(sums[1]) / (sums[2] > 0.0 ? std::sqrt(sums[2]) : 1.0);
  d.solenoidal_residual = std::sqrt(sums[3]) / (sums[4] > 0.0 ? std::sqrt(sums[4]) : 1.0);
  return d;
}

SpectralField init_field_from_solitons(const FormFactor& ff, const ParticleSet& particles, const BoxSpec& box) {
  SpectralField field(ff, box);
  const double diameter = 2.0 * ff.support_radius();
  if (box.length <= 2.0 * diameter)
    fail(ErrorKind::configuration, "box edge must exceed twice the charge diameter");
  for (std::size_t a = 0; a < particles.size(); ++a) {
    for (std::size_t b = a + 1; b < particles.size(); ++b) {
      if (min_image_distance(particles[a].position - particles[b].position, box.length) <= diameter)
        fail(ErrorKind::configuration, "charges " + std::to_string(a) + " and " + std::to_string(b) +
                                           " overlap within the periodic box");
    }
  }
  for (std::size_t m = 0; m < field.mode_count(); ++m) {
    const Vec3& k = field.wavevector(m);
    CVec3 e = CVec3::Zero(), b = CVec3::Zero();
    for (const Particle& p : particles) {
      const Complex amp = p.charge * field.charge_profile(m) * std::polar(1.0, -k.dot(p.position));
      const double kv = k.dot(p.velocity);
      const double denom = k.squaredNorm() - kv * kv;
      e += (-I * amp / denom) * (k - kv * p.velocity).cast<Complex>();
      b += (-I * amp / denom) * p.velocity.cross(k).cast<Complex>();
    }
    field.set_mode(m, e, b);
  }
  return field;
}

void step_field(SpectralField& field, const ParticleSet& sources, double dt) { field.advance(sources, dt); }

FieldDiagnostics field_diagnostics(const SpectralField& field, const ParticleSet& sources) {
  return field.diagnostics(sources);
}

void write_snapshot(const SpectralField& field, const std::filesystem::path& stem) {
  std::filesystem::path bin = stem, meta = stem;
  bin += ".bin";
  meta += ".json";
  std::ofstream out(bin, std::ios::binary);
  if (!out) fail(ErrorKind::configuration, "cannot open snapshot file " + bin.string());
  for (std::size_t m = 0; m < field.mode_count(); ++m) {
    for (int v : field.index(m)) write_le(out, v);
    for (const CVec3* f : {&field.electric(m), &field.magnetic(m)}) {
      for (int a = 0; a < 3; ++a) {
        write_le(out, (*f)[a].real());
        write_le(out, (*f)[a].imag());
      }
    }
  }
  nlohmann::json j;
  j["format"] = "darwinlab-modes";
  j["encoding"] = "float64-le";
  j["columns"] = {"i", "j", "l", "Ex.re", "Ex.im", "Ey.re", "Ey.im", "Ez.re", "Ez.im",
                  "Bx.re", "Bx.im", "By.re", "By.im", "Bz.re", "Bz.im"};
  j["modes"] = field.mode_count();
  j["grid"] = {field.box().grid, field.box().grid, field.box().grid};
  j["length"] = field.box().length;
  j["time"] = field.time();
  j["band_limit"] = field.band_limit();
  j["wavevector_unit"] = 2.0 * pi / field.box().length;
  j["uniform_electric"] = {field.uniform_electric().x(), field.uniform_electric().y(), field.uniform_electric().z()};
  j["uniform_magnetic"] = {field.uniform_magnetic().x(), field.uniform_magnetic().y(), field.uniform_magnetic().z()};
  j["series"] = "E(x) = uniform + 2 Re sum_stored E_k exp(i k.x), k = wavevector_unit * (i, j, l)";
  std::ofstream(meta) << j.dump(2) << '\n';
}

}  // namespace darwinlab
