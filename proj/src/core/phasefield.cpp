#include "core/phasefield.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

#include "core/errors.hpp"

namespace mcr {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution of a plan on
// its own buffers is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Out-of-place r2c/c2r pair bound to internal buffers. c2r destroys its input,
// so callers always go through the scratch copies held here.
class Fft2D {
public:
  explicit Fft2D(size_t n) : n_(n), nc_(n / 2 + 1) {
    real_ = fftw_alloc_real(n_ * n_);
    cplx_ = fftw_alloc_complex(n_ * nc_);
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(n_), static_cast<int>(n_), real_, cplx_,
                                FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(static_cast<int>(n_), static_cast<int>(n_), cplx_, real_,
                                FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
  }
  ~Fft2D() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  size_t modes() const { return n_ * nc_; }

  void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
    std::copy(in.begin(), in.end(), real_);
    fftw_execute(fwd_);
    out.resize(modes());
    const auto* src = reinterpret_cast<const std::complex<double>*>(cplx_);
    std::copy(src, src + modes(), out.begin());
  }

  // Includes the 1/n^2 normalization.
  void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
    auto* dst = reinterpret_cast<std::complex<double>*>(cplx_);
    std::copy(in.begin(), in.end(), dst);
    fftw_execute(bwd_);
    out.resize(n_ * n_);
    const double inv = 1.0 / static_cast<double>(n_ * n_);
    for (size_t i = 0; i < out.size(); ++i) out[i] = real_[i] * inv;
  }

private:
  size_t n_, nc_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_, bwd_;
};

}  // namespace

void PhaseFieldParams::validate() const {
  if (!(mobility > 0.0)) throw std::invalid_argument("phase field: requires mobility > 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("phase field: requires kappa >= 0");
  if (!is_power_of_two(grid_n))
    throw std::invalid_argument("phase field: grid_n must be a power of two");
  if (!(c_star > 0.0 && c_star < 1.0))
    throw std::invalid_argument("phase field: requires 0 < c_star < 1");
  if (!(dt > 0.0)) throw std::invalid_argument("phase field: requires dt > 0");
  if (!(domain_l > 0.0)) throw std::invalid_argument("phase field: requires domain_l > 0");
  if (!(noise_amp >= 0.0)) throw std::invalid_argument("phase field: requires noise_amp >= 0");
  if (!(c_alpha < c_beta))
    throw std::invalid_argument("phase field: requires c_alpha < c_beta");
}

BulkEnergy bulk_energy_density(double c, const PhaseFieldParams& p) {
  const double u = c - p.c_alpha;
  const double v = c - p.c_beta;
  if (p.well == WellForm::SingleProduct) {
    return {p.barrier * u * v, p.barrier * (u + v)};
  }
  const double uv = u * v;
  return {p.barrier * uv * uv, 2.0 * p.barrier * uv * (u + v)};
}

double CompositionField::mean() const {
  long double s = 0.0L;
  for (double v : c) s += v;
  return static_cast<double>(s / static_cast<long double>(c.size()));
}

struct PhaseFieldSim::Impl {
  Fft2D fft;
  std::vector<double> k2;  // continuous wavenumber squared per r2c mode
  std::vector<double> mu;
  std::vector<std::complex<double>> chat, muhat;

  explicit Impl(const PhaseFieldParams& p) : fft(p.grid_n) {
    const size_t n = p.grid_n;
    const size_t nc = n / 2 + 1;
    const double dk = 2.0 * std::numbers::pi / p.domain_l;
    k2.resize(n * nc);
    for (size_t mx = 0; mx < n; ++mx) {
      const double fx =
          mx <= n / 2 ? static_cast<double>(mx) : static_cast<double>(mx) - static_cast<double>(n);
      const double kx = dk * fx;
      for (size_t my = 0; my < nc; ++my) {
        const double ky = dk * static_cast<double>(my);
        k2[mx * nc + my] = kx * kx + ky * ky;
      }
    }
  }
};

PhaseFieldSim::PhaseFieldSim(const PhaseFieldParams& p) : p_(p) {
  p_.validate();
  impl_ = new Impl(p_);
}

PhaseFieldSim::~PhaseFieldSim() { delete impl_; }

CompositionField PhaseFieldSim::init_field(RandomStream& rng) const {
  const size_t n = p_.grid_n;
  CompositionField f;
  f.n = n;
  f.c.assign(n * n, p_.c_star);
  if (p_.noise_amp == 0.0) return f;

  std::vector<double> zeta(n * n);
  for (auto& z : zeta) {
    const double draw =
        p_.noise == NoiseKind::ClippedNormal ? rng.normal() : rng.uniform(-1.0, 1.0);
    z = std::clamp(draw, -1.0, 1.0);
  }
  // Recentre to exact zero mean, then rescale back into [-1,1] so the field
  // both averages to c* and stays within c* +- A.
  long double acc = 0.0L;
  for (double z : zeta) acc += z;
  const double m = static_cast<double>(acc / static_cast<long double>(zeta.size()));
  const double scale = 1.0 / (1.0 + std::abs(m));
  for (auto& z : zeta) z = std::clamp((z - m) * scale, -1.0, 1.0);
  for (size_t i = 0; i < zeta.size(); ++i) f.c[i] = p_.c_star + p_.noise_amp * zeta[i];
  return f;
}

void PhaseFieldSim::step(CompositionField& field) {
  if (field.n != p_.grid_n)
    throw std::invalid_argument("phase field step: grid size mismatch");
  auto& im = *impl_;
  im.mu.resize(field.c.size());
  for (size_t i = 0; i < field.c.size(); ++i)
    im.mu[i] = bulk_energy_density(field.c[i], p_).dfdc;
  im.fft.forward(field.c, im.chat);
  im.fft.forward(im.mu, im.muhat);

  const double mdt = p_.mobility * p_.dt;
  for (size_t idx = 0; idx < im.chat.size(); ++idx) {
    const double k2 = im.k2[idx];
    const double denom = 1.0 + mdt * p_.kappa * k2 * k2;
    im.chat[idx] = (im.chat[idx] - mdt * k2 * im.muhat[idx]) / denom;
  }
  im.fft.inverse(im.chat, field.c);
  field.time += p_.dt;
  ++step_count_;

  double max_abs = 0.0;
  for (double v : field.c) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs > 10.0) throw BlowupError(step_count_, max_abs);
}

double PhaseFieldSim::total_free_energy(const CompositionField& field) {
  if (field.n != p_.grid_n)
    throw std::invalid_argument("free energy: grid size mismatch");
  const size_t n = p_.grid_n;
  const size_t nc = n / 2 + 1;
  const double cell_area = (p_.domain_l / n) * (p_.domain_l / n);

  long double bulk = 0.0L;
  for (double v : field.c) bulk += bulk_energy_density(v, p_).f;

  auto& im = *impl_;
  im.fft.forward(field.c, im.chat);
  // Parseval: sum_x |grad c|^2 = (1/N) sum_k k^2 |chat_k|^2 with N = n^2;
  // half-complex columns 0 and n/2 appear once, the rest twice.
  long double grad = 0.0L;
  for (size_t mx = 0; mx < n; ++mx) {
    for (size_t my = 0; my < nc; ++my) {
      const size_t idx = mx * nc + my;
      const double weight = (my == 0 || my == n / 2) ? 1.0 : 2.0;
      grad += weight * im.k2[idx] * std::norm(im.chat[idx]);
    }
  }
  grad /= static_cast<long double>(n * n);

  return static_cast<double>(bulk * cell_area +
                             0.5L * p_.kappa * grad * cell_area);
}

PhaseFieldRun run_phasefield(const PhaseFieldParams& p, RandomStream& rng,
                             const SnapshotCallback& on_snapshot) {
  PhaseFieldSim sim(p);
  PhaseFieldRun out;
  out.final_field = sim.init_field(rng);

  auto record = [&](size_t step) {
    PhaseFieldSnapshot snap;
    snap.step = step;
    snap.time = out.final_field.time;
    snap.mean = out.final_field.mean();
    snap.free_energy = sim.total_free_energy(out.final_field);
    out.snapshots.push_back(snap);
    if (on_snapshot) on_snapshot(out.final_field, snap);
  };

  record(0);
  for (size_t s = 1; s <= p.steps; ++s) {
    sim.step(out.final_field);
    const bool at_interval = p.snapshot_every != 0 && s % p.snapshot_every == 0;
    if (at_interval || s == p.steps) record(s);
  }
  return out;
}

std::string qoi_flags_to_string(unsigned flags) {
  std::string out;
  auto add = [&](const char* name) {
    if (!out.empty()) out += ';';
    out += name;
  };
  if (flags & kQoIAlphaEmpty) add("alpha_empty");
  if (flags & kQoIBetaEmpty) add("beta_empty");
  if (flags & kQoINoSpectrum) add("no_spectrum");
  return out;
}

const char* const kQoIColumnNames[kQoIDim] = {"area_alpha", "area_beta", "comp_alpha",
                                              "comp_beta", "char_length"};

QoIRecord extract_qoi(const CompositionField& field, const PhaseFieldParams& p) {
  const size_t n = field.n;
  const size_t total = n * n;
  const double threshold = 0.5 * (p.c_alpha + p.c_beta);

  QoIRecord q;
  size_t n_alpha = 0;
  long double sum_alpha = 0.0L, sum_beta = 0.0L;
  for (double v : field.c) {
    if (v < threshold) {
      ++n_alpha;
      sum_alpha += v;
    } else {
      sum_beta += v;
    }
  }
  const size_t n_beta = total - n_alpha;
  q.area_alpha = static_cast<double>(n_alpha) / static_cast<double>(total);
  q.area_beta = static_cast<double>(n_beta) / static_cast<double>(total);
  const double global_mean = field.mean();
  if (n_alpha == 0) {
    q.flags |= kQoIAlphaEmpty;
    q.comp_alpha = global_mean;
  } else {
    q.comp_alpha = static_cast<double>(sum_alpha / static_cast<long double>(n_alpha));
  }
  if (n_beta == 0) {
    q.flags |= kQoIBetaEmpty;
    q.comp_beta = global_mean;
  } else {
    q.comp_beta = static_cast<double>(sum_beta / static_cast<long double>(n_beta));
  }

  // Radially averaged power spectrum on integer-wavenumber annuli; the
  // characteristic wavenumber is the first moment over bins r >= 1.
  Fft2D fft(n);
  std::vector<std::complex<double>> chat;
  fft.forward(field.c, chat);
  const size_t nc = n / 2 + 1;
  const size_t max_bin = n;  // |f| <= n/2 per axis -> radius <= n/sqrt(2)
  std::vector<double> power(max_bin + 1, 0.0);
  for (size_t mx = 0; mx < n; ++mx) {
    const double fx =
        mx <= n / 2 ? static_cast<double>(mx) : static_cast<double>(mx) - static_cast<double>(n);
    for (size_t my = 0; my < nc; ++my) {
      if (mx == 0 && my == 0) continue;  // zero mode excluded
      const double weight = (my == 0 || my == n / 2) ? 1.0 : 2.0;
      const double r = std::sqrt(fx * fx + static_cast<double>(my) * static_cast<double>(my));
      const size_t bin = static_cast<size_t>(std::llround(r));
      if (bin <= max_bin) power[bin] += weight * std::norm(chat[mx * nc + my]);
    }
  }
  double psum = 0.0, rmoment = 0.0;
  for (size_t r = 1; r <= max_bin; ++r) {
    psum += power[r];
    rmoment += static_cast<double>(r) * power[r];
  }
  if (psum <= 0.0) {
    q.flags |= kQoINoSpectrum;
    q.char_length = p.domain_l;  // degenerate uniform field
  } else {
    const double rbar = rmoment / psum;                 // in grid wavenumbers
    q.char_length = p.domain_l / rbar;                  // 2*pi / (rbar * 2*pi/L)
  }
  return q;
}

}  // namespace mcr
