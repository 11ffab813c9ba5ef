#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace mcr {

enum class NoiseKind { ClippedNormal, Uniform };
enum class WellForm {
  SquaredDoubleWell,  // W (c-ca)^2 (c-cb)^2, minima at ca and cb
  SingleProduct       // W (c-ca)(c-cb), kept for comparison runs
};

struct PhaseFieldParams {
  double c_star = 0.5;    // initial mean composition
  double barrier = 1.0;   // W
  double kappa = 3.0;     // gradient energy coefficient
  double mobility = 1.0;  // M, must be > 0
  double noise_amp = 0.05;  // A
  double c_alpha = 0.3;
  double c_beta = 0.7;
  size_t grid_n = 64;      // cells per side, power of two
  double domain_l = 200.0; // side length
  double dt = 0.5;
  size_t steps = 3000;
  size_t snapshot_every = 0;  // 0 = final state only
  NoiseKind noise = NoiseKind::ClippedNormal;
  WellForm well = WellForm::SquaredDoubleWell;

  void validate() const;  // throws std::invalid_argument
};

struct BulkEnergy {
  double f;
  double dfdc;
};

BulkEnergy bulk_energy_density(double c, const PhaseFieldParams& p);

struct CompositionField {
  size_t n = 0;
  double time = 0.0;
  std::vector<double> c;  // row-major n*n

  double& at(size_t x, size_t y) { return c[x * n + y]; }
  double at(size_t x, size_t y) const { return c[x * n + y]; }
  double mean() const;
};

/// Semi-implicit Fourier-spectral integrator for the conserved dynamics
/// dc/dt = div(M grad(df/dc - kappa lap c)) on the periodic square grid.
/// Owns its FFT plans; one instance per thread.
class PhaseFieldSim {
public:
  explicit PhaseFieldSim(const PhaseFieldParams& p);
  ~PhaseFieldSim();
  PhaseFieldSim(const PhaseFieldSim&) = delete;
  PhaseFieldSim& operator=(const PhaseFieldSim&) = delete;

  const PhaseFieldParams& params() const { return p_; }

  // c = c* + A*zeta with zeta a clipped standard normal (or uniform) in
  // [-1,1], recentred so the field mean equals c* exactly.
  CompositionField init_field(RandomStream& rng) const;

  // One update: chat' = (chat - dt*M*k^2*muhat) / (1 + dt*M*kappa*k^4).
  // The zero mode is untouched, so the spatial mean is conserved exactly.
  // Throws BlowupError when any |c| exceeds 10.
  void step(CompositionField& field);

  // Midpoint quadrature of f_bulk plus the spectral kappa/2 |grad c|^2 term.
  double total_free_energy(const CompositionField& field);

private:
  PhaseFieldParams p_;
  struct Impl;
  Impl* impl_;
  size_t step_count_ = 0;
};

struct PhaseFieldSnapshot {
  size_t step = 0;
  double time = 0.0;
  double mean = 0.0;
  double free_energy = 0.0;
};

struct PhaseFieldRun {
  CompositionField final_field;
  std::vector<PhaseFieldSnapshot> snapshots;
};

using SnapshotCallback =
    std::function<void(const CompositionField&, const PhaseFieldSnapshot&)>;

// init + `steps` updates; snapshots (incl. the IC and the final state) record
// mean and free energy, and are handed to the callback when provided.
PhaseFieldRun run_phasefield(const PhaseFieldParams& p, RandomStream& rng,
                             const SnapshotCallback& on_snapshot = {});

// QoI flag bits.
inline constexpr unsigned kQoIAlphaEmpty = 1u << 0;
inline constexpr unsigned kQoIBetaEmpty = 1u << 1;
inline constexpr unsigned kQoINoSpectrum = 1u << 2;

struct QoIRecord {
  double area_alpha = 0.0;
  double area_beta = 0.0;
  double comp_alpha = 0.0;
  double comp_beta = 0.0;
  double char_length = 0.0;
  unsigned flags = 0;

  std::vector<double> as_vector() const {
    return {area_alpha, area_beta, comp_alpha, comp_beta, char_length};
  }
};

std::string qoi_flags_to_string(unsigned flags);
inline constexpr size_t kQoIDim = 5;
extern const char* const kQoIColumnNames[kQoIDim];

// Thresholds at (c_alpha+c_beta)/2, reports area fractions and per-phase mean
// compositions, and the characteristic length 2*pi/kbar from the radially
// averaged power spectrum (zero mode excluded, integer-wavenumber annuli,
// first-moment kbar).
QoIRecord extract_qoi(const CompositionField& field, const PhaseFieldParams& p);

}  // namespace mcr
