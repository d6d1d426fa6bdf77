#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qderiv/pauli.hpp"

namespace qderiv {

/// Uniformly sampled ancilla phase signal g(0..k_max), one evolution unit
/// t per step.
struct PhaseSignal {
  double t = 1.0;
  std::vector<complexd> g;

  int k_max() const { return static_cast<int>(g.size()) - 1; }
};

struct Tone {
  double omega;  // phase per step, in (-pi, pi]
  complexd amp;
};

struct SpectralEstimate {
  std::vector<Tone> tones;  // sorted by omega
};

struct PronyOptions {
  /// Tones with |amp| below this are discarded (noiseless default; for
  /// sampled signals pass 3x the estimated noise floor).
  double amp_threshold = 1e-3;
  /// Roots closer than this (radians) merge, amplitudes summed.
  double merge_tol = 1e-6;
  /// When true, a rank-deficient prediction system reduces the model
  /// order to the numerical rank instead of throwing.
  bool allow_rank_reduction = false;
  double rank_rel_tol = 1e-10;
};

/// Prony's method: Hankel linear prediction, companion-polynomial roots,
/// Vandermonde least squares for the amplitudes.
/// Throws std::invalid_argument when n_tones exceeds the identifiability
/// bound (k_max+1)/2 and std::runtime_error on a singular prediction
/// system (degenerate signal) unless rank reduction is allowed.
SpectralEstimate prony(const PhaseSignal& sig, int n_tones,
                       const PronyOptions& opts = {});

/// Synthesizes g(k) = sum_j amp_j e^{i omega_j k} for k = 0..k_max.
PhaseSignal synthesize(const std::vector<Tone>& tones, int k_max,
                       double t = 1.0);

/// Least-squares phase of a single-tone signal:
/// arg( sum_k g*_k g_{k+1} / sum_k g*_k g_k ).
double lsq_phase(const PhaseSignal& sig);

struct AmplitudeFitConfig {
  /// Fit window L; 0 selects round(k_max^(2/3)).
  int window = 0;
  long shots_per_point = 0;  // bookkeeping only
};

/// Least-squares amplitude (1/L) sum_{k=1..L} e^{-i k phi} g_k.
complexd lsq_amplitude(const PhaseSignal& sig, double phi,
                       const AmplitudeFitConfig& cfg = {});

enum class SweepVariable { KMax, Shots };

struct VarianceScalingConfig {
  std::vector<int> k_max_values = {32, 64, 128, 256, 512};
  std::vector<long> shot_values = {1024, 2048, 4096, 8192, 16384};
  long shots = 4096;  // fixed N for the k_max sweep
  int k_max = 128;    // fixed k_max for the shots sweep
  int seeds = 200;
  std::uint64_t base_seed = 1;
  double tone_amp = 0.9;
  double tone_phase = 0.4;
  /// Window rule: L = round(k_max^(2/3)) or L = k_max.
  enum class WindowRule { TwoThirds, Full } window_rule = WindowRule::TwoThirds;
};

struct ScalingResult {
  double exponent = 0.0;
  double ci_halfwidth = 0.0;  // ~95% from fit residuals
  std::vector<double> xs;     // sweep values
  std::vector<double> variances;
};

/// Monte-Carlo estimate of Var[amplitude estimate] across the sweep, with
/// the fitted log-log slope. Requires >= 4 sweep points and >= 100 seeds.
ScalingResult variance_scaling_experiment(const VarianceScalingConfig& cfg,
                                          SweepVariable sweep);

}  // namespace qderiv
