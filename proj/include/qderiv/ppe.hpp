#pragma once

#include <optional>
#include <vector>

#include "qderiv/chem.hpp"
#include "qderiv/pauli.hpp"
#include "qderiv/simulator.hpp"
#include "qderiv/spectral.hpp"

namespace qderiv {

struct PPEConfig {
  /// Evolution unit per phase step; 0 picks pi / (2 spectral_norm) so all
  /// eigenphases stay inside (-pi/2, pi/2).
  double t = 0.0;
  int k0_max = 8;
  int k1_max = 16;
  int k2_max = 8;  // third index (structural d=3 support)
  /// Bin width as a dimensionless fraction of the spectral norm.
  double bin_width = 0.01;
  /// Shots per signal point and tomography basis; 0 = analytic (no noise).
  long shots = 0;
  std::uint64_t seed = 0;

  enum class Prep { Qpe, Vqe } prep = Prep::Qpe;
};

/// Two-index ancilla phase signal g(k0, k1) (QPE state preparation).
struct PhaseSignal2D {
  double t = 1.0;
  Eigen::MatrixXcd g;  // (k0, k1)
};

/// Three-index signal g(k0, k1, k2) for third-order paths.
struct PhaseSignal3D {
  double t = 1.0;
  std::vector<Eigen::MatrixXcd> g;  // g[k2](k0, k1)
};

/// One-index signal from VQE-style preparation with post-selection on the
/// system register returning to the reference state.
struct VqeSignal {
  PhaseSignal sig;
  /// Mean per-point post-selection probability (1 + |g|^2)/2.
  double mean_postselect_probability = 0.0;
  /// sum_j |alpha_j|^2 over recovered tones (equals the post-selected
  /// weight of the signal; compare against mean |g(k)|^2).
  double tone_power = 0.0;
};

/// g(k0,k1) = sum_{m,n,j} a_m^* a_n <m|P|j><j|Q|n>
///            e^{i k0 t (E_m + E_n)} e^{i k1 t E_j}.
/// In sampled mode every point is an independent M_T estimate.
/// P and Q must be unit-weight Pauli words (unitary excitations).
PhaseSignal2D ppe_signal(const EigenDecomposition& eig,
                         const PreparedState& prep, const PauliTerm& P,
                         const PauliTerm& Q, const PPEConfig& cfg);

/// VQE-prepared variant: g(k) = sum_j e^{i k t E_j} <ref|P|j><j|Q|ref>.
VqeSignal ppe_signal_vqe(const EigenDecomposition& eig,
                         const PreparedState& prep, const PauliTerm& P,
                         const PauliTerm& Q, const PPEConfig& cfg);

/// Third-order signal with excitations P1, P2, P3 applied between three
/// rounds of phase accumulation.
PhaseSignal3D ppe_signal_d3(const EigenDecomposition& eig,
                            const PreparedState& prep, const PauliTerm& P1,
                            const PauliTerm& P2, const PauliTerm& P3,
                            const PPEConfig& cfg);

/// One bin of binned path amplitudes: energies per excitation index and
/// the summed complex amplitude.
struct PathEntry {
  std::vector<double> energies;
  complexd amp;
};

struct PathAmplitudeSet {
  std::vector<PathEntry> entries;  // excited bins only
  double ground_energy = 0.0;      // E0 estimate from the first stage
  double a0_norm = 0.0;            // |alpha_00(k1 = 0)|
  complexd excluded_ground{0, 0};  // ground-to-ground amplitude (excluded)
  bool found_ground_tone = false;
};

/// Groups (energy, amplitude) tones into bins: tones within
/// spectral_norm * delta of one another share a bin, bin energy is the
/// |amp|-weighted mean, amplitudes add.
std::vector<PathEntry> bin_amplitudes(
    const std::vector<std::pair<double, complexd>>& tones, double delta,
    double spectral_norm);

/// Two-stage Prony extraction: per-k1 tones in k0, keep the tone at
/// phase 2 t E0 (spurious mid-gap tones are rejected by this filter),
/// then Prony in k1 on its amplitude. The ground-to-ground tone of the
/// second stage is excluded from the returned bins.
PathAmplitudeSet nested_prony(const PhaseSignal2D& sig, const PPEConfig& cfg,
                              double spectral_norm, double e0_reference);

/// Same extraction one level deeper (two exclusions); entries carry two
/// bin energies.
PathAmplitudeSet nested_prony_d3(const PhaseSignal3D& sig,
                                 const PPEConfig& cfg, double spectral_norm,
                                 double e0_reference);

/// One unitary-pair contribution to the response sum.
struct WeightedPathSet {
  double weight = 1.0;  // product of the two decomposition weights
  PathAmplitudeSet paths;
};

/// D = second_order_term
///     + sum_pairs w * sum_bins 2 Re[amp / a0] / (E0 - E_bin).
/// a0 is the shared normalization |alpha_00(k1=0)| from calibration.
/// Throws std::runtime_error when an included bin energy coincides with
/// E0 (degenerate response).
double assemble_second_derivative(const std::vector<WeightedPathSet>& paths,
                                  double second_order_term, double e0,
                                  double a0, double exclusion_width);

struct PpeDiagnostics {
  double resolution_error_bound = 0.0;  // d N_A^(1/2) delta^(d-2) |H| Delta
  double sampling_error_estimate = 0.0;
  double a0 = 0.0;
  double e0 = 0.0;
  double t = 0.0;
  int n_unitary_pairs = 0;
  double postselect_probability = 1.0;  // VQE prep only
};

struct PpeResult {
  double value = 0.0;
  PpeDiagnostics diag;
};

/// End-to-end second derivative d^2 E0 / d lambda_i d lambda_j of an
/// operator family via PPE. prep == nullptr uses the exact ground state;
/// cfg.shots == 0 runs analytically.
PpeResult ppe_second_derivative(const OperatorFamily& family,
                                const std::vector<double>& lambda, int i,
                                int j, const PPEConfig& cfg,
                                const PreparedState* prep = nullptr);

/// Toy two-parameter family H = l_X X + l_Z Z (single qubit).
OperatorFamily toy_xz_family();

}  // namespace qderiv
