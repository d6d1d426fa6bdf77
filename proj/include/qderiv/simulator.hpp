#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "qderiv/pauli.hpp"

namespace qderiv {

/// Exact spectral data of a Hermitian operator: energies ascending with
/// orthonormal eigenvector columns. This is the oracle everything else
/// is checked against.
struct EigenDecomposition {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd states;

  int dim() const { return static_cast<int>(energies.size()); }
  double gap() const { return energies(1) - energies(0); }
  double spectral_norm() const {
    return std::max(std::abs(energies(0)),
                    std::abs(energies(energies.size() - 1)));
  }
};

EigenDecomposition diagonalize(const QubitOperator& op);
EigenDecomposition diagonalize_dense(const Eigen::MatrixXcd& h);

enum class PrepKind { Exact, Depleted };

/// State expressed by its amplitudes a_j over the eigenbasis of a given
/// EigenDecomposition. sum |a_j|^2 == 1.
struct PreparedState {
  Eigen::VectorXcd amplitudes;
  PrepKind kind = PrepKind::Exact;

  double population(int j) const { return std::norm(amplitudes(j)); }
  Eigen::VectorXcd dense(const EigenDecomposition& eig) const {
    return eig.states * amplitudes;
  }
};

/// Exact kind: a_0 = 1. Depleted kind: |a_0|^2 = 1 - depletion, with the
/// remainder spread geometrically (weights 2^-j) over the next few excited
/// states and seeded random phases. Deterministic given the seed.
PreparedState prepare_state(const EigenDecomposition& eig, PrepKind kind,
                            double depletion = 0.0, std::uint64_t seed = 0);

/// Amplitudes of an arbitrary dense state in the eigenbasis.
PreparedState state_from_dense(const EigenDecomposition& eig,
                               const Eigen::VectorXcd& psi);

struct ShotConfig {
  long n_meas = 1000;
  std::uint64_t seed = 0;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Exact <psi|op|psi> for Hermitian op.
double expectation(const Eigen::VectorXcd& psi, const QubitOperator& op);

/// Exact <bra|op|ket> for any op.
complexd matrix_element(const Eigen::VectorXcd& bra, const QubitOperator& op,
                        const Eigen::VectorXcd& ket);

/// Shot-sampled expectation of a Hermitian operator. Each Hermitian part
/// (single Pauli word) is measured with n_meas shots; the identity word
/// contributes exactly. Unbiased; std_error from per-part binomial
/// variance; bit-reproducible for a fixed seed.
Estimate sample_expectation(const Eigen::VectorXcd& psi,
                            const QubitOperator& op, const ShotConfig& cfg);

/// Shot-sampled <psi|op|psi> for a general (non-Hermitian) op, measured
/// through its Hermitian and anti-Hermitian halves.
complexd sample_matrix_element_diag(const Eigen::VectorXcd& psi,
                                    const QubitOperator& op,
                                    const ShotConfig& cfg);

/// Applies phases e^{i E_j t} to eigenbasis amplitudes. Norm preserving.
Eigen::VectorXcd evolve(const Eigen::VectorXcd& eigen_amplitudes,
                        const EigenDecomposition& eig, double t);

/// Outcome of the two-basis single-qubit tomography combination that
/// estimates the off-diagonal element 2 p+ e^{i phi} of an ancilla density
/// matrix: real part from the identity pre-rotation, imaginary part from
/// the R_Z pre-rotation, each from n_meas single shots.
struct MTOutcome {
  complexd estimate;
  long n_meas = 0;
  long n0_identity = 0;  // m = 0 counts, R = I
  long n0_rz = 0;        // m = 0 counts, R = R_Z
};

/// Samples the M_T estimate of a known off-diagonal value c, |c| <= 1.
MTOutcome mt_tomography(complexd true_offdiag, const ShotConfig& cfg);

/// Deterministic seed mixing for embarrassingly parallel samplers.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a,
                       std::uint64_t b = 0);

}  // namespace qderiv
