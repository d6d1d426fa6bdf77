#pragma once

#include <vector>

#include "qderiv/chem.hpp"
#include "qderiv/pauli.hpp"
#include "qderiv/simulator.hpp"

namespace qderiv {

enum class EstimationMode { Exact, Sampled };

/// Excitation subspace |chi_j> = E_j |Psi_0>.
struct QSEBasis {
  std::vector<QubitOperator> excitations;
  Eigen::VectorXcd ground;
};

struct QSEResult {
  Eigen::MatrixXcd S;        // overlap matrix <chi_i|chi_j>
  Eigen::MatrixXcd H;        // projected Hamiltonian <chi_i|H|chi_j>
  Eigen::VectorXd energies;  // kept generalized eigenvalues, ascending
  Eigen::MatrixXcd vectors;  // n_ex x kept, S-orthonormal columns
  int kept = 0;
};

/// Measures or computes S and H^(QSE) and solves the generalized
/// eigenproblem with canonical-orthogonalization regularization
/// (S-eigenvalues below s_threshold discarded). Sampled mode estimates
/// every matrix element independently term by term.
QSEResult qse_matrices(const QSEBasis& basis, const QubitOperator& H,
                       EstimationMode mode, const ShotConfig& cfg = {},
                       double s_threshold = 1e-8);

/// Canonical-orthogonalization generalized eigensolve; S must be
/// Hermitian PSD, H Hermitian. Throws std::runtime_error when every
/// S-eigenvalue falls below the threshold.
void solve_gen_eig(QSEResult& result, double s_threshold = 1e-8);

struct ProjectedOperator {
  Eigen::MatrixXcd chi_basis;    // <chi_i|O|chi_j>
  Eigen::MatrixXcd eigen_basis;  // <Psi~_i|O|Psi~_j> = V^dag (chi) V
};

ProjectedOperator project_operator(const QSEBasis& basis,
                                   const QSEResult& result,
                                   const QubitOperator& op,
                                   EstimationMode mode = EstimationMode::Exact,
                                   const ShotConfig& cfg = {});

struct EtaOptions {
  EstimationMode mode = EstimationMode::Exact;
  ShotConfig shots;
  double s_threshold = 1e-8;
  /// |<Psi~_j|Psi_0>|^2 above this marks the state as the ground state,
  /// excluded from the response sum.
  double ground_overlap_threshold = 0.5;
  /// Included states with |E~_j - E0| below this raise an error.
  double degenerate_tol = 1e-9;
};

/// Second derivative via the eigenstate-truncation response sum:
///   D = <d2H> + sum_j 2 Re[<0|dH_i|Psi~_j><Psi~_j|dH_j|0>] / (E0 - E~_j)
/// over approximate eigenstates built from the excitation set.
double eta_second_derivative(const OperatorFamily& family,
                             const std::vector<double>& lambda, int i, int j,
                             const std::vector<QubitOperator>& excitations,
                             const EtaOptions& opts = {});

struct TruncationDiagnostics {
  /// ||Pi P|Psi_0>|| / ||P|Psi_0>||, 1 when the excitation span captures
  /// the perturbation exactly.
  double projection_ratio = 0.0;
  /// sigma^2_j = <Psi~_j|H^2|Psi~_j> - <Psi~_j|H|Psi~_j>^2 per kept state.
  Eigen::VectorXd energy_variances;
};

TruncationDiagnostics truncation_diagnostics(const QSEBasis& basis,
                                             const QSEResult& result,
                                             const QubitOperator& H,
                                             const QubitOperator& P);

/// Excitation set helpers (JW spin-orbital operators on n_so qubits).
std::vector<QubitOperator> identity_excitation(int n_qubits);
std::vector<QubitOperator> single_excitations(int n_so);
std::vector<QubitOperator> double_excitations(int n_so);
/// identity + singles + doubles (complete for a 2-electron sector).
std::vector<QubitOperator> sd_excitations(int n_so);
/// Every Pauli word on n qubits (spans the full operator space).
std::vector<QubitOperator> complete_pauli_excitations(int n_qubits);
/// Parses "XY,YX,..." into single-word excitations.
std::vector<QubitOperator> parse_excitations(const std::string& words,
                                             int n_qubits);

}  // namespace qderiv
