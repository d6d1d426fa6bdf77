#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qderiv/pauli.hpp"

namespace qderiv {

/// AO-basis data for H2 in STO-3G: two contracted s-functions on the
/// protons, bond on the z axis, coordinate origin at the bond midpoint.
/// All energies in hartree, lengths in angstrom unless stated otherwise.
struct MolecularIntegrals {
  double bond_length = 0.0;   // angstrom
  double e_nuc = 0.0;         // hartree
  Eigen::MatrixXd overlap;    // S_munu
  Eigen::MatrixXd kinetic;    // T_munu
  Eigen::MatrixXd nuclear;    // V_munu (electron-nuclear attraction)
  Eigen::MatrixXd dipole_z;   // <mu| z |nu>, bohr, origin at midpoint
  std::vector<double> eri;    // (mu nu | rho tau), chemists' notation

  int nbf() const { return static_cast<int>(overlap.rows()); }
  Eigen::MatrixXd h_core() const { return kinetic + nuclear; }
  double eri_at(int p, int q, int r, int s) const {
    const int n = nbf();
    return eri[((p * n + q) * n + r) * n + s];
  }
};

MolecularIntegrals sto3g_h2_integrals(double bond_length_angstrom);

struct RHFResult {
  Eigen::MatrixXd mo_coeffs;         // AO x MO
  Eigen::VectorXd orbital_energies;  // hartree
  double e_hf = 0.0;                 // total, hartree
  int iterations = 0;
};

/// Closed-shell restricted Hartree-Fock for the 2-electron system.
/// A finite axial field F couples through H(F) = H + F * mu_z, i.e. the
/// core Hamiltonian acquires -F * z. Throws std::runtime_error when the
/// SCF does not converge.
RHFResult rhf(const MolecularIntegrals& ints, double field = 0.0);

/// MO-basis spinor coefficient tables for the second-quantized
/// Hamiltonian. Spin orbitals are interleaved: index 2p + sigma with
/// sigma = 0 (alpha), 1 (beta) per spatial orbital p.
struct SpinOrbitalIntegrals {
  Eigen::MatrixXd h;       // h_pq over spin orbitals
  std::vector<double> g;   // (pq|rs) over spin orbitals, chemists'
  double e_core = 0.0;     // nuclear repulsion
  int n_so = 0;

  double g_at(int p, int q, int r, int s) const {
    return g[((p * n_so + q) * n_so + r) * n_so + s];
  }
};

SpinOrbitalIntegrals fermion_hamiltonian(const MolecularIntegrals& ints,
                                         const RHFResult& mos,
                                         double field = 0.0);

/// Maps the coefficient tables to a qubit operator, qubit p per spin
/// orbital p with Z strings on lower indices.
QubitOperator jordan_wigner(const SpinOrbitalIntegrals& so);

/// JW image of c_p^dag c_q (used to build excitation operators).
QubitOperator jw_excitation(int n_so, int p_dagger, int q);
/// JW image of c_p^dag c_q^dag c_s c_r.
QubitOperator jw_double_excitation(int n_so, int p, int q, int s, int r);

struct ReductionReport {
  bool commutes = true;
  double commutator_norm = 0.0;
  bool forced = false;
};

/// Reduces the 4-qubit H2 operator to 2 qubits over the orbital-parity
/// symmetry sector spanned by |0000>, |0011>, |1100>, |1111> (both
/// electrons paired in sigma_g or sigma_u; conserved quantities are the
/// parities of the sigma_g and sigma_u occupations, Z0Z1 and Z2Z3).
/// Sector states map to |00>, |01>, |10>, |11> in that order, so the
/// ground state lives in span{|01>, |10>}.
///
/// When the operator does not commute with both parity operators the
/// reduction is not exact: without force_projection this throws
/// std::invalid_argument; with it, the off-sector block is dropped and
/// the report records the commutator norm. The field-coupled Hamiltonian
/// H + F mu_z lands in this forced branch.
QubitOperator reduce_two_qubit(const QubitOperator& op4,
                               bool force_projection = false,
                               ReductionReport* report = nullptr);

/// z-component dipole operator on 4 qubits (JW, MO basis of the field-free
/// RHF solution at this geometry). Odd under inversion through the bond
/// center; its expectation vanishes in every inversion-symmetric state.
QubitOperator dipole_operator(double bond_length_angstrom);

/// Family of Hermitian operators over real parameters, with a finite
/// difference step per parameter for operator derivatives.
struct OperatorFamily {
  std::vector<std::string> parameter_names;
  std::vector<double> fd_steps;
  std::function<QubitOperator(const std::vector<double>&)> evaluate;

  int n_params() const { return static_cast<int>(parameter_names.size()); }
};

/// Central-difference operator derivatives of the family:
///   order 1: [H(l + d/2) - H(l - d/2)] / d
///   order 2: [H(l + d) + H(l - d) - 2 H(l)] / d^2
QubitOperator fd_operator_derivative(const OperatorFamily& family,
                                     const std::vector<double>& at, int which,
                                     int order);

/// Mixed second operator derivative (4-point cross stencil) for i != j;
/// falls back to the order-2 stencil when i == j.
QubitOperator fd_operator_second(const OperatorFamily& family,
                                 const std::vector<double>& at, int i, int j);

/// H2 Hamiltonian family in the bond length R (angstrom), on 4 qubits or
/// reduced to 2. FD step 0.001 angstrom.
OperatorFamily h2_geometry_family(int qubit_space);

/// H2 field family F -> H + F mu_z at fixed bond length (F in atomic
/// units), rebuilt through a finite-field RHF at every F. On 2 qubits the
/// reduction is forced (projection artifact). FD step 0.001 a.u.
OperatorFamily h2_field_family(double bond_length_angstrom, int qubit_space);

/// HF (not FCI) energy at a bond length; used for approximate Hessians.
double hf_energy(double bond_length_angstrom);

/// Path of the STO-3G data file the integrals engine reads.
std::string sto3g_data_path();

}  // namespace qderiv
