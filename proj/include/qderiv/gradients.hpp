#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qderiv/chem.hpp"
#include "qderiv/qse.hpp"
#include "qderiv/simulator.hpp"

namespace qderiv {

/// JW particle-number operator sum_p (I - Z_p)/2.
QubitOperator number_operator(int n_so);

/// Lowest eigenvalue among eigenstates with <N> = n_elec (the FCI energy
/// of that sector).
double sector_ground_energy(const QubitOperator& op, int n_elec);

/// H2 FCI ground energy (2-electron sector) at a bond length, hartree.
double fci_ground_energy(double bond_length_angstrom);

/// First derivative as the ground-state expectation of the operator
/// derivative. Exact mode is noise free; sampled mode measures every
/// Hermitian part with cfg shots. Defaults to the exact ground state of
/// the family at lambda; pass a state to probe approximate preparations.
Estimate hellmann_feynman_gradient(const OperatorFamily& family,
                                   const std::vector<double>& lambda,
                                   int which, EstimationMode mode,
                                   const ShotConfig& cfg = {},
                                   const Eigen::VectorXcd* state = nullptr);

struct FdResult {
  double value = 0.0;
  double std_error = 0.0;
  /// 1/step (order 1) or 1/step^2 (order 2): the factor by which
  /// per-point sampling noise is amplified.
  double noise_amplification = 0.0;
};

/// Central finite differences of an energy curve; the source returns an
/// Estimate whose std_error propagates into the result.
FdResult direct_fd_derivative(const std::function<Estimate(double)>& energy,
                              double at, int order, double step);

/// Finite-difference second derivative of the restricted HF energy curve
/// (the low-cost approximate Hessian).
double hf_hessian(double bond_length_angstrom, double step = 1e-3);

enum class OptMethod { Newton, ConjugateGradient, NelderMead };
enum class HessianSource { Eta, HartreeFock };

struct OptimizeConfig {
  double tol = 1e-3;      // |dE/dR| convergence, hartree/angstrom
  int max_iter = 60;
  double max_step = 0.5;  // angstrom, Newton step cap
  double r_min = 0.3;     // hard lower bound on iterates
  double r_max = 3.0;     // admissible start range
  double simplex_width = 0.1;  // Nelder-Mead initial spread
  EstimationMode mode = EstimationMode::Exact;
  ShotConfig shots;
  std::string excitations = "XY";  // 2-qubit QSE set for the ETA Hessian
};

struct OptIterate {
  int iter = 0;
  double r = 0.0;
  double energy = 0.0;
  double gradient = 0.0;  // NaN when the method does not evaluate it
  double hessian = 0.0;   // NaN when the method does not evaluate it
};

struct OptTrace {
  std::vector<OptIterate> iterates;
  double final_r = 0.0;
  double final_energy = 0.0;
  bool converged = false;
  std::string status;
  int n_energy_evals = 0;
  int n_gradient_evals = 0;
  int n_hessian_evals = 0;

  int n_fev_total() const {
    return n_energy_evals + n_gradient_evals + n_hessian_evals;
  }
};

/// One-dimensional geometry optimization of H2 on the reduced 2-qubit
/// model. Newton uses |Hessian| with the step capped and iterates clamped
/// to R >= r_min; CG is nonlinear conjugate gradient with backtracking
/// line search; Nelder-Mead never evaluates derivatives (its terminal
/// gradient check is one extra evaluation).
OptTrace optimize_geometry(OptMethod method, HessianSource hessian_source,
                           double start_r, const OptimizeConfig& cfg = {});

enum class DerivMethod { Eta, Fd };

/// alpha_zz = -d^2 E / dF^2 at F = 0 on the field family (positive for
/// H2). qubit_space 2 uses the forced orbital-parity projection, which
/// reproduces the large-R artifact; 4 is exact FCI.
double polarizability_zz(double bond_length_angstrom, DerivMethod method,
                         int qubit_space);

}  // namespace qderiv
