#include "qderiv/qse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qderiv {

namespace {

Eigen::MatrixXcd pairwise_elements(const QSEBasis& basis,
                                   const QubitOperator* middle,
                                   EstimationMode mode,
                                   const ShotConfig& cfg) {
  const int n = static_cast<int>(basis.excitations.size());
  Eigen::MatrixXcd out(n, n);
  if (mode == EstimationMode::Exact) {
    std::vector<Eigen::VectorXcd> chi(n);
    for (int j = 0; j < n; ++j)
      chi[j] = apply_operator(basis.excitations[j], basis.ground);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Eigen::VectorXcd rhs =
            middle ? apply_operator(*middle, chi[j]) : chi[j];
        out(i, j) = chi[i].dot(rhs);
      }
    return out;
  }
  // Sampled: each element <0| E_i^dag (M) E_j |0> estimated independently
  // from the Pauli expansion of the full product operator.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      QubitOperator prod = basis.excitations[i].adjoint();
      if (middle) prod = prod * (*middle);
      prod = prod * basis.excitations[j];
      ShotConfig sc = cfg;
      sc.seed = mix_seed(cfg.seed, 0x9e0 + i, j);
      out(i, j) = sample_matrix_element_diag(basis.ground, prod, sc);
    }
  // Hermitize: ij and ji estimated independently
  return 0.5 * (out + Eigen::MatrixXcd(out.adjoint()));
}

}  // namespace

void solve_gen_eig(QSEResult& result, double s_threshold) {
  const Eigen::MatrixXcd S = 0.5 * (result.S + Eigen::MatrixXcd(result.S.adjoint()));
  const Eigen::MatrixXcd H = 0.5 * (result.H + Eigen::MatrixXcd(result.H.adjoint()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ssolve(S);
  const auto& sval = ssolve.eigenvalues();
  const double smax = sval.maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < sval.size(); ++i)
    if (sval(i) > s_threshold && sval(i) > s_threshold * std::max(smax, 1.0))
      keep.push_back(i);
  if (keep.empty())
    throw std::runtime_error(
        "solve_gen_eig: all overlap eigenvalues below threshold "
        "(degenerate excitation basis)");
  Eigen::MatrixXcd X(S.rows(), keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c)
    X.col(c) = ssolve.eigenvectors().col(keep[c]) /
               std::sqrt(sval(keep[c]));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hsolve(X.adjoint() * H * X);
  result.energies = hsolve.eigenvalues();
  result.vectors = X * hsolve.eigenvectors();
  result.kept = static_cast<int>(keep.size());
}

QSEResult qse_matrices(const QSEBasis& basis, const QubitOperator& H,
                       EstimationMode mode, const ShotConfig& cfg,
                       double s_threshold) {
  if (basis.excitations.empty())
    throw std::invalid_argument("qse_matrices: need at least one excitation");
  QSEResult res;
  res.S = pairwise_elements(basis, nullptr, mode, cfg);
  ShotConfig hcfg = cfg;
  hcfg.seed = mix_seed(cfg.seed, 0x45e);
  res.H = pairwise_elements(basis, &H, mode, hcfg);
  solve_gen_eig(res, s_threshold);
  return res;
}

ProjectedOperator project_operator(const QSEBasis& basis,
                                   const QSEResult& result,
                                   const QubitOperator& op,
                                   EstimationMode mode,
                                   const ShotConfig& cfg) {
  ProjectedOperator out;
  out.chi_basis = pairwise_elements(basis, &op, mode, cfg);
  out.eigen_basis = result.vectors.adjoint() * out.chi_basis * result.vectors;
  return out;
}

double eta_second_derivative(const OperatorFamily& family,
                             const std::vector<double>& lambda, int i, int j,
                             const std::vector<QubitOperator>& excitations,
                             const EtaOptions& opts) {
  const QubitOperator H = family.evaluate(lambda);
  const EigenDecomposition eig = diagonalize(H);
  const Eigen::VectorXcd ground = eig.states.col(0);

  QSEBasis basis{excitations, ground};
  QSEResult qse = qse_matrices(basis, H, opts.mode, opts.shots,
                               opts.s_threshold);

  const QubitOperator dHi = fd_operator_derivative(family, lambda, i, 1);
  const QubitOperator dHj = fd_operator_derivative(family, lambda, j, 1);
  const QubitOperator d2H = fd_operator_second(family, lambda, i, j);

  const int n = static_cast<int>(excitations.size());
  double e0;
  double second_order = 0.0;
  Eigen::VectorXcd left(n), right(n), overlap(n);
  if (opts.mode == EstimationMode::Exact) {
    e0 = expectation(ground, H);
    if (!d2H.empty()) second_order = expectation(ground, d2H);
    for (int l = 0; l < n; ++l) {
      const Eigen::VectorXcd chi = apply_operator(excitations[l], ground);
      left(l) = ground.dot(apply_operator(dHi, chi));   // <0|dHi E_l|0>
      right(l) = ground.dot(apply_operator(dHj, chi));  // <0|dHj E_l|0>
      overlap(l) = ground.dot(chi);                     // <0|E_l|0>
    }
  } else {
    ShotConfig c0 = opts.shots;
    c0.seed = mix_seed(opts.shots.seed, 0xe0);
    e0 = sample_expectation(ground, H, c0).value;
    if (!d2H.empty()) {
      ShotConfig c1 = opts.shots;
      c1.seed = mix_seed(opts.shots.seed, 0xe1);
      second_order = sample_expectation(ground, d2H, c1).value;
    }
    for (int l = 0; l < n; ++l) {
      ShotConfig ca = opts.shots, cb = opts.shots, cc = opts.shots;
      ca.seed = mix_seed(opts.shots.seed, 0xa00 + l);
      cb.seed = mix_seed(opts.shots.seed, 0xb00 + l);
      cc.seed = mix_seed(opts.shots.seed, 0xc00 + l);
      left(l) = sample_matrix_element_diag(ground, dHi * excitations[l], ca);
      right(l) = sample_matrix_element_diag(ground, dHj * excitations[l], cb);
      overlap(l) =
          sample_matrix_element_diag(ground, excitations[l], cc);
    }
  }

  double response = 0.0;
  for (int s = 0; s < qse.kept; ++s) {
    const Eigen::VectorXcd v = qse.vectors.col(s);
    // <Psi~_s|Psi_0> = sum_l v_l^* <chi_l|Psi_0> = (sum_l v_l <0|E_l|0>)^*
    const complexd ov = std::conj(complexd((v.transpose() * overlap)(0)));
    if (std::norm(ov) > opts.ground_overlap_threshold) continue;  // ground
    const double et = qse.energies(s);
    if (std::abs(et - e0) < opts.degenerate_tol)
      throw std::runtime_error(
          "eta_second_derivative: included state degenerate with E0");
    // <0|dHi|Psi~_s> = sum_l v_l <0|dHi E_l|0>
    const complexd a = (left.transpose() * v)(0);
    const complexd b = (right.transpose() * v)(0);
    response += 2.0 * (a * std::conj(b)).real() / (e0 - et);
  }
  return second_order + response;
}

TruncationDiagnostics truncation_diagnostics(const QSEBasis& basis,
                                             const QSEResult& result,
                                             const QubitOperator& H,
                                             const QubitOperator& P) {
  TruncationDiagnostics out;
  const int n = static_cast<int>(basis.excitations.size());

  // ||Pi p|| / ||p|| with p = P |Psi_0> and Pi the projector onto
  // span{chi_l}; b_l = <chi_l|p>, ||Pi p||^2 = b^dag S^+ b.
  const Eigen::VectorXcd p = apply_operator(P, basis.ground);
  Eigen::VectorXcd b(n);
  for (int l = 0; l < n; ++l)
    b(l) = apply_operator(basis.excitations[l], basis.ground).dot(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ssolve(result.S);
  Eigen::VectorXcd y = ssolve.eigenvectors().adjoint() * b;
  double proj2 = 0.0;
  for (int l = 0; l < n; ++l) {
    const double s = ssolve.eigenvalues()(l);
    if (s > 1e-12) proj2 += std::norm(y(l)) / s;
  }
  const double pn2 = p.squaredNorm();
  out.projection_ratio = pn2 > 0 ? std::sqrt(std::max(0.0, proj2) / pn2) : 0.0;

  out.energy_variances.resize(result.kept);
  std::vector<Eigen::VectorXcd> chi(n);
  for (int l = 0; l < n; ++l)
    chi[l] = apply_operator(basis.excitations[l], basis.ground);
  for (int s = 0; s < result.kept; ++s) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.ground.size());
    for (int l = 0; l < n; ++l) psi += result.vectors(l, s) * chi[l];
    psi /= psi.norm();
    const Eigen::VectorXcd hpsi = apply_operator(H, psi);
    const double e = psi.dot(hpsi).real();
    out.energy_variances(s) = hpsi.squaredNorm() - e * e;
  }
  return out;
}

std::vector<QubitOperator> identity_excitation(int n_qubits) {
  return {QubitOperator::identity(n_qubits)};
}

std::vector<QubitOperator> single_excitations(int n_so) {
  std::vector<QubitOperator> out;
  for (int p = 0; p < n_so; ++p)
    for (int q = 0; q < n_so; ++q)
      if (p != q) out.push_back(jw_excitation(n_so, p, q));
  return out;
}

std::vector<QubitOperator> double_excitations(int n_so) {
  std::vector<QubitOperator> out;
  for (int p = 0; p < n_so; ++p)
    for (int q = p + 1; q < n_so; ++q)
      for (int r = 0; r < n_so; ++r)
        for (int s = r + 1; s < n_so; ++s) {
          if (std::make_pair(p, q) == std::make_pair(r, s)) continue;
          out.push_back(jw_double_excitation(n_so, p, q, s, r));
        }
  return out;
}

std::vector<QubitOperator> sd_excitations(int n_so) {
  std::vector<QubitOperator> out = identity_excitation(n_so);
  auto singles = single_excitations(n_so);
  auto doubles = double_excitations(n_so);
  out.insert(out.end(), singles.begin(), singles.end());
  out.insert(out.end(), doubles.begin(), doubles.end());
  return out;
}

std::vector<QubitOperator> complete_pauli_excitations(int n_qubits) {
  std::vector<QubitOperator> out;
  const std::size_t count = std::size_t(1) << (2 * n_qubits);
  std::string word(n_qubits, 'I');
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    for (int q = 0; q < n_qubits; ++q) {
      word[q] = "IXYZ"[rem & 3];
      rem >>= 2;
    }
    out.push_back(QubitOperator::from_term(PauliTerm{word, 1.0}));
  }
  return out;
}

std::vector<QubitOperator> parse_excitations(const std::string& words,
                                             int n_qubits) {
  std::vector<QubitOperator> out;
  std::stringstream ss(words);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (static_cast<int>(item.size()) != n_qubits)
      throw std::invalid_argument("excitation word width mismatch: " + item);
    out.push_back(QubitOperator::from_term(parse_pauli(item)));
  }
  if (out.empty())
    throw std::invalid_argument("no excitations parsed from: " + words);
  return out;
}

}  // namespace qderiv
