#include "qderiv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qderiv {

namespace {

// splitmix64 step; good enough to decorrelate per-point streams.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

long sample_binomial(std::mt19937_64& rng, long n, double p) {
  p = std::clamp(p, 0.0, 1.0);
  std::binomial_distribution<long> dist(n, p);
  return dist(rng);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(base ^ splitmix64(a)) ^ splitmix64(~b));
}

EigenDecomposition diagonalize_dense(const Eigen::MatrixXcd& h) {
  if ((h - h.adjoint()).norm() > 1e-10 * std::max(1.0, h.norm()))
    throw std::invalid_argument("diagonalize: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("diagonalize: eigensolver failed");
  EigenDecomposition eig;
  eig.energies = solver.eigenvalues();
  eig.states = solver.eigenvectors();

  // Deterministic ordering inside degenerate groups: tie-break
  // lexicographically on rounded vector entries.
  const int n = eig.dim();
  for (int lo = 0; lo < n;) {
    int hi = lo + 1;
    while (hi < n && eig.energies(hi) - eig.energies(lo) < 1e-10) ++hi;
    if (hi - lo > 1) {
      std::vector<int> idx(hi - lo);
      for (int k = 0; k < hi - lo; ++k) idx[k] = lo + k;
      auto key_less = [&](int a, int b) {
        for (int r = 0; r < n; ++r) {
          auto ra = std::round(eig.states(r, a).real() * 1e8);
          auto rb = std::round(eig.states(r, b).real() * 1e8);
          if (ra != rb) return ra < rb;
          ra = std::round(eig.states(r, a).imag() * 1e8);
          rb = std::round(eig.states(r, b).imag() * 1e8);
          if (ra != rb) return ra < rb;
        }
        return false;
      };
      std::sort(idx.begin(), idx.end(), key_less);
      Eigen::MatrixXcd block(n, hi - lo);
      for (int k = 0; k < hi - lo; ++k) block.col(k) = eig.states.col(idx[k]);
      eig.states.middleCols(lo, hi - lo) = block;
    }
    lo = hi;
  }
  // Phase convention: largest-magnitude entry real positive.
  for (int j = 0; j < n; ++j) {
    int imax = 0;
    double best = 0;
    for (int r = 0; r < n; ++r) {
      const double a = std::abs(eig.states(r, j));
      if (a > best + 1e-12) {
        best = a;
        imax = r;
      }
    }
    complexd ph = eig.states(imax, j);
    if (std::abs(ph) > 0) eig.states.col(j) *= std::conj(ph) / std::abs(ph);
  }
  return eig;
}

EigenDecomposition diagonalize(const QubitOperator& op) {
  if (op.n_qubits() > kMaxDenseQubits)
    throw std::invalid_argument("diagonalize: register too large");
  if (!op.is_hermitian())
    throw std::invalid_argument("diagonalize: operator not Hermitian");
  return diagonalize_dense(op.to_matrix());
}

PreparedState prepare_state(const EigenDecomposition& eig, PrepKind kind,
                            double depletion, std::uint64_t seed) {
  const int dim = eig.dim();
  PreparedState st;
  st.kind = kind;
  st.amplitudes = Eigen::VectorXcd::Zero(dim);
  if (kind == PrepKind::Exact) {
    st.amplitudes(0) = 1.0;
    return st;
  }
  if (depletion < 0.0 || depletion >= 1.0)
    throw std::invalid_argument("prepare_state: depletion out of [0,1)");
  st.amplitudes(0) = std::sqrt(1.0 - depletion);
  const int m = std::min(4, dim - 1);
  if (m > 0 && depletion > 0) {
    double wsum = 0;
    for (int j = 1; j <= m; ++j) wsum += std::pow(2.0, -j);
    std::mt19937_64 rng(mix_seed(seed, 0xd3f1e7));
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    for (int j = 1; j <= m; ++j) {
      const double w = depletion * std::pow(2.0, -j) / wsum;
      const double phase = u(rng);
      st.amplitudes(j) =
          std::sqrt(w) * complexd(std::cos(phase), std::sin(phase));
    }
  }
  return st;
}

PreparedState state_from_dense(const EigenDecomposition& eig,
                               const Eigen::VectorXcd& psi) {
  PreparedState st;
  st.kind = PrepKind::Depleted;
  st.amplitudes = eig.states.adjoint() * psi;
  const double n2 = st.amplitudes.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-9)
    st.amplitudes /= std::sqrt(n2);
  return st;
}

double expectation(const Eigen::VectorXcd& psi, const QubitOperator& op) {
  if (!op.is_hermitian())
    throw std::invalid_argument("expectation: operator not Hermitian");
  const complexd v = psi.dot(apply_operator(op, psi));
  return v.real();
}

complexd matrix_element(const Eigen::VectorXcd& bra, const QubitOperator& op,
                        const Eigen::VectorXcd& ket) {
  return bra.dot(apply_operator(op, ket));
}

Estimate sample_expectation(const Eigen::VectorXcd& psi,
                            const QubitOperator& op, const ShotConfig& cfg) {
  if (!op.is_hermitian())
    throw std::invalid_argument("sample_expectation: operator not Hermitian");
  if (cfg.n_meas < 1)
    throw std::invalid_argument("sample_expectation: need at least one shot");
  const auto parts = decompose_hermitian(op);
  std::mt19937_64 rng(mix_seed(cfg.seed, 0xa5a5a5a5));
  const std::string identity(op.n_qubits(), 'I');
  Estimate est;
  double var = 0;
  for (const auto& part : parts) {
    if (part.word == identity) {
      est.value += part.coeff;
      continue;
    }
    const double truth =
        psi.dot(apply_word(part.word, psi)).real();  // in [-1, 1]
    const double p = std::clamp(0.5 * (1.0 + truth), 0.0, 1.0);
    const long hits = sample_binomial(rng, cfg.n_meas, p);
    const double mean = 2.0 * double(hits) / double(cfg.n_meas) - 1.0;
    est.value += part.coeff * mean;
    var += part.coeff * part.coeff * (1.0 - mean * mean) / double(cfg.n_meas);
  }
  est.std_error = std::sqrt(std::max(0.0, var));
  return est;
}

complexd sample_matrix_element_diag(const Eigen::VectorXcd& psi,
                                    const QubitOperator& op,
                                    const ShotConfig& cfg) {
  // <O> = <H> + i <A> with H = (O + O^dag)/2, A = (O - O^dag)/(2i); both
  // Hermitian and measured independently.
  const QubitOperator herm = (op + op.adjoint()) * complexd(0.5, 0.0);
  const QubitOperator anti = (op - op.adjoint()) * complexd(0.0, -0.5);
  ShotConfig c1 = cfg;
  ShotConfig c2 = cfg;
  c2.seed = mix_seed(cfg.seed, 0x517e);
  const double re =
      herm.empty() ? 0.0 : sample_expectation(psi, herm, c1).value;
  const double im =
      anti.empty() ? 0.0 : sample_expectation(psi, anti, c2).value;
  return complexd(re, im);
}

Eigen::VectorXcd evolve(const Eigen::VectorXcd& eigen_amplitudes,
                        const EigenDecomposition& eig, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: t not finite");
  Eigen::VectorXcd out(eigen_amplitudes.size());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double ph = eig.energies(j) * t;
    out(j) = eigen_amplitudes(j) * complexd(std::cos(ph), std::sin(ph));
  }
  return out;
}

MTOutcome mt_tomography(complexd true_offdiag, const ShotConfig& cfg) {
  if (std::abs(true_offdiag) > 1.0 + 1e-9)
    throw std::invalid_argument("mt_tomography: |off-diagonal| > 1");
  if (cfg.n_meas < 1)
    throw std::invalid_argument("mt_tomography: need at least one shot");
  std::mt19937_64 rng(mix_seed(cfg.seed, 0x3157a));
  MTOutcome out;
  out.n_meas = cfg.n_meas;
  const double p0_i = std::clamp(0.5 * (1.0 + true_offdiag.real()), 0.0, 1.0);
  const double p0_r = std::clamp(0.5 * (1.0 + true_offdiag.imag()), 0.0, 1.0);
  out.n0_identity = sample_binomial(rng, cfg.n_meas, p0_i);
  out.n0_rz = sample_binomial(rng, cfg.n_meas, p0_r);
  // P(m=0|R=I) - P(m=1|R=I) + i P(m=0|R=R_Z) - i P(m=1|R=R_Z)
  const double re = 2.0 * double(out.n0_identity) / double(cfg.n_meas) - 1.0;
  const double im = 2.0 * double(out.n0_rz) / double(cfg.n_meas) - 1.0;
  out.estimate = complexd(re, im);
  return out;
}

}  // namespace qderiv
