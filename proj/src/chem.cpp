#include "qderiv/chem.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qderiv {

namespace {

struct BasisData {
  double bohr = 0.52917721092;  // angstrom per bohr
  std::array<double, 3> exps;
  std::array<double, 3> coeffs;
};

const BasisData& basis_data() {
  static BasisData data;
  static std::once_flag once;
  std::call_once(once, [] {
    std::ifstream f(sto3g_data_path());
    if (!f)
      throw std::runtime_error("cannot open basis data: " + sto3g_data_path());
    nlohmann::json j;
    f >> j;
    data.bohr = j.at("bohr_per_angstrom_inverse").get<double>();
    auto e = j.at("exponents").get<std::vector<double>>();
    auto c = j.at("coefficients").get<std::vector<double>>();
    if (e.size() != 3 || c.size() != 3)
      throw std::runtime_error("basis data: expected 3 primitives");
    std::copy(e.begin(), e.end(), data.exps.begin());
    std::copy(c.begin(), c.end(), data.coeffs.begin());
  });
  return data;
}

double boys_f0(double x) {
  if (x < 1e-6) return 1.0 - x / 3.0 + x * x / 10.0;
  return 0.5 * std::sqrt(M_PI / x) * std::erf(std::sqrt(x));
}

struct Primitive {
  double exp;
  double weight;  // contraction coefficient times primitive normalization
  double z;       // center (on the z axis), bohr
};

std::vector<Primitive> primitives_at(double z_bohr) {
  const auto& b = basis_data();
  std::vector<Primitive> out;
  for (int i = 0; i < 3; ++i) {
    const double norm = std::pow(2.0 * b.exps[i] / M_PI, 0.75);
    out.push_back({b.exps[i], b.coeffs[i] * norm, z_bohr});
  }
  // renormalize the contracted function (published coefficients leave a
  // ~1e-8 residue in the self overlap)
  double self = 0.0;
  for (const auto& pa : out)
    for (const auto& pb : out)
      self += pa.weight * pb.weight *
              std::pow(M_PI / (pa.exp + pb.exp), 1.5);
  for (auto& p : out) p.weight /= std::sqrt(self);
  return out;
}

}  // namespace

std::string sto3g_data_path() {
  if (const char* env = std::getenv("QDERIV_DATA")) {
    return std::string(env) + "/sto3g_h.json";
  }
  return std::string(QDERIV_DATA_DIR) + "/sto3g_h.json";
}

MolecularIntegrals sto3g_h2_integrals(double bond_length_angstrom) {
  if (!(bond_length_angstrom > 0.0))
    throw std::invalid_argument("sto3g_h2_integrals: bond length must be > 0");
  const double r = bond_length_angstrom / basis_data().bohr;  // bohr
  const std::array<double, 2> centers = {-r / 2.0, +r / 2.0};
  std::array<std::vector<Primitive>, 2> bf = {primitives_at(centers[0]),
                                              primitives_at(centers[1])};

  MolecularIntegrals ints;
  ints.bond_length = bond_length_angstrom;
  ints.e_nuc = 1.0 / r;
  ints.overlap = Eigen::MatrixXd::Zero(2, 2);
  ints.kinetic = Eigen::MatrixXd::Zero(2, 2);
  ints.nuclear = Eigen::MatrixXd::Zero(2, 2);
  ints.dipole_z = Eigen::MatrixXd::Zero(2, 2);
  ints.eri.assign(16, 0.0);

  for (int mu = 0; mu < 2; ++mu) {
    for (int nu = 0; nu < 2; ++nu) {
      for (const auto& pa : bf[mu]) {
        for (const auto& pb : bf[nu]) {
          const double p = pa.exp + pb.exp;
          const double d2 = (pa.z - pb.z) * (pa.z - pb.z);
          const double pref = std::exp(-pa.exp * pb.exp / p * d2);
          const double s = std::pow(M_PI / p, 1.5) * pref;
          const double t =
              pa.exp * pb.exp / p * (3.0 - 2.0 * pa.exp * pb.exp / p * d2) * s;
          const double pz = (pa.exp * pa.z + pb.exp * pb.z) / p;
          double v = 0.0;
          for (const double c : centers)
            v -= 2.0 * M_PI / p * pref * boys_f0(p * (pz - c) * (pz - c));
          const double w = pa.weight * pb.weight;
          ints.overlap(mu, nu) += w * s;
          ints.kinetic(mu, nu) += w * t;
          ints.nuclear(mu, nu) += w * v;
          ints.dipole_z(mu, nu) += w * s * pz;  // origin at midpoint
        }
      }
    }
  }

  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu)
      for (int rho = 0; rho < 2; ++rho)
        for (int tau = 0; tau < 2; ++tau) {
          double val = 0.0;
          for (const auto& pa : bf[mu])
            for (const auto& pb : bf[nu])
              for (const auto& pc : bf[rho])
                for (const auto& pd : bf[tau]) {
                  const double p = pa.exp + pb.exp;
                  const double q = pc.exp + pd.exp;
                  const double pz = (pa.exp * pa.z + pb.exp * pb.z) / p;
                  const double qz = (pc.exp * pc.z + pd.exp * pd.z) / q;
                  const double pref =
                      std::exp(-pa.exp * pb.exp / p * (pa.z - pb.z) *
                                   (pa.z - pb.z) -
                               pc.exp * pd.exp / q * (pc.z - pd.z) *
                                   (pc.z - pd.z));
                  val += pa.weight * pb.weight * pc.weight * pd.weight *
                         2.0 * std::pow(M_PI, 2.5) /
                         (p * q * std::sqrt(p + q)) * pref *
                         boys_f0(p * q / (p + q) * (pz - qz) * (pz - qz));
                }
          ints.eri[((mu * 2 + nu) * 2 + rho) * 2 + tau] = val;
        }
  return ints;
}

RHFResult rhf(const MolecularIntegrals& ints, double field) {
  const int n = ints.nbf();
  const Eigen::MatrixXd S = ints.overlap;
  // H(F) = H + F mu_z with mu_z = -z (electronic part; the nuclear part
  // vanishes with the origin at the bond midpoint).
  const Eigen::MatrixXd hcore = ints.h_core() - field * ints.dipole_z;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ssolve(S);
  const Eigen::MatrixXd X =
      ssolve.eigenvectors() *
      ssolve.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      ssolve.eigenvectors().transpose();

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  RHFResult res;
  double e_old = 0.0;
  bool converged = false;
  for (int it = 1; it <= 200; ++it) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s)
            acc += D(r, s) * (ints.eri_at(p, q, r, s) -
                              0.5 * ints.eri_at(p, r, q, s));
        G(p, q) = acc;
      }
    const Eigen::MatrixXd F = hcore + G;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fsolve(X.transpose() * F *
                                                          X);
    Eigen::MatrixXd C = X * fsolve.eigenvectors();
    res.orbital_energies = fsolve.eigenvalues();
    D = 2.0 * C.col(0) * C.col(0).transpose();
    const double e_el = 0.5 * (D.array() * (hcore + F).array()).sum();
    res.mo_coeffs = C;
    res.e_hf = e_el + ints.e_nuc;
    res.iterations = it;
    if (it > 1 && std::abs(e_el - e_old) < 1e-13) {
      converged = true;
      break;
    }
    e_old = e_el;
  }
  if (!converged)
    throw std::runtime_error("rhf: SCF did not converge in 200 iterations");
  // deterministic MO phase: first AO coefficient positive
  for (int p = 0; p < n; ++p)
    if (res.mo_coeffs(0, p) < 0) res.mo_coeffs.col(p) *= -1.0;
  return res;
}

SpinOrbitalIntegrals fermion_hamiltonian(const MolecularIntegrals& ints,
                                         const RHFResult& mos, double field) {
  const int n = ints.nbf();
  const Eigen::MatrixXd& C = mos.mo_coeffs;
  const Eigen::MatrixXd hcore_ao = ints.h_core() - field * ints.dipole_z;
  const Eigen::MatrixXd h_mo = C.transpose() * hcore_ao * C;

  std::vector<double> g_mo(n * n * n * n, 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double acc = 0.0;
          for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
              for (int rho = 0; rho < n; ++rho)
                for (int tau = 0; tau < n; ++tau)
                  acc += C(mu, p) * C(nu, q) * C(rho, r) * C(tau, s) *
                         ints.eri_at(mu, nu, rho, tau);
          g_mo[((p * n + q) * n + r) * n + s] = acc;
        }

  SpinOrbitalIntegrals so;
  so.n_so = 2 * n;
  so.e_core = ints.e_nuc;
  so.h = Eigen::MatrixXd::Zero(so.n_so, so.n_so);
  so.g.assign(so.n_so * so.n_so * so.n_so * so.n_so, 0.0);
  for (int P = 0; P < so.n_so; ++P)
    for (int Q = 0; Q < so.n_so; ++Q) {
      if ((P & 1) != (Q & 1)) continue;
      so.h(P, Q) = h_mo(P / 2, Q / 2);
    }
  const int m = so.n_so;
  for (int P = 0; P < m; ++P)
    for (int Q = 0; Q < m; ++Q) {
      if ((P & 1) != (Q & 1)) continue;
      for (int R = 0; R < m; ++R)
        for (int T = 0; T < m; ++T) {
          if ((R & 1) != (T & 1)) continue;
          so.g[((P * m + Q) * m + R) * m + T] =
              g_mo[(((P / 2) * n + Q / 2) * n + R / 2) * n + T / 2];
        }
    }
  return so;
}

namespace {

// JW ladder operator as a two-term Pauli sum.
std::vector<PauliTerm> jw_ladder(int n, int p, bool dagger) {
  std::string xw(n, 'I'), yw(n, 'I');
  for (int q = 0; q < p; ++q) {
    xw[q] = 'Z';
    yw[q] = 'Z';
  }
  xw[p] = 'X';
  yw[p] = 'Y';
  const complexd half(0.5, 0.0);
  const complexd ihalf = dagger ? complexd(0.0, -0.5) : complexd(0.0, 0.5);
  return {PauliTerm{xw, half}, PauliTerm{yw, ihalf}};
}

void accumulate_product(QubitOperator& out,
                        const std::vector<std::vector<PauliTerm>>& factors,
                        complexd scale) {
  // expand the product of small Pauli sums term by term
  std::vector<PauliTerm> acc = {
      PauliTerm{std::string(out.n_qubits(), 'I'), scale}};
  for (const auto& f : factors) {
    std::vector<PauliTerm> next;
    next.reserve(acc.size() * f.size());
    for (const auto& a : acc)
      for (const auto& b : f) next.push_back(multiply(a, b));
    acc = std::move(next);
  }
  for (const auto& t : acc) out.add(t);
}

}  // namespace

QubitOperator jordan_wigner(const SpinOrbitalIntegrals& so) {
  const int n = so.n_so;
  QubitOperator op(n);
  op.add(std::string(n, 'I'), so.e_core);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (std::abs(so.h(p, q)) < 1e-14) continue;
      accumulate_product(op, {jw_ladder(n, p, true), jw_ladder(n, q, false)},
                         so.h(p, q));
    }
  // 1/2 sum_pqrs (pq|rs) c+_p c+_r c_s c_q
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double g = so.g_at(p, q, r, s);
          if (std::abs(g) < 1e-14) continue;
          accumulate_product(
              op,
              {jw_ladder(n, p, true), jw_ladder(n, r, true),
               jw_ladder(n, s, false), jw_ladder(n, q, false)},
              0.5 * g);
        }
  return op;
}

QubitOperator jw_excitation(int n_so, int p, int q) {
  QubitOperator op(n_so);
  accumulate_product(op, {jw_ladder(n_so, p, true), jw_ladder(n_so, q, false)},
                     1.0);
  return op;
}

QubitOperator jw_double_excitation(int n_so, int p, int q, int s, int r) {
  QubitOperator op(n_so);
  accumulate_product(op,
                     {jw_ladder(n_so, p, true), jw_ladder(n_so, q, true),
                      jw_ladder(n_so, s, false), jw_ladder(n_so, r, false)},
                     1.0);
  return op;
}

QubitOperator reduce_two_qubit(const QubitOperator& op4, bool force_projection,
                               ReductionReport* report) {
  if (op4.n_qubits() != 4)
    throw std::invalid_argument("reduce_two_qubit: expected 4 qubits");
  const Eigen::MatrixXcd m = op4.to_matrix();

  // conserved parities: Z0Z1 (sigma_g occupation) and Z2Z3 (sigma_u)
  auto parity_diag = [](int mask) {
    Eigen::VectorXd d(16);
    for (int i = 0; i < 16; ++i) {
      int bits = 0;
      for (int q = 0; q < 4; ++q)
        if ((mask >> q) & 1) bits += (i >> (3 - q)) & 1;
      d(i) = (bits % 2 == 0) ? 1.0 : -1.0;
    }
    return d;
  };
  const Eigen::VectorXd pg = parity_diag(0b0011);  // qubits 0,1
  const Eigen::VectorXd pu = parity_diag(0b1100);  // qubits 2,3
  double comm = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      comm = std::max(comm, std::abs(m(i, j)) * std::abs(pg(i) - pg(j)));
      comm = std::max(comm, std::abs(m(i, j)) * std::abs(pu(i) - pu(j)));
    }
  ReductionReport rep;
  rep.commutator_norm = comm;
  rep.commutes = comm < 1e-10;
  rep.forced = !rep.commutes && force_projection;
  if (report) *report = rep;
  if (!rep.commutes && !force_projection)
    throw std::invalid_argument(
        "reduce_two_qubit: operator breaks the reduction symmetries "
        "(commutator norm " +
        std::to_string(comm) + "); pass force_projection to project anyway");

  static const std::array<int, 4> sector = {0b0000, 0b0011, 0b1100, 0b1111};
  Eigen::MatrixXcd block(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) block(i, j) = m(sector[i], sector[j]);
  return QubitOperator::from_matrix(block);
}

QubitOperator dipole_operator(double bond_length_angstrom) {
  const MolecularIntegrals ints = sto3g_h2_integrals(bond_length_angstrom);
  const RHFResult mos = rhf(ints);
  const int n = ints.nbf();
  const Eigen::MatrixXd z_mo =
      mos.mo_coeffs.transpose() * ints.dipole_z * mos.mo_coeffs;
  QubitOperator op(2 * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (std::abs(z_mo(p, q)) < 1e-14) continue;
      for (int sigma = 0; sigma < 2; ++sigma) {
        // mu_z = -z (electron charge -1)
        op += jw_excitation(2 * n, 2 * p + sigma, 2 * q + sigma) *
              complexd(-z_mo(p, q), 0.0);
      }
    }
  return op;
}

QubitOperator fd_operator_derivative(const OperatorFamily& family,
                                     const std::vector<double>& at, int which,
                                     int order) {
  if (which < 0 || which >= family.n_params())
    throw std::invalid_argument("fd_operator_derivative: bad parameter index");
  const double d = family.fd_steps[which];
  std::vector<double> lp = at, lm = at;
  if (order == 1) {
    lp[which] += d / 2.0;
    lm[which] -= d / 2.0;
    QubitOperator out = family.evaluate(lp);
    out -= family.evaluate(lm);
    out *= complexd(1.0 / d, 0.0);
    return out;
  }
  if (order == 2) {
    lp[which] += d;
    lm[which] -= d;
    QubitOperator out = family.evaluate(lp);
    out += family.evaluate(lm);
    out -= family.evaluate(at) * complexd(2.0, 0.0);
    out *= complexd(1.0 / (d * d), 0.0);
    return out;
  }
  throw std::invalid_argument("fd_operator_derivative: order must be 1 or 2");
}

QubitOperator fd_operator_second(const OperatorFamily& family,
                                 const std::vector<double>& at, int i, int j) {
  if (i == j) return fd_operator_derivative(family, at, i, 2);
  const double di = family.fd_steps[i];
  const double dj = family.fd_steps[j];
  auto shifted = [&](double si, double sj) {
    std::vector<double> l = at;
    l[i] += si;
    l[j] += sj;
    return family.evaluate(l);
  };
  QubitOperator out = shifted(+di, +dj);
  out += shifted(-di, -dj);
  out -= shifted(+di, -dj);
  out -= shifted(-di, +dj);
  out *= complexd(1.0 / (4.0 * di * dj), 0.0);
  return out;
}

OperatorFamily h2_geometry_family(int qubit_space) {
  if (qubit_space != 2 && qubit_space != 4)
    throw std::invalid_argument("h2_geometry_family: qubit_space must be 2|4");
  OperatorFamily fam;
  fam.parameter_names = {"R[angstrom]"};
  fam.fd_steps = {0.001};
  fam.evaluate = [qubit_space](const std::vector<double>& l) {
    const double r = l.at(0);
    const MolecularIntegrals ints = sto3g_h2_integrals(r);
    const RHFResult mos = rhf(ints);
    const QubitOperator h4 = jordan_wigner(fermion_hamiltonian(ints, mos));
    if (qubit_space == 4) return h4;
    return reduce_two_qubit(h4);
  };
  return fam;
}

OperatorFamily h2_field_family(double bond_length_angstrom, int qubit_space) {
  if (qubit_space != 2 && qubit_space != 4)
    throw std::invalid_argument("h2_field_family: qubit_space must be 2|4");
  OperatorFamily fam;
  fam.parameter_names = {"F[a.u.]"};
  fam.fd_steps = {0.001};
  fam.evaluate = [bond_length_angstrom,
                  qubit_space](const std::vector<double>& l) {
    const double field = l.at(0);
    const MolecularIntegrals ints = sto3g_h2_integrals(bond_length_angstrom);
    const RHFResult mos = rhf(ints, field);
    const QubitOperator h4 =
        jordan_wigner(fermion_hamiltonian(ints, mos, field));
    if (qubit_space == 4) return h4;
    return reduce_two_qubit(h4, /*force_projection=*/true);
  };
  return fam;
}

double hf_energy(double bond_length_angstrom) {
  return rhf(sto3g_h2_integrals(bond_length_angstrom)).e_hf;
}

}  // namespace qderiv
