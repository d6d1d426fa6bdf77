#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "ci_reference.hpp"
#include "qderiv/chem.hpp"
#include "qderiv/gradients.hpp"
#include "qderiv/simulator.hpp"

using namespace qderiv;

namespace {

nlohmann::json load_fixture() {
  static nlohmann::json j = [] {
    std::ifstream f(std::string(QDERIV_FIXTURE_DIR) + "/h2_sto3g.json");
    REQUIRE(f.good());
    nlohmann::json out;
    f >> out;
    return out;
  }();
  return j;
}

}  // namespace

TEST_CASE("integrals match the reference fixture at 0.7414 A") {
  const auto fix = load_fixture()["integrals_at_0p7414"];
  const MolecularIntegrals ints = sto3g_h2_integrals(0.7414);

  CHECK(ints.e_nuc == doctest::Approx(fix["e_nuc"].get<double>())
                          .epsilon(1e-12));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(ints.overlap(i, j) -
                     fix["overlap"][i][j].get<double>()) < 1e-8);
      CHECK(std::abs(ints.h_core()(i, j) -
                     fix["h_core"][i][j].get<double>()) < 1e-8);
      CHECK(std::abs(ints.dipole_z(i, j) -
                     fix["dipole_z_ao"][i][j].get<double>()) < 1e-8);
    }
  const auto eri = fix["eri"].get<std::vector<double>>();
  for (int idx = 0; idx < 16; ++idx)
    CHECK(std::abs(ints.eri[idx] - eri[idx]) < 1e-8);
}

TEST_CASE("basis normalization and Coulomb law") {
  const MolecularIntegrals ints = sto3g_h2_integrals(0.9);
  CHECK(ints.overlap(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ints.overlap(1, 1) == doctest::Approx(1.0).epsilon(1e-10));

  const MolecularIntegrals twice = sto3g_h2_integrals(1.8);
  CHECK(twice.e_nuc == doctest::Approx(0.5 * ints.e_nuc).epsilon(1e-12));

  CHECK_THROWS_AS(sto3g_h2_integrals(0.0), std::invalid_argument);
  CHECK_THROWS_AS(sto3g_h2_integrals(-1.0), std::invalid_argument);
}

TEST_CASE("RHF energies match the fixture to 1e-8") {
  for (const auto& entry : load_fixture()["energies"]) {
    const double r = entry["r_angstrom"].get<double>();
    const RHFResult res = rhf(sto3g_h2_integrals(r));
    CHECK(std::abs(res.e_hf - entry["e_hf"].get<double>()) < 1e-8);
  }
}

TEST_CASE("RHF orthonormality and symmetric MOs") {
  const MolecularIntegrals ints = sto3g_h2_integrals(0.7414);
  const RHFResult res = rhf(ints);
  const Eigen::MatrixXd ortho = res.mo_coeffs.transpose() * ints.overlap *
                                res.mo_coeffs;
  CHECK((ortho - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);
  // symmetric molecule: |c_1p| = |c_2p|
  for (int p = 0; p < 2; ++p)
    CHECK(std::abs(std::abs(res.mo_coeffs(0, p)) -
                   std::abs(res.mo_coeffs(1, p))) < 1e-10);
}

TEST_CASE("HF sits above FCI across a scan and both curves are smooth") {
  double prev_hf = 0, prev_fci = 0;
  bool first = true;
  for (double r = 0.3; r <= 2.5 + 1e-9; r += 0.2) {
    const double e_hf = rhf(sto3g_h2_integrals(r)).e_hf;
    const double e_fci = ci_reference::fci_ground(r);
    CHECK(e_hf >= e_fci - 1e-12);
    if (!first) {
      CHECK(std::abs(e_hf - prev_hf) < 0.5);  // no convergence jumps
      CHECK(std::abs(e_fci - prev_fci) < 0.5);
    }
    prev_hf = e_hf;
    prev_fci = e_fci;
    first = false;
  }
}

TEST_CASE("FCI energies match the fixture (CI oracle and JW route)") {
  for (const auto& entry : load_fixture()["energies"]) {
    const double r = entry["r_angstrom"].get<double>();
    const double want = entry["e_fci"].get<double>();
    CHECK(std::abs(ci_reference::fci_ground(r) - want) < 1e-8);
    CHECK(std::abs(fci_ground_energy(r) - want) < 1e-8);
  }
}

TEST_CASE("MO transform sanity") {
  const MolecularIntegrals ints = sto3g_h2_integrals(0.8);
  const RHFResult mos = rhf(ints);

  // identity coefficients return the AO integrals
  RHFResult ident = mos;
  ident.mo_coeffs = Eigen::MatrixXd::Identity(2, 2);
  const SpinOrbitalIntegrals ao = fermion_hamiltonian(ints, ident);
  CHECK(std::abs(ao.h(0, 0) - ints.h_core()(0, 0)) < 1e-12);
  CHECK(std::abs(ao.h(0, 2) - ints.h_core()(0, 1)) < 1e-12);
  CHECK(std::abs(ao.g_at(0, 0, 2, 2) - ints.eri_at(0, 0, 1, 1)) < 1e-12);

  // eight-fold symmetry survives the transform
  const SpinOrbitalIntegrals so = fermion_hamiltonian(ints, mos);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          CHECK(std::abs(so.g_at(p, q, r, s) - so.g_at(q, p, r, s)) < 1e-12);
          CHECK(std::abs(so.g_at(p, q, r, s) - so.g_at(r, s, p, q)) < 1e-12);
        }

  // MO h is diagonal in the spatial block (canonical orbitals make the
  // Fock matrix diagonal; h alone is diagonal for H2 by g/u symmetry)
  CHECK(std::abs(so.h(0, 2)) < 1e-10);
}

TEST_CASE("Jordan-Wigner of a single number operator") {
  SpinOrbitalIntegrals so;
  so.n_so = 2;
  so.e_core = 0.0;
  so.h = Eigen::MatrixXd::Zero(2, 2);
  so.h(0, 0) = 0.625;
  so.g.assign(16, 0.0);
  const QubitOperator op = jordan_wigner(so);
  // h00 c+_0 c_0 = h00 (I - Z_0)/2
  CHECK(std::abs(op.coeff("II") - complexd(0.3125, 0)) < 1e-12);
  CHECK(std::abs(op.coeff("ZI") - complexd(-0.3125, 0)) < 1e-12);
  CHECK(op.size() == 2);
}

TEST_CASE("JW spectrum matches the determinant CI oracle") {
  const MolecularIntegrals ints = sto3g_h2_integrals(0.7414);
  const RHFResult mos = rhf(ints);
  const SpinOrbitalIntegrals so = fermion_hamiltonian(ints, mos);
  const QubitOperator h4 = jordan_wigner(so);
  CHECK(h4.is_hermitian());

  const Eigen::VectorXd ci = ci_reference::two_electron_spectrum(0.7414);
  CHECK(std::abs(sector_ground_energy(h4, 2) - ci(0)) < 1e-10);

  // particle number is conserved
  const QubitOperator num = number_operator(4);
  const Eigen::MatrixXcd hm = h4.to_matrix();
  const Eigen::MatrixXcd nm = num.to_matrix();
  CHECK((hm * nm - nm * hm).norm() < 1e-10);
}

TEST_CASE("two-qubit reduction reproduces the sector ground energy") {
  for (double r : {0.5, 0.7414, 1.1, 1.5, 2.0}) {
    const OperatorFamily f4 = h2_geometry_family(4);
    const OperatorFamily f2 = h2_geometry_family(2);
    const QubitOperator h4 = f4.evaluate({r});
    const QubitOperator h2 = f2.evaluate({r});
    const double e4 = sector_ground_energy(h4, 2);
    const double e2 = diagonalize(h2).energies(0);
    CHECK(std::abs(e4 - e2) < 1e-10);
  }
}

TEST_CASE("two-qubit reduction of the identity is the identity") {
  const QubitOperator id4 = QubitOperator::identity(4, 2.5);
  const QubitOperator red = reduce_two_qubit(id4);
  CHECK(red.size() == 1);
  CHECK(std::abs(red.coeff("II") - complexd(2.5, 0)) < 1e-12);
}

TEST_CASE("dipole-coupled Hamiltonian breaks the reduction symmetries") {
  const double r = 0.9;
  const OperatorFamily f4 = h2_geometry_family(4);
  const QubitOperator h4 = f4.evaluate({r});
  const QubitOperator mu = dipole_operator(r);
  const QubitOperator coupled = h4 + mu * complexd(0.01, 0.0);

  ReductionReport rep;
  CHECK_THROWS_AS(reduce_two_qubit(coupled), std::invalid_argument);
  const QubitOperator forced = reduce_two_qubit(coupled, true, &rep);
  CHECK(rep.forced);
  CHECK(rep.commutator_norm > 1e-6);
  CHECK(forced.n_qubits() == 2);

  // the plain Hamiltonian commutes and reduces strictly
  ReductionReport ok;
  reduce_two_qubit(h4, false, &ok);
  CHECK(ok.commutes);
}

TEST_CASE("dipole operator symmetry properties") {
  const double r = 0.7414;
  const QubitOperator mu = dipole_operator(r);
  CHECK(mu.is_hermitian());

  // zero expectation in the inversion-symmetric FCI ground state
  const OperatorFamily f4 = h2_geometry_family(4);
  const EigenDecomposition eig = diagonalize(f4.evaluate({r}));
  const QubitOperator num = number_operator(4);
  for (int j = 0; j < eig.dim(); ++j) {
    if (std::abs(expectation(eig.states.col(j), num) - 2.0) > 1e-6) continue;
    CHECK(std::abs(expectation(eig.states.col(j), mu)) < 1e-8);
    break;  // ground of the 2-electron sector
  }

  // doubling the field coupling doubles the perturbation term
  const QubitOperator h4 = f4.evaluate({r});
  const QubitOperator p1 = (h4 + mu * complexd(0.01, 0.0)) - h4;
  const QubitOperator p2 = (h4 + mu * complexd(0.02, 0.0)) - h4;
  CHECK(((p2 - p1 * complexd(2.0, 0.0)).to_matrix()).norm() < 1e-10);

  // off-diagonal MO matrix element against the fixture
  const auto fix = load_fixture()["integrals_at_0p7414"];
  const MolecularIntegrals ints = sto3g_h2_integrals(r);
  const RHFResult mos = rhf(ints);
  const Eigen::MatrixXd z_mo =
      mos.mo_coeffs.transpose() * ints.dipole_z * mos.mo_coeffs;
  CHECK(std::abs(std::abs(z_mo(0, 1)) -
                 fix["mo_z_offdiag"].get<double>()) < 1e-8);
}

TEST_CASE("fd_operator_derivative on polynomial families") {
  // linear family: derivative is exactly Z
  OperatorFamily lin;
  lin.parameter_names = {"l"};
  lin.fd_steps = {0.25};
  lin.evaluate = [](const std::vector<double>& l) {
    QubitOperator op(1);
    op.add("Z", l[0]);
    op.add("I", 0.0);
    return op;
  };
  const QubitOperator d1 = fd_operator_derivative(lin, {0.7}, 0, 1);
  CHECK(std::abs(d1.coeff("Z") - complexd(1, 0)) < 1e-12);

  // quadratic family: order-2 derivative is 2X
  OperatorFamily quad;
  quad.parameter_names = {"l"};
  quad.fd_steps = {1e-3};
  quad.evaluate = [](const std::vector<double>& l) {
    QubitOperator op(1);
    op.add("X", l[0] * l[0]);
    op.add("I", 0.0);
    return op;
  };
  const QubitOperator d2 = fd_operator_derivative(quad, {0.4}, 0, 2);
  CHECK(std::abs(d2.coeff("X") - complexd(2, 0)) < 1e-6);

  // bilinear family: mixed stencil recovers the cross coefficient
  OperatorFamily bilin;
  bilin.parameter_names = {"a", "b"};
  bilin.fd_steps = {0.25, 0.25};
  bilin.evaluate = [](const std::vector<double>& l) {
    QubitOperator op(2);
    op.add("XY", l[0] * l[1]);
    op.add("II", 0.0);
    return op;
  };
  const QubitOperator dm = fd_operator_second(bilin, {0.3, -0.2}, 0, 1);
  CHECK(std::abs(dm.coeff("XY") - complexd(1, 0)) < 1e-10);

  CHECK_THROWS_AS(fd_operator_derivative(lin, {0.7}, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fd_operator_derivative(lin, {0.7}, 0, 3),
                  std::invalid_argument);
}

TEST_CASE("operator derivative is linear in the family") {
  OperatorFamily fam1, fam2, combo;
  fam1.parameter_names = fam2.parameter_names = combo.parameter_names = {"l"};
  fam1.fd_steps = fam2.fd_steps = combo.fd_steps = {0.125};
  fam1.evaluate = [](const std::vector<double>& l) {
    QubitOperator op(1);
    op.add("X", std::sin(l[0]));
    op.add("I", 0.0);
    return op;
  };
  fam2.evaluate = [](const std::vector<double>& l) {
    QubitOperator op(1);
    op.add("Z", l[0] * l[0] - 0.3);
    op.add("I", 0.0);
    return op;
  };
  const double a = 0.7, b = -1.3;
  combo.evaluate = [&, a, b](const std::vector<double>& l) {
    return fam1.evaluate(l) * complexd(a, 0) + fam2.evaluate(l) * complexd(b, 0);
  };
  const QubitOperator lhs = fd_operator_derivative(combo, {0.4}, 0, 1);
  const QubitOperator rhs =
      fd_operator_derivative(fam1, {0.4}, 0, 1) * complexd(a, 0) +
      fd_operator_derivative(fam2, {0.4}, 0, 1) * complexd(b, 0);
  CHECK(((lhs - rhs).to_matrix()).norm() < 1e-12);
}

TEST_CASE("H2 family derivative matches the FCI energy slope") {
  const OperatorFamily fam = h2_geometry_family(4);
  const double r = 0.9;
  const QubitOperator dH = fd_operator_derivative(fam, {r}, 0, 1);
  CHECK(dH.is_hermitian());

  const QubitOperator h4 = fam.evaluate({r});
  const EigenDecomposition eig = diagonalize(h4);
  const QubitOperator num = number_operator(4);
  double grad = 0;
  for (int j = 0; j < eig.dim(); ++j) {
    if (std::abs(expectation(eig.states.col(j), num) - 2.0) > 1e-6) continue;
    grad = expectation(eig.states.col(j), dH);
    break;
  }
  const double d = 1e-3;
  const double fd = (ci_reference::fci_ground(r + d / 2) -
                     ci_reference::fci_ground(r - d / 2)) /
                    d;
  CHECK(grad == doctest::Approx(fd).epsilon(1e-6));
}
