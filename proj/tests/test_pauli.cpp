#include <doctest.h>

#include <cstdio>
#include <random>

#include "qderiv/pauli.hpp"

using namespace qderiv;

namespace {

// Dense Kronecker-product oracle, independent of QubitOperator::to_matrix.
Eigen::MatrixXcd kron_oracle(const std::string& word, complexd coeff) {
  using M = Eigen::Matrix2cd;
  M I = M::Identity();
  M X, Y, Z;
  X << 0, 1, 1, 0;
  Y << 0, complexd(0, -1), complexd(0, 1), 0;
  Z << 1, 0, 0, -1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (char c : word) {
    const M& p = c == 'X' ? X : c == 'Y' ? Y : c == 'Z' ? Z : I;
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(2 * i, 2 * j, 2, 2) = out(i, j) * p;
    out = next;
  }
  return coeff * out;
}

std::string random_word(std::mt19937_64& rng, int n) {
  static const char* letters = "IXYZ";
  std::string w(n, 'I');
  for (char& c : w) c = letters[rng() % 4];
  return w;
}

}  // namespace

TEST_CASE("parse_pauli basics") {
  auto t = parse_pauli("ZI", 0.5);
  CHECK(t.word == "ZI");
  CHECK(t.coeff == complexd(0.5, 0.0));
  CHECK(t.n_qubits() == 2);

  auto id = parse_pauli("II", 1.0);
  CHECK(id.word == "II");

  CHECK_THROWS_AS(parse_pauli("XA", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(parse_pauli("", 1.0), std::invalid_argument);
}

TEST_CASE("single-qubit Pauli products") {
  auto xy = multiply(parse_pauli("X"), parse_pauli("Y"));
  CHECK(xy.word == "Z");
  CHECK(xy.coeff == complexd(0, 1));

  auto zz = multiply(parse_pauli("Z"), parse_pauli("Z"));
  CHECK(zz.word == "I");
  CHECK(zz.coeff == complexd(1, 0));

  CHECK_THROWS_AS(multiply(parse_pauli("X"), parse_pauli("XX")),
                  std::invalid_argument);
}

TEST_CASE("two-qubit product against the dense oracle") {
  // (XY)*(YX) = (X*Y) (x) (Y*X) = (iZ) (x) (-iZ) = Z (x) Z
  auto prod = multiply(parse_pauli("XY"), parse_pauli("YX"));
  CHECK(prod.word == "ZZ");
  CHECK(prod.coeff.real() == doctest::Approx(1.0));
  CHECK(prod.coeff.imag() == doctest::Approx(0.0));

  const Eigen::MatrixXcd lhs =
      kron_oracle("XY", 1.0) * kron_oracle("YX", 1.0);
  const Eigen::MatrixXcd rhs = kron_oracle(prod.word, prod.coeff);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("random products match dense matrices") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + int(rng() % 4);
    PauliTerm a{random_word(rng, n), complexd(0.3, -0.2)};
    PauliTerm b{random_word(rng, n), complexd(-1.1, 0.7)};
    const PauliTerm c = multiply(a, b);
    const Eigen::MatrixXcd lhs =
        kron_oracle(a.word, a.coeff) * kron_oracle(b.word, b.coeff);
    CHECK((lhs - kron_oracle(c.word, c.coeff)).norm() < 1e-12);
  }
}

TEST_CASE("to_matrix basics") {
  QubitOperator z(1);
  z.add("Z", 1.0);
  Eigen::MatrixXcd m = z.to_matrix();
  CHECK(m(0, 0).real() == doctest::Approx(1.0));
  CHECK(m(1, 1).real() == doctest::Approx(-1.0));
  CHECK(std::abs(m(0, 1)) == doctest::Approx(0.0));

  // lambda_X X with lambda_Z = 0: eigenvalues +-1 at lambda_X = 1
  QubitOperator h(1);
  h.add("X", 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_matrix());
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0));
}

TEST_CASE("to_matrix is linear and matches the kron oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + int(rng() % 3);
    QubitOperator op(n);
    Eigen::MatrixXcd expect =
        Eigen::MatrixXcd::Zero(1 << n, 1 << n);
    for (int t = 0; t < 4; ++t) {
      const std::string w = random_word(rng, n);
      const complexd c(std::uniform_real_distribution<>(-1, 1)(rng),
                       std::uniform_real_distribution<>(-1, 1)(rng));
      op.add(w, c);
      expect += kron_oracle(w, c);
    }
    CHECK((op.to_matrix() - expect).norm() < 1e-12);
  }
}

TEST_CASE("to_matrix rejects oversize registers") {
  QubitOperator op(13);
  op.add(std::string(13, 'Z'), 1.0);
  CHECK_THROWS_AS(op.to_matrix(), std::invalid_argument);
}

TEST_CASE("operator product matches dense product") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + int(rng() % 3);
    QubitOperator a(n), b(n);
    for (int t = 0; t < 3; ++t) {
      a.add(random_word(rng, n),
            complexd(std::uniform_real_distribution<>(-1, 1)(rng), 0.1));
      b.add(random_word(rng, n),
            complexd(std::uniform_real_distribution<>(-1, 1)(rng), -0.4));
    }
    CHECK(((a * b).to_matrix() - a.to_matrix() * b.to_matrix()).norm() <
          1e-12);
  }
}

TEST_CASE("hermitian flag matches the dense adjoint") {
  QubitOperator h(2);
  h.add("XZ", 0.25);
  h.add("YY", -1.5);
  CHECK(h.is_hermitian());
  Eigen::MatrixXcd m = h.to_matrix();
  CHECK((m - m.adjoint()).norm() < 1e-12);

  QubitOperator g = h;
  g.add("ZI", complexd(0.0, 0.3));
  CHECK(!g.is_hermitian());
  Eigen::MatrixXcd mg = g.to_matrix();
  CHECK((mg - mg.adjoint()).norm() > 1e-3);
}

TEST_CASE("hermitian decomposition") {
  QubitOperator op(2);
  op.add("XI", 0.3);
  op.add("ZZ", 0.7);
  auto parts = decompose_hermitian(op);
  CHECK(parts.size() == 2);

  QubitOperator only_id = QubitOperator::identity(2, 2.5);
  CHECK(decompose_hermitian(only_id).size() == 1);

  QubitOperator bad(1);
  bad.add("X", complexd(0, 1));
  CHECK_THROWS_AS(decompose_hermitian(bad), std::invalid_argument);

  // reassembled sum matches the dense form
  QubitOperator sum(2);
  for (const auto& p : parts) sum.add(p.word, p.coeff);
  CHECK((sum.to_matrix() - op.to_matrix()).norm() < 1e-12);
}

TEST_CASE("unitary decomposition reconstructs the operator") {
  QubitOperator op(1);
  op.add("X", 0.5);
  op.add("Z", 0.5);
  auto parts = decompose_unitary(op);
  CHECK(parts.size() == 2);
  for (const auto& p : parts)
    CHECK(std::abs(p.weight - complexd(0.5, 0)) < 1e-15);

  QubitOperator single(1);
  single.add("X", 1.0);
  CHECK(decompose_unitary(single).size() == 1);

  Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(2, 2);
  for (const auto& p : parts)
    rebuilt += p.weight * QubitOperator::from_term({p.word, 1.0}).to_matrix();
  CHECK((rebuilt - op.to_matrix()).norm() < 1e-12);
}

TEST_CASE("cancellation drops tiny coefficients") {
  QubitOperator op(1);
  op.add("X", 1.0);
  op.add("X", -1.0 + 5e-13);
  CHECK(op.empty());
}

TEST_CASE("from_matrix round trip") {
  std::mt19937_64 rng(3);
  QubitOperator op(2);
  op.add("XY", complexd(0.4, -0.1));
  op.add("ZI", 0.9);
  op.add("II", -0.2);
  const QubitOperator back = QubitOperator::from_matrix(op.to_matrix());
  CHECK((back.to_matrix() - op.to_matrix()).norm() < 1e-12);
  CHECK(back.size() == op.size());
}

TEST_CASE("JSON round trip is exact for finite doubles") {
  QubitOperator op(2);
  op.add("XZ", complexd(0.1234567890123456789, -3.0e-7));
  op.add("II", complexd(-1.0 / 3.0, 0.0));
  const std::string path = "pauli_roundtrip_test.json";
  save_operator_json(op, path);
  const QubitOperator back = load_operator_json(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == op.size());
  for (const auto& [w, c] : op.terms()) {
    CHECK(back.coeff(w).real() == c.real());
    CHECK(back.coeff(w).imag() == c.imag());
  }
}

TEST_CASE("apply_word agrees with the dense matrix") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + int(rng() % 3);
    const std::string w = random_word(rng, n);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(1 << n);
    psi.normalize();
    CHECK((apply_word(w, psi) - kron_oracle(w, 1.0) * psi).norm() < 1e-12);
  }
}
