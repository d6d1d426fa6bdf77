#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qderiv {

using complexd = std::complex<double>;

/// Coefficient magnitudes below this are dropped after arithmetic.
inline constexpr double kCoeffDropThreshold = 1e-12;

/// Largest register width realizable as a dense matrix.
inline constexpr int kMaxDenseQubits = 12;

/// A single weighted Pauli word, e.g. 0.5 * X (x) Z. The word string has
/// one letter per qubit out of {I, X, Y, Z}; qubit 0 is the leftmost
/// letter and the most significant bit of a basis-state index.
struct PauliTerm {
  std::string word;
  complexd coeff{1.0, 0.0};

  int n_qubits() const { return static_cast<int>(word.size()); }
};

/// Builds a PauliTerm from text like "ZI". Throws std::invalid_argument on
/// empty input, letters outside IXYZ, or a non-finite coefficient.
PauliTerm parse_pauli(const std::string& text, complexd coeff = 1.0);

/// Product a*b with the accumulated algebra phase (X*Y = iZ and so on).
/// Widths must match.
PauliTerm multiply(const PauliTerm& a, const PauliTerm& b);

/// Weighted sum of Pauli words with deduplicated, lexicographically ordered
/// terms. Coefficients with |c| < kCoeffDropThreshold are removed.
class QubitOperator {
 public:
  QubitOperator() = default;
  explicit QubitOperator(int n_qubits);

  static QubitOperator identity(int n_qubits, complexd scale = 1.0);
  static QubitOperator from_term(const PauliTerm& t);
  /// Exact Pauli-basis expansion of a dense 2^n x 2^n matrix.
  static QubitOperator from_matrix(const Eigen::MatrixXcd& m);

  int n_qubits() const { return n_qubits_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<std::string, complexd>& terms() const { return terms_; }

  void add(const PauliTerm& t);
  void add(const std::string& word, complexd coeff);
  complexd coeff(const std::string& word) const;

  /// True when every coefficient is real to within tol, which is
  /// equivalent to the dense matrix being Hermitian.
  bool is_hermitian(double tol = kCoeffDropThreshold) const;

  QubitOperator adjoint() const;

  QubitOperator& operator+=(const QubitOperator& o);
  QubitOperator& operator-=(const QubitOperator& o);
  QubitOperator& operator*=(complexd s);
  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) {
    a += b;
    return a;
  }
  friend QubitOperator operator-(QubitOperator a, const QubitOperator& b) {
    a -= b;
    return a;
  }
  friend QubitOperator operator*(QubitOperator a, complexd s) {
    a *= s;
    return a;
  }
  friend QubitOperator operator*(complexd s, QubitOperator a) {
    a *= s;
    return a;
  }
  /// Operator product, expanded term by term.
  friend QubitOperator operator*(const QubitOperator& a,
                                 const QubitOperator& b);

  /// Dense realization; throws for n_qubits > kMaxDenseQubits.
  Eigen::MatrixXcd to_matrix() const;

  std::string to_string() const;

 private:
  int n_qubits_ = 0;
  std::map<std::string, complexd> terms_;
};

/// One individually measurable piece of a Hermitian operator: a single
/// Pauli word with a real weight.
struct HermitianPart {
  std::string word;
  double coeff;
};

/// One unitary piece: a Pauli word (unitary by itself) with the scalar
/// weight that reconstructs the original operator in a weighted sum.
struct UnitaryPart {
  std::string word;
  complexd weight;
};

/// Term-wise split into N_T measurable Hermitian parts.
/// Throws std::invalid_argument for non-Hermitian input.
std::vector<HermitianPart> decompose_hermitian(const QubitOperator& op);

/// Split into N_U weighted Pauli unitaries (the Pauli basis choice).
std::vector<UnitaryPart> decompose_unitary(const QubitOperator& op);

/// Applies a single Pauli word to a state vector without forming the
/// matrix. dim(psi) must be 2^len(word).
Eigen::VectorXcd apply_word(const std::string& word,
                            const Eigen::VectorXcd& psi);

/// op |psi>, term by term.
Eigen::VectorXcd apply_operator(const QubitOperator& op,
                                const Eigen::VectorXcd& psi);

/// JSON operator file round trip:
/// {"n_qubits": n, "terms": [{"pauli": "XZ", "re": ..., "im": ...}, ...]}
std::string operator_to_json(const QubitOperator& op);
QubitOperator operator_from_json(const std::string& text);
void save_operator_json(const QubitOperator& op, const std::string& path);
QubitOperator load_operator_json(const std::string& path);

}  // namespace qderiv
