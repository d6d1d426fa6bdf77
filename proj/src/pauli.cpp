#include "qderiv/pauli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qderiv {

namespace {

bool valid_letter(char c) {
  return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
}

// Single-qubit product table: a*b = phase * c.
void single_product(char a, char b, char& c, complexd& phase) {
  static const complexd one(1, 0), i(0, 1), mi(0, -1);
  if (a == 'I') {
    c = b;
    phase = one;
    return;
  }
  if (b == 'I') {
    c = a;
    phase = one;
    return;
  }
  if (a == b) {
    c = 'I';
    phase = one;
    return;
  }
  // cyclic: XY=iZ, YZ=iX, ZX=iY; reversed order picks up -i
  switch (a) {
    case 'X':
      c = (b == 'Y') ? 'Z' : 'Y';
      phase = (b == 'Y') ? i : mi;
      return;
    case 'Y':
      c = (b == 'Z') ? 'X' : 'Z';
      phase = (b == 'Z') ? i : mi;
      return;
    default:  // 'Z'
      c = (b == 'X') ? 'Y' : 'X';
      phase = (b == 'X') ? i : mi;
      return;
  }
}

}  // namespace

PauliTerm parse_pauli(const std::string& text, complexd coeff) {
  if (text.empty()) throw std::invalid_argument("parse_pauli: empty word");
  for (char c : text) {
    if (!valid_letter(c))
      throw std::invalid_argument("parse_pauli: invalid letter '" +
                                  std::string(1, c) + "' in \"" + text + "\"");
  }
  if (!std::isfinite(coeff.real()) || !std::isfinite(coeff.imag()))
    throw std::invalid_argument("parse_pauli: non-finite coefficient");
  return PauliTerm{text, coeff};
}

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
  if (a.word.size() != b.word.size())
    throw std::invalid_argument("multiply: width mismatch");
  PauliTerm out;
  out.word.resize(a.word.size());
  complexd phase(1, 0);
  for (std::size_t q = 0; q < a.word.size(); ++q) {
    char c;
    complexd p;
    single_product(a.word[q], b.word[q], c, p);
    out.word[q] = c;
    phase *= p;
  }
  out.coeff = a.coeff * b.coeff * phase;
  return out;
}

QubitOperator::QubitOperator(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits <= 0)
    throw std::invalid_argument("QubitOperator: n_qubits must be positive");
}

QubitOperator QubitOperator::identity(int n_qubits, complexd scale) {
  QubitOperator op(n_qubits);
  op.add(std::string(n_qubits, 'I'), scale);
  return op;
}

QubitOperator QubitOperator::from_term(const PauliTerm& t) {
  QubitOperator op(t.n_qubits());
  op.add(t);
  return op;
}

void QubitOperator::add(const PauliTerm& t) { add(t.word, t.coeff); }

void QubitOperator::add(const std::string& word, complexd coeff) {
  if (n_qubits_ == 0) n_qubits_ = static_cast<int>(word.size());
  if (static_cast<int>(word.size()) != n_qubits_)
    throw std::invalid_argument("QubitOperator::add: width mismatch");
  for (char c : word)
    if (!valid_letter(c))
      throw std::invalid_argument("QubitOperator::add: invalid word " + word);
  auto it = terms_.find(word);
  if (it == terms_.end()) {
    if (std::abs(coeff) >= kCoeffDropThreshold) terms_.emplace(word, coeff);
    return;
  }
  it->second += coeff;
  if (std::abs(it->second) < kCoeffDropThreshold) terms_.erase(it);
}

complexd QubitOperator::coeff(const std::string& word) const {
  auto it = terms_.find(word);
  return it == terms_.end() ? complexd(0, 0) : it->second;
}

bool QubitOperator::is_hermitian(double tol) const {
  for (const auto& [w, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

QubitOperator QubitOperator::adjoint() const {
  QubitOperator out(n_qubits_ ? n_qubits_ : 1);
  out.n_qubits_ = n_qubits_;
  for (const auto& [w, c] : terms_) out.add(w, std::conj(c));
  return out;
}

QubitOperator& QubitOperator::operator+=(const QubitOperator& o) {
  if (n_qubits_ == 0) n_qubits_ = o.n_qubits_;
  if (o.n_qubits_ != 0 && o.n_qubits_ != n_qubits_)
    throw std::invalid_argument("QubitOperator::+=: width mismatch");
  for (const auto& [w, c] : o.terms_) add(w, c);
  return *this;
}

QubitOperator& QubitOperator::operator-=(const QubitOperator& o) {
  if (n_qubits_ == 0) n_qubits_ = o.n_qubits_;
  if (o.n_qubits_ != 0 && o.n_qubits_ != n_qubits_)
    throw std::invalid_argument("QubitOperator::-=: width mismatch");
  for (const auto& [w, c] : o.terms_) add(w, -c);
  return *this;
}

QubitOperator& QubitOperator::operator*=(complexd s) {
  std::map<std::string, complexd> next;
  for (const auto& [w, c] : terms_) {
    complexd v = c * s;
    if (std::abs(v) >= kCoeffDropThreshold) next.emplace(w, v);
  }
  terms_ = std::move(next);
  return *this;
}

QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
  if (a.n_qubits_ != b.n_qubits_)
    throw std::invalid_argument("QubitOperator::*: width mismatch");
  QubitOperator out(a.n_qubits_);
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_)
      out.add(multiply(PauliTerm{wa, ca}, PauliTerm{wb, cb}));
  return out;
}

Eigen::MatrixXcd QubitOperator::to_matrix() const {
  if (n_qubits_ > kMaxDenseQubits)
    throw std::invalid_argument(
        "to_matrix: register too large for dense realization");
  if (n_qubits_ == 0)
    throw std::invalid_argument("to_matrix: empty operator width");
  const std::size_t dim = std::size_t(1) << n_qubits_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [w, c] : terms_) {
    std::size_t xmask = 0;
    for (int q = 0; q < n_qubits_; ++q)
      if (w[q] == 'X' || w[q] == 'Y')
        xmask |= std::size_t(1) << (n_qubits_ - 1 - q);
    for (std::size_t col = 0; col < dim; ++col) {
      complexd amp = c;
      for (int q = 0; q < n_qubits_; ++q) {
        const bool bit = (col >> (n_qubits_ - 1 - q)) & 1;
        switch (w[q]) {
          case 'Y':
            amp *= bit ? complexd(0, -1) : complexd(0, 1);
            break;
          case 'Z':
            if (bit) amp = -amp;
            break;
          default:
            break;
        }
      }
      m(col ^ xmask, col) += amp;
    }
  }
  return m;
}

QubitOperator QubitOperator::from_matrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("from_matrix: square matrix required");
  int n = 0;
  while ((Eigen::Index(1) << n) < m.rows()) ++n;
  if ((Eigen::Index(1) << n) != m.rows())
    throw std::invalid_argument("from_matrix: dimension not a power of two");
  QubitOperator out(n);
  const double dim = static_cast<double>(m.rows());
  std::string word(n, 'I');
  // enumerate all words; coefficient = Tr(W m) / 2^n
  const std::size_t n_words = std::size_t(1) << (2 * n);
  for (std::size_t idx = 0; idx < n_words; ++idx) {
    std::size_t rem = idx;
    for (int q = 0; q < n; ++q) {
      word[q] = "IXYZ"[rem & 3];
      rem >>= 2;
    }
    QubitOperator w = QubitOperator::from_term(PauliTerm{word, 1.0});
    // Tr(W m) without forming W: sum_col (W m)(col,col)
    complexd tr(0, 0);
    {
      Eigen::MatrixXcd wm = w.to_matrix();
      tr = (wm * m).trace();
    }
    complexd c = tr / dim;
    if (std::abs(c) >= kCoeffDropThreshold) out.add(word, c);
  }
  return out;
}

std::string QubitOperator::to_string() const {
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c.real();
    if (c.imag() != 0) os << (c.imag() > 0 ? "+" : "") << c.imag() << "i";
    os << ") " << w;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::vector<HermitianPart> decompose_hermitian(const QubitOperator& op) {
  if (!op.is_hermitian())
    throw std::invalid_argument("decompose_hermitian: operator not Hermitian");
  std::vector<HermitianPart> parts;
  parts.reserve(op.size());
  for (const auto& [w, c] : op.terms()) parts.push_back({w, c.real()});
  return parts;
}

std::vector<UnitaryPart> decompose_unitary(const QubitOperator& op) {
  std::vector<UnitaryPart> parts;
  parts.reserve(op.size());
  for (const auto& [w, c] : op.terms()) parts.push_back({w, c});
  return parts;
}

Eigen::VectorXcd apply_word(const std::string& word,
                            const Eigen::VectorXcd& psi) {
  const int n = static_cast<int>(word.size());
  const std::size_t dim = std::size_t(1) << n;
  if (psi.size() != Eigen::Index(dim))
    throw std::invalid_argument("apply_word: dimension mismatch");
  std::size_t xmask = 0;
  for (int q = 0; q < n; ++q)
    if (word[q] == 'X' || word[q] == 'Y')
      xmask |= std::size_t(1) << (n - 1 - q);
  Eigen::VectorXcd out(psi.size());
  for (std::size_t col = 0; col < dim; ++col) {
    complexd amp(1, 0);
    for (int q = 0; q < n; ++q) {
      const bool bit = (col >> (n - 1 - q)) & 1;
      switch (word[q]) {
        case 'Y':
          amp *= bit ? complexd(0, -1) : complexd(0, 1);
          break;
        case 'Z':
          if (bit) amp = -amp;
          break;
        default:
          break;
      }
    }
    out(col ^ xmask) = amp * psi(col);
  }
  return out;
}

Eigen::VectorXcd apply_operator(const QubitOperator& op,
                                const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (const auto& [w, c] : op.terms()) out += c * apply_word(w, psi);
  return out;
}

std::string operator_to_json(const QubitOperator& op) {
  nlohmann::json j;
  j["n_qubits"] = op.n_qubits();
  j["terms"] = nlohmann::json::array();
  for (const auto& [w, c] : op.terms()) {
    j["terms"].push_back(
        {{"pauli", w}, {"re", c.real()}, {"im", c.imag()}});
  }
  return j.dump(1);
}

QubitOperator operator_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  QubitOperator op(j.at("n_qubits").get<int>());
  for (const auto& t : j.at("terms")) {
    op.add(t.at("pauli").get<std::string>(),
           complexd(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  return op;
}

void save_operator_json(const QubitOperator& op, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << operator_to_json(op) << "\n";
}

QubitOperator load_operator_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return operator_from_json(ss.str());
}

}  // namespace qderiv
