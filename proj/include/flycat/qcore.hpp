#pragma once

// Dense pure-state and density-matrix algebra on small qubit registers
// (n <= 8), Pauli strings, Bell/projective measurements, Haar sampling.
//
// Index convention, used everywhere: qubit 0 is the MOST significant bit of
// the basis index, so |q0 q1 ... q_{n-1}> sits at index
// q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flycat/errors.hpp"
#include "flycat/rng.hpp"

namespace flycat {

using cx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 8;
inline constexpr double kStateTol = 1e-9;

inline std::size_t dim_of(int n) { return std::size_t{1} << n; }

// Bit of basis index `s` belonging to qubit `q` (q = 0 is the MSB).
inline int qubit_bit(std::size_t s, int q, int n) {
  return static_cast<int>((s >> (n - 1 - q)) & 1u);
}

// Z-basis parity of a basis index: +1 even, -1 odd.
inline int index_parity(std::size_t s) {
  return (std::popcount(s) & 1) ? -1 : +1;
}

// ---------------------------------------------------------------------------
// States

class PureState {
 public:
  PureState(int n, Vector amplitudes) : n_(n), amp_(std::move(amplitudes)) {
    require(n >= 1 && n <= kMaxQubits, "PureState: qubit count out of range");
    require(amp_.size() == static_cast<Eigen::Index>(dim_of(n)),
            "PureState: amplitude count != 2^n");
    require(std::abs(amp_.squaredNorm() - 1.0) < kStateTol,
            "PureState: not normalized");
  }

  static PureState basis_state(int n, std::size_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim_of(n)));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(n, std::move(v));
  }

  // |+>^{\otimes n}
  static PureState plus_state(int n) {
    const auto d = dim_of(n);
    Vector v = Vector::Constant(static_cast<Eigen::Index>(d),
                                1.0 / std::sqrt(static_cast<double>(d)));
    return PureState(n, std::move(v));
  }

  int num_qubits() const { return n_; }
  std::size_t dim() const { return dim_of(n_); }
  const Vector& amplitudes() const { return amp_; }
  cx amplitude(std::size_t i) const {
    return amp_(static_cast<Eigen::Index>(i));
  }

 private:
  int n_;
  Vector amp_;
};

inline cx inner(const PureState& a, const PureState& b) {
  require(a.num_qubits() == b.num_qubits(), "inner: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());
}

inline PureState tensor(const PureState& a, const PureState& b) {
  const int n = a.num_qubits() + b.num_qubits();
  require(n <= kMaxQubits, "tensor: register too large");
  Vector v(static_cast<Eigen::Index>(dim_of(n)));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      v(static_cast<Eigen::Index>((i << b.num_qubits()) | j)) =
          a.amplitude(i) * b.amplitude(j);
  return PureState(n, std::move(v));
}

class DensityMatrix {
 public:
  DensityMatrix(int n, Matrix entries) : n_(n), m_(std::move(entries)) {
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    require(n >= 1 && n <= kMaxQubits,
            "DensityMatrix: qubit count out of range");
    require(m_.rows() == d && m_.cols() == d, "DensityMatrix: wrong shape");
    require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() < kStateTol,
            "DensityMatrix: not Hermitian");
    require(std::abs(m_.trace().real() - 1.0) < kStateTol &&
                std::abs(m_.trace().imag()) < kStateTol,
            "DensityMatrix: trace != 1");
  }

  static DensityMatrix pure(const PureState& psi) {
    return DensityMatrix(psi.num_qubits(),
                         psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityMatrix maximally_mixed(int n) {
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    return DensityMatrix(
        n, Matrix::Identity(d, d) / static_cast<double>(dim_of(n)));
  }

  int num_qubits() const { return n_; }
  std::size_t dim() const { return dim_of(n_); }
  const Matrix& entries() const { return m_; }

  // Smallest eigenvalue; the positivity invariant is eigenvalues >= -1e-9
  // (floating-point round-off on channel compositions).
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_,
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  bool is_positive(double floor = -kStateTol) const {
    return min_eigenvalue() >= floor;
  }

 private:
  int n_;
  Matrix m_;
};

// ---------------------------------------------------------------------------
// Pauli strings

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

class PauliString {
 public:
  explicit PauliString(std::vector<PauliOp> ops) : ops_(std::move(ops)) {
    require(!ops_.empty() && ops_.size() <= kMaxQubits,
            "PauliString: bad length");
  }

  static PauliString identity(int n) {
    return PauliString(std::vector<PauliOp>(n, PauliOp::I));
  }

  // "ZIZ" -> Z on qubits 0 and 2 of a 3-qubit register.
  static PauliString from_label(const std::string& label) {
    std::vector<PauliOp> ops;
    ops.reserve(label.size());
    for (char c : label) {
      switch (c) {
        case 'I': ops.push_back(PauliOp::I); break;
        case 'X': ops.push_back(PauliOp::X); break;
        case 'Y': ops.push_back(PauliOp::Y); break;
        case 'Z': ops.push_back(PauliOp::Z); break;
        default: throw contract_error("PauliString: bad label char");
      }
    }
    return PauliString(std::move(ops));
  }

  static PauliString single(int n, int qubit, PauliOp op) {
    std::vector<PauliOp> ops(n, PauliOp::I);
    ops.at(qubit) = op;
    return PauliString(std::move(ops));
  }

  // `op` on every qubit listed in `qubits`.
  static PauliString on_qubits(int n, std::span<const int> qubits,
                               PauliOp op) {
    std::vector<PauliOp> ops(n, PauliOp::I);
    for (int q : qubits) ops.at(q) = op;
    return PauliString(std::move(ops));
  }

  int size() const { return static_cast<int>(ops_.size()); }
  PauliOp op(int q) const { return ops_.at(q); }

  int weight() const {
    int w = 0;
    for (auto o : ops_)
      if (o != PauliOp::I) ++w;
    return w;
  }

  bool is_identity() const { return weight() == 0; }

  // Product of two strings with the overall phase dropped (sufficient for
  // gauge manipulation of same-type strings, where the phase is +1).
  static PauliString multiply_up_to_phase(const PauliString& a,
                                          const PauliString& b) {
    require(a.size() == b.size(), "PauliString: length mismatch");
    static constexpr PauliOp table[4][4] = {
        {PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z},
        {PauliOp::X, PauliOp::I, PauliOp::Z, PauliOp::Y},
        {PauliOp::Y, PauliOp::Z, PauliOp::I, PauliOp::X},
        {PauliOp::Z, PauliOp::Y, PauliOp::X, PauliOp::I}};
    std::vector<PauliOp> ops(a.size());
    for (int q = 0; q < a.size(); ++q)
      ops[q] = table[static_cast<int>(a.op(q))][static_cast<int>(b.op(q))];
    return PauliString(std::move(ops));
  }

  std::string label() const {
    static constexpr char names[] = "IXYZ";
    std::string s;
    for (auto o : ops_) s += names[static_cast<int>(o)];
    return s;
  }

  Matrix to_matrix() const;

  bool operator==(const PauliString& other) const = default;

 private:
  std::vector<PauliOp> ops_;
};

namespace detail {

struct PauliAction {
  std::size_t flip_mask = 0;  // basis-index bits toggled by X/Y
  // phase(s) = i^{y_total} * prod over Y,Z qubits of (-1)^{bit}
  // evaluated on the *input* index s.
  int n = 0;
  std::size_t z_mask = 0;  // qubit bits contributing (-1)^{bit} (Z and Y)
  cx y_prefactor = 1.0;    // i^{#Y} with Y sign convention folded in

  explicit PauliAction(const PauliString& p) {
    n = p.size();
    int y_count = 0;
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << (n - 1 - q);
      switch (p.op(q)) {
        case PauliOp::I: break;
        case PauliOp::X: flip_mask |= bit; break;
        case PauliOp::Z: z_mask |= bit; break;
        case PauliOp::Y:
          flip_mask |= bit;
          z_mask |= bit;
          ++y_count;
          break;
      }
    }
    // Y|b> = i(-1)^b |1-b>, so each Y contributes a global i on top of the
    // (-1)^b handled through z_mask.
    static constexpr cx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    y_prefactor = i_pow[y_count & 3];
  }

  cx phase(std::size_t s) const {
    return (std::popcount(s & z_mask) & 1) ? -y_prefactor : y_prefactor;
  }
  std::size_t target(std::size_t s) const { return s ^ flip_mask; }
};

}  // namespace detail

inline Matrix PauliString::to_matrix() const {
  const auto d = static_cast<Eigen::Index>(dim_of(size()));
  detail::PauliAction act(*this);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index s = 0; s < d; ++s)
    m(static_cast<Eigen::Index>(act.target(s)), s) = act.phase(s);
  return m;
}

inline PureState apply_pauli(const PureState& psi, const PauliString& p) {
  require(p.size() == psi.num_qubits(), "apply_pauli: length mismatch");
  detail::PauliAction act(p);
  Vector out(psi.amplitudes().size());
  for (std::size_t s = 0; s < psi.dim(); ++s)
    out(static_cast<Eigen::Index>(act.target(s))) =
        act.phase(s) * psi.amplitude(s);
  return PureState(psi.num_qubits(), std::move(out));
}

inline DensityMatrix apply_pauli(const DensityMatrix& rho,
                                 const PauliString& p) {
  require(p.size() == rho.num_qubits(), "apply_pauli: length mismatch");
  const Matrix u = p.to_matrix();
  return DensityMatrix(rho.num_qubits(), u * rho.entries() * u.adjoint());
}

inline cx expectation(const PureState& psi, const PauliString& p) {
  return inner(psi, apply_pauli(psi, p));
}

inline cx expectation(const DensityMatrix& rho, const PauliString& p) {
  const Matrix u = p.to_matrix();
  return (u * rho.entries()).trace();
}

// ---------------------------------------------------------------------------
// Gates used for basis changes

// Hadamard on one qubit.
inline PureState apply_hadamard(const PureState& psi, int qubit) {
  const int n = psi.num_qubits();
  require(qubit >= 0 && qubit < n, "apply_hadamard: qubit out of range");
  const std::size_t bit = std::size_t{1} << (n - 1 - qubit);
  const double r = 1.0 / std::sqrt(2.0);
  Vector out(psi.amplitudes().size());
  for (std::size_t s = 0; s < psi.dim(); ++s) {
    if (s & bit) continue;
    const cx a0 = psi.amplitude(s);
    const cx a1 = psi.amplitude(s | bit);
    out(static_cast<Eigen::Index>(s)) = r * (a0 + a1);
    out(static_cast<Eigen::Index>(s | bit)) = r * (a0 - a1);
  }
  return PureState(n, std::move(out));
}

// H^{\otimes n} as a matrix (real, symmetric, self-inverse). The cache is
// built once under the magic-static lock, so concurrent use is safe.
inline const Matrix& hadamard_all_matrix(int n) {
  static const std::array<Matrix, kMaxQubits + 1> cache = [] {
    std::array<Matrix, kMaxQubits + 1> out;
    for (int nq = 1; nq <= kMaxQubits; ++nq) {
      const auto d = static_cast<Eigen::Index>(dim_of(nq));
      Matrix& m = out[nq];
      m.resize(d, d);
      const double scale = 1.0 / std::sqrt(static_cast<double>(dim_of(nq)));
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
          m(r, c) = (std::popcount(static_cast<std::size_t>(r) &
                                   static_cast<std::size_t>(c)) &
                     1)
                        ? -scale
                        : scale;
    }
    return out;
  }();
  return cache.at(n);
}

inline PureState apply_hadamard_all(const PureState& psi) {
  PureState out = psi;
  for (int q = 0; q < psi.num_qubits(); ++q) out = apply_hadamard(out, q);
  return out;
}

inline DensityMatrix apply_hadamard_all(const DensityMatrix& rho) {
  const Matrix& h = hadamard_all_matrix(rho.num_qubits());
  return DensityMatrix(rho.num_qubits(), h * rho.entries() * h);
}

// ---------------------------------------------------------------------------
// Measurements

enum class BellLabel : int {
  PhiPlus = 0,   // (|00> + |11>)/sqrt(2)
  PsiPlus = 1,   // (|01> + |10>)/sqrt(2)
  PsiMinus = 2,  // (|01> - |10>)/sqrt(2)
  PhiMinus = 3,  // (|00> - |11>)/sqrt(2)
};

inline const char* bell_label_name(BellLabel b) {
  static constexpr const char* names[] = {"Phi+", "Psi+", "Psi-", "Phi-"};
  return names[static_cast<int>(b)];
}

// Amplitudes of the four Bell components of the (i, j) pair, in the order of
// BellLabel, for each configuration of the remaining qubits.
namespace detail {
inline std::array<cx, 4> bell_components(cx a00, cx a01, cx a10, cx a11) {
  const double r = 1.0 / std::sqrt(2.0);
  return {r * (a00 + a11), r * (a01 + a10), r * (a01 - a10), r * (a00 - a11)};
}
inline std::array<cx, 4> bell_basis_coeffs(BellLabel b) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (b) {
    case BellLabel::PhiPlus: return {r, 0, 0, r};
    case BellLabel::PsiPlus: return {0, r, r, 0};
    case BellLabel::PsiMinus: return {0, r, -r, 0};
    case BellLabel::PhiMinus: return {r, 0, 0, -r};
  }
  return {};
}
}  // namespace detail

inline std::array<double, 4> bell_probabilities(const PureState& psi, int i,
                                                int j) {
  const int n = psi.num_qubits();
  require(i != j && i >= 0 && j >= 0 && i < n && j < n,
          "bell_probabilities: bad qubit pair");
  const std::size_t bi = std::size_t{1} << (n - 1 - i);
  const std::size_t bj = std::size_t{1} << (n - 1 - j);
  std::array<double, 4> p{};
  for (std::size_t s = 0; s < psi.dim(); ++s) {
    if (s & (bi | bj)) continue;  // s has the pair bits cleared
    const auto comp = detail::bell_components(
        psi.amplitude(s), psi.amplitude(s | bj), psi.amplitude(s | bi),
        psi.amplitude(s | bi | bj));
    for (int b = 0; b < 4; ++b) p[b] += std::norm(comp[b]);
  }
  return p;
}

// Projects the (i, j) pair onto Bell state `label`; returns the branch
// probability and the renormalized post-state (pair left in the Bell state).
inline std::pair<double, PureState> bell_project(const PureState& psi, int i,
                                                 int j, BellLabel label) {
  const int n = psi.num_qubits();
  require(i != j && i >= 0 && j >= 0 && i < n && j < n,
          "bell_project: bad qubit pair");
  const std::size_t bi = std::size_t{1} << (n - 1 - i);
  const std::size_t bj = std::size_t{1} << (n - 1 - j);
  const auto basis = detail::bell_basis_coeffs(label);
  Vector out = Vector::Zero(psi.amplitudes().size());
  double prob = 0.0;
  for (std::size_t s = 0; s < psi.dim(); ++s) {
    if (s & (bi | bj)) continue;
    const auto comp = detail::bell_components(
        psi.amplitude(s), psi.amplitude(s | bj), psi.amplitude(s | bi),
        psi.amplitude(s | bi | bj));
    const cx overlap = comp[static_cast<int>(label)];
    prob += std::norm(overlap);
    out(static_cast<Eigen::Index>(s)) = overlap * basis[0];
    out(static_cast<Eigen::Index>(s | bj)) = overlap * basis[1];
    out(static_cast<Eigen::Index>(s | bi)) = overlap * basis[2];
    out(static_cast<Eigen::Index>(s | bi | bj)) = overlap * basis[3];
  }
  if (prob <= 0.0) return {0.0, psi};
  out /= std::sqrt(prob);
  return {prob, PureState(n, std::move(out))};
}

// Born-rule Bell measurement of the (i, j) pair. Zero-probability branches
// are never returned.
inline std::pair<BellLabel, PureState> bell_measure(const PureState& psi,
                                                    int i, int j,
                                                    RandomSource& rng) {
  const auto p = bell_probabilities(psi, i, j);
  const auto pick = rng.categorical(std::span<const double>(p));
  auto [prob, post] = bell_project(psi, i, j, static_cast<BellLabel>(pick));
  return {static_cast<BellLabel>(pick), std::move(post)};
}

// <psi| rho |psi>, clamped to [0, 1] within 1e-9.
inline double fidelity(const DensityMatrix& rho, const PureState& psi) {
  require(rho.num_qubits() == psi.num_qubits(), "fidelity: dim mismatch");
  const cx v = psi.amplitudes().dot(rho.entries() * psi.amplitudes());
  require(std::abs(v.imag()) < 1e-8, "fidelity: non-real value");
  double f = v.real();
  require(f > -kStateTol && f < 1.0 + kStateTol, "fidelity: out of [0,1]");
  return std::clamp(f, 0.0, 1.0);
}

inline double fidelity(const PureState& a, const PureState& b) {
  return std::norm(inner(a, b));
}

// ---------------------------------------------------------------------------
// Haar sampling

inline PureState haar_state(int n, RandomSource& rng) {
  Vector v(static_cast<Eigen::Index>(dim_of(n)));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = cx(rng.normal(), rng.normal());
  v /= v.norm();
  return PureState(n, std::move(v));
}

inline PureState haar_two_qubit(RandomSource& rng) {
  return haar_state(2, rng);
}

// ---------------------------------------------------------------------------
// Partial trace

namespace detail {
// Scatters kept-register and dropped-register indices into a full index.
struct TraceIndexer {
  int n, m;
  std::vector<int> keep, drop;

  TraceIndexer(int n_qubits, std::span<const int> keep_list)
      : n(n_qubits), m(static_cast<int>(keep_list.size())) {
    require(m >= 1 && m <= n, "partial_trace: bad keep list");
    std::vector<bool> kept(n, false);
    for (int q : keep_list) {
      require(q >= 0 && q < n && !kept[q], "partial_trace: bad keep list");
      kept[q] = true;
      keep.push_back(q);
    }
    for (int q = 0; q < n; ++q)
      if (!kept[q]) drop.push_back(q);
  }

  std::size_t full_index(std::size_t k, std::size_t d) const {
    std::size_t s = 0;
    for (int a = 0; a < m; ++a)
      if ((k >> (m - 1 - a)) & 1u) s |= std::size_t{1} << (n - 1 - keep[a]);
    for (int a = 0; a < n - m; ++a)
      if ((d >> (n - m - 1 - a)) & 1u)
        s |= std::size_t{1} << (n - 1 - drop[a]);
    return s;
  }
};
}  // namespace detail

// Reduced state of the kept qubits, contracted directly from the
// amplitudes (no intermediate full-register matrix).
inline DensityMatrix partial_trace(const PureState& psi,
                                   std::span<const int> keep) {
  const detail::TraceIndexer ix(psi.num_qubits(), keep);
  const auto dk = dim_of(ix.m);
  const auto dd = dim_of(ix.n - ix.m);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk),
                            static_cast<Eigen::Index>(dk));
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      cx sum = 0.0;
      for (std::size_t d = 0; d < dd; ++d)
        sum += psi.amplitude(ix.full_index(r, d)) *
               std::conj(psi.amplitude(ix.full_index(c, d)));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  return DensityMatrix(ix.m, std::move(out));
}

// Keeps the listed qubits (ascending order preserved as the new register).
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   std::span<const int> keep) {
  const detail::TraceIndexer ix(rho.num_qubits(), keep);
  const auto dk = dim_of(ix.m);
  const auto dd = dim_of(ix.n - ix.m);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk),
                            static_cast<Eigen::Index>(dk));
  for (std::size_t r = 0; r < dk; ++r)
    for (std::size_t c = 0; c < dk; ++c) {
      cx sum = 0.0;
      for (std::size_t d = 0; d < dd; ++d)
        sum += rho.entries()(
            static_cast<Eigen::Index>(ix.full_index(r, d)),
            static_cast<Eigen::Index>(ix.full_index(c, d)));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  return DensityMatrix(ix.m, std::move(out));
}

}  // namespace flycat
