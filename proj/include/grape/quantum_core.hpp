#pragma once

// Dense complex linear algebra for 1-3 qubit systems.
//
// Tensor ordering: qubit 1 is the leftmost Kronecker factor, so basis index
// bit (n - q) carries qubit q. Every module relies on this convention.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace grape {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

enum class PauliAxis { X, Y, Z, Plus, Minus };

inline PauliAxis parse_pauli_axis(std::string_view s) {
  if (s == "x") return PauliAxis::X;
  if (s == "y") return PauliAxis::Y;
  if (s == "z") return PauliAxis::Z;
  if (s == "plus" || s == "+") return PauliAxis::Plus;
  if (s == "minus" || s == "-") return PauliAxis::Minus;
  throw std::invalid_argument("unknown Pauli axis '" + std::string(s) + "'");
}

inline Eigen::Matrix2cd pauli(PauliAxis axis) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (axis) {
    case PauliAxis::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case PauliAxis::Y: m(0, 1) = -kI; m(1, 0) = kI; break;
    case PauliAxis::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    // sigma^+ = |0><1| raises toward the sigma_z = +1 state.
    case PauliAxis::Plus: m(0, 1) = 1.0; break;
    case PauliAxis::Minus: m(1, 0) = 1.0; break;
  }
  return m;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline int dim_for_qubits(int n) { return 1 << n; }

inline int qubits_for_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || dim < 2)
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two >= 2");
  return n;
}

/// Embeds a single-qubit matrix on `qubit` (1-based, leftmost = 1) of an n-qubit register.
inline ComplexMatrix embed(const ComplexMatrix& single, int qubit, int n) {
  if (n < 1 || n > 3)
    throw std::invalid_argument("qubit count must be in 1..3, got " + std::to_string(n));
  if (qubit < 1 || qubit > n)
    throw std::invalid_argument("qubit index " + std::to_string(qubit) + " out of range 1.." +
                                std::to_string(n));
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 1; q <= n; ++q) {
    if (q == qubit)
      out = kron(out, single);
    else
      out = kron(out, ComplexMatrix::Identity(2, 2));
  }
  return out;
}

inline ComplexMatrix embed_pauli(PauliAxis axis, int qubit, int n) {
  return embed(pauli(axis), qubit, n);
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return max_abs(m - m.adjoint());
}

inline double unitarity_error(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12) {
  return hermiticity_error(m) <= tol;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-10) {
  return unitarity_error(u) <= tol;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument(std::string(what) + " must be a non-empty square matrix");
}

/// exp(-i H dt) by spectral synthesis. H must be Hermitian to 1e-12 (relative to its scale).
inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double dt) {
  require_square(h, "Hamiltonian");
  if (!std::isfinite(dt)) throw std::invalid_argument("time step must be finite");
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_error(h) > 1e-12 * scale)
    throw std::invalid_argument("expm_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phase(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phase(i) = std::exp(-kI * (es.eigenvalues()(i) * dt));
  return v * phase.asDiagonal() * v.adjoint();
}

inline DensityMatrix density_from_state(const StateVector& psi) { return psi * psi.adjoint(); }

/// Computational basis state from a bit string such as "100" (qubit 1 first).
inline StateVector basis_state(std::string_view bits) {
  const int n = static_cast<int>(bits.size());
  if (n < 1 || n > 3) throw std::invalid_argument("basis state needs 1..3 qubits");
  int index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("basis label must be binary");
    index = index * 2 + (c - '0');
  }
  StateVector psi = StateVector::Zero(dim_for_qubits(n));
  psi(index) = 1.0;
  return psi;
}

/// Reduced state of a 3-qubit density matrix on the ordered pair `keep`.
/// The output keeps the pair's relative order (first kept qubit is leftmost).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::pair<int, int> keep) {
  if (rho.rows() != 8 || rho.cols() != 8)
    throw std::invalid_argument("partial_trace expects a 3-qubit (8x8) density matrix");
  const auto [a, b] = keep;
  const bool valid = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 1 && b == 3);
  if (!valid) throw std::invalid_argument("partial_trace: keep must be (1,2), (2,3) or (1,3)");
  const int traced = 6 - a - b;
  auto bit = [](int index, int qubit) { return (index >> (3 - qubit)) & 1; };
  DensityMatrix out = DensityMatrix::Zero(4, 4);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (bit(i, traced) != bit(j, traced)) continue;
      const int ri = 2 * bit(i, a) + bit(i, b);
      const int rj = 2 * bit(j, a) + bit(j, b);
      out(ri, rj) += rho(i, j);
    }
  }
  return out;
}

/// Partial transpose of a two-qubit operator over the first (left) qubit.
inline DensityMatrix partial_transpose_first(const DensityMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("partial transpose expects a 4x4 matrix");
  DensityMatrix out(4, 4);
  for (int a1 = 0; a1 < 2; ++a1)
    for (int b1 = 0; b1 < 2; ++b1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2) out(2 * a2 + b1, 2 * a1 + b2) = rho(2 * a1 + b1, 2 * a2 + b2);
  return out;
}

/// log2 of the trace norm of the partial transpose. The partial transpose of a
/// Hermitian matrix is Hermitian, so its singular values are |eigenvalues|.
inline double log_negativity(const DensityMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("log_negativity expects a two-qubit (4x4) density matrix");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-9 || std::abs(rho.trace().imag()) > 1e-9)
    throw std::invalid_argument("log_negativity: density matrix trace is not 1");
  if (hermiticity_error(rho) > 1e-10)
    throw std::invalid_argument("log_negativity: density matrix is not Hermitian");
  DensityMatrix pt = partial_transpose_first(rho);
  pt = 0.5 * (pt + pt.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(pt, Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().cwiseAbs().sum();
  const double value = std::log2(norm);
  if (value < 0.0 && value > -1e-12) return 0.0;
  return value;
}

/// Negativities of pairs (1,2) and (2,3) for a pure 3-qubit state.
inline std::pair<double, double> pair_negativities(const StateVector& psi) {
  if (psi.size() != 8) throw std::invalid_argument("pair negativities need a 3-qubit state");
  const StateVector normalized = psi / psi.norm();
  const DensityMatrix rho = density_from_state(normalized);
  return {log_negativity(partial_trace(rho, {1, 2})), log_negativity(partial_trace(rho, {2, 3}))};
}

}  // namespace grape
