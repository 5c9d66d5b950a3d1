#pragma once

// Piecewise-constant propagation, squared trace fidelity and its gradient.
//
// The hot loop runs in scaled units: amplitudes in units of J, time in units
// of 1/J, Hamiltonian H/J. The exponent H_phys * dt_phys is identical.

#include "grape/controls.hpp"
#include "grape/models.hpp"
#include "grape/quantum_core.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace grape {

enum class GradientMode { Exact, FirstOrder };

inline GradientMode parse_gradient_mode(std::string_view s) {
  if (s == "exact") return GradientMode::Exact;
  if (s == "first_order") return GradientMode::FirstOrder;
  throw std::invalid_argument("unknown gradient mode '" + std::string(s) + "'");
}

inline std::string to_string(GradientMode m) {
  return m == GradientMode::Exact ? "exact" : "first_order";
}

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |tr(target^dagger U) / N|^2
inline double fidelity_sq(const ComplexMatrix& target, const ComplexMatrix& u) {
  if (target.rows() != u.rows() || target.cols() != u.cols() || target.rows() != target.cols())
    throw std::invalid_argument("fidelity_sq: dimension mismatch");
  const double n = static_cast<double>(target.rows());
  return std::norm((target.adjoint() * u).trace() / n);
}

inline double fidelity_sq(const GateTarget& target, const ComplexMatrix& u) {
  return fidelity_sq(target.matrix, u);
}

namespace detail {

struct SparseEntry {
  int row;
  int col;
  cplx value;
};

inline std::vector<SparseEntry> sparse_entries(const ComplexMatrix& m) {
  std::vector<SparseEntry> out;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > 0.0) out.push_back({i, j, m(i, j)});
  return out;
}

inline bool is_real_matrix(const ComplexMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

// sin(x)/x, stable near zero.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

/// Forward propagation with cached spectra, and the fidelity gradient that
/// reuses them. `D` is the Hilbert-space dimension.
template <int D>
class Kernel {
 public:
  using Mat = Eigen::Matrix<cplx, D, D>;
  using RealMat = Eigen::Matrix<double, D, D>;
  using Vec = Eigen::Matrix<double, D, 1>;

  Kernel(const ComplexMatrix& drift, const std::vector<ComplexMatrix>& channels,
         const ComplexMatrix& target)
      : drift_(drift), target_adj_(target.adjoint()) {
    real_ = is_real_matrix(drift);
    for (const auto& c : channels) {
      ch_.emplace_back(c);
      sparse_.push_back(sparse_entries(c));
      real_ = real_ && is_real_matrix(c);
    }
    if (real_) {
      drift_r_ = drift_.real();
      for (const auto& c : ch_) ch_r_.push_back(c.real());
    }
  }

  int channel_count() const { return static_cast<int>(ch_.size()); }

  /// Propagates the scaled amplitudes x (row-major M x K) and returns F^2.
  double evaluate(std::span<const double> x, int M, double dt) {
    const int K = channel_count();
    if (static_cast<int>(x.size()) != M * K)
      throw std::invalid_argument("amplitude array does not match M x K");
    M_ = M;
    dt_ = dt;
    V_.resize(M);
    lambda_.resize(M);
    U_.resize(M);
    A_.resize(M + 1);
    A_[0].setIdentity();

    Eigen::SelfAdjointEigenSolver<Mat> ces;
    Eigen::SelfAdjointEigenSolver<RealMat> res;
    for (int k = 0; k < M; ++k) {
      const double* row = x.data() + static_cast<std::size_t>(k) * K;
      if (real_) {
        RealMat h = drift_r_;
        for (int j = 0; j < K; ++j) h.noalias() += row[j] * ch_r_[j];
        res.compute(h);
        V_[k] = res.eigenvectors().template cast<cplx>();
        lambda_[k] = res.eigenvalues();
      } else {
        Mat h = drift_;
        for (int j = 0; j < K; ++j) h.noalias() += row[j] * ch_[j];
        ces.compute(h);
        V_[k] = ces.eigenvectors();
        lambda_[k] = ces.eigenvalues();
      }
      Eigen::Matrix<cplx, D, 1> phase;
      for (int a = 0; a < D; ++a) phase(a) = std::polar(1.0, -lambda_[k](a) * dt);
      U_[k].noalias() = (V_[k] * phase.asDiagonal()) * V_[k].adjoint();
      A_[k + 1].noalias() = U_[k] * A_[k];
    }
    overlap_ = (target_adj_ * A_[M]).trace();
    return std::norm(overlap_ / static_cast<double>(D));
  }

  /// dF^2/dx at the last evaluated point, row-major M x K.
  void gradient(GradientMode mode, std::span<double> out) const {
    const int K = channel_count();
    if (static_cast<int>(out.size()) != M_ * K)
      throw std::invalid_argument("gradient buffer does not match M x K");
    const double scale = 2.0 / (static_cast<double>(D) * D);
    const cplx g_conj = std::conj(overlap_);
    Mat B = target_adj_;  // target^dagger U_M ... U_{k+1}
    Mat C, W, P, Q;
    for (int k = M_ - 1; k >= 0; --k) {
      C.noalias() = A_[k] * B;
      double* row = out.data() + static_cast<std::size_t>(k) * K;
      if (mode == GradientMode::Exact) {
        // Frechet derivative of exp(-i H dt) in the eigenbasis of H.
        const Mat& V = V_[k];
        const Vec& lam = lambda_[k];
        W.noalias() = V.adjoint() * C * V;
        for (int a = 0; a < D; ++a) {
          for (int b = 0; b < D; ++b) {
            const double mean = 0.5 * (lam(a) + lam(b));
            const double half = 0.5 * (lam(a) - lam(b)) * dt_;
            const cplx phi = cplx(0.0, -dt_) * std::polar(1.0, -mean * dt_) * sinc(half);
            P(b, a) = W(b, a) * phi;  // stored transposed
          }
        }
        Q.noalias() = V * P * V.adjoint();
      } else {
        // Insertion of -i dt H_j U_k.
        Q.noalias() = cplx(0.0, -dt_) * (U_[k] * C);
      }
      for (int j = 0; j < K; ++j) {
        cplx tr = 0.0;
        for (const auto& e : sparse_[j]) tr += Q(e.col, e.row) * e.value;
        row[j] = scale * std::real(g_conj * tr);
      }
      B = B * U_[k];
    }
  }

  ComplexMatrix total() const { return A_[M_]; }
  ComplexMatrix slice(int k) const { return U_.at(k); }
  int intervals() const { return M_; }

 private:
  Mat drift_;
  Mat target_adj_;
  std::vector<Mat> ch_;
  std::vector<std::vector<SparseEntry>> sparse_;
  bool real_ = false;
  RealMat drift_r_;
  std::vector<RealMat> ch_r_;

  int M_ = 0;
  double dt_ = 0.0;
  std::vector<Mat, Eigen::aligned_allocator<Mat>> V_, U_, A_;
  std::vector<Vec, Eigen::aligned_allocator<Vec>> lambda_;
  cplx overlap_{};
};

}  // namespace detail

/// Runtime-dimension front end over the fixed-size kernels. Works in scaled units.
class FidelityEvaluator {
 public:
  FidelityEvaluator(const ControlModel& model, const ComplexMatrix& target) {
    if (target.rows() != model.dim() || target.cols() != model.dim())
      throw std::invalid_argument("target dimension does not match model");
    const ComplexMatrix drift = model.drift / model.J;
    std::vector<ComplexMatrix> channels;
    for (const auto& c : model.channels) channels.push_back(c.op);
    switch (model.dim()) {
      case 2: kernel_.emplace<detail::Kernel<2>>(drift, channels, target); break;
      case 4: kernel_.emplace<detail::Kernel<4>>(drift, channels, target); break;
      case 8: kernel_.emplace<detail::Kernel<8>>(drift, channels, target); break;
      default: throw std::invalid_argument("unsupported Hilbert-space dimension");
    }
  }

  double evaluate(std::span<const double> scaled, int M, double dt) {
    return std::visit(
        [&](auto& k) -> double {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, std::monostate>)
            return 0.0;
          else
            return k.evaluate(scaled, M, dt);
        },
        kernel_);
  }

  void gradient(GradientMode mode, std::span<double> out) const {
    std::visit(
        [&](const auto& k) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(k)>, std::monostate>)
            k.gradient(mode, out);
        },
        kernel_);
  }

  ComplexMatrix total() const {
    return std::visit(
        [](const auto& k) -> ComplexMatrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, std::monostate>)
            return {};
          else
            return k.total();
        },
        kernel_);
  }

  ComplexMatrix slice(int index) const {
    return std::visit(
        [&](const auto& k) -> ComplexMatrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, std::monostate>)
            return {};
          else
            return k.slice(index);
        },
        kernel_);
  }

 private:
  std::variant<std::monostate, detail::Kernel<2>, detail::Kernel<4>, detail::Kernel<8>> kernel_;
};

struct Propagation {
  ComplexMatrix total;
  std::vector<ComplexMatrix> slices;
};

namespace detail {

inline void check_grid(const ControlModel& model, const ControlGrid& grid) {
  if (grid.K != model.channel_count())
    throw std::invalid_argument("control grid has " + std::to_string(grid.K) +
                                " channels, model has " + std::to_string(model.channel_count()));
  if (grid.M < 1 || grid.amplitudes.size() != static_cast<std::size_t>(grid.M) * grid.K)
    throw std::invalid_argument("control grid storage does not match M x K");
}

inline std::vector<double> scaled_amplitudes(const ControlModel& model, const ControlGrid& grid) {
  std::vector<double> x(grid.amplitudes.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = grid.amplitudes[i] / model.J;
  return x;
}

}  // namespace detail

/// U(T) = U_M ... U_1 with every per-interval propagator retained.
inline Propagation propagate(const ControlModel& model, const ControlGrid& grid) {
  detail::check_grid(model, grid);
  FidelityEvaluator eval(model, ComplexMatrix::Identity(model.dim(), model.dim()));
  const auto x = detail::scaled_amplitudes(model, grid);
  eval.evaluate(x, grid.M, grid.dt());
  Propagation p;
  p.total = eval.total();
  p.slices.reserve(grid.M);
  for (int k = 0; k < grid.M; ++k) p.slices.push_back(eval.slice(k));
  return p;
}

inline double grid_fidelity(const ControlModel& model, const ControlGrid& grid,
                            const ComplexMatrix& target) {
  detail::check_grid(model, grid);
  FidelityEvaluator eval(model, target);
  return eval.evaluate(detail::scaled_amplitudes(model, grid), grid.M, grid.dt());
}

/// dF^2/du_j(t_k) with amplitudes in MHz; row-major M x K.
inline std::vector<double> gradient(const ControlModel& model, const ControlGrid& grid,
                                    const GateTarget& target, GradientMode mode) {
  detail::check_grid(model, grid);
  FidelityEvaluator eval(model, target.matrix);
  eval.evaluate(detail::scaled_amplitudes(model, grid), grid.M, grid.dt());
  std::vector<double> g(grid.amplitudes.size());
  eval.gradient(mode, g);
  for (auto& v : g) v /= model.J;
  return g;
}

}  // namespace grape
