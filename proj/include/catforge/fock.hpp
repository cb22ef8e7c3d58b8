#pragma once

// Truncated Fock-space linear algebra for one or two bosonic modes.
//
// A single mode with cutoff N is spanned by |0>..|N> (dimension N+1). Two
// modes use the same cutoff per mode and mode-major ordering, so the basis
// vector |n+>|n-> sits at index n+ * (N+1) + n-.
//
// Conventions: x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), vacuum
// variance 1/2. Squeezing S(eps) = exp[(r/2)(a^dag^2 - a^2)] with eps = tanh r,
// which squeezes p and stretches x for eps > 0.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace catforge {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr int kDefaultCutoff = 30;
inline constexpr int kDefaultTwoModeCutoff = 20;
inline constexpr int kMinCutoff = 2;

/// Maximum probability weight a generator may lose to truncation.
inline constexpr double kTailTolerance = 1e-8;

/// Dimension of the truncated space for the given cutoff and mode count.
Eigen::Index fock_dim(int cutoff, int n_modes);

/// Index of |n_plus>|n_minus> in a two-mode vector.
inline Eigen::Index two_mode_index(int n_plus, int n_minus, int cutoff) {
  return static_cast<Eigen::Index>(n_plus) * (cutoff + 1) + n_minus;
}

class PureState {
 public:
  PureState(CVector amplitudes, int cutoff, int n_modes = 1);

  static PureState fock(int n, int cutoff);
  static PureState fock2(int n_plus, int n_minus, int cutoff);

  const CVector& amplitudes() const { return amplitudes_; }
  int cutoff() const { return cutoff_; }
  int n_modes() const { return n_modes_; }
  Eigen::Index dim() const { return amplitudes_.size(); }

  Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }
  Complex at(int n_plus, int n_minus) const;

  double norm() const { return amplitudes_.norm(); }

  /// Throws ZeroState if the vector vanishes.
  PureState normalized() const;

 private:
  CVector amplitudes_;
  int cutoff_;
  int n_modes_;
};

struct Validity {
  double hermiticity_defect;
  double trace;
  double min_eigenvalue;

  bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10,
          double eig_tol = 1e-8) const;
};

class DensityMatrix {
 public:
  DensityMatrix(CMatrix entries, int cutoff, int n_modes = 1);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int cutoff);

  const CMatrix& entries() const { return entries_; }
  int cutoff() const { return cutoff_; }
  int n_modes() const { return n_modes_; }
  Eigen::Index dim() const { return entries_.rows(); }

  Complex operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }

  double trace() const { return entries_.trace().real(); }

  Validity validity() const;

  /// Throws InvalidArgument describing the first violated invariant.
  void validate() const;

  /// Divides by the trace; throws ZeroState for a vanishing trace.
  DensityMatrix normalized() const;

 private:
  CMatrix entries_;
  int cutoff_;
  int n_modes_;
};

class OperatorMatrix {
 public:
  OperatorMatrix(CMatrix entries, int cutoff, int n_modes = 1);

  const CMatrix& entries() const { return entries_; }
  int cutoff() const { return cutoff_; }
  int n_modes() const { return n_modes_; }

  /// Plain matrix-vector product, no renormalization.
  PureState apply(const PureState& psi) const;
  OperatorMatrix adjoint() const;

 private:
  CMatrix entries_;
  int cutoff_;
  int n_modes_;
};

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

/// Squeezing parameter eps = tanh r, |eps| < 1.
class Squeeze {
 public:
  explicit Squeeze(double eps);

  double eps() const { return eps_; }
  double r() const;
  double cosh_r() const;
  double sinh_r() const;
  /// eps / (1 - eps^2) = sinh r cosh r = <0|S^dag a^2 S|0>.
  double beta() const { return eps_ / (1.0 - eps_ * eps_); }

 private:
  double eps_;
};

/// Squeezed-quadrature noise reduction in dB, -10 log10(e^{-2r}).
double squeezing_db(Squeeze s);

enum class Ladder { annihilate, create };
enum class Parity { even, odd };
enum class KeepMode { plus, minus };

OperatorMatrix ladder(int cutoff, Ladder kind);

/// S(eps)|0>, checked against the tail tolerance, then renormalized.
PureState squeezed_vacuum(Squeeze s, int cutoff);

/// Matrix elements <m|S(eps)|n> for m, n <= cutoff. Columns are exact
/// projections of S|n> (not the exponential of a truncated generator), so
/// high columns lose norm to the truncated tail.
OperatorMatrix squeeze_operator(Squeeze s, int cutoff);

PureState coherent_state(Complex alpha, int cutoff);

/// (|alpha> +/- |-alpha>) / sqrt(N+/-).
PureState cat_state(Complex alpha, Parity parity, int cutoff);

PureState tensor(const PureState& a, const PureState& b);

DensityMatrix partial_trace(const DensityMatrix& rho, KeepMode keep);

/// Partial trace of a pure two-mode state without forming the full
/// two-mode density matrix.
DensityMatrix partial_trace(const PureState& psi, KeepMode keep);

/// Single-mode photon loss with transmissivity eta (beam splitter against
/// vacuum), as the binomial Kraus map.
DensityMatrix apply_loss(const DensityMatrix& rho, double eta);

/// Crops or zero-pads a single-mode state/operator to a new cutoff. No
/// renormalization.
PureState resize(const PureState& psi, int cutoff);
DensityMatrix resize(const DensityMatrix& rho, int cutoff);

namespace detail {

/// Unnormalized exact amplitudes of S(eps)|0> on |0>..|cutoff>.
CVector squeezed_vacuum_amplitudes(double eps, int cutoff);

/// Unnormalized exact amplitudes of |alpha> on |0>..|cutoff>.
CVector coherent_amplitudes(Complex alpha, int cutoff);

/// Exact amplitudes of the normalized cat (|alpha> +- |-alpha>)/sqrt(N) on
/// |0>..|cutoff>, without renormalizing the truncation.
CVector cat_amplitudes(Complex alpha, Parity parity, int cutoff);

/// Exact projection of a^2 |v> onto |0>..|cutoff>, given v on
/// |0>..|cutoff+2>.
CVector annihilate_twice(const CVector& padded, int cutoff);

double tail_weight(const CVector& exact_amplitudes);

}  // namespace detail

}  // namespace catforge
