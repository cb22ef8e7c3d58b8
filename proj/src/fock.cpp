#include "catforge/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "catforge/errors.hpp"

namespace catforge {

namespace {

void require_cutoff(int cutoff) {
  if (cutoff < kMinCutoff) {
    throw InvalidArgument("cutoff must be >= " + std::to_string(kMinCutoff) +
                          ", got " + std::to_string(cutoff));
  }
}

void require_modes(int n_modes) {
  if (n_modes != 1 && n_modes != 2) {
    throw InvalidArgument("n_modes must be 1 or 2, got " +
                          std::to_string(n_modes));
  }
}

void require_tail(double tail, const char* what, int cutoff) {
  if (!(tail < kTailTolerance)) {
    throw CutoffTooSmall(std::string(what) + ": truncated tail weight " +
                         std::to_string(tail) + " at cutoff " +
                         std::to_string(cutoff) + " exceeds tolerance");
  }
}

}  // namespace

Eigen::Index fock_dim(int cutoff, int n_modes) {
  const Eigen::Index d = cutoff + 1;
  return n_modes == 2 ? d * d : d;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(CVector amplitudes, int cutoff, int n_modes)
    : amplitudes_(std::move(amplitudes)), cutoff_(cutoff), n_modes_(n_modes) {
  require_cutoff(cutoff);
  require_modes(n_modes);
  if (amplitudes_.size() != fock_dim(cutoff, n_modes)) {
    throw InvalidArgument("amplitude vector has length " +
                          std::to_string(amplitudes_.size()) + ", expected " +
                          std::to_string(fock_dim(cutoff, n_modes)));
  }
}

PureState PureState::fock(int n, int cutoff) {
  require_cutoff(cutoff);
  if (n < 0 || n > cutoff) {
    throw InvalidArgument("Fock index out of range");
  }
  CVector v = CVector::Zero(cutoff + 1);
  v[n] = 1.0;
  return PureState(std::move(v), cutoff, 1);
}

PureState PureState::fock2(int n_plus, int n_minus, int cutoff) {
  require_cutoff(cutoff);
  if (n_plus < 0 || n_plus > cutoff || n_minus < 0 || n_minus > cutoff) {
    throw InvalidArgument("Fock index out of range");
  }
  CVector v = CVector::Zero(fock_dim(cutoff, 2));
  v[two_mode_index(n_plus, n_minus, cutoff)] = 1.0;
  return PureState(std::move(v), cutoff, 2);
}

Complex PureState::at(int n_plus, int n_minus) const {
  if (n_modes_ != 2) {
    throw InvalidArgument("at(n_plus, n_minus) requires a two-mode state");
  }
  return amplitudes_[two_mode_index(n_plus, n_minus, cutoff_)];
}

PureState PureState::normalized() const {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw ZeroState("cannot normalize a zero state");
  }
  return PureState(amplitudes_ / nrm, cutoff_, n_modes_);
}

// ---------------------------------------------------------------------------
// DensityMatrix

bool Validity::ok(double herm_tol, double trace_tol, double eig_tol) const {
  return hermiticity_defect <= herm_tol && std::abs(trace - 1.0) <= trace_tol &&
         min_eigenvalue >= -eig_tol;
}

DensityMatrix::DensityMatrix(CMatrix entries, int cutoff, int n_modes)
    : entries_(std::move(entries)), cutoff_(cutoff), n_modes_(n_modes) {
  require_cutoff(cutoff);
  require_modes(n_modes);
  const auto d = fock_dim(cutoff, n_modes);
  if (entries_.rows() != d || entries_.cols() != d) {
    throw InvalidArgument("density matrix has shape " +
                          std::to_string(entries_.rows()) + "x" +
                          std::to_string(entries_.cols()) + ", expected " +
                          std::to_string(d) + "x" + std::to_string(d));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint(), psi.cutoff(), psi.n_modes());
}

DensityMatrix DensityMatrix::maximally_mixed(int cutoff) {
  require_cutoff(cutoff);
  const auto d = fock_dim(cutoff, 1);
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d),
                       cutoff, 1);
}

Validity DensityMatrix::validity() const {
  Validity v{};
  v.hermiticity_defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  v.trace = trace();
  const CMatrix herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  v.min_eigenvalue = es.eigenvalues().minCoeff();
  return v;
}

void DensityMatrix::validate() const {
  const Validity v = validity();
  if (v.hermiticity_defect > 1e-10) {
    throw InvalidArgument("density matrix is not Hermitian (defect " +
                          std::to_string(v.hermiticity_defect) + ")");
  }
  if (std::abs(v.trace - 1.0) > 1e-10) {
    throw InvalidArgument("density matrix trace is " +
                          std::to_string(v.trace));
  }
  if (v.min_eigenvalue < -1e-8) {
    throw InvalidArgument("density matrix has negative eigenvalue " +
                          std::to_string(v.min_eigenvalue));
  }
}

DensityMatrix DensityMatrix::normalized() const {
  const double tr = trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw ZeroState("cannot normalize a density matrix with trace " +
                    std::to_string(tr));
  }
  return DensityMatrix(entries_ / tr, cutoff_, n_modes_);
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(CMatrix entries, int cutoff, int n_modes)
    : entries_(std::move(entries)), cutoff_(cutoff), n_modes_(n_modes) {
  require_cutoff(cutoff);
  require_modes(n_modes);
  const auto d = fock_dim(cutoff, n_modes);
  if (entries_.rows() != d || entries_.cols() != d) {
    throw InvalidArgument("operator matrix has wrong shape");
  }
}

PureState OperatorMatrix::apply(const PureState& psi) const {
  if (psi.cutoff() != cutoff_ || psi.n_modes() != n_modes_) {
    throw InvalidArgument("operator and state live in different spaces");
  }
  return PureState(entries_ * psi.amplitudes(), cutoff_, n_modes_);
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(entries_.adjoint(), cutoff_, n_modes_);
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  if (lhs.cutoff() != rhs.cutoff() || lhs.n_modes() != rhs.n_modes()) {
    throw InvalidArgument("operator product across different spaces");
  }
  return OperatorMatrix(lhs.entries() * rhs.entries(), lhs.cutoff(),
                        lhs.n_modes());
}

// ---------------------------------------------------------------------------
// Squeeze

Squeeze::Squeeze(double eps) : eps_(eps) {
  if (!std::isfinite(eps) || !(std::abs(eps) < 1.0)) {
    throw InvalidArgument("squeezing parameter must satisfy |eps| < 1, got " +
                          std::to_string(eps));
  }
}

double Squeeze::r() const { return std::atanh(eps_); }
double Squeeze::cosh_r() const { return 1.0 / std::sqrt(1.0 - eps_ * eps_); }
double Squeeze::sinh_r() const { return eps_ * cosh_r(); }

double squeezing_db(Squeeze s) {
  return -10.0 * std::log10(std::exp(-2.0 * std::abs(s.r())));
}

// ---------------------------------------------------------------------------
// Generators

namespace detail {

CVector squeezed_vacuum_amplitudes(double eps, int cutoff) {
  CVector c = CVector::Zero(cutoff + 1);
  // c0 = 1/sqrt(cosh r); c_{2m} = c_{2m-2} eps sqrt((2m-1)/(2m)).
  double amp = std::pow(1.0 - eps * eps, 0.25);
  c[0] = amp;
  for (int n = 2; n <= cutoff; n += 2) {
    amp *= eps * std::sqrt(static_cast<double>(n - 1) / n);
    c[n] = amp;
  }
  return c;
}

CVector coherent_amplitudes(Complex alpha, int cutoff) {
  CVector c(cutoff + 1);
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  c[0] = amp;
  for (int n = 1; n <= cutoff; ++n) {
    amp *= alpha / std::sqrt(static_cast<double>(n));
    c[n] = amp;
  }
  return c;
}

CVector cat_amplitudes(Complex alpha, Parity parity, int cutoff) {
  const double mag2 = std::norm(alpha);
  const bool even = parity == Parity::even;
  const double norm_sq =
      even ? 2.0 * (1.0 + std::exp(-2.0 * mag2)) : -2.0 * std::expm1(-2.0 * mag2);
  if (!(norm_sq > 0.0)) {
    throw ZeroState("odd cat state with alpha = 0 is the zero vector");
  }
  const CVector coh = coherent_amplitudes(alpha, cutoff);
  CVector c = CVector::Zero(cutoff + 1);
  const double scale = 2.0 / std::sqrt(norm_sq);
  for (int n = even ? 0 : 1; n <= cutoff; n += 2) {
    c[n] = scale * coh[n];
  }
  return c;
}

CVector annihilate_twice(const CVector& padded, int cutoff) {
  CVector out(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) {
    out[n] = std::sqrt(static_cast<double>(n + 1) * (n + 2)) * padded[n + 2];
  }
  return out;
}

double tail_weight(const CVector& exact_amplitudes) {
  return std::max(0.0, 1.0 - exact_amplitudes.squaredNorm());
}

}  // namespace detail

OperatorMatrix ladder(int cutoff, Ladder kind) {
  require_cutoff(cutoff);
  const auto d = fock_dim(cutoff, 1);
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n <= cutoff; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  if (kind == Ladder::create) {
    a.adjointInPlace();
  }
  return OperatorMatrix(std::move(a), cutoff, 1);
}

PureState squeezed_vacuum(Squeeze s, int cutoff) {
  require_cutoff(cutoff);
  CVector c = detail::squeezed_vacuum_amplitudes(s.eps(), cutoff);
  require_tail(detail::tail_weight(c), "squeezed vacuum", cutoff);
  return PureState(std::move(c), cutoff).normalized();
}

OperatorMatrix squeeze_operator(Squeeze s, int cutoff) {
  if (cutoff < 4) {
    throw InvalidArgument("squeeze_operator needs cutoff >= 4");
  }
  require_tail(
      detail::tail_weight(detail::squeezed_vacuum_amplitudes(s.eps(), cutoff)),
      "squeeze operator", cutoff);

  // Columns from S|n+1> = (cosh r a^dag - sinh r a) S|n> / sqrt(n+1). Working
  // on a padded space of size M, truncation errors enter at index M and move
  // down one index per step, so M = 2*cutoff + 2 keeps the first cutoff+1 rows
  // exact for all cutoff+1 columns.
  const int big = 2 * cutoff + 2;
  const double ch = s.cosh_r();
  const double sh = s.sinh_r();
  std::vector<double> sqrt_n(big + 2);
  for (int n = 0; n < big + 2; ++n) {
    sqrt_n[n] = std::sqrt(static_cast<double>(n));
  }

  const auto d = fock_dim(cutoff, 1);
  CMatrix out(d, d);
  CVector col = detail::squeezed_vacuum_amplitudes(s.eps(), big);
  CVector next(big + 1);
  out.col(0) = col.head(d);
  for (int n = 0; n < cutoff; ++n) {
    for (int m = 0; m <= big; ++m) {
      Complex v = 0.0;
      if (m > 0) v += ch * sqrt_n[m] * col[m - 1];
      if (m < big) v -= sh * sqrt_n[m + 1] * col[m + 1];
      next[m] = v / sqrt_n[n + 1];
    }
    col.swap(next);
    out.col(n + 1) = col.head(d);
  }
  return OperatorMatrix(std::move(out), cutoff, 1);
}

PureState coherent_state(Complex alpha, int cutoff) {
  require_cutoff(cutoff);
  if (std::norm(alpha) > cutoff / 4.0) {
    throw CutoffTooSmall("coherent state: |alpha|^2 = " +
                         std::to_string(std::norm(alpha)) +
                         " exceeds cutoff/4 at cutoff " +
                         std::to_string(cutoff));
  }
  CVector c = detail::coherent_amplitudes(alpha, cutoff);
  require_tail(detail::tail_weight(c), "coherent state", cutoff);
  return PureState(std::move(c), cutoff).normalized();
}

PureState cat_state(Complex alpha, Parity parity, int cutoff) {
  require_cutoff(cutoff);
  const double mag2 = std::norm(alpha);
  if (mag2 > cutoff / 4.0) {
    throw CutoffTooSmall("cat state: |alpha|^2 = " + std::to_string(mag2) +
                         " exceeds cutoff/4 at cutoff " +
                         std::to_string(cutoff));
  }
  CVector c = detail::cat_amplitudes(alpha, parity, cutoff);
  require_tail(detail::tail_weight(c), "cat state", cutoff);
  return PureState(std::move(c), cutoff).normalized();
}

PureState tensor(const PureState& a, const PureState& b) {
  if (a.n_modes() != 1 || b.n_modes() != 1) {
    throw InvalidArgument("tensor expects two single-mode states");
  }
  if (a.cutoff() != b.cutoff()) {
    throw InvalidArgument("tensor: cutoff mismatch (" +
                          std::to_string(a.cutoff()) + " vs " +
                          std::to_string(b.cutoff()) + ")");
  }
  const int cutoff = a.cutoff();
  const auto d = fock_dim(cutoff, 1);
  CVector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v.segment(i * d, d) = a[i] * b.amplitudes();
  }
  return PureState(std::move(v), cutoff, 2);
}

DensityMatrix partial_trace(const DensityMatrix& rho, KeepMode keep) {
  if (rho.n_modes() != 2) {
    throw InvalidArgument("partial_trace expects a two-mode density matrix");
  }
  const int cutoff = rho.cutoff();
  const auto d = fock_dim(cutoff, 1);
  const CMatrix& r = rho.entries();
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        acc += keep == KeepMode::plus ? r(i * d + k, j * d + k)
                                      : r(k * d + i, k * d + j);
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(std::move(out), cutoff, 1);
}

DensityMatrix partial_trace(const PureState& psi, KeepMode keep) {
  if (psi.n_modes() != 2) {
    throw InvalidArgument("partial_trace expects a two-mode state");
  }
  const int cutoff = psi.cutoff();
  const auto d = fock_dim(cutoff, 1);
  // Column-major map: m(n_minus, n_plus) = psi[n_plus * d + n_minus].
  const Eigen::Map<const CMatrix> m(psi.amplitudes().data(), d, d);
  CMatrix out = keep == KeepMode::plus ? CMatrix(m.transpose() * m.conjugate())
                                       : CMatrix(m * m.adjoint());
  return DensityMatrix(std::move(out), cutoff, 1);
}

DensityMatrix apply_loss(const DensityMatrix& rho, double eta) {
  if (rho.n_modes() != 1) {
    throw InvalidArgument("apply_loss acts on a single mode");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("loss efficiency eta must lie in [0, 1], got " +
                          std::to_string(eta));
  }
  const int cutoff = rho.cutoff();
  const auto d = fock_dim(cutoff, 1);
  // amp(n, k) = sqrt(C(n,k) eta^(n-k) (1-eta)^k): Kraus K_k maps |n> to
  // amp(n, k) |n-k>.
  Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n <= cutoff; ++n) {
    for (int k = 0; k <= n; ++k) {
      const double log_choose =
          std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      amp(n, k) = std::sqrt(std::exp(log_choose) * std::pow(eta, n - k) *
                            std::pow(1.0 - eta, k));
    }
  }
  const CMatrix& in = rho.entries();
  CMatrix out = CMatrix::Zero(d, d);
  for (int n = 0; n <= cutoff; ++n) {
    for (int m = 0; m <= cutoff; ++m) {
      const Complex v = in(n, m);
      if (v == Complex(0.0)) continue;
      const int kmax = std::min(n, m);
      for (int k = 0; k <= kmax; ++k) {
        out(n - k, m - k) += amp(n, k) * amp(m, k) * v;
      }
    }
  }
  return DensityMatrix(std::move(out), cutoff, 1);
}

PureState resize(const PureState& psi, int cutoff) {
  if (psi.n_modes() != 1) {
    throw InvalidArgument("resize supports single-mode states only");
  }
  require_cutoff(cutoff);
  const auto d = fock_dim(cutoff, 1);
  CVector v = CVector::Zero(d);
  const auto keep = std::min(d, psi.dim());
  v.head(keep) = psi.amplitudes().head(keep);
  return PureState(std::move(v), cutoff, 1);
}

DensityMatrix resize(const DensityMatrix& rho, int cutoff) {
  if (rho.n_modes() != 1) {
    throw InvalidArgument("resize supports single-mode density matrices only");
  }
  require_cutoff(cutoff);
  const auto d = fock_dim(cutoff, 1);
  CMatrix m = CMatrix::Zero(d, d);
  const auto keep = std::min(d, rho.dim());
  m.topLeftCorner(keep, keep) = rho.entries().topLeftCorner(keep, keep);
  return DensityMatrix(std::move(m), cutoff, 1);
}

}  // namespace catforge
