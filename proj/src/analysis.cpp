#include "catforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "catforge/errors.hpp"
#include "catforge/parallel.hpp"

namespace catforge {

namespace {

void require_single_mode(const DensityMatrix& rho, const char* what) {
  if (rho.n_modes() != 1) {
    throw InvalidArgument(std::string(what) + " expects a single-mode state");
  }
}

double trapezoid_weight(std::span<const double> axis, std::size_t i) {
  const std::size_t n = axis.size();
  if (n < 2) return 0.0;
  double w = 0.0;
  if (i > 0) w += 0.5 * (axis[i] - axis[i - 1]);
  if (i + 1 < n) w += 0.5 * (axis[i + 1] - axis[i]);
  return w;
}

// Wigner value through the Laguerre-type recurrence on the matrix elements
// W_{|m><n|}(alpha); only ratios of O(1) quantities appear, so it stays
// stable for large n.
double wigner_point(const CMatrix& rho, const std::vector<double>& sqrt_n,
                    std::vector<Complex>& wl, double x, double p) {
  const auto dim = static_cast<std::size_t>(rho.rows());
  const Complex a(x / std::numbers::sqrt2, p / std::numbers::sqrt2);
  const Complex two_a = 2.0 * a;
  const Complex two_a_conj = std::conj(two_a);

  wl[0] = std::exp(-2.0 * std::norm(a)) / std::numbers::pi;
  double w = rho(0, 0).real() * wl[0].real();
  for (std::size_t n = 1; n < dim; ++n) {
    wl[n] = two_a * wl[n - 1] / sqrt_n[n];
    w += 2.0 * (rho(0, n) * wl[n]).real();
  }
  for (std::size_t m = 1; m < dim; ++m) {
    Complex temp = wl[m];
    wl[m] = (two_a_conj * temp - sqrt_n[m] * wl[m - 1]) / sqrt_n[m];
    w += (rho(m, m) * wl[m]).real();
    for (std::size_t n = m + 1; n < dim; ++n) {
      const Complex next = (two_a * wl[n - 1] - sqrt_n[m] * temp) / sqrt_n[n];
      temp = wl[n];
      wl[n] = next;
      w += 2.0 * (rho(m, n) * wl[n]).real();
    }
  }
  return w;
}

std::vector<double> sqrt_table(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sqrt(static_cast<double>(i));
  return s;
}

CMatrix hermitian_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double WignerGrid::integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < x_axis.size(); ++i) {
    const double wx = trapezoid_weight(x_axis, i);
    for (std::size_t j = 0; j < p_axis.size(); ++j) {
      total += wx * trapezoid_weight(p_axis, j) *
               values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return total;
}

std::vector<double> uniform_axis(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument("grid step must be positive");
  }
  if (!(stop >= start)) {
    throw InvalidArgument("grid stop must not be below start");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) {
    axis[i] = start + step * static_cast<double>(i);
  }
  return axis;
}

double wigner_at(const DensityMatrix& rho, double x, double p) {
  require_single_mode(rho, "wigner");
  const auto dim = static_cast<std::size_t>(rho.dim());
  std::vector<Complex> wl(dim);
  return wigner_point(rho.entries(), sqrt_table(dim), wl, x, p);
}

WignerGrid wigner(const DensityMatrix& rho, std::span<const double> x_axis,
                  std::span<const double> p_axis) {
  require_single_mode(rho, "wigner");
  WignerGrid grid;
  grid.x_axis.assign(x_axis.begin(), x_axis.end());
  grid.p_axis.assign(p_axis.begin(), p_axis.end());
  grid.values.resize(static_cast<Eigen::Index>(x_axis.size()),
                     static_cast<Eigen::Index>(p_axis.size()));
  const auto dim = static_cast<std::size_t>(rho.dim());
  const std::vector<double> sqrt_n = sqrt_table(dim);
  const CMatrix& entries = rho.entries();
  parallel_for(x_axis.size(), [&](std::size_t i) {
    std::vector<Complex> wl(dim);
    for (std::size_t j = 0; j < p_axis.size(); ++j) {
      grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          wigner_point(entries, sqrt_n, wl, x_axis[i], p_axis[j]);
    }
  });
  return grid;
}

std::vector<double> photon_distribution(const DensityMatrix& rho) {
  require_single_mode(rho, "photon_distribution");
  std::vector<double> p(static_cast<std::size_t>(rho.dim()));
  for (std::size_t n = 0; n < p.size(); ++n) {
    p[n] = rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real();
  }
  return p;
}

double mean_photon(const DensityMatrix& rho) {
  require_single_mode(rho, "mean_photon");
  double mean = 0.0;
  for (Eigen::Index n = 0; n < rho.dim(); ++n) {
    mean += static_cast<double>(n) * rho(n, n).real();
  }
  return mean;
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (rho.cutoff() != target.cutoff() || rho.n_modes() != target.n_modes()) {
    throw InvalidArgument("fidelity: cutoff mismatch (" +
                          std::to_string(rho.cutoff()) + " vs " +
                          std::to_string(target.cutoff()) + ")");
  }
  const CVector& v = target.amplitudes();
  return (v.adjoint() * rho.entries() * v)(0).real();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.cutoff() != sigma.cutoff() || rho.n_modes() != sigma.n_modes()) {
    throw InvalidArgument("fidelity: cutoff mismatch");
  }
  const CMatrix root = hermitian_sqrt(rho.entries());
  const CMatrix inner = root * sigma.entries() * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()),
                                            Eigen::EigenvaluesOnly);
  // Round-off eigenvalues of a rank-deficient product are dropped before
  // the square root, which would otherwise amplify them.
  const Eigen::VectorXd lambda = es.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, lambda.maxCoeff());
  double f = 0.0;
  for (const double l : lambda) {
    if (l > floor) f += std::sqrt(l);
  }
  return f * f;
}

double purity(const DensityMatrix& rho) {
  return (rho.entries() * rho.entries()).trace().real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw InvalidArgument("trace_distance: dimension mismatch");
  }
  const CMatrix diff = rho.entries() - sigma.entries();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()),
                                            Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

CatFit best_cat_fit(const DensityMatrix& rho, Parity parity,
                    std::span<const double> alpha_grid) {
  require_single_mode(rho, "best_cat_fit");
  if (alpha_grid.empty()) {
    throw InvalidArgument("best_cat_fit: empty alpha grid");
  }
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] >= 0.0) ||
        (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))) {
      throw InvalidArgument(
          "best_cat_fit: alpha grid must be non-negative and ascending");
    }
  }

  bool found = false;
  CatFit best{0.0, -1.0, parity};
  const auto consider = [&](double alpha) {
    CVector v;
    try {
      v = detail::cat_amplitudes(alpha, parity, rho.cutoff());
    } catch (const ZeroState&) {
      return;  // odd cat at alpha = 0
    }
    const double f = (v.adjoint() * rho.entries() * v)(0).real();
    if (!found || f > best.fidelity_star ||
        (f == best.fidelity_star && alpha < best.alpha_star)) {
      best.alpha_star = alpha;
      best.fidelity_star = f;
      found = true;
    }
  };

  for (const double alpha : alpha_grid) consider(alpha);
  if (!found) {
    throw ZeroState("best_cat_fit: no admissible alpha on the grid");
  }
  std::size_t coarse = 0;
  while (alpha_grid[coarse] != best.alpha_star) ++coarse;

  const double lo = alpha_grid[coarse > 0 ? coarse - 1 : coarse];
  const double hi =
      alpha_grid[coarse + 1 < alpha_grid.size() ? coarse + 1 : coarse];
  if (hi > lo) {
    const auto steps =
        static_cast<int>(std::ceil((hi - lo) / kCatFitResolution));
    for (int k = 0; k <= steps; ++k) {
      consider(lo + (hi - lo) * k / steps);
    }
  }
  return best;
}

WignerMinimum min_wigner(const WignerGrid& grid) {
  if (grid.x_axis.empty() || grid.p_axis.empty()) {
    throw InvalidArgument("min_wigner: empty grid");
  }
  WignerMinimum best{grid.x_axis[0], grid.p_axis[0], grid.values(0, 0)};
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      const double v =
          grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double x = grid.x_axis[i];
      const double p = grid.p_axis[j];
      const bool better =
          v < best.value ||
          (v == best.value &&
           (std::abs(x) < std::abs(best.x) ||
            (std::abs(x) == std::abs(best.x) && std::abs(p) < std::abs(best.p))));
      if (better) best = {x, p, v};
    }
  }
  return best;
}

}  // namespace catforge
