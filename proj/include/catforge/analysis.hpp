#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "catforge/fock.hpp"

namespace catforge {

/// W(x, p) sampled on a rectangular grid; values(i, j) = W(x_axis[i],
/// p_axis[j]).
struct WignerGrid {
  static constexpr std::string_view kConvention =
      "x=(a+a^dag)/sqrt(2), p=(a-a^dag)/(i sqrt(2)), integral W dx dp = 1";

  std::vector<double> x_axis;
  std::vector<double> p_axis;
  Eigen::MatrixXd values;

  /// Trapezoid-rule integral over the grid.
  double integral() const;
};

/// Inclusive uniform axis start, start+step, ... up to stop (within half a
/// step).
std::vector<double> uniform_axis(double start, double stop, double step);

/// Single point of the Wigner function.
double wigner_at(const DensityMatrix& rho, double x, double p);

WignerGrid wigner(const DensityMatrix& rho, std::span<const double> x_axis,
                  std::span<const double> p_axis);

std::vector<double> photon_distribution(const DensityMatrix& rho);

double mean_photon(const DensityMatrix& rho);

/// <target|rho|target>.
double fidelity(const DensityMatrix& rho, const PureState& target);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for mixed pairs.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

double purity(const DensityMatrix& rho);

/// (1/2) ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

struct CatFit {
  double alpha_star;
  double fidelity_star;
  Parity parity;
};

/// Best real-amplitude cat on an ascending grid, followed by one refinement
/// pass between the neighbours of the coarse maximum at a resolution of
/// kCatFitResolution. Ties go to the smaller alpha.
CatFit best_cat_fit(const DensityMatrix& rho, Parity parity,
                    std::span<const double> alpha_grid);

inline constexpr double kCatFitResolution = 0.001;

struct WignerMinimum {
  double x;
  double p;
  double value;
};

/// Ties are broken by smaller |x|, then smaller |p|, then scan order.
WignerMinimum min_wigner(const WignerGrid& grid);

}  // namespace catforge
