#pragma once

// Simulated homodyne detection and maximum-likelihood reconstruction.
//
// The rotated quadrature is x_theta = (a e^{-i theta} + a^dag e^{i theta})/
// sqrt(2), with eigenvectors <n|x_theta> = e^{i n theta} psi_n(x) where psi_n
// are the Hermite functions. theta = 0 measures x, theta = pi/2 measures p.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "catforge/fock.hpp"

namespace catforge {

struct QuadratureSample {
  double x;
  double theta;  ///< in [0, pi)
};

struct QuadratureRecord {
  std::vector<QuadratureSample> samples;
  std::uint64_t seed = 0;
  std::string source;

  /// Throws InvalidArgument for non-finite values or phases outside [0, pi).
  void validate() const;
};

struct UniformRandomPhases {};

/// Phases assigned round-robin over the samples.
struct FixedPhases {
  std::vector<double> phases;
};

using PhaseScheme = std::variant<UniformRandomPhases, FixedPhases>;

/// Inverse-CDF tables span [-10, 10] at this step.
inline constexpr double kQuadratureRange = 10.0;
inline constexpr double kQuadratureStep = 1e-3;

/// psi_0(x) .. psi_max_n(x) by the three-term recurrence.
std::vector<double> hermite_functions(int max_n, double x);

/// p(x | theta) = <x_theta|rho|x_theta>.
double quadrature_pdf(const DensityMatrix& rho, double x, double theta);

/// i.i.d. homodyne outcomes, reproducible from the seed.
QuadratureRecord sample_quadratures(const DensityMatrix& rho,
                                    std::size_t n_samples,
                                    const PhaseScheme& scheme,
                                    std::uint64_t seed);

struct LogLikelihood {
  double value;  ///< -infinity when some sample has zero probability
  std::optional<std::size_t> zero_sample;
};

LogLikelihood loglikelihood(const DensityMatrix& rho,
                            const QuadratureRecord& record);

struct MleConfig {
  int cutoff = 12;
  int max_iters = 2000;
  double stop_tol = 1e-7;  ///< trace distance between successive iterates
  std::optional<int> phase_bins;

  void validate() const;
};

struct MleDiagnostics {
  /// Entry 0 is the initializer; entry k follows iteration k.
  std::vector<double> loglikelihood;
  int iterations = 0;
  bool converged = false;
  std::size_t excluded_samples = 0;
  /// Iterations where the plain R rho R step lowered the likelihood and a
  /// diluted step (I + mu R) rho (I + mu R) was taken instead.
  int diluted_steps = 0;
  double last_step_distance = 0.0;
};

struct MleResult {
  DensityMatrix rho_hat;
  MleDiagnostics diagnostics;
};

/// Iterative R rho R reconstruction from the maximally mixed state.
MleResult mle_reconstruct(const QuadratureRecord& record,
                          const MleConfig& config);

}  // namespace catforge
