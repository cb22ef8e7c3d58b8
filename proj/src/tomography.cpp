#include "catforge/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "catforge/analysis.hpp"
#include "catforge/errors.hpp"
#include "catforge/parallel.hpp"

namespace catforge {

namespace {

constexpr double kPi = std::numbers::pi;
// Samples with Tr[rho Pi] below this under the initializer are dropped.
constexpr double kUnderflow = 1e-300;
// Fixed chunking makes summation order independent of the thread count.
constexpr Eigen::Index kChunk = 1024;

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Sum in a fixed balanced-tree order.
template <typename T>
T pairwise_sum(std::vector<T>& parts) {
  if (parts.empty()) return T{};
  for (std::size_t width = 1; width < parts.size(); width *= 2) {
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) {
      parts[i] = parts[i] + parts[i + width];
    }
  }
  return parts[0];
}

CVector projector_vector(int max_n, double x, double theta) {
  const std::vector<double> psi = hermite_functions(max_n, x);
  CVector v(max_n + 1);
  for (int n = 0; n <= max_n; ++n) {
    v[n] = std::polar(psi[static_cast<std::size_t>(n)], n * theta);
  }
  return v;
}

// Columns are |x_theta> for every sample; evaluates probabilities,
// likelihood and the R operator in fixed-size chunks.
class ProjectorSet {
 public:
  ProjectorSet(const QuadratureRecord& record, int cutoff,
               std::optional<int> phase_bins)
      : vectors_(cutoff + 1, static_cast<Eigen::Index>(record.samples.size())) {
    for (std::size_t j = 0; j < record.samples.size(); ++j) {
      double theta = record.samples[j].theta;
      if (phase_bins) {
        const double width = kPi / *phase_bins;
        const double bin = std::min(std::floor(theta / width),
                                    static_cast<double>(*phase_bins - 1));
        theta = (bin + 0.5) * width;
      }
      vectors_.col(static_cast<Eigen::Index>(j)) =
          projector_vector(cutoff, record.samples[j].x, theta);
    }
  }

  Eigen::Index size() const { return vectors_.cols(); }

  Eigen::VectorXd probabilities(const CMatrix& rho) const {
    Eigen::VectorXd p(size());
    const CMatrix w = rho * vectors_;
    for (Eigen::Index j = 0; j < size(); ++j) {
      p[j] = vectors_.col(j).dot(w.col(j)).real();
    }
    return p;
  }

  void keep_columns(const std::vector<Eigen::Index>& keep) {
    CMatrix kept(vectors_.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      kept.col(static_cast<Eigen::Index>(k)) = vectors_.col(keep[k]);
    }
    vectors_ = std::move(kept);
  }

  struct Evaluation {
    double loglikelihood;
    CMatrix r;
  };

  Evaluation evaluate(const CMatrix& rho) const {
    const Eigen::Index n = size();
    const auto n_chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
    std::vector<double> ll(n_chunks, 0.0);
    std::vector<CMatrix> r(n_chunks);
    parallel_for(n_chunks, [&](std::size_t c) {
      const Eigen::Index begin = static_cast<Eigen::Index>(c) * kChunk;
      const Eigen::Index len = std::min(kChunk, n - begin);
      const auto block = vectors_.middleCols(begin, len);
      const CMatrix w = rho * block;
      Eigen::VectorXd inv(len);
      double acc = 0.0;
      for (Eigen::Index j = 0; j < len; ++j) {
        const double p = block.col(j).dot(w.col(j)).real();
        acc += std::log(p);
        inv[j] = 1.0 / p;
      }
      ll[c] = acc;
      r[c] = block * inv.asDiagonal() * block.adjoint();
    });
    Evaluation e;
    e.loglikelihood = pairwise_sum(ll);
    e.r = pairwise_sum(r) / static_cast<double>(n);
    return e;
  }

 private:
  CMatrix vectors_;
};

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

DensityMatrix as_density(const CMatrix& m, int cutoff) {
  return DensityMatrix(m, cutoff, 1);
}

// Cumulative quadrature distribution on the fixed inverse-CDF grid, stored
// as Fourier components in theta:
//   CDF(x_i | theta) = Re G_0[i] + 2 Re sum_{k>=1} e^{i k theta} G_k[i].
class QuadratureTable {
 public:
  explicit QuadratureTable(const DensityMatrix& rho) {
    const auto dim = static_cast<int>(rho.dim());
    const auto n_points =
        static_cast<std::size_t>(std::llround(2.0 * kQuadratureRange /
                                              kQuadratureStep)) + 1;
    x_.resize(n_points);
    cdf_.assign(static_cast<std::size_t>(dim), std::vector<Complex>(n_points));
    std::vector<Complex> prev(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < n_points; ++i) {
      x_[i] = -kQuadratureRange + kQuadratureStep * static_cast<double>(i);
      const std::vector<double> psi = hermite_functions(dim - 1, x_[i]);
      for (int k = 0; k < dim; ++k) {
        Complex f = 0.0;
        for (int m = 0; m + k < dim; ++m) {
          f += rho(m, m + k) * (psi[static_cast<std::size_t>(m)] *
                                psi[static_cast<std::size_t>(m + k)]);
        }
        auto& col = cdf_[static_cast<std::size_t>(k)];
        col[i] = i == 0 ? Complex(0.0)
                        : col[i - 1] + 0.5 * kQuadratureStep * (prev[k] + f);
        prev[static_cast<std::size_t>(k)] = f;
      }
    }
  }

  double draw(double theta, double u) const {
    const std::size_t dim = cdf_.size();
    std::vector<Complex> phase(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      phase[k] = std::polar(1.0, static_cast<double>(k) * theta);
    }
    const auto cdf_at = [&](std::size_t i) {
      double c = cdf_[0][i].real();
      for (std::size_t k = 1; k < dim; ++k) {
        c += 2.0 * (phase[k] * cdf_[k][i]).real();
      }
      return c;
    };
    const std::size_t last = x_.size() - 1;
    const double target = u * cdf_at(last);
    std::size_t lo = 0;
    std::size_t hi = last;
    // Invariant: cdf(lo) <= target < cdf(hi).
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (cdf_at(mid) <= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double c_lo = cdf_at(lo);
    const double c_hi = cdf_at(hi);
    const double frac =
        c_hi > c_lo ? std::clamp((target - c_lo) / (c_hi - c_lo), 0.0, 1.0) : 0.5;
    return x_[lo] + frac * (x_[hi] - x_[lo]);
  }

 private:
  std::vector<double> x_;
  std::vector<std::vector<Complex>> cdf_;
};

}  // namespace

void QuadratureRecord::validate() const {
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& s = samples[j];
    if (!std::isfinite(s.x) || !std::isfinite(s.theta)) {
      throw InvalidArgument("quadrature sample " + std::to_string(j) +
                            " is not finite");
    }
    if (s.theta < 0.0 || s.theta >= kPi) {
      throw InvalidArgument("quadrature sample " + std::to_string(j) +
                            " has phase outside [0, pi)");
    }
  }
}

void MleConfig::validate() const {
  if (cutoff < kMinCutoff) {
    throw InvalidArgument("MLE cutoff must be >= 2");
  }
  if (max_iters < 0) {
    throw InvalidArgument("max_iters must be non-negative");
  }
  if (!(stop_tol > 0.0)) {
    throw InvalidArgument("stop_tol must be positive");
  }
  if (phase_bins && *phase_bins < 1) {
    throw InvalidArgument("phase_bins must be positive");
  }
}

std::vector<double> hermite_functions(int max_n, double x) {
  std::vector<double> psi(static_cast<std::size_t>(max_n) + 1);
  psi[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (max_n >= 1) psi[1] = std::numbers::sqrt2 * x * psi[0];
  for (int n = 1; n < max_n; ++n) {
    psi[static_cast<std::size_t>(n) + 1] =
        std::sqrt(2.0 / (n + 1)) * x * psi[static_cast<std::size_t>(n)] -
        std::sqrt(static_cast<double>(n) / (n + 1)) *
            psi[static_cast<std::size_t>(n) - 1];
  }
  return psi;
}

double quadrature_pdf(const DensityMatrix& rho, double x, double theta) {
  if (rho.n_modes() != 1) {
    throw InvalidArgument("quadrature_pdf expects a single-mode state");
  }
  const CVector v = projector_vector(rho.cutoff(), x, theta);
  return (v.adjoint() * rho.entries() * v)(0).real();
}

QuadratureRecord sample_quadratures(const DensityMatrix& rho,
                                    std::size_t n_samples,
                                    const PhaseScheme& scheme,
                                    std::uint64_t seed) {
  if (rho.n_modes() != 1) {
    throw InvalidArgument("sample_quadratures expects a single-mode state");
  }
  if (n_samples < 1) {
    throw InvalidArgument("n_samples must be >= 1");
  }
  const auto* fixed = std::get_if<FixedPhases>(&scheme);
  if (fixed) {
    if (fixed->phases.empty()) {
      throw InvalidArgument("fixed phase set is empty");
    }
    for (const double th : fixed->phases) {
      if (!(th >= 0.0 && th < kPi)) {
        throw InvalidArgument("fixed phases must lie in [0, pi)");
      }
    }
  }

  const QuadratureTable table(rho);
  std::mt19937_64 rng(seed);
  QuadratureRecord record;
  record.seed = seed;
  record.source = fixed ? "simulated:fixed_set" : "simulated:uniform_random";
  record.samples.reserve(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double theta = fixed ? fixed->phases[j % fixed->phases.size()]
                               : kPi * canonical(rng);
    const double x = table.draw(theta, canonical(rng));
    record.samples.push_back({x, theta});
  }
  return record;
}

LogLikelihood loglikelihood(const DensityMatrix& rho,
                            const QuadratureRecord& record) {
  if (rho.n_modes() != 1) {
    throw InvalidArgument("loglikelihood expects a single-mode state");
  }
  const ProjectorSet set(record, rho.cutoff(), std::nullopt);
  const Eigen::VectorXd p = set.probabilities(rho.entries());
  std::vector<double> parts;
  for (Eigen::Index begin = 0; begin < p.size(); begin += kChunk) {
    const Eigen::Index len = std::min(kChunk, p.size() - begin);
    double acc = 0.0;
    for (Eigen::Index j = begin; j < begin + len; ++j) {
      if (!(p[j] > 0.0)) {
        return {-std::numeric_limits<double>::infinity(),
                static_cast<std::size_t>(j)};
      }
      acc += std::log(p[j]);
    }
    parts.push_back(acc);
  }
  return {pairwise_sum(parts), std::nullopt};
}

MleResult mle_reconstruct(const QuadratureRecord& record,
                          const MleConfig& config) {
  config.validate();
  if (record.samples.empty()) {
    throw InvalidArgument("mle_reconstruct: empty quadrature record");
  }
  record.validate();

  const int cutoff = config.cutoff;
  const auto dim = fock_dim(cutoff, 1);
  CMatrix rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);

  ProjectorSet set(record, cutoff, config.phase_bins);
  MleDiagnostics diag;
  {
    const Eigen::VectorXd p0 = set.probabilities(rho);
    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<std::size_t>(p0.size()));
    for (Eigen::Index j = 0; j < p0.size(); ++j) {
      if (p0[j] > kUnderflow) keep.push_back(j);
    }
    diag.excluded_samples = static_cast<std::size_t>(p0.size()) - keep.size();
    if (keep.empty()) {
      throw ZeroState("every quadrature sample underflows at this cutoff");
    }
    if (diag.excluded_samples > 0) set.keep_columns(keep);
  }

  ProjectorSet::Evaluation current = set.evaluate(rho);
  diag.loglikelihood.push_back(current.loglikelihood);
  const CMatrix identity = CMatrix::Identity(dim, dim);

  for (int it = 0; it < config.max_iters; ++it) {
    CMatrix next = hermitize(current.r * rho * current.r);
    next /= next.trace().real();
    ProjectorSet::Evaluation trial = set.evaluate(next);

    if (!(trial.loglikelihood >= current.loglikelihood)) {
      // Plain step overshot: shrink towards the identity map until the
      // likelihood no longer drops.
      bool accepted = false;
      double mu = 1.0;
      for (int halving = 0; halving < 40 && !accepted; ++halving, mu *= 0.5) {
        const CMatrix m = identity + mu * current.r;
        next = hermitize(m * rho * m);
        next /= next.trace().real();
        trial = set.evaluate(next);
        accepted = trial.loglikelihood >= current.loglikelihood;
      }
      if (!accepted) {
        // Numerically stationary.
        diag.converged = true;
        break;
      }
      ++diag.diluted_steps;
    }

    const double step =
        trace_distance(as_density(next, cutoff), as_density(rho, cutoff));
    rho = std::move(next);
    current = std::move(trial);
    diag.loglikelihood.push_back(current.loglikelihood);
    diag.iterations = it + 1;
    diag.last_step_distance = step;
    if (step < config.stop_tol) {
      diag.converged = true;
      break;
    }
  }
  return {as_density(rho, cutoff), std::move(diag)};
}

}  // namespace catforge
