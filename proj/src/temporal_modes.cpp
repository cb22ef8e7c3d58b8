#include "catforge/temporal_modes.hpp"

#include <cmath>
#include <string>

#include "catforge/errors.hpp"

namespace catforge {

double ModeParams::delta() const { return std::abs(t2 - t1); }

void ModeParams::validate() const {
  if (!(zeta0 > 0.0) || !std::isfinite(zeta0)) {
    throw InvalidArgument("zeta0 must be positive");
  }
  if (!std::isfinite(t1) || !std::isfinite(t2)) {
    throw InvalidArgument("event times must be finite");
  }
}

double wavepacket(double t, double t_event, double zeta0) {
  return std::sqrt(zeta0) * std::exp(-zeta0 * std::abs(t - t_event));
}

double overlap(double delta, double zeta0) {
  if (!(delta >= 0.0)) {
    throw InvalidArgument("time separation must be non-negative, got " +
                          std::to_string(delta));
  }
  if (!(zeta0 > 0.0)) {
    throw InvalidArgument("zeta0 must be positive");
  }
  const double x = zeta0 * delta;
  return (1.0 + x) * std::exp(-x);
}

ModeValues mode_functions(double t, const ModeParams& params) {
  params.validate();
  const double a = wavepacket(t, params.t1, params.zeta0);
  const double b = wavepacket(t, params.t2, params.zeta0);
  const double delta = params.delta();
  if (delta == 0.0) {
    return {a, std::nullopt};
  }
  const double i = overlap(delta, params.zeta0);
  return {(a + b) / std::sqrt(2.0 * (1.0 + i)),
          (a - b) / std::sqrt(2.0 * (1.0 - i))};
}

ModeTaps discretize_mode(const ModeParams& params, double sample_rate,
                         double window, ModeBranch branch) {
  params.validate();
  if (!(window >= 10.0 / params.zeta0)) {
    throw InvalidArgument("mode window must be at least 10/zeta0");
  }
  if (!(sample_rate > 0.0) || sample_rate * window < 100.0) {
    throw InvalidArgument("mode filter needs at least 100 samples");
  }
  if (branch == ModeBranch::minus && params.delta() == 0.0) {
    throw DegenerateMode("antisymmetric mode is undefined at zero separation");
  }
  const auto n = static_cast<std::size_t>(std::floor(sample_rate * window)) + 1;
  const double dt = 1.0 / sample_rate;
  const double start = params.midpoint() - 0.5 * dt * static_cast<double>(n - 1);

  ModeTaps taps;
  taps.times.resize(n);
  taps.amplitudes.resize(n);
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = start + dt * static_cast<double>(k);
    const ModeValues v = mode_functions(t, params);
    const double amp = branch == ModeBranch::plus ? v.plus : *v.minus;
    taps.times[k] = t;
    taps.amplitudes[k] = amp;
    sum_sq += amp * amp;
  }
  const double scale = 1.0 / std::sqrt(sum_sq);
  for (double& a : taps.amplitudes) a *= scale;
  return taps;
}

}  // namespace catforge
