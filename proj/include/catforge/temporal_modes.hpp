#pragma once

// Double-exponential temporal wavepackets of a cw photon-subtraction event
// and the symmetric/antisymmetric mode pair they span.

#include <optional>
#include <vector>

namespace catforge {

struct ModeParams {
  double zeta0;  ///< angular bandwidth, 1/s
  double t1;     ///< first event time, s
  double t2;     ///< second event time, s

  double delta() const;
  double midpoint() const { return 0.5 * (t1 + t2); }
  void validate() const;
};

/// sqrt(zeta0) exp(-zeta0 |t - t_event|).
double wavepacket(double t, double t_event, double zeta0);

/// Overlap <psi(t - t1), psi(t - t2)> = (1 + zeta0 delta) exp(-zeta0 delta).
double overlap(double delta, double zeta0);

struct ModeValues {
  double plus;
  /// Empty when the events coincide; the pair degenerates to the
  /// single-mode picture.
  std::optional<double> minus;
};

ModeValues mode_functions(double t, const ModeParams& params);

enum class ModeBranch { plus, minus };

struct ModeTaps {
  std::vector<double> times;
  std::vector<double> amplitudes;
};

/// Samples Psi_+ (or Psi_-) on a window centred at the event midpoint and
/// rescales the taps to unit l2 norm. Throws InvalidArgument for a window
/// shorter than 10/zeta0 or fewer than 100 samples, DegenerateMode for the
/// minus branch at zero separation.
ModeTaps discretize_mode(const ModeParams& params, double sample_rate,
                         double window, ModeBranch branch = ModeBranch::plus);

}  // namespace catforge
