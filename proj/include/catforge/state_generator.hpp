#pragma once

// Conditional states produced by two-photon subtraction from squeezed
// vacuum: the bare single-mode scheme, the main/ancilla two-mode scheme,
// its small-eps_minus pure-state approximation, and the coherent-ancilla
// variant.

#include <filesystem>
#include <vector>

#include "catforge/fock.hpp"

namespace catforge {

struct SchemeParams {
  Squeeze eps_plus{0.0};
  Squeeze eps_minus{0.0};
  double eta = 1.0;  ///< overall detection efficiency
  int cutoff = kDefaultTwoModeCutoff;

  /// eps_+ / (1 - eps_+^2).
  double beta_plus() const { return eps_plus.beta(); }
  void validate() const;
};

struct SingleSubtraction {
  PureState state;        ///< normalized a^2 S(eps0)|0>
  double beta;            ///< eps0 / (1 - eps0^2)
  double success_weight;  ///< ||a^2 S(eps0)|0>||^2
};

/// a^2 S(eps0)|0>, normalized. Throws ZeroState for eps0 = 0.
SingleSubtraction two_photon_subtract_single(Squeeze eps0, int cutoff);

struct TwoModeSubtraction {
  PureState two_mode;     ///< normalized (a+^2 - a-^2) S+ S- |0,0>
  double success_weight;  ///< squared norm before normalization
};

/// Exact application of (a+^2 - a-^2) to S+(eps+) S-(eps-) |0>|0>.
TwoModeSubtraction ancilla_subtract_exact(const SchemeParams& params);

/// Reduced state of the main (plus) mode.
DensityMatrix reduce_to_main(const PureState& two_mode);

/// |Phi> = S+(eps+) (eps+ a^dag^2 + 1 - eps-/beta+) |0>, normalized; the
/// main-mode state when terms of order eps-^2 are dropped.
PureState approx_phi(const SchemeParams& params);

/// C0 = 1 - <Phi|rho+|Phi>, clamped to [0, 1].
double mixture_weight_c0(const DensityMatrix& rho_plus, const PureState& phi);

struct CoherentAncilla {
  PureState state_a;   ///< normalized (a^2 - alpha^2) S(eps)|0>
  PureState two_mode;  ///< normalized (a_A^2 - a_B^2) S_A|0>_A |alpha>_B
};

/// Coherent-state ancilla. two_mode is built from the two-mode operator;
/// it factorizes as state_a (x) |alpha> because |alpha> is an eigenstate of a.
CoherentAncilla coherent_ancilla_subtract(Squeeze eps, Complex alpha,
                                          int cutoff);

struct GenerationResult {
  DensityMatrix rho_plus;  ///< after loss
  double success_weight;
  double c0;  ///< computed before loss
};

/// ancilla_subtract_exact -> reduce_to_main -> apply_loss(eta). Requires
/// eps_plus != 0 so that C0 is defined.
GenerationResult lossy_state(const SchemeParams& params);

/// One row of a user-supplied (zeta0*Delta, eps+, eps-) table.
struct DeltaTableRow {
  double zeta_delta;
  double eps_plus;
  double eps_minus;
};

/// Reads a CSV with header "zeta_delta,eps_plus,eps_minus" or
/// "delta_ns,eps_plus,eps_minus" (converted with zeta0 in rad/s). Throws
/// InvalidArgument naming the offending row.
std::vector<DeltaTableRow> load_delta_table(const std::filesystem::path& path,
                                            double zeta0);

}  // namespace catforge
