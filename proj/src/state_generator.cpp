#include "catforge/state_generator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "catforge/errors.hpp"

namespace catforge {

namespace {

void require_squeezed_tail(double eps, int cutoff) {
  const double tail = detail::tail_weight(
      detail::squeezed_vacuum_amplitudes(eps, cutoff));
  if (!(tail < kTailTolerance)) {
    throw CutoffTooSmall("squeezed vacuum eps=" + std::to_string(eps) +
                         " does not fit cutoff " + std::to_string(cutoff));
  }
}

// a^2 S(eps)|0> projected onto |0>..|cutoff>.
CVector subtracted_squeezed(double eps, int cutoff) {
  return detail::annihilate_twice(
      detail::squeezed_vacuum_amplitudes(eps, cutoff + 2), cutoff);
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_field(const std::string& field, std::size_t row) {
  const std::string f = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value)) {
    throw InvalidArgument("delta table row " + std::to_string(row) +
                          ": cannot parse '" + f + "' as a number");
  }
  return value;
}

}  // namespace

void SchemeParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("eta must lie in [0, 1], got " + std::to_string(eta));
  }
  if (cutoff < 4) {
    throw InvalidArgument("scheme cutoff must be >= 4, got " +
                          std::to_string(cutoff));
  }
}

SingleSubtraction two_photon_subtract_single(Squeeze eps0, int cutoff) {
  if (eps0.eps() == 0.0) {
    throw ZeroState("a^2 annihilates the vacuum: eps0 = 0 gives no event");
  }
  if (cutoff < kMinCutoff) {
    throw InvalidArgument("cutoff must be >= 2");
  }
  require_squeezed_tail(eps0.eps(), cutoff);
  PureState raw(subtracted_squeezed(eps0.eps(), cutoff), cutoff);
  const double weight = raw.amplitudes().squaredNorm();
  return {raw.normalized(), eps0.beta(), weight};
}

TwoModeSubtraction ancilla_subtract_exact(const SchemeParams& params) {
  params.validate();
  const double ep = params.eps_plus.eps();
  const double em = params.eps_minus.eps();
  if (ep == 0.0 && em == 0.0) {
    throw ZeroState("both modes unsqueezed: (a+^2 - a-^2)|0,0> = 0");
  }
  const int cutoff = params.cutoff;
  require_squeezed_tail(ep, cutoff);
  require_squeezed_tail(em, cutoff);

  const CVector v_plus = detail::squeezed_vacuum_amplitudes(ep, cutoff);
  const CVector v_minus = detail::squeezed_vacuum_amplitudes(em, cutoff);
  const CVector u_plus = subtracted_squeezed(ep, cutoff);
  const CVector u_minus = subtracted_squeezed(em, cutoff);

  const auto d = fock_dim(cutoff, 1);
  CVector psi(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    psi.segment(i * d, d) = u_plus[i] * v_minus - v_plus[i] * u_minus;
  }
  PureState raw(std::move(psi), cutoff, 2);
  const double weight = raw.amplitudes().squaredNorm();
  return {raw.normalized(), weight};
}

DensityMatrix reduce_to_main(const PureState& two_mode) {
  return partial_trace(two_mode, KeepMode::plus);
}

PureState approx_phi(const SchemeParams& params) {
  const double ep = params.eps_plus.eps();
  if (ep == 0.0) {
    throw InvalidArgument("approx_phi needs eps_plus != 0 (beta_plus = 0)");
  }
  const int cutoff = params.cutoff;
  const OperatorMatrix s = squeeze_operator(params.eps_plus, cutoff);
  const double vac_coeff = 1.0 - params.eps_minus.eps() / params.beta_plus();
  const double two_coeff = ep * std::sqrt(2.0);
  CVector v = vac_coeff * s.entries().col(0) + two_coeff * s.entries().col(2);
  return PureState(std::move(v), cutoff).normalized();
}

double mixture_weight_c0(const DensityMatrix& rho_plus, const PureState& phi) {
  if (rho_plus.cutoff() != phi.cutoff() || rho_plus.n_modes() != 1 ||
      phi.n_modes() != 1) {
    throw InvalidArgument("mixture_weight_c0: mismatched spaces");
  }
  const CVector& v = phi.amplitudes();
  const double overlap = (v.adjoint() * rho_plus.entries() * v)(0).real();
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

CoherentAncilla coherent_ancilla_subtract(Squeeze eps, Complex alpha,
                                          int cutoff) {
  if (eps.eps() == 0.0 && alpha == Complex(0.0)) {
    throw ZeroState("eps = 0 and alpha = 0: no subtraction event");
  }
  require_squeezed_tail(eps.eps(), cutoff);
  // Validates |alpha|^2 against the cutoff and the tail.
  (void)coherent_state(alpha, cutoff);

  const Complex alpha2 = alpha * alpha;
  const CVector v = detail::squeezed_vacuum_amplitudes(eps.eps(), cutoff);
  const CVector u = subtracted_squeezed(eps.eps(), cutoff);
  PureState state_a = PureState(CVector(u - alpha2 * v), cutoff).normalized();

  const CVector coh = detail::coherent_amplitudes(alpha, cutoff);
  const CVector coh_sub =
      detail::annihilate_twice(detail::coherent_amplitudes(alpha, cutoff + 2),
                               cutoff);
  const auto d = fock_dim(cutoff, 1);
  CVector psi(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    psi.segment(i * d, d) = u[i] * coh - v[i] * coh_sub;
  }
  PureState two_mode = PureState(std::move(psi), cutoff, 2).normalized();
  return {std::move(state_a), std::move(two_mode)};
}

GenerationResult lossy_state(const SchemeParams& params) {
  params.validate();
  if (params.eps_plus.eps() == 0.0) {
    throw InvalidArgument("lossy_state needs eps_plus != 0");
  }
  const TwoModeSubtraction exact = ancilla_subtract_exact(params);
  const DensityMatrix rho = reduce_to_main(exact.two_mode);
  const double c0 = mixture_weight_c0(rho, approx_phi(params));
  return {apply_loss(rho, params.eta), exact.success_weight, c0};
}

std::vector<DeltaTableRow> load_delta_table(const std::filesystem::path& path,
                                            double zeta0) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open delta table " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidArgument("delta table " + path.string() + " is empty");
  }
  std::string header = trim(line);
  header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
  bool in_ns = false;
  if (header == "delta_ns,eps_plus,eps_minus") {
    in_ns = true;
    if (!(zeta0 > 0.0)) {
      throw InvalidArgument("delta_ns table needs zeta0 > 0");
    }
  } else if (header != "zeta_delta,eps_plus,eps_minus") {
    throw InvalidArgument(
        "delta table header must be 'zeta_delta,eps_plus,eps_minus' or "
        "'delta_ns,eps_plus,eps_minus'");
  }

  std::vector<DeltaTableRow> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) {
      throw InvalidArgument("delta table row " + std::to_string(row) +
                            ": expected 3 fields, got " +
                            std::to_string(fields.size()));
    }
    DeltaTableRow r{parse_field(fields[0], row), parse_field(fields[1], row),
                    parse_field(fields[2], row)};
    if (in_ns) r.zeta_delta *= zeta0 * 1e-9;
    if (r.zeta_delta < 0.0 || !(std::abs(r.eps_plus) < 1.0) ||
        !(std::abs(r.eps_minus) < 1.0)) {
      throw InvalidArgument("delta table row " + std::to_string(row) +
                            ": values out of range");
    }
    rows.push_back(r);
  }
  if (rows.empty()) {
    throw InvalidArgument("delta table " + path.string() + " has no rows");
  }
  return rows;
}

}  // namespace catforge
