#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "catforge/analysis.hpp"
#include "catforge/errors.hpp"
#include "catforge/state_generator.hpp"
#include "oracles.hpp"

using namespace catforge;

namespace {

SchemeParams scheme(double ep, double em, double eta = 1.0, int cutoff = 20) {
  SchemeParams p;
  p.eps_plus = Squeeze(ep);
  p.eps_minus = Squeeze(em);
  p.eta = eta;
  p.cutoff = cutoff;
  return p;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Moments of S|0>: <a^dag^2 a^2> = 2 sinh^4 r + sinh^2 r cosh^2 r and
// <a^2> = sinh r cosh r.
double weight_from_moments(double ep, double em) {
  const auto m22 = [](double e) {
    const double r = std::atanh(e);
    const double s = std::sinh(r);
    const double c = std::cosh(r);
    return 2 * std::pow(s, 4) + s * s * c * c;
  };
  const auto m2 = [](double e) {
    const double r = std::atanh(e);
    return std::sinh(r) * std::cosh(r);
  };
  return m22(ep) + m22(em) - 2.0 * m2(ep) * m2(em);
}

// Oracle S(eps) restricted to the low block of a big space.
CMatrix s_block(double eps, int cutoff) {
  return oracle::squeeze_expm(eps, 4 * cutoff + 80).topLeftCorner(cutoff + 1, cutoff + 1);
}

DensityMatrix half_mixture(double eps, int cutoff) {
  const CMatrix s = s_block(eps, cutoff);
  const CMatrix m = 0.5 * (s.col(0) * s.col(0).adjoint() + s.col(2) * s.col(2).adjoint());
  return DensityMatrix(m, cutoff);
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("single-mode two-photon subtraction") {
  const SingleSubtraction r = two_photon_subtract_single(Squeeze(0.3), 40);
  CHECK(r.beta == doctest::Approx(0.3 / 0.91).epsilon(1e-12));
  CHECK(r.beta == doctest::Approx(0.32967).epsilon(1e-5));
  CHECK(r.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.success_weight == doctest::Approx(weight_from_moments(0.3, 0.0)).epsilon(1e-10));

  // Undo the squeeze: S(-eps) applied in a big space.
  const int big = 200;
  CVector padded = CVector::Zero(big);
  padded.head(41) = r.state.amplitudes();
  const CVector pre = oracle::squeeze_expm(-0.3, big) * padded;
  CVector expect = CVector::Zero(big);
  expect[0] = 1.0 / std::sqrt(1.18);
  expect[2] = std::sqrt(2.0) * 0.3 / std::sqrt(1.18);
  CHECK((pre - expect).norm() < 1e-9);

  for (double eps : {0.1, 0.3, 0.6}) {
    const SingleSubtraction s = two_photon_subtract_single(Squeeze(eps), 40);
    const CVector lhs = std::sqrt(s.success_weight) * s.state.amplitudes();
    const CMatrix sq = s_block(eps, 40);
    const CVector rhs = s.beta * (sq.col(0) + eps * std::sqrt(2.0) * sq.col(2));
    CHECK((lhs - rhs).norm() < 1e-9);
  }

  CHECK_THROWS_AS(two_photon_subtract_single(Squeeze(0.0), 20), ZeroState);
}

TEST_CASE("exact ancilla subtraction") {
  const TwoModeSubtraction prod = ancilla_subtract_exact(scheme(0.3, 0.0));
  const PureState single = two_photon_subtract_single(Squeeze(0.3), 20).state;
  const PureState expect = tensor(single, PureState::fock(0, 20));
  CHECK((prod.two_mode.amplitudes() - expect.amplitudes()).norm() < 1e-12);
  CHECK(prod.success_weight == doctest::Approx(weight_from_moments(0.3, 0.0)).epsilon(1e-10));

  const int n = 20;
  const CMatrix s = s_block(0.3, n);
  CVector bell = CVector::Zero((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      bell[two_mode_index(i, j, n)] =
          (s(i, 2) * s(j, 0) - s(i, 0) * s(j, 2)) / std::sqrt(2.0);
  const TwoModeSubtraction eq = ancilla_subtract_exact(scheme(0.3, 0.3));
  const Complex phase = bell.dot(eq.two_mode.amplitudes());
  CHECK(std::abs(phase) == doctest::Approx(1.0).epsilon(1e-9));

  for (auto [a, b] : {std::pair{0.3, 0.1}, {0.2, 0.45}, {-0.3, 0.25}}) {
    const double w1 = ancilla_subtract_exact(scheme(a, b, 1.0, 30)).success_weight;
    const double w2 = ancilla_subtract_exact(scheme(b, a, 1.0, 30)).success_weight;
    CHECK(w1 == doctest::Approx(w2).epsilon(1e-12));
    CHECK(w1 == doctest::Approx(weight_from_moments(a, b)).epsilon(1e-9));
  }

  CHECK_THROWS_AS(ancilla_subtract_exact(scheme(0.0, 0.0)), ZeroState);
  CHECK_THROWS_AS(ancilla_subtract_exact(scheme(0.3, 0.0, 1.5)), InvalidArgument);
}

TEST_CASE("reduced main-mode state") {
  const DensityMatrix pure = reduce_to_main(ancilla_subtract_exact(scheme(0.3, 0.0)).two_mode);
  CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-9));

  const DensityMatrix mixed = reduce_to_main(ancilla_subtract_exact(scheme(0.3, 0.3)).two_mode);
  CHECK(trace_distance(mixed, half_mixture(0.3, 20)) < 1e-9);
  CHECK(purity(mixed) == doctest::Approx(0.5).epsilon(1e-9));

  double prev = 2.0;
  for (int k = 0; k < 10; ++k) {
    const double em = 0.3 * k / 9.0;
    const double p = purity(reduce_to_main(ancilla_subtract_exact(scheme(0.3, em)).two_mode));
    CHECK(p < prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("approximate state and mixture weight") {
  const PureState phi0 = approx_phi(scheme(0.3, 0.0));
  const PureState single = two_photon_subtract_single(Squeeze(0.3), 20).state;
  CHECK((phi0.amplitudes() - single.amplitudes()).norm() < 1e-9);

  const double bp = Squeeze(0.3).beta();
  const PureState phi2 = approx_phi(scheme(0.3, bp));
  const CVector s2 = s_block(0.3, 20).col(2);
  CHECK(std::abs(std::abs(s2.normalized().dot(phi2.amplitudes())) - 1.0) < 1e-9);

  const SchemeParams p = scheme(0.3, 0.1);
  const DensityMatrix rho = reduce_to_main(ancilla_subtract_exact(p).two_mode);
  CHECK(fidelity(rho, approx_phi(p)) >= 0.99);

  CHECK(mixture_weight_c0(reduce_to_main(ancilla_subtract_exact(scheme(0.3, 0.0)).two_mode), phi0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(mixture_weight_c0(reduce_to_main(ancilla_subtract_exact(scheme(0.3, 0.3)).two_mode),
                                   approx_phi(scheme(0.3, 0.3))) - 0.5) < 1e-6);

  double prev = -1.0;
  for (int k = 0; k <= 12; ++k) {
    const SchemeParams q = scheme(0.3, 0.3 * k / 12.0);
    const double c0 = mixture_weight_c0(reduce_to_main(ancilla_subtract_exact(q).two_mode), approx_phi(q));
    CHECK(c0 >= prev - 1e-12);
    prev = c0;
  }

  CHECK_THROWS_AS(approx_phi(scheme(0.0, 0.1)), InvalidArgument);
}

TEST_CASE("approximation error scales quadratically in eps_minus") {
  std::vector<double> em, dist;
  for (int k = 1; k <= 15; ++k) {
    const SchemeParams q = scheme(0.3, 0.01 * k);
    const DensityMatrix rho = reduce_to_main(ancilla_subtract_exact(q).two_mode);
    em.push_back(0.01 * k);
    dist.push_back(trace_distance(rho, DensityMatrix::from_pure(approx_phi(q))));
  }
  double k_fit = 0.0;
  for (std::size_t i = 0; i < em.size(); ++i) k_fit = std::max(k_fit, dist[i] / (em[i] * em[i]));
  CAPTURE(k_fit);
  CHECK(k_fit < 10.0);
  // Local log-log slope at small eps_minus.
  const double slope = std::log(dist[3] / dist[1]) / std::log(em[3] / em[1]);
  CHECK(slope > 1.8);
}

TEST_CASE("coherent ancilla") {
  const CoherentAncilla zero_alpha = coherent_ancilla_subtract(Squeeze(0.3), 0.0, 20);
  const PureState single = two_photon_subtract_single(Squeeze(0.3), 20).state;
  CHECK((zero_alpha.state_a.amplitudes() - single.amplitudes()).norm() < 1e-12);

  const CoherentAncilla zero_eps = coherent_ancilla_subtract(Squeeze(0.0), 0.7, 20);
  CHECK(std::abs(std::abs(zero_eps.state_a[0]) - 1.0) < 1e-12);

  for (double alpha : {0.25, 0.5, 1.0}) {
    const CoherentAncilla c = coherent_ancilla_subtract(Squeeze(0.3), alpha, 20);
    const DensityMatrix red = partial_trace(c.two_mode, KeepMode::plus);
    CHECK(purity(red) == doctest::Approx(1.0).epsilon(1e-9));
    const PureState prod = tensor(c.state_a, coherent_state(alpha, 20));
    CHECK(std::abs(std::abs(prod.amplitudes().dot(c.two_mode.amplitudes())) - 1.0) < 1e-9);
  }

  CHECK_THROWS_AS(coherent_ancilla_subtract(Squeeze(0.0), 0.0, 20), ZeroState);
}

TEST_CASE("lossy pipeline") {
  const SchemeParams p = scheme(0.3, 0.1);
  const GenerationResult lossless = lossy_state(p);
  const DensityMatrix direct = reduce_to_main(ancilla_subtract_exact(p).two_mode);
  CHECK(max_abs(lossless.rho_plus.entries() - direct.entries()) < 1e-15);

  const GenerationResult dark = lossy_state(scheme(0.3, 0.1, 0.0));
  CHECK(dark.rho_plus(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dark.c0 == doctest::Approx(lossless.c0).epsilon(1e-12));

  const GenerationResult lossy = lossy_state(scheme(0.3, 0.0, 0.85));
  const std::vector<double> axis = uniform_axis(-4.0, 4.0, 0.05);
  CHECK(min_wigner(wigner(lossy.rho_plus, axis, axis)).value < 0.0);
  CHECK(lossy.rho_plus.validity().ok());

  CHECK_THROWS_AS(lossy_state(scheme(0.0, 0.1)), InvalidArgument);
}

TEST_CASE("delta table loading") {
  const auto ns = write_temp("cf_delta_ns.csv",
                             "delta_ns,eps_plus,eps_minus\n0,0.3,0.1\n32,0.3,0.2\n");
  const auto rows = load_delta_table(ns, 2.0 * 3.141592653589793 * 4.5e6);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].zeta_delta == 0.0);
  CHECK(rows[1].zeta_delta == doctest::Approx(0.90).epsilon(0.01));
  CHECK(rows[1].eps_minus == 0.2);

  const auto zd = write_temp("cf_delta_zd.csv", "zeta_delta, eps_plus, eps_minus\n0.9,0.3,0.2\n");
  CHECK(load_delta_table(zd, 1.0)[0].zeta_delta == 0.9);

  const auto bad = write_temp("cf_delta_bad.csv", "zeta_delta,eps_plus,eps_minus\n0,0.3,0.1\n1,x,0.1\n");
  try {
    load_delta_table(bad, 1.0);
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  const auto hdr = write_temp("cf_delta_hdr.csv", "a,b,c\n0,0.3,0.1\n");
  CHECK_THROWS_AS(load_delta_table(hdr, 1.0), InvalidArgument);
  const auto range = write_temp("cf_delta_range.csv", "zeta_delta,eps_plus,eps_minus\n0,1.3,0.1\n");
  CHECK_THROWS_AS(load_delta_table(range, 1.0), InvalidArgument);
}
