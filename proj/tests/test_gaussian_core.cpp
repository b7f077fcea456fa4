#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "microrev/fock_oracle.hpp"
#include "microrev/gaussian_core.hpp"
#include "microrev/reversibility.hpp"
#include "oracles.hpp"

using namespace microrev;
using doctest::Approx;

namespace {

TransitionQuery make_query(ComplexAmplitude ai, ComplexAmplitude af, double nth, double tau) {
  return {ai, af, BathSpec::from_nth(nth), BeamSplitterSpec::from_tau(tau)};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("bath spec keeps beta and n_th consistent") {
  for (double beta : {1e-3, 0.1, 0.25, std::log(2.0), 0.58, 1.0, 3.0, 20.0}) {
    const auto bath = BathSpec::from_beta(beta);
    const double expected = std::exp(-beta) / (1.0 - std::exp(-beta));
    CHECK(rel_err(bath.n_th(), expected) < 1e-12);
    CHECK(rel_err(beta_from_nth(nth_from_beta(beta)), beta) < 1e-12);
  }
  CHECK(BathSpec::from_nth(1.0).beta() == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(BathSpec::zero_temperature().n_th() == 0.0);
  CHECK(BathSpec::from_nth(0.0).is_zero_temperature());
  CHECK_THROWS_AS(BathSpec::from_beta(-1.0), DomainError);
  CHECK_THROWS_AS(BathSpec::from_nth(-0.5), DomainError);
}

TEST_CASE("beam splitter spec ties tau to theta") {
  for (double tau : {0.0, 0.15, 0.3, 0.5, 0.7, 0.85, 1.0}) {
    const auto bs = BeamSplitterSpec::from_tau(tau);
    CHECK(std::abs(std::pow(std::cos(bs.theta()), 2) - tau) < 1e-12);
  }
  CHECK(BeamSplitterSpec::from_reflectivity(0.85).tau() == Approx(0.15));
  CHECK_THROWS_AS(BeamSplitterSpec::from_tau(1.5), DomainError);
  CHECK_THROWS_AS(ComplexAmplitude(std::nan(""), 0.0), DomainError);
}

TEST_CASE("interact: limiting transmissivities") {
  const auto bath = BathSpec::from_nth(1.0);
  auto s = gaussian::interact(2.0, bath, BeamSplitterSpec::from_tau(1.0));
  CHECK(s.mu.re() == Approx(2.0));
  CHECK(s.nbar == Approx(0.0));
  s = gaussian::interact(2.0, bath, BeamSplitterSpec::from_tau(0.0));
  CHECK(s.mu.abs() == Approx(0.0));
  CHECK(s.nbar == Approx(1.0));
}

TEST_CASE("interact agrees with moments of the Fock output state") {
  const auto bath = BathSpec::from_nth(1.0);
  const auto bs = BeamSplitterSpec::from_tau(0.5);
  const auto state = gaussian::interact(2.0, bath, bs);
  CHECK(state.mu.re() == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(state.nbar == Approx(0.5).epsilon(1e-12));

  const std::size_t dim = 40;
  const auto u = fock::beam_splitter(bs.theta(), dim);
  const auto rho = fock::thermal_density(bath, dim);
  std::vector<double> pops(dim);
  for (std::size_t n = 0; n < dim; ++n) pops[n] = rho.mat(n, n).real();
  const auto mom = oracle::output_moments(u, fock::coherent_ket(2.0, dim), pops);
  CHECK(std::abs(mom.mean_a - state.mu.value()) < 1e-8);
  CHECK(std::abs(mom.mean_n - std::norm(mom.mean_a) - state.nbar) < 1e-8);
}

TEST_CASE("q_function values") {
  CHECK(gaussian::q_function({0.0, 0.0}, 0.0) == Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  const DisplacedThermalState peaked{{1.0, 1.0}, 2.0};
  CHECK(gaussian::q_function(peaked, {1.0, 1.0}) == Approx(1.0 / (3.0 * std::numbers::pi)).epsilon(1e-15));

  // <alpha|rho|alpha>/pi with rho the Fock output of a coherent(1/sqrt(tau))
  // through tau = 2/3 and a bath with n_th = 1.5 gives (mu = 1, nbar = 0.5).
  const double tau = 2.0 / 3.0;
  const auto bath = BathSpec::from_nth(1.5);
  const auto bs = BeamSplitterSpec::from_tau(tau);
  const TransitionQuery q{ComplexAmplitude(1.0 / std::sqrt(tau)), 2.0, bath, bs};
  const auto state = gaussian::interact(q.alpha_i, bath, bs);
  REQUIRE(state.mu.re() == Approx(1.0));
  REQUIRE(state.nbar == Approx(0.5));
  const double via_fock = fock::forward_probability_fock(q, fock::OracleOptions{50, 1e-10}) / std::numbers::pi;
  CHECK(rel_err(gaussian::q_function(state, 2.0), via_fock) < 1e-8);
}

TEST_CASE("q_function integrates to one") {
  for (const DisplacedThermalState& s : {DisplacedThermalState{{0.0, 0.0}, 0.0}, DisplacedThermalState{{1.5, -0.7}, 0.62},
                                         DisplacedThermalState{{-2.0, 3.0}, 4.0}}) {
    const double radius = s.mu.abs() + 8.0 * std::sqrt(s.nbar + 1.0);
    // The disk is centred on the origin, so it contains the 8-sigma disk around mu.
    const double integral =
        oracle::disk_integral([&](oracle::Complex z) { return gaussian::q_function(s, ComplexAmplitude(z)); }, {0.0, 0.0},
                              radius, 4000, 256);
    CHECK(integral == Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("forward probability examples") {
  CHECK(gaussian::forward_probability(make_query(0.0, 0.0, 1e-12, 0.3)) == Approx(1.0).epsilon(1e-10));
  CHECK(gaussian::forward_probability({0.0, 0.0, BathSpec::zero_temperature(), BeamSplitterSpec::from_tau(0.6)}) ==
        Approx(1.0));
  CHECK(gaussian::forward_probability(make_query(1.0, 1.0, 1.0, 1.0)) == Approx(1.0).epsilon(1e-15));

  const auto q = make_query(1.0, 0.5, 1.0, 0.7);
  const double fock = fock::forward_probability_fock(q, fock::OracleOptions{40, 1e-10});
  CHECK(rel_err(gaussian::forward_probability(q), fock) < 1e-6);
}

TEST_CASE("backward probability examples") {
  const auto null = make_query(0.0, 0.0, 1.0, 0.7);
  CHECK(gaussian::backward_probability(null) == gaussian::forward_probability(null));

  // beta -> 0+: the rescaling is the identity and a real amplitude is its own conjugate.
  const auto hot = make_query(1.0, 1.0, 1e12, 1.0);
  CHECK(gaussian::backward_probability(hot) == Approx(1.0).epsilon(1e-9));

  const auto q = make_query(1.0, 0.5, 1.0, 0.7);
  const double fock = fock::backward_probability_fock(q, fock::OracleOptions{40, 1e-10});
  CHECK(rel_err(gaussian::backward_probability(q), fock) < 1e-6);

  CHECK_THROWS_AS(gaussian::backward_probability({1.0, 1.0, BathSpec::zero_temperature(), BeamSplitterSpec::from_tau(0.5)}),
                  DomainError);
}

TEST_CASE("property: ratio is independent of tau and of the input port") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> amp(-3.0, 3.0);
  std::uniform_real_distribution<double> nth(0.2, 4.0);
  std::uniform_real_distribution<double> tau(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexAmplitude ai(amp(rng), amp(rng));
    const ComplexAmplitude af(amp(rng), amp(rng));
    const double n = nth(rng);
    const auto q1 = make_query(ai, af, n, tau(rng));
    const auto q2 = make_query(ai, af, n, tau(rng));
    const double r1 = gaussian::log_forward_probability(q1) - gaussian::log_backward_probability(q1);
    const double r2 = gaussian::log_forward_probability(q2) - gaussian::log_backward_probability(q2);
    CHECK(std::abs(r1 - r2) < 1e-10);

    using gaussian::InputPort;
    const double reflected = gaussian::log_forward_probability(q1, InputPort::Reflected) -
                             gaussian::log_backward_probability(q1, InputPort::Reflected);
    CHECK(std::abs(reflected - r1) < 1e-10);
  }
}

TEST_CASE("property: forward probability lies in (0, 1] and is phase covariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(-3.0, 3.0);
  std::uniform_real_distribution<double> nth(0.01, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto q = make_query({amp(rng), amp(rng)}, {amp(rng), amp(rng)}, nth(rng), unit(rng));
    const double p = gaussian::forward_probability(q);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    const TransitionQuery rotated{q.alpha_i.rotated(phi), q.alpha_f.rotated(phi), q.bath, q.bs};
    CHECK(std::abs(gaussian::forward_probability(rotated) - p) < 1e-12);
  }
}
