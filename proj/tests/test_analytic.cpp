#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hqs/analytic.hpp"
#include "hqs/error.hpp"
#include "oracle.hpp"

using namespace hqs;

namespace {

constexpr double kPi = std::numbers::pi;

// Qubit concurrence from the Kronecker oracle in the vacuum, 3 levels each.
double oracle_ground(bool psi1, double phi, double t, oracle::Params p) {
  const oracle::V psi0 = oracle::product(oracle::bell(psi1, phi), oracle::fock(0, 3), oracle::fock(0, 3));
  const oracle::V v = oracle::evolve(oracle::hamiltonian(p, 3, 3), psi0, t);
  return oracle::wootters(oracle::reduce(v, 3, 3, true));
}

}  // namespace

TEST_CASE("DJC ground closed form vs Kronecker oracle") {
  for (bool psi1 : {true, false}) {
    for (double phi : {kPi / 4, kPi / 12}) {
      for (double t : {0.3, 1.1, 2.0, 4.4}) {
        const Family f = psi1 ? Family::psi1 : Family::psi2;
        CHECK(std::abs(djc_ground_concurrence(f, phi, t).qubits - oracle_ground(psi1, phi, t, {})) < 1e-8);
      }
    }
  }
}

TEST_CASE("coupled psi1 closed forms vs oracle") {
  for (auto [c, field] : {std::pair{Coupling::bs, 0}, {Coupling::dd, 1}, {Coupling::ising, 2}}) {
    for (double r : {0.3, 1.0}) {
      oracle::Params p;
      (field == 0 ? p.rb : field == 1 ? p.rd : p.ri) = r;
      for (double t : {0.7, 2.9}) {
        CHECK(std::abs(psi1_coupled_concurrence(c, r, kPi / 12, t).qubits - oracle_ground(true, kPi / 12, t, p)) <
              1e-8);
      }
    }
  }
}

TEST_CASE("Ising psi2 concurrence vs oracle") {
  oracle::Params p;
  p.ri = 0.5;
  for (double t : {0.4, 1.7, 3.3}) {
    CHECK(std::abs(psi2_ising(0.5, kPi / 12, t, 20.0).concurrence.qubits - oracle_ground(false, kPi / 12, t, p)) <
          1e-8);
  }
}

TEST_CASE("coefficient sets are normalized") {
  for (double t : {0.0, 0.8, 5.1}) {
    CHECK(std::abs(djc_ground_coefficients(Family::psi2, 0.3, t, 20).norm_sq() - 1.0) < 1e-12);
    CHECK(std::abs(psi2_bs_coefficients(0.5, 0.3, t, 20).norm_sq() - 1.0) < 1e-10);
    CHECK(std::abs(psi2_dd_coefficients(1.0, 0.3, t, 20).norm_sq() - 1.0) < 1e-10);
    CHECK(std::abs(fock_coefficients(Family::psi1, 0.3, 2, 1, t, 20).norm_sq() - 1.0) < 1e-12);
  }
  const CoefficientSet bs = psi2_bs_coefficients(0.5, kPi / 4, 1.0, 20);
  CHECK(bs.size() == 9);
  CHECK_THROWS(bs.value("nope"));
}

TEST_CASE("psi2 BS amplitudes vs oracle, and the printed variant differs") {
  const double r = 0.5, phi = kPi / 12, t = 1.3;
  oracle::Params p;
  p.rb = r;
  const oracle::V psi0 = oracle::product(oracle::bell(false, phi), oracle::fock(0, 4), oracle::fock(0, 4));
  const oracle::V v = oracle::evolve(oracle::hamiltonian(p, 4, 4), psi0, t);
  const HilbertSpec s(4, 4);
  const CVector fixed = psi2_bs_coefficients(r, phi, t, 20).to_state(s).amplitudes();
  const CVector printed = psi2_bs_coefficients(r, phi, t, 20, Transcription::as_printed).to_state(s).amplitudes();
  CHECK((fixed - v).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((printed - v).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("to_state refuses to drop weight") {
  const CoefficientSet c = fock_coefficients(Family::psi1, kPi / 4, 3, 0, 1.0, 20);
  CHECK_THROWS_AS(c.to_state(HilbertSpec(3, 2)), InvalidArgument);
  CHECK_NOTHROW(c.to_state(HilbertSpec(5, 2)));
}

TEST_CASE("Fock concurrence reduces to the vacuum result") {
  for (double t : {0.5, 1.5, 3.0}) {
    CHECK(std::abs(fock_concurrence(Family::psi1, kPi / 12, 0, 0, t) -
                   djc_ground_concurrence(Family::psi1, kPi / 12, t).qubits) < 1e-12);
    CHECK(std::abs(fock_concurrence(Family::psi2, kPi / 6, 0, 0, t) -
                   djc_ground_concurrence(Family::psi2, kPi / 6, t).qubits) < 1e-12);
  }
}

TEST_CASE("detuned concurrence vs oracle and resonance limit") {
  oracle::Params p;
  p.omega = 100;
  p.delta = 2.0;
  for (double t : {0.6, 2.2}) {
    CHECK(std::abs(detuned_concurrence(Family::psi1, kPi / 12, 2.0, t) - oracle_ground(true, kPi / 12, t, p)) < 1e-8);
    CHECK(std::abs(detuned_concurrence(Family::psi2, kPi / 12, 2.0, t) - oracle_ground(false, kPi / 12, t, p)) <
          1e-8);
    CHECK(std::abs(detuned_concurrence(Family::psi1, kPi / 4, 0.0, t) -
                   djc_ground_concurrence(Family::psi1, kPi / 4, t).qubits) < 1e-12);
  }
}

TEST_CASE("timescales") {
  const auto ts = psi2_timescales(Coupling::dd, 1.0, 2.0);
  CHECK(ts.gamma == doctest::Approx(std::sqrt(17.0)));
  const auto f = fock_timescales(3, 0, 2.0);
  CHECK(f.tau1 == doctest::Approx(4.0));
  CHECK(f.tau4 == 0.0);
}
