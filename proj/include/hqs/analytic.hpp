#pragma once

// Closed-form amplitudes and concurrences for the resonant double JC model
// and its coupled variants. All times are scaled (tau = g_JC t) and the
// qubit and oscillator frequencies are equal unless stated otherwise.

#include <string>
#include <vector>

#include "hqs/hilbert.hpp"
#include "hqs/states.hpp"

namespace hqs {

enum class Coupling { bs, dd, ising };

std::string to_string(Coupling c);

/// Some long-form expressions were found to disagree with direct numerical
/// evolution. `corrected` gives the version that agrees; `as_printed`
/// reproduces the original transcription so the discrepancy can be shown.
enum class Transcription { corrected, as_printed };

struct BasisLabel {
  int q1;
  int q2;
  int n;
  int m;

  /// False when an occupation is negative (amplitude is then identically 0).
  bool valid() const { return n >= 0 && m >= 0; }
  std::string text() const;  // e.g. "|e g 0 1>"
};

struct CoefficientSet {
  std::vector<std::string> names;   // x1.., y1..
  std::vector<BasisLabel> labels;
  std::vector<Complex> values;
  /// Which closed-form constants feed each amplitude (empty when trivial).
  std::vector<std::string> constants;

  std::size_t size() const { return values.size(); }
  double norm_sq() const;
  Complex value(const std::string& name) const;

  /// Places the amplitudes in `spec`. Labels outside the truncation are
  /// skipped; throws InvalidArgument if a skipped amplitude exceeds `drop_tol`.
  StateVector to_state(const HilbertSpec& spec, double drop_tol = 1e-12) const;
};

struct ConcurrencePair {
  double qubits = 0.0;
  double oscillators = 0.0;
};

struct AnalyticTimescales {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double tau3 = 0.0;
  double tau4 = 0.0;
  double gamma = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
};

/// BS/DD: tau1 = r tau/2, tau2 = sqrt(1 + r^2/4) tau. Ising: tau1 = sqrt(1 + r^2) tau.
AnalyticTimescales psi1_timescales(Coupling c, double r, double tau);
/// BS: Gamma = sqrt(9r^4 + 60r^2 + 4), d+- = sqrt((5r^2 + 6 +- Gamma)/2).
/// DD: Gamma = sqrt(r^4 + 12r^2 + 4), d+- = sqrt((r^2 + 6 +- Gamma)/2).
/// Ising: tau1 = r tau, tau2 = sqrt(4 + r^2) tau.
AnalyticTimescales psi2_timescales(Coupling c, double r, double tau);
/// sqrt(n+1) tau, sqrt(m+1) tau, sqrt(n) tau, sqrt(m) tau.
AnalyticTimescales fock_timescales(int n, int m, double tau);

// Plain double JC model, both oscillators in the vacuum.
ConcurrencePair djc_ground_concurrence(Family f, double phi, double tau);
CoefficientSet djc_ground_coefficients(Family f, double phi, double tau, double omega_tilde);

// psi1 family with one extra coupling of strength r.
ConcurrencePair psi1_coupled_concurrence(Coupling c, double r, double phi, double tau);
CoefficientSet psi1_coupled_coefficients(Coupling c, double r, double phi, double tau);

// psi2 family, nine amplitudes (ee00, gg11, eg01, ge10, gg00, gg20, gg02, eg10, ge01).
CoefficientSet psi2_bs_coefficients(double r_b, double phi, double tau, double omega_tilde,
                                    Transcription t = Transcription::corrected);
CoefficientSet psi2_dd_coefficients(double r_d, double phi, double tau, double omega_tilde,
                                    Transcription t = Transcription::corrected);

struct IsingPsi2 {
  CoefficientSet coefficients;
  ConcurrencePair concurrence;
};
IsingPsi2 psi2_ising(double r_i, double phi, double tau, double omega_tilde);

/// Oscillators start in |n>|m>. The qubit state is an X state.
double fock_concurrence(Family f, double phi, int n, int m, double tau,
                        Transcription t = Transcription::corrected);
CoefficientSet fock_coefficients(Family f, double phi, int n, int m, double tau, double omega_tilde);

/// Both oscillators in |alpha>: sum over n, m of q_n q_m times the Fock
/// amplitudes, with q_n from coherent_ket on the given truncation.
/// Throws TruncationTooSmall when the coherent tail is >= 1e-10.
StateVector coherent_state_vector(Family f, double phi, Complex alpha, double tau, double omega_tilde,
                                  const HilbertSpec& spec);

/// Qubit concurrence for detuned pairs in the vacuum at raw scaled time
/// t = g t_phys; internally tau = D t / 2 with D = sqrt(delta^2 + 4).
double detuned_concurrence(Family f, double phi, double delta_tilde, double tau_raw);

}  // namespace hqs
