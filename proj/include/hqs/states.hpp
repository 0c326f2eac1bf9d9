#pragma once

// Initial states: Bell-type qubit pairs and Fock/coherent/thermal oscillators.

#include <variant>
#include <vector>

#include "hqs/hilbert.hpp"

namespace hqs {

enum class Family { psi1, psi2 };

struct QubitPairSpec {
  Family family = Family::psi1;
  double phi = 0.0;
};

struct Fock {
  int n = 0;
};
struct Coherent {
  Complex alpha{0.0, 0.0};
};
struct Thermal {
  double nbar = 0.0;
};

using OscillatorSpec = std::variant<Fock, Coherent, Thermal>;

struct InitialStateSpec {
  QubitPairSpec qubits;
  OscillatorSpec osc_a = Fock{0};
  OscillatorSpec osc_b = Fock{0};
};

inline constexpr double kTailTolerance = 1e-10;
inline constexpr int kMaxTruncation = 60;
inline constexpr double kBranchCutoff = 1e-12;

/// psi1: cos(phi)|eg> + sin(phi)|ge>;  psi2: cos(phi)|ee> + sin(phi)|gg>.
/// Components ordered (ee, eg, ge, gg).
CVector bell_ket(const QubitPairSpec& q);

/// Poisson mass at n >= N for mean |alpha|^2.
double coherent_tail(double mean, int n_levels);
/// Geometric mass at n >= N for mean occupation nbar.
double thermal_tail(double nbar, int n_levels);

/// Smallest N >= 2 whose tail is below `tol`. Capped at kMaxTruncation with
/// a warning.
int coherent_levels(Complex alpha, double tol = kTailTolerance);
int thermal_levels(double nbar, double tol = kTailTolerance);

/// q_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), n < N, renormalized.
/// Throws TruncationTooSmall when the dropped mass is >= 1e-10.
CVector coherent_ket(Complex alpha, int n_levels);

/// p_n = (1/(1+nbar)) (nbar/(1+nbar))^n, renormalized. Same tail rule.
Eigen::VectorXd thermal_populations(double nbar, int n_levels);
CMatrix thermal_dm(double nbar, int n_levels);

/// Occupation distribution of one oscillator spec over n < n_max.
Eigen::VectorXd occupation_pmf(const OscillatorSpec& osc, int n_max);

/// Smallest L with P(n >= L) < tol for the given distribution.
int tail_levels(const Eigen::VectorXd& pmf, double tol = kTailTolerance);

struct TruncationRule {
  bool beamsplitter = false;
  bool dipole = false;
  int extra = 0;  // added on top, e.g. for Lindblad raising channels
};

/// Picks (N_a, N_b): the tail level of the input distribution plus room for
/// excitations handed over by the qubits (one each for the plain model, two
/// when a dipole or beamsplitter exchange can route both into one mode).
/// With a beamsplitter the two modes share the distribution of n + m, which
/// for Fock inputs gives n + m + 3. Capped at kMaxTruncation with a warning.
HilbertSpec choose_truncation(const InitialStateSpec& spec, const TruncationRule& rule);

struct Branch {
  double weight;
  StateVector state;
};

/// Pure branches with weights summing to one. A single branch of weight one
/// means the initial state is pure.
class InitialState {
 public:
  InitialState(HilbertSpec spec, std::vector<Branch> branches);

  const HilbertSpec& spec() const { return spec_; }
  const std::vector<Branch>& branches() const { return branches_; }
  bool is_pure() const { return branches_.size() == 1; }

  /// Throws InvalidArgument for a mixture.
  const StateVector& pure() const;

  /// sum_i w_i |psi_i><psi_i| over the full space.
  DensityMatrix density() const;

 private:
  HilbertSpec spec_;
  std::vector<Branch> branches_;
};

/// Builds |psi_q> (x) osc_a (x) osc_b. Thermal oscillators become branches
/// over Fock pairs; pairs with joint weight < 1e-12 are dropped and the rest
/// renormalized.
InitialState compose_initial(const InitialStateSpec& spec, const HilbertSpec& hs);

}  // namespace hqs
