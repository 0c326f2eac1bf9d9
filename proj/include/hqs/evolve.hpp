#pragma once

// Closed (eigendecomposition) and open (Lindblad, RK4) time evolution.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqs/hilbert.hpp"
#include "hqs/model.hpp"
#include "hqs/states.hpp"

namespace hqs {

class EvolutionGrid {
 public:
  /// Uniform samples 0, dt, ..., tau_max. Needs tau_max > 0, n_samples >= 2.
  EvolutionGrid(double tau_max, int n_samples);

  double tau_max() const { return tau_max_; }
  int n_samples() const { return n_samples_; }
  double tau(int k) const;
  std::vector<double> samples() const;

 private:
  double tau_max_;
  int n_samples_;
};

/// exp(-i H tau) from one Hermitian eigendecomposition. H is split into the
/// connected components of its nonzero pattern first; each component is
/// diagonalized on its own, which is exact and keeps excitation-conserving
/// Hamiltonians cheap.
class Propagator {
 public:
  explicit Propagator(const SparseMatrix& h);
  explicit Propagator(const OperatorMatrix& h);

  int dim() const { return dim_; }
  std::size_t block_count() const { return blocks_.size(); }

  /// Eigen-coefficients of a state, reusable across many times.
  struct Expansion {
    std::vector<int> blocks;
    std::vector<CVector> coefficients;
  };
  Expansion expand(const CVector& psi0) const;
  CVector evaluate(const Expansion& e, double tau) const;

  CVector apply(const CVector& psi0, double tau) const;
  StateVector apply(const StateVector& psi0, double tau) const;

 private:
  struct Block {
    std::vector<int> index;
    CMatrix vectors;
    Eigen::VectorXd values;
  };
  void build(const std::vector<std::vector<int>>& groups, const std::function<Complex(int, int)>& at);

  int dim_ = 0;
  std::vector<Block> blocks_;
};

std::vector<StateVector> unitary_propagate(const OperatorMatrix& h, const StateVector& initial,
                                           const EvolutionGrid& grid);
std::vector<StateVector> unitary_propagate(const Propagator& prop, const StateVector& initial,
                                           const EvolutionGrid& grid);

struct LindbladSpec {
  double lambda_r = 0.0;
  double lambda_d = 0.0;
  double nbar_th = 0.0;

  void validate() const;
};

struct Channel {
  std::string name;
  SparseMatrix op;  // A_k; the jump operator is sqrt(rate) A_k
  double rate;

  OperatorMatrix dense() const { return {CMatrix(op), false}; }
};

/// {a, b, s-1, s-2} at lambda_r (1 + nbar), {a+, b+, s+1, s+2} at
/// lambda_r nbar, {a+a, b+b, sz1, sz2} at lambda_d. Zero-rate channels are
/// left out.
std::vector<Channel> lindblad_operators(const LindbladSpec& spec, const HilbertSpec& hs);

struct LindbladOptions {
  /// Fixed RK4 step; default min(0.001, tau_max / 1e4), or
  /// min(0.005, tau_max / 2000) when a rotating frame is given.
  std::optional<double> step;
  /// Diagonal generator F of an interaction frame (F commuting with H, every
  /// channel an eigenoperator of ad_F). The integrator then works with
  /// H - F, which removes the fast free rotation. Empty: lab frame.
  std::optional<Eigen::VectorXd> frame;
  double positivity_tol = 1e-7;
  int max_halvings = 6;
  int max_dim = 1600;
  /// Warn once when the top oscillator levels hold more than this.
  double edge_tol = 1e-6;
};

struct LindbladStats {
  double step = 0.0;
  int halvings = 0;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double max_edge_population = 0.0;
};

using DensityObserver = std::function<void(int sample, const DensityMatrix& rho)>;

/// Integrates d rho/d tau = -i[H, rho] + sum_k rate_k (A rho A+ - {A+A, rho}/2)
/// and calls `observe` at every grid sample (lab frame). Throws
/// NumericalError when positivity cannot be restored by step halving.
LindbladStats lindblad_visit(const SparseMatrix& h, const DensityMatrix& rho0,
                             const std::vector<Channel>& channels, const EvolutionGrid& grid,
                             const LindbladOptions& options, const DensityObserver& observe);

std::vector<DensityMatrix> lindblad_propagate(const OperatorMatrix& h, const DensityMatrix& rho0,
                                              const std::vector<Channel>& channels,
                                              const EvolutionGrid& grid,
                                              const LindbladOptions& options = {});

/// Reduced density matrices of a branch mixture along the grid.
class MixtureTrajectory {
 public:
  MixtureTrajectory(std::vector<std::vector<Site>> keeps, std::vector<std::vector<DensityMatrix>> reduced,
                    std::vector<DensityMatrix> full);

  int n_samples() const;
  /// Reduced matrix for the i-th requested keep set.
  const DensityMatrix& reduced(int sample, int keep_index) const;
  const DensityMatrix& reduced(int sample, std::initializer_list<Site> keep) const;
  bool has_full() const { return !full_.empty(); }
  /// Full mixture (only when requested at construction).
  const DensityMatrix& density(int sample) const;

 private:
  std::vector<std::vector<Site>> keeps_;
  std::vector<std::vector<DensityMatrix>> reduced_;  // [keep][sample]
  std::vector<DensityMatrix> full_;
};

using MixtureObserver = std::function<void(int sample, const std::vector<DensityMatrix>& reduced)>;

/// Streaming form: for each sample, mixes the evolved branches reduced onto
/// each keep set and hands them to `observe` (nothing is stored).
void evolve_branches_visit(const Propagator& prop, const std::vector<Branch>& branches,
                           const EvolutionGrid& grid, const std::vector<std::vector<Site>>& keeps,
                           const MixtureObserver& observe);

/// Evolves every branch with `prop` and mixes sum_i w_i |psi_i><psi_i|
/// reduced onto each keep set. `keep_full` also stores the full mixture.
/// Throws InvalidArgument when the weights do not sum to 1 within 1e-8.
MixtureTrajectory evolve_branches(const Propagator& prop, const std::vector<Branch>& branches,
                                  const EvolutionGrid& grid,
                                  const std::vector<std::vector<Site>>& keeps, bool keep_full = false);

}  // namespace hqs
