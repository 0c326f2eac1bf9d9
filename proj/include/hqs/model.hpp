#pragma once

// Hamiltonian builders in units of the JC coupling (tau = g_JC t).

#include <Eigen/SparseCore>

#include "hqs/hilbert.hpp"

namespace hqs {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

struct SystemParams {
  double r_b = 0.0;
  double r_d = 0.0;
  double r_i = 0.0;
  double omega_tilde = 20.0;
  double delta_tilde = 0.0;  // omega - omega_0, scaled
  double g_ratio_2 = 1.0;

  double omega0_tilde() const { return omega_tilde - delta_tilde; }

  /// Throws InvalidArgument on non-finite values, negative ratios or
  /// omega_tilde <= 0.
  void validate() const;
};

/// Local operators for one site, kron'ed into the full space in basis order.
SparseMatrix kron_sites(const HilbertSpec& spec, const CMatrix& q1, const CMatrix& q2,
                        const CMatrix& osc_a, const CMatrix& osc_b);

// Sparse builders used by the propagation pipeline.
SparseMatrix sparse_free(const SystemParams& p, const HilbertSpec& spec);
SparseMatrix sparse_jc(const SystemParams& p, const HilbertSpec& spec, int which);
SparseMatrix sparse_bs(const SystemParams& p, const HilbertSpec& spec);
SparseMatrix sparse_dd(const SystemParams& p, const HilbertSpec& spec);
SparseMatrix sparse_is(const SystemParams& p, const HilbertSpec& spec);
SparseMatrix sparse_total(const SystemParams& p, const HilbertSpec& spec);
SparseMatrix sparse_excitation(const HilbertSpec& spec);

OperatorMatrix h_free(const SystemParams& p, const HilbertSpec& spec);
OperatorMatrix h_jc(const SystemParams& p, const HilbertSpec& spec, int which);
OperatorMatrix h_bs(const SystemParams& p, const HilbertSpec& spec);
OperatorMatrix h_dd(const SystemParams& p, const HilbertSpec& spec);
OperatorMatrix h_is(const SystemParams& p, const HilbertSpec& spec);
OperatorMatrix h_total(const SystemParams& p, const HilbertSpec& spec);

/// a^dag a + b^dag b + (sz1 + sz2)/2
OperatorMatrix excitation_number(const HilbertSpec& spec);

/// Dispersive effective Hamiltonian of qubit/oscillator pair `which` with
/// chi = g^2/(omega_q - omega_o) = -1/delta_tilde:
///   (omega + chi sz) n + (omega_0 + chi) sz / 2 + chi / 2.
/// The constant makes |e,n> shift by chi (n+1) and |g,n> by -chi n, which is
/// the second-order result. Throws InvalidArgument for delta_tilde == 0.
OperatorMatrix h_dispersive(const SystemParams& p, const HilbertSpec& spec, int which);

/// The same pair without the dispersive approximation (free part + JC term).
OperatorMatrix h_pair(const SystemParams& p, const HilbertSpec& spec, int which);

}  // namespace hqs
