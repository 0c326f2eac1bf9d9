#pragma once

// Concurrence, logarithmic negativity and sudden-death interval detection.

#include <span>
#include <string>
#include <vector>

#include "hqs/hilbert.hpp"

namespace hqs {

/// Wootters concurrence of a 4x4 two-qubit density matrix. The spin-flip
/// spectrum is taken as the singular values of V^T (sy x sy) V with
/// rho = V V^dag, which avoids the square roots of a non-Hermitian product.
/// Negative eigenvalues of rho are clipped to zero; below -1e-7 (the
/// integrator's positivity tolerance) the input is rejected.
double concurrence(const CMatrix& rho);
double concurrence(const DensityMatrix& rho);

/// Same value via the eigenvalues of R = rho (sy x sy) rho* (sy x sy).
/// Throws NumericalError when an eigenvalue has an imaginary part > 1e-7.
double concurrence_spin_flip(const CMatrix& rho);

/// 2 max{0, |r23| - sqrt(r11 r44)}; throws StructureError unless only the
/// diagonal and the (2,3) block are nonzero (tolerance 1e-10).
double concurrence_block(const CMatrix& rho);

/// 2 max{0, |r23| - sqrt(r11 r44), |r14| - sqrt(r22 r33)} for X-shaped
/// matrices; throws StructureError otherwise.
double concurrence_x_state(const CMatrix& rho);

/// log2 of the trace norm of the partial transpose. The transposed matrix is
/// split along its exact-zero block structure before diagonalizing.
double log_negativity(const CMatrix& rho, int d1, int d2);
double log_negativity(const DensityMatrix& rho);

enum class OscMeasure { concurrence, log_negativity, none };

std::string to_string(OscMeasure m);

/// Concurrence of the oscillator pair treated as two qubits on {|0>, |1>}.
/// Throws InvalidArgument when more than 1e-8 of the population lies
/// outside that block.
double oscillator_concurrence(const DensityMatrix& osc_pair);

struct EntanglementSample {
  double tau = 0.0;
  double qubit_concurrence = 0.0;
  double oscillator_measure = 0.0;
  OscMeasure oscillator_kind = OscMeasure::none;
};

EntanglementSample measure_sample(double tau, const DensityMatrix& qubits, const DensityMatrix& oscillators,
                                  OscMeasure kind);

std::vector<EntanglementSample> measure_series(const std::vector<StateVector>& states,
                                               std::span<const double> taus, OscMeasure kind);

struct EsdInterval {
  double start;  // t_ESD
  double end;    // t_ESB (grid end if no rebirth)
};

struct EsdReport {
  std::vector<EsdInterval> intervals;
  double threshold = 1e-9;

  bool empty() const { return intervals.empty(); }
};

/// Maximal runs of samples with value <= threshold. Endpoints are refined by
/// linear interpolation with the neighbouring sample outside the run.
EsdReport detect_esd(std::span<const double> taus, std::span<const double> values, double threshold = 1e-9);

enum class SeriesColumn { qubit, oscillator };
EsdReport detect_esd(const std::vector<EntanglementSample>& series, SeriesColumn column,
                     double threshold = 1e-9);

}  // namespace hqs
