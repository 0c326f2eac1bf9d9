#pragma once

// Truncated tensor-product space of two qubits and two oscillators.
//
// Basis order is fixed to (qubit1, qubit2, oscillator A, oscillator B) with
// row-major indexing, so |q1 q2 n m> lives at ((q1*2 + q2)*N_a + n)*N_b + m.
// Qubit levels are indexed excited = 0, ground = 1, which makes the
// two-qubit reduced basis come out as (ee, eg, ge, gg).

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hqs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

enum class Site : int { qubit1 = 0, qubit2 = 1, osc_a = 2, osc_b = 3 };

inline constexpr int site_index(Site s) { return static_cast<int>(s); }

class HilbertSpec {
 public:
  /// Throws InvalidTruncation unless both truncations are >= 2.
  HilbertSpec(int n_a, int n_b);

  const std::array<int, 4>& dims() const { return dims_; }
  int dim(Site s) const { return dims_[site_index(s)]; }
  int n_a() const { return dims_[2]; }
  int n_b() const { return dims_[3]; }
  int total() const { return total_; }

  int index(int q1, int q2, int n, int m) const;
  std::array<int, 4> digits(int index) const;

  bool operator==(const HilbertSpec&) const = default;

 private:
  std::array<int, 4> dims_;
  int total_;
};

class StateVector {
 public:
  StateVector(HilbertSpec spec, CVector amplitudes);

  /// |q1 q2 n m>
  static StateVector basis(const HilbertSpec& spec, int q1, int q2, int n, int m);

  const HilbertSpec& spec() const { return spec_; }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(int q1, int q2, int n, int m) const {
    return amplitudes_[spec_.index(q1, q2, n, m)];
  }
  double norm() const { return amplitudes_.norm(); }

 private:
  HilbertSpec spec_;
  CVector amplitudes_;
};

/// Density matrix over an ordered subset of the four sites. `dims` holds the
/// local dimension of each listed site in the same order.
class DensityMatrix {
 public:
  DensityMatrix(std::vector<Site> sites, std::vector<int> dims, CMatrix entries);

  static DensityMatrix full(const HilbertSpec& spec, CMatrix entries);
  static DensityMatrix pure(const StateVector& psi);

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<int>& dims() const { return dims_; }
  const CMatrix& entries() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

  Complex trace() const { return entries_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

  /// Checks Hermiticity (1e-10), unit trace (1e-9) and positivity (-1e-9).
  /// Throws InvalidArgument naming the violated property.
  void validate() const;

 private:
  std::vector<Site> sites_;
  std::vector<int> dims_;
  CMatrix entries_;
};

class OperatorMatrix {
 public:
  /// When `hermitian` is set the matrix is checked to 1e-12 entrywise.
  OperatorMatrix(CMatrix entries, bool hermitian);

  const CMatrix& entries() const { return entries_; }
  bool hermitian() const { return hermitian_; }
  int dim() const { return static_cast<int>(entries_.rows()); }

  OperatorMatrix adjoint() const;
  OperatorMatrix operator*(const OperatorMatrix& rhs) const;
  OperatorMatrix operator+(const OperatorMatrix& rhs) const;
  OperatorMatrix operator-(const OperatorMatrix& rhs) const;
  OperatorMatrix scaled(double factor) const;

 private:
  CMatrix entries_;
  bool hermitian_;
};

enum class Pauli { plus, minus, z };

/// Truncated bosonic lowering operator, A[n-1, n] = sqrt(n).
OperatorMatrix annihilation(int n);
OperatorMatrix creation(int n);
OperatorMatrix number_operator(int n);

/// 2x2 in the (|e>, |g>) basis.
OperatorMatrix pauli(Pauli which);

OperatorMatrix identity(const HilbertSpec& spec);

/// I x ... x op x ... x I with op placed on `site`.
OperatorMatrix embed(const OperatorMatrix& op, Site site, const HilbertSpec& spec);

double max_abs_entry(const CMatrix& m);
double hermiticity_error(const CMatrix& m);
CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// Reduced density matrix on `keep` (any order; result follows ascending
/// site order). Throws InvalidArgument for an empty or foreign keep set.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Site> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Site> keep);

/// Pure-state shortcut: never forms the full projector.
DensityMatrix reduce(const StateVector& psi, std::span<const Site> keep);
DensityMatrix reduce(const StateVector& psi, std::initializer_list<Site> keep);

/// Precomputed index maps for reducing pure states of one Hilbert space onto
/// a fixed set of sites.
class Reducer {
 public:
  Reducer(const HilbertSpec& spec, std::span<const Site> keep);

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<int>& dims() const { return dims_; }
  int kept_dim() const { return kept_total_; }

  /// out += weight * Tr_rest |psi><psi|. Exact zeros are skipped.
  void accumulate(const CVector& amplitudes, double weight, CMatrix& out) const;
  DensityMatrix reduce(const CVector& amplitudes) const;

 private:
  HilbertSpec spec_;
  std::vector<Site> sites_;
  std::vector<int> dims_;
  std::vector<int> kept_index_;
  std::vector<int> traced_index_;
  int kept_total_ = 1;
};

/// out += weight * Tr_rest |psi><psi| restricted to `keep` (ascending site
/// order). Exact zeros in `amplitudes` are skipped, so sector-confined states
/// reduce in time proportional to their support.
void accumulate_reduced(const HilbertSpec& spec, const CVector& amplitudes,
                        std::span<const Site> keep, double weight, CMatrix& out);

/// Transposes the indices of one factor (0 or 1) of a bipartite matrix.
DensityMatrix partial_transpose(const DensityMatrix& rho, int part);
CMatrix partial_transpose(const CMatrix& rho, int d1, int d2, int part);

Complex expectation(const OperatorMatrix& op, const StateVector& psi);
Complex expectation(const OperatorMatrix& op, const DensityMatrix& rho);

/// Index sets of the connected components of the nonzero pattern of `m`
/// (entries compared against exact zero). Singletons are included.
std::vector<std::vector<int>> connected_blocks(const CMatrix& m);

}  // namespace hqs
