#include "hqs/hilbert.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "hqs/error.hpp"

namespace hqs {

HilbertSpec::HilbertSpec(int n_a, int n_b) : dims_{2, 2, n_a, n_b} {
  if (n_a < 2 || n_b < 2) {
    throw InvalidTruncation("oscillator truncation must be >= 2 (got N_a=" + std::to_string(n_a) +
                            ", N_b=" + std::to_string(n_b) + ")");
  }
  total_ = 4 * n_a * n_b;
}

int HilbertSpec::index(int q1, int q2, int n, int m) const {
  return ((q1 * 2 + q2) * dims_[2] + n) * dims_[3] + m;
}

std::array<int, 4> HilbertSpec::digits(int index) const {
  std::array<int, 4> d{};
  for (int s = 3; s >= 0; --s) {
    d[s] = index % dims_[s];
    index /= dims_[s];
  }
  return d;
}

StateVector::StateVector(HilbertSpec spec, CVector amplitudes)
    : spec_(spec), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != spec_.total()) {
    throw InvalidArgument("state vector length " + std::to_string(amplitudes_.size()) +
                          " does not match Hilbert dimension " + std::to_string(spec_.total()));
  }
}

StateVector StateVector::basis(const HilbertSpec& spec, int q1, int q2, int n, int m) {
  if (q1 < 0 || q1 > 1 || q2 < 0 || q2 > 1 || n < 0 || n >= spec.n_a() || m < 0 ||
      m >= spec.n_b()) {
    throw InvalidArgument("basis label outside the truncated space");
  }
  CVector v = CVector::Zero(spec.total());
  v[spec.index(q1, q2, n, m)] = 1.0;
  return {spec, std::move(v)};
}

DensityMatrix::DensityMatrix(std::vector<Site> sites, std::vector<int> dims, CMatrix entries)
    : sites_(std::move(sites)), dims_(std::move(dims)), entries_(std::move(entries)) {
  if (sites_.size() != dims_.size() || sites_.empty()) {
    throw InvalidArgument("density matrix needs one dimension per site");
  }
  const int expected = std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<>());
  if (entries_.rows() != expected || entries_.cols() != expected) {
    throw InvalidArgument("density matrix shape does not match its subsystem dimensions");
  }
}

DensityMatrix DensityMatrix::full(const HilbertSpec& spec, CMatrix entries) {
  const auto& d = spec.dims();
  return {{Site::qubit1, Site::qubit2, Site::osc_a, Site::osc_b},
          {d[0], d[1], d[2], d[3]},
          std::move(entries)};
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const CVector& a = psi.amplitudes();
  return full(psi.spec(), a * a.adjoint());
}

double DensityMatrix::hermiticity_error() const { return hqs::hermiticity_error(entries_); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(entries_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on density matrix");
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  if (hermiticity_error() > 1e-10) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(trace() - Complex(1.0)) > 1e-9) {
    throw InvalidArgument("density matrix trace deviates from 1");
  }
  if (min_eigenvalue() < -1e-9) throw InvalidArgument("density matrix has a negative eigenvalue");
}

OperatorMatrix::OperatorMatrix(CMatrix entries, bool hermitian)
    : entries_(std::move(entries)), hermitian_(hermitian) {
  if (entries_.rows() != entries_.cols()) throw InvalidArgument("operator must be square");
  if (hermitian_ && hqs::hermiticity_error(entries_) >= 1e-12) {
    throw InvalidArgument("operator flagged Hermitian but max|A - A^dag| >= 1e-12");
  }
}

OperatorMatrix OperatorMatrix::adjoint() const { return {entries_.adjoint(), hermitian_}; }

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& rhs) const {
  return {entries_ * rhs.entries_, false};
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& rhs) const {
  return {entries_ + rhs.entries_, hermitian_ && rhs.hermitian_};
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& rhs) const {
  return {entries_ - rhs.entries_, hermitian_ && rhs.hermitian_};
}

OperatorMatrix OperatorMatrix::scaled(double factor) const { return {entries_ * factor, hermitian_}; }

OperatorMatrix annihilation(int n) {
  if (n < 2) throw InvalidTruncation("annihilation operator needs N >= 2");
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return {std::move(a), false};
}

OperatorMatrix creation(int n) { return annihilation(n).adjoint(); }

OperatorMatrix number_operator(int n) {
  if (n < 2) throw InvalidTruncation("number operator needs N >= 2");
  CMatrix d = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = static_cast<double>(k);
  return {std::move(d), true};
}

OperatorMatrix pauli(Pauli which) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (which) {
    case Pauli::plus:
      m(kExcited, kGround) = 1.0;
      return {m, false};
    case Pauli::minus:
      m(kGround, kExcited) = 1.0;
      return {m, false};
    case Pauli::z:
      m(kExcited, kExcited) = 1.0;
      m(kGround, kGround) = -1.0;
      return {m, true};
  }
  return {m, false};
}

OperatorMatrix identity(const HilbertSpec& spec) {
  return {CMatrix::Identity(spec.total(), spec.total()), true};
}

OperatorMatrix embed(const OperatorMatrix& op, Site site, const HilbertSpec& spec) {
  const int s = site_index(site);
  if (op.dim() != spec.dims()[s]) {
    throw InvalidArgument("operator dimension " + std::to_string(op.dim()) +
                          " does not match site dimension " + std::to_string(spec.dims()[s]));
  }
  int left = 1;
  int right = 1;
  for (int k = 0; k < s; ++k) left *= spec.dims()[k];
  for (int k = s + 1; k < 4; ++k) right *= spec.dims()[k];
  const CMatrix id_left = CMatrix::Identity(left, left);
  const CMatrix id_right = CMatrix::Identity(right, right);
  CMatrix inner = Eigen::kroneckerProduct(op.entries(), id_right).eval();
  CMatrix full = Eigen::kroneckerProduct(id_left, inner).eval();
  return {std::move(full), op.hermitian()};
}

double max_abs_entry(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_error(const CMatrix& m) { return max_abs_entry(m - m.adjoint()); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

namespace {

struct TraceLayout {
  std::vector<Site> kept_sites;
  std::vector<int> kept_dims;
  std::vector<int> kept_index;    // per full index
  std::vector<int> traced_index;  // per full index
  int kept_total = 1;
  int traced_total = 1;
};

TraceLayout make_layout(const std::vector<Site>& sites, const std::vector<int>& dims,
                        std::span<const Site> keep) {
  if (keep.empty()) throw InvalidArgument("partial trace needs a non-empty keep set");
  std::vector<bool> kept(sites.size(), false);
  for (Site k : keep) {
    auto it = std::find(sites.begin(), sites.end(), k);
    if (it == sites.end()) throw InvalidArgument("keep set names a site the matrix does not carry");
    kept[it - sites.begin()] = true;
  }
  TraceLayout lay;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    if (kept[s]) {
      lay.kept_sites.push_back(sites[s]);
      lay.kept_dims.push_back(dims[s]);
      lay.kept_total *= dims[s];
    } else {
      lay.traced_total *= dims[s];
    }
  }
  const int total = lay.kept_total * lay.traced_total;
  lay.kept_index.resize(total);
  lay.traced_index.resize(total);
  std::vector<int> digit(sites.size(), 0);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int s = static_cast<int>(sites.size()) - 1; s >= 0; --s) {
      digit[s] = rem % dims[s];
      rem /= dims[s];
    }
    int ki = 0;
    int ti = 0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      if (kept[s]) {
        ki = ki * dims[s] + digit[s];
      } else {
        ti = ti * dims[s] + digit[s];
      }
    }
    lay.kept_index[idx] = ki;
    lay.traced_index[idx] = ti;
  }
  return lay;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Site> keep) {
  const TraceLayout lay = make_layout(rho.sites(), rho.dims(), keep);
  // full indices grouped by traced label, ordered by kept label
  std::vector<std::vector<int>> groups(lay.traced_total, std::vector<int>(lay.kept_total));
  for (int idx = 0; idx < rho.dim(); ++idx) groups[lay.traced_index[idx]][lay.kept_index[idx]] = idx;
  CMatrix red = CMatrix::Zero(lay.kept_total, lay.kept_total);
  const CMatrix& r = rho.entries();
  for (const auto& g : groups) {
    for (int i = 0; i < lay.kept_total; ++i) {
      for (int j = 0; j < lay.kept_total; ++j) red(i, j) += r(g[i], g[j]);
    }
  }
  return {lay.kept_sites, lay.kept_dims, std::move(red)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Site> keep) {
  return partial_trace(rho, std::span<const Site>(keep.begin(), keep.size()));
}

Reducer::Reducer(const HilbertSpec& spec, std::span<const Site> keep) : spec_(spec) {
  const auto& d = spec.dims();
  const std::vector<Site> all{Site::qubit1, Site::qubit2, Site::osc_a, Site::osc_b};
  TraceLayout lay = make_layout(all, {d[0], d[1], d[2], d[3]}, keep);
  sites_ = std::move(lay.kept_sites);
  dims_ = std::move(lay.kept_dims);
  kept_index_ = std::move(lay.kept_index);
  traced_index_ = std::move(lay.traced_index);
  kept_total_ = lay.kept_total;
}

void Reducer::accumulate(const CVector& amplitudes, double weight, CMatrix& out) const {
  if (amplitudes.size() != spec_.total()) throw InvalidArgument("reduce: state dimension mismatch");
  if (out.rows() != kept_total_ || out.cols() != kept_total_) {
    throw InvalidArgument("reduce: accumulator has the wrong shape");
  }
  struct Nz {
    int traced;
    int kept;
    Complex amp;
  };
  std::vector<Nz> nz;
  for (int idx = 0; idx < amplitudes.size(); ++idx) {
    if (amplitudes[idx] != Complex(0.0)) nz.push_back({traced_index_[idx], kept_index_[idx], amplitudes[idx]});
  }
  std::stable_sort(nz.begin(), nz.end(), [](const Nz& a, const Nz& b) { return a.traced < b.traced; });
  for (std::size_t lo = 0; lo < nz.size();) {
    std::size_t hi = lo;
    while (hi < nz.size() && nz[hi].traced == nz[lo].traced) ++hi;
    for (std::size_t i = lo; i < hi; ++i) {
      const Complex wi = weight * nz[i].amp;
      for (std::size_t j = lo; j < hi; ++j) out(nz[i].kept, nz[j].kept) += wi * std::conj(nz[j].amp);
    }
    lo = hi;
  }
}

DensityMatrix Reducer::reduce(const CVector& amplitudes) const {
  CMatrix out = CMatrix::Zero(kept_total_, kept_total_);
  accumulate(amplitudes, 1.0, out);
  return {sites_, dims_, std::move(out)};
}

void accumulate_reduced(const HilbertSpec& spec, const CVector& amplitudes,
                        std::span<const Site> keep, double weight, CMatrix& out) {
  Reducer(spec, keep).accumulate(amplitudes, weight, out);
}

DensityMatrix reduce(const StateVector& psi, std::span<const Site> keep) {
  return Reducer(psi.spec(), keep).reduce(psi.amplitudes());
}

DensityMatrix reduce(const StateVector& psi, std::initializer_list<Site> keep) {
  return reduce(psi, std::span<const Site>(keep.begin(), keep.size()));
}

CMatrix partial_transpose(const CMatrix& rho, int d1, int d2, int part) {
  if (rho.rows() != d1 * d2 || rho.cols() != d1 * d2) {
    throw InvalidArgument("partial transpose: matrix is not d1*d2 square");
  }
  if (part != 0 && part != 1) throw InvalidArgument("partial transpose: part must be 0 or 1");
  CMatrix out(rho.rows(), rho.cols());
  for (int i1 = 0; i1 < d1; ++i1) {
    for (int i2 = 0; i2 < d2; ++i2) {
      for (int j1 = 0; j1 < d1; ++j1) {
        for (int j2 = 0; j2 < d2; ++j2) {
          const int row = i1 * d2 + i2;
          const int col = j1 * d2 + j2;
          out(row, col) = part == 0 ? rho(j1 * d2 + i2, i1 * d2 + j2) : rho(i1 * d2 + j2, j1 * d2 + i2);
        }
      }
    }
  }
  return out;
}

DensityMatrix partial_transpose(const DensityMatrix& rho, int part) {
  if (rho.sites().size() != 2) {
    throw InvalidArgument("partial transpose needs a bipartite reduced density matrix");
  }
  return {rho.sites(), rho.dims(),
          partial_transpose(rho.entries(), rho.dims()[0], rho.dims()[1], part)};
}

Complex expectation(const OperatorMatrix& op, const StateVector& psi) {
  if (op.dim() != psi.spec().total()) throw InvalidArgument("expectation: dimension mismatch");
  return psi.amplitudes().dot(op.entries() * psi.amplitudes());
}

Complex expectation(const OperatorMatrix& op, const DensityMatrix& rho) {
  if (op.dim() != rho.dim()) throw InvalidArgument("expectation: dimension mismatch");
  return (op.entries() * rho.entries()).trace();
}

std::vector<std::vector<int>> connected_blocks(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i != j && m(i, j) != Complex(0.0)) {
        const int a = find(i);
        const int b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (label[root] < 0) {
      label[root] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[label[root]].push_back(i);
  }
  return blocks;
}

}  // namespace hqs
