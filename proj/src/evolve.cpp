#include "hqs/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hqs/error.hpp"
#include "hqs/log.hpp"

namespace hqs {

EvolutionGrid::EvolutionGrid(double tau_max, int n_samples) : tau_max_(tau_max), n_samples_(n_samples) {
  if (!(tau_max > 0) || !std::isfinite(tau_max)) throw InvalidArgument("tau_max must be > 0");
  if (n_samples < 2) throw InvalidArgument("n_samples must be >= 2");
}

double EvolutionGrid::tau(int k) const {
  if (k == n_samples_ - 1) return tau_max_;
  return tau_max_ * static_cast<double>(k) / static_cast<double>(n_samples_ - 1);
}

std::vector<double> EvolutionGrid::samples() const {
  std::vector<double> out(n_samples_);
  for (int k = 0; k < n_samples_; ++k) out[k] = tau(k);
  return out;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<int>> groups() {
    const int n = static_cast<int>(parent_.size());
    std::vector<int> label(n, -1);
    std::vector<std::vector<int>> out;
    for (int i = 0; i < n; ++i) {
      const int r = find(i);
      if (label[r] < 0) {
        label[r] = static_cast<int>(out.size());
        out.emplace_back();
      }
      out[label[r]].push_back(i);
    }
    return out;
  }

 private:
  std::vector<int> parent_;
};

double sparse_hermiticity_error(const SparseMatrix& h) {
  SparseMatrix adj = h.adjoint();
  SparseMatrix diff = h - adj;
  double err = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) err = std::max(err, std::abs(it.value()));
  }
  return err;
}

}  // namespace

void Propagator::build(const std::vector<std::vector<int>>& groups,
                       const std::function<Complex(int, int)>& at) {
  blocks_.reserve(groups.size());
  for (const auto& g : groups) {
    const int n = static_cast<int>(g.size());
    CMatrix sub(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) sub(i, j) = at(g[i], g[j]);
    }
    Block b;
    b.index = g;
    if (n == 1) {
      b.vectors = CMatrix::Identity(1, 1);
      b.values = Eigen::VectorXd::Constant(1, sub(0, 0).real());
    } else {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
      if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
      b.vectors = es.eigenvectors();
      b.values = es.eigenvalues();
    }
    blocks_.push_back(std::move(b));
  }
}

Propagator::Propagator(const SparseMatrix& h) : dim_(static_cast<int>(h.rows())) {
  if (h.rows() != h.cols()) throw InvalidArgument("Hamiltonian must be square");
  if (sparse_hermiticity_error(h) >= 1e-12) throw InvalidArgument("Hamiltonian is not Hermitian");
  UnionFind uf(dim_);
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
      if (it.value() != Complex(0.0)) uf.unite(static_cast<int>(it.row()), static_cast<int>(it.col()));
    }
  }
  const auto groups = uf.groups();
  std::vector<int> pos(dim_);
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.size(); ++i) pos[g[i]] = static_cast<int>(i);
  }
  // dense copy per block from the sparse rows
  std::vector<CMatrix> subs;
  blocks_.reserve(groups.size());
  std::vector<int> owner(dim_);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    for (int i : groups[b]) owner[i] = static_cast<int>(b);
  }
  for (const auto& g : groups) subs.emplace_back(CMatrix::Zero(g.size(), g.size()));
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      subs[owner[r]](pos[r], pos[c]) += it.value();
    }
  }
  for (std::size_t b = 0; b < groups.size(); ++b) {
    const CMatrix& sub = subs[b];
    build({groups[b]}, [&](int i, int j) { return sub(pos[i], pos[j]); });
  }
}

Propagator::Propagator(const OperatorMatrix& h) : dim_(h.dim()) {
  if (hermiticity_error(h.entries()) >= 1e-12) throw InvalidArgument("Hamiltonian is not Hermitian");
  const CMatrix& m = h.entries();
  build(connected_blocks(m), [&](int i, int j) { return m(i, j); });
}

Propagator::Expansion Propagator::expand(const CVector& psi0) const {
  if (psi0.size() != dim_) throw InvalidArgument("state dimension does not match the propagator");
  Expansion e;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    CVector local(blk.index.size());
    bool any = false;
    for (std::size_t i = 0; i < blk.index.size(); ++i) {
      local[i] = psi0[blk.index[i]];
      any = any || local[i] != Complex(0.0);
    }
    if (!any) continue;
    e.blocks.push_back(static_cast<int>(b));
    e.coefficients.push_back(blk.vectors.adjoint() * local);
  }
  return e;
}

CVector Propagator::evaluate(const Expansion& e, double tau) const {
  CVector out = CVector::Zero(dim_);
  for (std::size_t k = 0; k < e.blocks.size(); ++k) {
    const Block& blk = blocks_[e.blocks[k]];
    CVector c = e.coefficients[k];
    for (int i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -blk.values[i] * tau);
    const CVector local = blk.vectors * c;
    for (std::size_t i = 0; i < blk.index.size(); ++i) out[blk.index[i]] = local[i];
  }
  return out;
}

CVector Propagator::apply(const CVector& psi0, double tau) const { return evaluate(expand(psi0), tau); }

StateVector Propagator::apply(const StateVector& psi0, double tau) const {
  return {psi0.spec(), apply(psi0.amplitudes(), tau)};
}

std::vector<StateVector> unitary_propagate(const Propagator& prop, const StateVector& initial,
                                           const EvolutionGrid& grid) {
  const auto e = prop.expand(initial.amplitudes());
  std::vector<StateVector> out;
  out.reserve(grid.n_samples());
  out.push_back(initial);
  for (int k = 1; k < grid.n_samples(); ++k) out.emplace_back(initial.spec(), prop.evaluate(e, grid.tau(k)));
  return out;
}

std::vector<StateVector> unitary_propagate(const OperatorMatrix& h, const StateVector& initial,
                                           const EvolutionGrid& grid) {
  return unitary_propagate(Propagator(h), initial, grid);
}

// ---------------------------------------------------------------- Lindblad

void LindbladSpec::validate() const {
  for (double v : {lambda_r, lambda_d, nbar_th}) {
    if (!std::isfinite(v) || v < 0) throw InvalidArgument("Lindblad rates and bath occupation must be >= 0");
  }
}

std::vector<Channel> lindblad_operators(const LindbladSpec& spec, const HilbertSpec& hs) {
  spec.validate();
  const int na = hs.n_a();
  const int nb = hs.n_b();
  const CMatrix i2 = CMatrix::Identity(2, 2);
  const CMatrix ia = CMatrix::Identity(na, na);
  const CMatrix ib = CMatrix::Identity(nb, nb);
  const CMatrix a = annihilation(na).entries();
  const CMatrix b = annihilation(nb).entries();
  const CMatrix sm = pauli(Pauli::minus).entries();
  const CMatrix sp = pauli(Pauli::plus).entries();
  const CMatrix sz = pauli(Pauli::z).entries();
  std::vector<Channel> out;
  const double down = spec.lambda_r * (1.0 + spec.nbar_th);
  const double up = spec.lambda_r * spec.nbar_th;
  if (down > 0) {
    out.push_back({"a", kron_sites(hs, i2, i2, a, ib), down});
    out.push_back({"b", kron_sites(hs, i2, i2, ia, b), down});
    out.push_back({"sm1", kron_sites(hs, sm, i2, ia, ib), down});
    out.push_back({"sm2", kron_sites(hs, i2, sm, ia, ib), down});
  }
  if (up > 0) {
    out.push_back({"ad", kron_sites(hs, i2, i2, a.adjoint(), ib), up});
    out.push_back({"bd", kron_sites(hs, i2, i2, ia, b.adjoint()), up});
    out.push_back({"sp1", kron_sites(hs, sp, i2, ia, ib), up});
    out.push_back({"sp2", kron_sites(hs, i2, sp, ia, ib), up});
  }
  if (spec.lambda_d > 0) {
    out.push_back({"ada", kron_sites(hs, i2, i2, number_operator(na).entries(), ib), spec.lambda_d});
    out.push_back({"bdb", kron_sites(hs, i2, i2, ia, number_operator(nb).entries()), spec.lambda_d});
    out.push_back({"sz1", kron_sites(hs, sz, i2, ia, ib), spec.lambda_d});
    out.push_back({"sz2", kron_sites(hs, i2, sz, ia, ib), spec.lambda_d});
  }
  return out;
}

namespace {

bool is_diagonal(const SparseMatrix& m) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col() && it.value() != Complex(0.0)) return false;
    }
  }
  return true;
}

// Minimum eigenvalue over the connected blocks of the exact nonzero pattern.
double blocked_min_eigenvalue(const CMatrix& rho) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : connected_blocks(rho)) {
    const int n = static_cast<int>(g.size());
    if (n == 1) {
      best = std::min(best, rho(g[0], g[0]).real());
      continue;
    }
    CMatrix sub(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) sub(i, j) = rho(g[i], g[j]);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in positivity check");
    best = std::min(best, es.eigenvalues().minCoeff());
  }
  return best;
}

// Row-major dense storage inside the integrator: a row-major sparse operator
// times a row-major matrix is a sequence of contiguous row updates.
using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void sparse_times(const SparseMatrix& a, const RowMatrix& x, RowMatrix& out) {
  out.setZero();
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) out.row(r) += it.value() * x.row(it.col());
  }
}

// Operator with at most one nonzero per row: row r maps from column src[r].
// Ladder operators and sigma+- all have this shape, and j rho j^dag becomes a
// plain gather without any transposed pass over rho.
struct Monomial {
  std::vector<int> row, src;
  std::vector<Complex> val;

  static std::optional<Monomial> from(const SparseMatrix& a) {
    Monomial m;
    for (int r = 0; r < a.outerSize(); ++r) {
      int seen = 0;
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
        if (it.value() == Complex(0.0)) continue;
        if (++seen > 1) return std::nullopt;
        m.row.push_back(r);
        m.src.push_back(static_cast<int>(it.col()));
        m.val.push_back(it.value());
      }
    }
    return m;
  }

  // out += j rho j^dag
  void sandwich(const RowMatrix& rho, RowMatrix& out) const {
    const std::size_t n = row.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Complex* in = rho.data() + static_cast<std::ptrdiff_t>(src[i]) * rho.cols();
      Complex* o = out.data() + static_cast<std::ptrdiff_t>(row[i]) * out.cols();
      const Complex vi = val[i];
      for (std::size_t k = 0; k < n; ++k) o[row[k]] += vi * std::conj(val[k]) * in[src[k]];
    }
  }
};

// out = -i t + i t^dag, walking the transpose in tiles.
void hermitian_part(const RowMatrix& t, RowMatrix& out) {
  constexpr int kTile = 32;
  const int n = static_cast<int>(t.rows());
  const Complex mi(0.0, -1.0);
  for (int r0 = 0; r0 < n; r0 += kTile) {
    for (int c0 = 0; c0 < n; c0 += kTile) {
      const int r1 = std::min(n, r0 + kTile);
      const int c1 = std::min(n, c0 + kTile);
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) out(r, c) = mi * (t(r, c) - std::conj(t(c, r)));
      }
    }
  }
}

struct Generator {
  SparseMatrix h_eff;               // H' - (i/2) sum rate A+A
  std::vector<Monomial> monomials;  // sqrt(rate) A, one nonzero per row
  std::vector<SparseMatrix> jumps;  // any other non-diagonal channel
  CMatrix dephasing;                // sum over diagonal channels of rate l_i conj(l_j)
  bool has_dephasing = false;

  void add_jump(SparseMatrix j) {
    if (auto m = Monomial::from(j)) {
      monomials.push_back(std::move(*m));
    } else {
      jumps.push_back(std::move(j));
    }
  }

  // out = L(rho) for Hermitian rho; tmp and flip are scratch of the same
  // shape. No allocation.
  void apply(const RowMatrix& rho, RowMatrix& out, RowMatrix& tmp, RowMatrix& flip) const {
    sparse_times(h_eff, rho, tmp);
    hermitian_part(tmp, out);
    for (const auto& m : monomials) m.sandwich(rho, out);
    for (const auto& j : jumps) {
      // j rho j^dag = (j (j rho)^dag)^dag
      sparse_times(j, rho, tmp);
      flip = tmp.adjoint();
      sparse_times(j, flip, tmp);
      out += tmp.adjoint();
    }
    if (has_dephasing) out.array() += dephasing.array() * rho.array();
  }
};

void check_frame(const SparseMatrix& h, const std::vector<Channel>& channels, const Eigen::VectorXd& f) {
  const double scale = 1e-9 * (1.0 + f.cwiseAbs().maxCoeff());
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
      if (it.value() != Complex(0.0) && std::abs(f[it.row()] - f[it.col()]) > scale) {
        throw InvalidArgument("rotating frame does not commute with the Hamiltonian");
      }
    }
  }
  for (const auto& ch : channels) {
    bool first = true;
    double nu = 0.0;
    for (int k = 0; k < ch.op.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(ch.op, k); it; ++it) {
        if (it.value() == Complex(0.0)) continue;
        const double d = f[it.row()] - f[it.col()];
        if (first) {
          nu = d;
          first = false;
        } else if (std::abs(d - nu) > scale) {
          throw InvalidArgument("channel " + ch.name + " is not an eigenoperator of the rotating frame");
        }
      }
    }
  }
}

}  // namespace

LindbladStats lindblad_visit(const SparseMatrix& h, const DensityMatrix& rho0,
                             const std::vector<Channel>& channels, const EvolutionGrid& grid,
                             const LindbladOptions& options, const DensityObserver& observe) {
  const int dim = rho0.dim();
  if (h.rows() != dim || h.cols() != dim) throw InvalidArgument("Hamiltonian and density matrix dimensions differ");
  if (dim > options.max_dim) {
    throw InvalidArgument("Lindblad propagation is limited to dimension " + std::to_string(options.max_dim) +
                          " (got " + std::to_string(dim) + "); lower the truncation");
  }
  rho0.validate();
  if (sparse_hermiticity_error(h) >= 1e-12) throw InvalidArgument("Hamiltonian is not Hermitian");
  for (const auto& ch : channels) {
    if (ch.op.rows() != dim || ch.op.cols() != dim) throw InvalidArgument("channel dimension mismatch");
    if (!(ch.rate >= 0) || !std::isfinite(ch.rate)) throw InvalidArgument("channel rates must be >= 0");
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(dim);
  if (options.frame) {
    if (options.frame->size() != dim) throw InvalidArgument("frame generator has the wrong length");
    f = *options.frame;
    check_frame(h, channels, f);
  }

  Generator gen;
  gen.h_eff = h;
  for (int i = 0; i < dim; ++i) gen.h_eff.coeffRef(i, i) -= f[i];
  gen.dephasing = CMatrix::Zero(dim, dim);
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    const SparseMatrix ada = SparseMatrix(ch.op.adjoint()) * ch.op;
    gen.h_eff -= Complex(0.0, 0.5 * ch.rate) * ada;
    if (is_diagonal(ch.op)) {
      const CVector l = CMatrix(ch.op).diagonal();
      gen.dephasing += ch.rate * (l * l.adjoint());
      gen.has_dephasing = true;
    } else {
      gen.add_jump(std::sqrt(ch.rate) * ch.op);
    }
  }
  gen.h_eff.prune(Complex(0.0), 0.0);

  // Without the carrier the generator is slow, so a coarser step keeps the
  // RK4 error well below 1e-9 over tau ~ 10.
  const double h_default = options.frame ? std::min(0.005, grid.tau_max() / 2000) : std::min(0.001, grid.tau_max() / 1e4);
  double h_step = options.step.value_or(h_default);
  if (!(h_step > 0)) throw InvalidArgument("integrator step must be > 0");

  LindbladStats stats;
  stats.min_eigenvalue = std::numeric_limits<double>::infinity();
  const Complex trace0 = rho0.trace();

  auto emit = [&](int k, const CMatrix& rot) {
    const double tau = grid.tau(k);
    CMatrix lab = rot;
    if (options.frame) {
      for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) {
          if (lab(i, j) != Complex(0.0)) lab(i, j) *= std::polar(1.0, -(f[i] - f[j]) * tau);
        }
      }
    }
    observe(k, DensityMatrix(rho0.sites(), rho0.dims(), std::move(lab)));
  };

  // Population on the highest oscillator levels, to catch pumping past the
  // truncation. Only meaningful for full four-site states.
  std::vector<int> edge;
  if (rho0.dims().size() == 4) {
    const auto& d = rho0.dims();
    for (int i = 0; i < dim; ++i) {
      const int m = i % d[3];
      const int n = (i / d[3]) % d[2];
      if (n == d[2] - 1 || m == d[3] - 1) edge.push_back(i);
    }
  }
  bool warned = false;
  auto watch_edge = [&](const RowMatrix& r) {
    double pop = 0.0;
    for (int i : edge) pop += r(i, i).real();
    stats.max_edge_population = std::max(stats.max_edge_population, pop);
    if (pop > options.edge_tol && !warned) {
      warn("Lindblad run puts " + std::to_string(pop) + " of the population on the truncation edge");
      warned = true;
    }
  };

  RowMatrix rho = rho0.entries();
  stats.min_eigenvalue = blocked_min_eigenvalue(rho);
  watch_edge(rho);
  emit(0, rho);
  RowMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim), tmp(dim, dim), flip(dim, dim);
  for (int k = 1; k < grid.n_samples(); ++k) {
    const double span = grid.tau(k) - grid.tau(k - 1);
    const RowMatrix start = rho;
    for (;;) {
      const int steps = std::max(1, static_cast<int>(std::ceil(span / h_step - 1e-9)));
      const double dt = span / steps;
      rho = start;
      for (int s = 0; s < steps; ++s) {
        gen.apply(rho, k1, tmp, flip);
        stage = rho + (0.5 * dt) * k1;
        gen.apply(stage, k2, tmp, flip);
        stage = rho + (0.5 * dt) * k2;
        gen.apply(stage, k3, tmp, flip);
        stage = rho + dt * k3;
        gen.apply(stage, k4, tmp, flip);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        stage = rho.adjoint();
        rho = 0.5 * (rho + stage);
      }
      const double lam = blocked_min_eigenvalue(rho);
      if (lam >= -options.positivity_tol) {
        stats.min_eigenvalue = std::min(stats.min_eigenvalue, lam);
        break;
      }
      if (stats.halvings >= options.max_halvings) {
        throw NumericalError("Lindblad step-size underflow: positivity lost (min eigenvalue " +
                             std::to_string(lam) + ") at step " + std::to_string(h_step));
      }
      h_step *= 0.5;
      ++stats.halvings;
    }
    stats.max_trace_drift = std::max(stats.max_trace_drift, std::abs(rho.trace() - trace0));
    watch_edge(rho);
    emit(k, rho);
  }
  stats.step = h_step;
  return stats;
}

std::vector<DensityMatrix> lindblad_propagate(const OperatorMatrix& h, const DensityMatrix& rho0,
                                              const std::vector<Channel>& channels,
                                              const EvolutionGrid& grid, const LindbladOptions& options) {
  const SparseMatrix hs = h.entries().sparseView(0.0, 0.0);
  std::vector<DensityMatrix> out;
  out.reserve(grid.n_samples());
  lindblad_visit(hs, rho0, channels, grid, options, [&](int, const DensityMatrix& r) { out.push_back(r); });
  return out;
}

// ---------------------------------------------------------------- mixtures

MixtureTrajectory::MixtureTrajectory(std::vector<std::vector<Site>> keeps,
                                     std::vector<std::vector<DensityMatrix>> reduced,
                                     std::vector<DensityMatrix> full)
    : keeps_(std::move(keeps)), reduced_(std::move(reduced)), full_(std::move(full)) {}

int MixtureTrajectory::n_samples() const {
  if (!reduced_.empty()) return static_cast<int>(reduced_.front().size());
  return static_cast<int>(full_.size());
}

const DensityMatrix& MixtureTrajectory::reduced(int sample, int keep_index) const {
  return reduced_.at(keep_index).at(sample);
}

const DensityMatrix& MixtureTrajectory::reduced(int sample, std::initializer_list<Site> keep) const {
  std::vector<Site> want(keep);
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < keeps_.size(); ++i) {
    std::vector<Site> have = keeps_[i];
    std::sort(have.begin(), have.end());
    if (have == want) return reduced_[i].at(sample);
  }
  throw InvalidArgument("keep set was not requested for this trajectory");
}

const DensityMatrix& MixtureTrajectory::density(int sample) const {
  if (full_.empty()) throw InvalidArgument("full mixture was not stored");
  return full_.at(sample);
}

namespace {

void check_weights(const std::vector<Branch>& branches) {
  if (branches.empty()) throw InvalidArgument("no branches to evolve");
  double total = 0.0;
  for (const auto& b : branches) total += b.weight;
  if (std::abs(total - 1.0) > 1e-8) throw InvalidArgument("branch weights do not sum to 1");
}

}  // namespace

void evolve_branches_visit(const Propagator& prop, const std::vector<Branch>& branches,
                           const EvolutionGrid& grid, const std::vector<std::vector<Site>>& keeps,
                           const MixtureObserver& observe) {
  check_weights(branches);
  const HilbertSpec spec = branches.front().state.spec();
  std::vector<Reducer> reducers;
  for (const auto& k : keeps) reducers.emplace_back(spec, k);
  std::vector<Propagator::Expansion> exps;
  exps.reserve(branches.size());
  for (const auto& b : branches) exps.push_back(prop.expand(b.state.amplitudes()));
  for (int k = 0; k < grid.n_samples(); ++k) {
    std::vector<CMatrix> acc;
    for (const auto& r : reducers) acc.push_back(CMatrix::Zero(r.kept_dim(), r.kept_dim()));
    for (std::size_t b = 0; b < branches.size(); ++b) {
      const CVector psi = k == 0 ? branches[b].state.amplitudes() : prop.evaluate(exps[b], grid.tau(k));
      for (std::size_t r = 0; r < reducers.size(); ++r) reducers[r].accumulate(psi, branches[b].weight, acc[r]);
    }
    std::vector<DensityMatrix> out;
    for (std::size_t r = 0; r < reducers.size(); ++r) {
      out.emplace_back(reducers[r].sites(), reducers[r].dims(), std::move(acc[r]));
    }
    observe(k, out);
  }
}

MixtureTrajectory evolve_branches(const Propagator& prop, const std::vector<Branch>& branches,
                                  const EvolutionGrid& grid, const std::vector<std::vector<Site>>& keeps,
                                  bool keep_full) {
  std::vector<std::vector<Site>> all = keeps;
  const std::vector<Site> everything{Site::qubit1, Site::qubit2, Site::osc_a, Site::osc_b};
  if (keep_full) all.push_back(everything);
  std::vector<std::vector<DensityMatrix>> reduced(keeps.size());
  std::vector<DensityMatrix> full;
  evolve_branches_visit(prop, branches, grid, all, [&](int, const std::vector<DensityMatrix>& r) {
    for (std::size_t i = 0; i < keeps.size(); ++i) reduced[i].push_back(r[i]);
    if (keep_full) full.push_back(r.back());
  });
  return {keeps, std::move(reduced), std::move(full)};
}

}  // namespace hqs
