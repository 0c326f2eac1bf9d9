#include "hqs/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "hqs/error.hpp"
#include "hqs/log.hpp"

namespace hqs {

void SystemParams::validate() const {
  const double values[] = {r_b, r_d, r_i, omega_tilde, delta_tilde, g_ratio_2};
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("system parameters must be finite");
  }
  if (r_b < 0 || r_d < 0 || r_i < 0) throw InvalidArgument("coupling ratios must be >= 0");
  if (omega_tilde <= 0) throw InvalidArgument("omega_tilde must be > 0");
}

namespace {

struct Entry {
  int row;
  int col;
  Complex value;
};

std::vector<Entry> nonzeros(const CMatrix& m) {
  std::vector<Entry> out;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j) != Complex(0.0)) out.push_back({i, j, m(i, j)});
    }
  }
  return out;
}

CMatrix eye(int n) { return CMatrix::Identity(n, n); }

const CMatrix& sp() {
  static const CMatrix m = pauli(Pauli::plus).entries();
  return m;
}
const CMatrix& sm() {
  static const CMatrix m = pauli(Pauli::minus).entries();
  return m;
}
const CMatrix& sz() {
  static const CMatrix m = pauli(Pauli::z).entries();
  return m;
}

OperatorMatrix dense(const SparseMatrix& s) { return {CMatrix(s), true}; }

}  // namespace

SparseMatrix kron_sites(const HilbertSpec& spec, const CMatrix& q1, const CMatrix& q2,
                        const CMatrix& osc_a, const CMatrix& osc_b) {
  const auto& d = spec.dims();
  if (q1.rows() != 2 || q2.rows() != 2 || osc_a.rows() != d[2] || osc_b.rows() != d[3]) {
    throw InvalidArgument("local operator dimensions do not match the Hilbert space");
  }
  const auto e0 = nonzeros(q1);
  const auto e1 = nonzeros(q2);
  const auto e2 = nonzeros(osc_a);
  const auto e3 = nonzeros(osc_b);
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(e0.size() * e1.size() * e2.size() * e3.size());
  for (const auto& a : e0) {
    for (const auto& b : e1) {
      for (const auto& c : e2) {
        for (const auto& e : e3) {
          trip.emplace_back(spec.index(a.row, b.row, c.row, e.row),
                            spec.index(a.col, b.col, c.col, e.col),
                            a.value * b.value * c.value * e.value);
        }
      }
    }
  }
  SparseMatrix out(spec.total(), spec.total());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseMatrix sparse_free(const SystemParams& p, const HilbertSpec& spec) {
  const int na = spec.n_a();
  const int nb = spec.n_b();
  const CMatrix num_a = number_operator(na).entries();
  const CMatrix num_b = number_operator(nb).entries();
  SparseMatrix h = (0.5 * p.omega0_tilde()) * kron_sites(spec, sz(), eye(2), eye(na), eye(nb));
  h += (0.5 * p.omega0_tilde()) * kron_sites(spec, eye(2), sz(), eye(na), eye(nb));
  h += p.omega_tilde * kron_sites(spec, eye(2), eye(2), num_a, eye(nb));
  h += p.omega_tilde * kron_sites(spec, eye(2), eye(2), eye(na), num_b);
  return h;
}

SparseMatrix sparse_jc(const SystemParams& p, const HilbertSpec& spec, int which) {
  const int na = spec.n_a();
  const int nb = spec.n_b();
  if (which == 1) {
    const CMatrix a = annihilation(na).entries();
    const CMatrix ad = a.adjoint();
    SparseMatrix h = kron_sites(spec, sp(), eye(2), a, eye(nb));
    h += kron_sites(spec, sm(), eye(2), ad, eye(nb));
    return h;
  }
  if (which == 2) {
    const CMatrix b = annihilation(nb).entries();
    const CMatrix bd = b.adjoint();
    SparseMatrix h = kron_sites(spec, eye(2), sp(), eye(na), b);
    h += kron_sites(spec, eye(2), sm(), eye(na), bd);
    return p.g_ratio_2 * h;
  }
  throw InvalidArgument("JC pair index must be 1 or 2");
}

SparseMatrix sparse_bs(const SystemParams& p, const HilbertSpec& spec) {
  const CMatrix a = annihilation(spec.n_a()).entries();
  const CMatrix b = annihilation(spec.n_b()).entries();
  SparseMatrix h = kron_sites(spec, eye(2), eye(2), a, b.adjoint());
  h += kron_sites(spec, eye(2), eye(2), a.adjoint(), b);
  return p.r_b * h;
}

SparseMatrix sparse_dd(const SystemParams& p, const HilbertSpec& spec) {
  const int na = spec.n_a();
  const int nb = spec.n_b();
  SparseMatrix h = kron_sites(spec, sp(), sm(), eye(na), eye(nb));
  h += kron_sites(spec, sm(), sp(), eye(na), eye(nb));
  return p.r_d * h;
}

SparseMatrix sparse_is(const SystemParams& p, const HilbertSpec& spec) {
  return p.r_i * kron_sites(spec, sz(), sz(), eye(spec.n_a()), eye(spec.n_b()));
}

SparseMatrix sparse_total(const SystemParams& p, const HilbertSpec& spec) {
  p.validate();
  SparseMatrix h = sparse_free(p, spec);
  h += sparse_jc(p, spec, 1);
  h += sparse_jc(p, spec, 2);
  if (p.r_b != 0.0) h += sparse_bs(p, spec);
  if (p.r_d != 0.0) h += sparse_dd(p, spec);
  if (p.r_i != 0.0) h += sparse_is(p, spec);
  h.prune(Complex(0.0), 0.0);
  return h;
}

SparseMatrix sparse_excitation(const HilbertSpec& spec) {
  const int na = spec.n_a();
  const int nb = spec.n_b();
  SparseMatrix n = kron_sites(spec, eye(2), eye(2), number_operator(na).entries(), eye(nb));
  n += kron_sites(spec, eye(2), eye(2), eye(na), number_operator(nb).entries());
  n += 0.5 * kron_sites(spec, sz(), eye(2), eye(na), eye(nb));
  n += 0.5 * kron_sites(spec, eye(2), sz(), eye(na), eye(nb));
  return n;
}

OperatorMatrix h_free(const SystemParams& p, const HilbertSpec& spec) {
  return dense(sparse_free(p, spec));
}
OperatorMatrix h_jc(const SystemParams& p, const HilbertSpec& spec, int which) {
  return dense(sparse_jc(p, spec, which));
}
OperatorMatrix h_bs(const SystemParams& p, const HilbertSpec& spec) { return dense(sparse_bs(p, spec)); }
OperatorMatrix h_dd(const SystemParams& p, const HilbertSpec& spec) { return dense(sparse_dd(p, spec)); }
OperatorMatrix h_is(const SystemParams& p, const HilbertSpec& spec) { return dense(sparse_is(p, spec)); }
OperatorMatrix h_total(const SystemParams& p, const HilbertSpec& spec) {
  return dense(sparse_total(p, spec));
}
OperatorMatrix excitation_number(const HilbertSpec& spec) { return dense(sparse_excitation(spec)); }

namespace {

// Places a qubit operator and an oscillator operator on pair `which`.
SparseMatrix on_pair(const HilbertSpec& spec, int which, const CMatrix& q, const CMatrix& o) {
  const int na = spec.n_a();
  const int nb = spec.n_b();
  if (which == 1) return kron_sites(spec, q, eye(2), o, eye(nb));
  if (which == 2) return kron_sites(spec, eye(2), q, eye(na), o);
  throw InvalidArgument("pair index must be 1 or 2");
}

}  // namespace

OperatorMatrix h_dispersive(const SystemParams& p, const HilbertSpec& spec, int which) {
  p.validate();
  if (p.delta_tilde == 0.0) throw InvalidArgument("dispersive Hamiltonian needs nonzero detuning");
  if (std::abs(p.delta_tilde) < 10.0) {
    warn("dispersive approximation used with |delta_tilde| = " + std::to_string(std::abs(p.delta_tilde)) +
         " < 10");
  }
  const int n = which == 1 ? spec.n_a() : spec.n_b();
  const double chi = -1.0 / p.delta_tilde;
  const CMatrix num = number_operator(n).entries();
  SparseMatrix h = on_pair(spec, which, p.omega_tilde * eye(2) + chi * sz(), num);
  h += on_pair(spec, which, 0.5 * (p.omega0_tilde() + chi) * sz() + 0.5 * chi * eye(2), eye(n));
  return dense(h);
}

OperatorMatrix h_pair(const SystemParams& p, const HilbertSpec& spec, int which) {
  p.validate();
  const int n = which == 1 ? spec.n_a() : spec.n_b();
  const CMatrix a = annihilation(n).entries();
  SparseMatrix h = on_pair(spec, which, 0.5 * p.omega0_tilde() * sz(), eye(n));
  h += on_pair(spec, which, eye(2), p.omega_tilde * number_operator(n).entries());
  h += on_pair(spec, which, sp(), a);
  h += on_pair(spec, which, sm(), a.adjoint());
  return dense(h);
}

}  // namespace hqs
