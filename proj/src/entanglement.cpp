#include "hqs/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "hqs/error.hpp"

namespace hqs {

namespace {

const CMatrix& sy_sy() {
  static const CMatrix m = [] {
    CMatrix s(4, 4);
    s.setZero();
    // sy x sy in any two-level basis ordering: anti-diagonal (-1, 1, 1, -1)
    s(0, 3) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 0) = -1.0;
    return s;
  }();
  return m;
}

void require_two_qubit(const CMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw InvalidArgument("concurrence needs a 4x4 density matrix");
  if (hermiticity_error(rho) > 1e-8) throw InvalidArgument("concurrence needs a Hermitian matrix");
}

double wootters(std::vector<double> lam) {
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

}  // namespace

double concurrence(const CMatrix& rho) {
  require_two_qubit(rho);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in concurrence");
  Eigen::VectorXd w = es.eigenvalues();
  for (int i = 0; i < 4; ++i) {
    if (w[i] < 0) {
      if (w[i] < -1e-7) throw InvalidArgument("concurrence input has a negative eigenvalue");
      w[i] = 0;
    }
  }
  const CMatrix v = es.eigenvectors() * w.cwiseSqrt().asDiagonal();
  const CMatrix t = v.transpose() * sy_sy() * v;
  Eigen::JacobiSVD<CMatrix> svd(t);
  const Eigen::VectorXd s = svd.singularValues();
  return wootters({s[0], s[1], s[2], s[3]});
}

double concurrence(const DensityMatrix& rho) { return concurrence(rho.entries()); }

double concurrence_spin_flip(const CMatrix& rho) {
  require_two_qubit(rho);
  const CMatrix r = rho * sy_sy() * rho.conjugate() * sy_sy();
  Eigen::ComplexEigenSolver<CMatrix> es(r, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in concurrence");
  std::vector<double> lam;
  for (int i = 0; i < 4; ++i) {
    const Complex e = es.eigenvalues()[i];
    if (std::abs(e.imag()) > 1e-7) throw NumericalError("spin-flip spectrum has a complex eigenvalue");
    lam.push_back(std::sqrt(std::max(0.0, e.real())));
  }
  return wootters(lam);
}

namespace {

void check_zero(const CMatrix& rho, int i, int j) {
  if (std::abs(rho(i, j)) > 1e-10) {
    throw StructureError("closed-form concurrence: entry (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ") must vanish");
  }
}

double nonneg(Complex c) { return std::max(0.0, c.real()); }

}  // namespace

double concurrence_block(const CMatrix& rho) {
  require_two_qubit(rho);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool inner = (i == 1 || i == 2) && (j == 1 || j == 2);
      if (i != j && !inner) check_zero(rho, i, j);
    }
  }
  return 2.0 * std::max(0.0, std::abs(rho(1, 2)) - std::sqrt(nonneg(rho(0, 0)) * nonneg(rho(3, 3))));
}

double concurrence_x_state(const CMatrix& rho) {
  require_two_qubit(rho);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j && i + j != 3) check_zero(rho, i, j);
    }
  }
  const double a = std::abs(rho(1, 2)) - std::sqrt(nonneg(rho(0, 0)) * nonneg(rho(3, 3)));
  const double b = std::abs(rho(0, 3)) - std::sqrt(nonneg(rho(1, 1)) * nonneg(rho(2, 2)));
  return 2.0 * std::max({0.0, a, b});
}

double log_negativity(const CMatrix& rho, int d1, int d2) {
  const CMatrix pt = partial_transpose(rho, d1, d2, 1);
  double norm1 = 0.0;
  for (const auto& g : connected_blocks(pt)) {
    const int n = static_cast<int>(g.size());
    if (n == 1) {
      norm1 += std::abs(pt(g[0], g[0]).real());
      continue;
    }
    CMatrix sub(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) sub(i, j) = pt(g[i], g[j]);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in log-negativity");
    norm1 += es.eigenvalues().cwiseAbs().sum();
  }
  const double ln = std::log2(norm1);
  if (ln < 0 && ln >= -1e-9) return 0.0;
  return ln;
}

double log_negativity(const DensityMatrix& rho) {
  if (rho.dims().size() != 2) throw InvalidArgument("log-negativity needs a bipartite density matrix");
  return log_negativity(rho.entries(), rho.dims()[0], rho.dims()[1]);
}

std::string to_string(OscMeasure m) {
  switch (m) {
    case OscMeasure::concurrence:
      return "concurrence";
    case OscMeasure::log_negativity:
      return "log_negativity";
    case OscMeasure::none:
      return "none";
  }
  return "none";
}

double oscillator_concurrence(const DensityMatrix& osc_pair) {
  if (osc_pair.dims().size() != 2) throw InvalidArgument("oscillator concurrence needs a bipartite matrix");
  const int nb = osc_pair.dims()[1];
  const int idx[4] = {0, 1, nb, nb + 1};
  CMatrix sub(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) sub(i, j) = osc_pair.entries()(idx[i], idx[j]);
  }
  const double outside = std::abs(osc_pair.trace().real() - sub.trace().real());
  if (outside > 1e-8) {
    throw InvalidArgument("oscillator concurrence requested but " + std::to_string(outside) +
                          " of the population lies outside {|0>,|1>}; use log_negativity");
  }
  return concurrence(sub);
}

EntanglementSample measure_sample(double tau, const DensityMatrix& qubits, const DensityMatrix& oscillators,
                                  OscMeasure kind) {
  EntanglementSample s;
  s.tau = tau;
  s.qubit_concurrence = concurrence(qubits);
  s.oscillator_kind = kind;
  if (kind == OscMeasure::concurrence) {
    s.oscillator_measure = oscillator_concurrence(oscillators);
  } else if (kind == OscMeasure::log_negativity) {
    s.oscillator_measure = log_negativity(oscillators);
  }
  return s;
}

std::vector<EntanglementSample> measure_series(const std::vector<StateVector>& states,
                                               std::span<const double> taus, OscMeasure kind) {
  if (states.size() != taus.size()) throw InvalidArgument("measure_series: states and times differ in length");
  std::vector<EntanglementSample> out;
  if (states.empty()) return out;
  const HilbertSpec spec = states.front().spec();
  const Site qq[] = {Site::qubit1, Site::qubit2};
  const Site oo[] = {Site::osc_a, Site::osc_b};
  const Reducer rq(spec, qq);
  const Reducer ro(spec, oo);
  out.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (!(states[k].spec() == spec)) throw InvalidArgument("measure_series: inconsistent dimensions");
    const DensityMatrix q = rq.reduce(states[k].amplitudes());
    if (kind == OscMeasure::none) {
      out.push_back({taus[k], concurrence(q), 0.0, kind});
    } else {
      out.push_back(measure_sample(taus[k], q, ro.reduce(states[k].amplitudes()), kind));
    }
  }
  return out;
}

EsdReport detect_esd(std::span<const double> taus, std::span<const double> values, double threshold) {
  if (taus.size() != values.size()) throw InvalidArgument("detect_esd: times and values differ in length");
  if (taus.empty()) throw InvalidArgument("detect_esd: empty series");
  EsdReport rep;
  rep.threshold = threshold;
  const std::size_t n = taus.size();
  auto cross = [&](std::size_t a, std::size_t b) {
    const double va = values[a];
    const double vb = values[b];
    if (va == vb) return taus[a];
    return taus[a] + (threshold - va) * (taus[b] - taus[a]) / (vb - va);
  };
  std::size_t k = 0;
  while (k < n) {
    if (values[k] > threshold) {
      ++k;
      continue;
    }
    const std::size_t lo = k;
    while (k < n && values[k] <= threshold) ++k;
    const std::size_t hi = k - 1;
    const double start = lo == 0 ? taus[0] : cross(lo - 1, lo);
    const double end = hi == n - 1 ? taus[n - 1] : cross(hi, hi + 1);
    rep.intervals.push_back({start, end});
  }
  return rep;
}

EsdReport detect_esd(const std::vector<EntanglementSample>& series, SeriesColumn column, double threshold) {
  std::vector<double> t;
  std::vector<double> v;
  for (const auto& s : series) {
    t.push_back(s.tau);
    v.push_back(column == SeriesColumn::qubit ? s.qubit_concurrence : s.oscillator_measure);
  }
  return detect_esd(t, v, threshold);
}

}  // namespace hqs
