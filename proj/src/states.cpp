#include "hqs/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "hqs/error.hpp"
#include "hqs/log.hpp"

namespace hqs {

namespace {

constexpr int kPmfSpan = 2 * kMaxTruncation;

void check_nbar(double nbar) {
  if (!std::isfinite(nbar) || nbar < 0) throw InvalidArgument("thermal occupation must be >= 0");
}

void check_alpha(Complex alpha) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw InvalidArgument("coherent amplitude must be finite");
  }
}

}  // namespace

CVector bell_ket(const QubitPairSpec& q) {
  CVector v = CVector::Zero(4);
  const double c = std::cos(q.phi);
  const double s = std::sin(q.phi);
  if (q.family == Family::psi1) {
    v[kExcited * 2 + kGround] = c;
    v[kGround * 2 + kExcited] = s;
  } else {
    v[kExcited * 2 + kExcited] = c;
    v[kGround * 2 + kGround] = s;
  }
  return v;
}

double coherent_tail(double mean, int n_levels) {
  if (n_levels <= 0) return 1.0;
  if (mean <= 0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(n_levels), mean);
}

double thermal_tail(double nbar, int n_levels) {
  check_nbar(nbar);
  if (n_levels <= 0) return 1.0;
  return std::pow(nbar / (1.0 + nbar), n_levels);
}

namespace {

template <class Tail>
int levels_for(Tail tail, double tol, const char* what) {
  for (int n = 2; n <= kMaxTruncation; ++n) {
    if (tail(n) < tol) return n;
  }
  warn(std::string(what) + " needs more than " + std::to_string(kMaxTruncation) +
       " levels; truncating and renormalizing");
  return kMaxTruncation;
}

}  // namespace

int coherent_levels(Complex alpha, double tol) {
  check_alpha(alpha);
  const double mean = std::norm(alpha);
  return levels_for([&](int n) { return coherent_tail(mean, n); }, tol, "coherent state");
}

int thermal_levels(double nbar, double tol) {
  check_nbar(nbar);
  return levels_for([&](int n) { return thermal_tail(nbar, n); }, tol, "thermal state");
}

namespace {

CVector coherent_amplitudes(Complex alpha, int n_levels) {
  CVector q(n_levels);
  q[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < n_levels; ++n) q[n] = q[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return q;
}

}  // namespace

CVector coherent_ket(Complex alpha, int n_levels) {
  check_alpha(alpha);
  if (n_levels < 1) throw InvalidTruncation("coherent state needs at least one level");
  const double tail = coherent_tail(std::norm(alpha), n_levels);
  if (tail >= kTailTolerance) {
    throw TruncationTooSmall("coherent state |alpha|^2=" + std::to_string(std::norm(alpha)) +
                             " loses " + std::to_string(tail) + " beyond N=" + std::to_string(n_levels));
  }
  CVector q = coherent_amplitudes(alpha, n_levels);
  return q / q.norm();
}

Eigen::VectorXd thermal_populations(double nbar, int n_levels) {
  check_nbar(nbar);
  if (n_levels < 1) throw InvalidTruncation("thermal state needs at least one level");
  const double tail = thermal_tail(nbar, n_levels);
  if (tail >= kTailTolerance) {
    throw TruncationTooSmall("thermal state nbar=" + std::to_string(nbar) + " loses " +
                             std::to_string(tail) + " beyond N=" + std::to_string(n_levels));
  }
  Eigen::VectorXd p(n_levels);
  const double x = nbar / (1.0 + nbar);
  p[0] = 1.0 / (1.0 + nbar);
  for (int n = 1; n < n_levels; ++n) p[n] = p[n - 1] * x;
  return p / p.sum();
}

CMatrix thermal_dm(double nbar, int n_levels) {
  return thermal_populations(nbar, n_levels).cast<Complex>().asDiagonal();
}

Eigen::VectorXd occupation_pmf(const OscillatorSpec& osc, int n_max) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_max);
  if (const auto* f = std::get_if<Fock>(&osc)) {
    if (f->n < 0) throw InvalidArgument("Fock occupation must be >= 0");
    if (f->n < n_max) p[f->n] = 1.0;
  } else if (const auto* c = std::get_if<Coherent>(&osc)) {
    check_alpha(c->alpha);
    const CVector q = coherent_amplitudes(c->alpha, n_max);
    p = q.cwiseAbs2();
  } else {
    const double nbar = std::get<Thermal>(osc).nbar;
    check_nbar(nbar);
    const double x = nbar / (1.0 + nbar);
    double v = 1.0 / (1.0 + nbar);
    for (int n = 0; n < n_max; ++n, v *= x) p[n] = v;
  }
  return p;
}

int tail_levels(const Eigen::VectorXd& pmf, double tol) {
  double tail = 0.0;
  int level = static_cast<int>(pmf.size());
  // walk down while the mass at and above `level - 1` stays below tol
  while (level > 0 && tail + pmf[level - 1] < tol) {
    tail += pmf[level - 1];
    --level;
  }
  return level;
}

HilbertSpec choose_truncation(const InitialStateSpec& spec, const TruncationRule& rule) {
  const Eigen::VectorXd pa = occupation_pmf(spec.osc_a, kPmfSpan);
  const Eigen::VectorXd pb = occupation_pmf(spec.osc_b, kPmfSpan);
  const int headroom = (rule.beamsplitter || rule.dipole) ? 2 : 1;
  int na = 0;
  int nb = 0;
  if (rule.beamsplitter) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(kPmfSpan);
    for (int i = 0; i < kPmfSpan; ++i) {
      for (int j = 0; i + j < kPmfSpan; ++j) sum[i + j] += pa[i] * pb[j];
    }
    na = nb = tail_levels(sum) + headroom;
  } else {
    na = tail_levels(pa) + headroom;
    nb = tail_levels(pb) + headroom;
  }
  na = std::max(2, na + rule.extra);
  nb = std::max(2, nb + rule.extra);
  if (na > kMaxTruncation || nb > kMaxTruncation) {
    warn("oscillator truncation capped at " + std::to_string(kMaxTruncation) + " levels");
    na = std::min(na, kMaxTruncation);
    nb = std::min(nb, kMaxTruncation);
  }
  return {na, nb};
}

InitialState::InitialState(HilbertSpec spec, std::vector<Branch> branches)
    : spec_(spec), branches_(std::move(branches)) {
  if (branches_.empty()) throw InvalidArgument("initial state needs at least one branch");
  double total = 0.0;
  for (const auto& b : branches_) {
    if (!(b.state.spec() == spec_)) throw InvalidArgument("branch lives in a different Hilbert space");
    if (b.weight < 0) throw InvalidArgument("branch weights must be non-negative");
    total += b.weight;
  }
  if (std::abs(total - 1.0) > 1e-10) throw InvalidArgument("branch weights must sum to 1");
}

const StateVector& InitialState::pure() const {
  if (!is_pure()) throw InvalidArgument("initial state is a mixture");
  return branches_.front().state;
}

DensityMatrix InitialState::density() const {
  CMatrix rho = CMatrix::Zero(spec_.total(), spec_.total());
  for (const auto& b : branches_) {
    const CVector& a = b.state.amplitudes();
    rho.noalias() += b.weight * (a * a.adjoint());
  }
  return DensityMatrix::full(spec_, std::move(rho));
}

namespace {

struct LocalTerm {
  double weight;
  CVector ket;
};

std::vector<LocalTerm> local_terms(const OscillatorSpec& osc, int n_levels) {
  std::vector<LocalTerm> out;
  if (const auto* f = std::get_if<Fock>(&osc)) {
    if (f->n < 0 || f->n >= n_levels) {
      throw InvalidArgument("Fock state |" + std::to_string(f->n) + "> does not fit in N=" +
                            std::to_string(n_levels));
    }
    CVector v = CVector::Zero(n_levels);
    v[f->n] = 1.0;
    out.push_back({1.0, v});
  } else if (const auto* c = std::get_if<Coherent>(&osc)) {
    if (n_levels >= kMaxTruncation && coherent_tail(std::norm(c->alpha), n_levels) >= kTailTolerance) {
      CVector q = coherent_amplitudes(c->alpha, n_levels);
      out.push_back({1.0, q / q.norm()});
    } else {
      out.push_back({1.0, coherent_ket(c->alpha, n_levels)});
    }
  } else {
    const double nbar = std::get<Thermal>(osc).nbar;
    Eigen::VectorXd p;
    if (n_levels >= kMaxTruncation && thermal_tail(nbar, n_levels) >= kTailTolerance) {
      p = occupation_pmf(osc, n_levels);
      p /= p.sum();
    } else {
      p = thermal_populations(nbar, n_levels);
    }
    for (int n = 0; n < n_levels; ++n) {
      CVector v = CVector::Zero(n_levels);
      v[n] = 1.0;
      out.push_back({p[n], v});
    }
  }
  return out;
}

}  // namespace

InitialState compose_initial(const InitialStateSpec& spec, const HilbertSpec& hs) {
  const CVector q = bell_ket(spec.qubits);
  const auto ta = local_terms(spec.osc_a, hs.n_a());
  const auto tb = local_terms(spec.osc_b, hs.n_b());
  const int nab = hs.n_a() * hs.n_b();
  std::vector<Branch> branches;
  double total = 0.0;
  for (const auto& a : ta) {
    for (const auto& b : tb) {
      const double w = a.weight * b.weight;
      if (w < kBranchCutoff) continue;
      CVector osc(nab);
      for (int n = 0; n < hs.n_a(); ++n) {
        for (int m = 0; m < hs.n_b(); ++m) osc[n * hs.n_b() + m] = a.ket[n] * b.ket[m];
      }
      CVector full = CVector::Zero(hs.total());
      for (int k = 0; k < 4; ++k) {
        if (q[k] != Complex(0.0)) full.segment(k * nab, nab) = q[k] * osc;
      }
      branches.push_back({w, StateVector(hs, std::move(full))});
      total += w;
    }
  }
  for (auto& b : branches) b.weight /= total;
  return {hs, std::move(branches)};
}

}  // namespace hqs
