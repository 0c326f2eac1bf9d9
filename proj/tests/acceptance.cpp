// Acceptance suite: one PASS/FAIL line per criterion, details indented above.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "hqs/analytic.hpp"
#include "hqs/cli/run.hpp"
#include "hqs/entanglement.hpp"
#include "hqs/evolve.hpp"
#include "hqs/log.hpp"
#include "hqs/model.hpp"
#include "hqs/states.hpp"
#include "oracle.hpp"

using namespace hqs;

namespace {

constexpr double kPi = std::numbers::pi;

struct Result {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;
  double seconds = 0.0;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const char* fam_name(Family f) { return f == Family::psi1 ? "psi1" : "psi2"; }

// Largest deviations of norm, <H> and <N_exc> seen on any unitary run.
struct Conservation {
  double norm = 0.0;
  double energy = 0.0;
  double excitation = 0.0;
  int runs = 0;
  int states = 0;
} g_cons;

struct Series {
  std::vector<double> tau;
  std::vector<double> cq;
  std::vector<double> eo;
  HilbertSpec spec{2, 2};
};

// Unitary evolution through the library, every branch checked for
// conservation along the way.
Series simulate(const SystemParams& p, const InitialStateSpec& init, const EvolutionGrid& grid, OscMeasure m,
                std::optional<HilbertSpec> fixed = std::nullopt) {
  TruncationRule rule;
  rule.beamsplitter = p.r_b > 0;
  rule.dipole = p.r_d > 0;
  Series s;
  s.spec = fixed ? *fixed : choose_truncation(init, rule);
  const SparseMatrix h = sparse_total(p, s.spec);
  const SparseMatrix nexc = sparse_excitation(s.spec);
  const Propagator prop(h);
  const InitialState st = compose_initial(init, s.spec);
  const std::vector<Site> qq{Site::qubit1, Site::qubit2};
  const std::vector<Site> oo{Site::osc_a, Site::osc_b};
  const Reducer rq(s.spec, qq);
  const Reducer ro(s.spec, oo);
  const int n = grid.n_samples();
  std::vector<CMatrix> q(n, CMatrix::Zero(4, 4));
  std::vector<CMatrix> o;
  if (m != OscMeasure::none) o.assign(n, CMatrix::Zero(ro.kept_dim(), ro.kept_dim()));
  for (const auto& b : st.branches()) {
    const auto e = prop.expand(b.state.amplitudes());
    const CVector& v0 = b.state.amplitudes();
    const double e0 = v0.dot(h * v0).real();
    const double n0 = v0.dot(nexc * v0).real();
    for (int k = 0; k < n; ++k) {
      const CVector v = prop.evaluate(e, grid.tau(k));
      g_cons.norm = std::max(g_cons.norm, std::abs(v.norm() - 1.0));
      g_cons.energy = std::max(g_cons.energy, std::abs(v.dot(h * v).real() - e0));
      g_cons.excitation = std::max(g_cons.excitation, std::abs(v.dot(nexc * v).real() - n0));
      ++g_cons.states;
      rq.accumulate(v, b.weight, q[k]);
      if (!o.empty()) ro.accumulate(v, b.weight, o[k]);
    }
  }
  ++g_cons.runs;
  s.tau = grid.samples();
  for (int k = 0; k < n; ++k) {
    s.cq.push_back(concurrence(q[k]));
    if (o.empty()) continue;
    const DensityMatrix od(oo, ro.dims(), o[k]);
    s.eo.push_back(m == OscMeasure::concurrence ? oscillator_concurrence(od) : log_negativity(od));
  }
  return s;
}

InitialStateSpec ground(Family f, double phi) {
  InitialStateSpec s;
  s.qubits = {f, phi};
  return s;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_diff(const std::vector<double>& tau, const std::vector<double>& v, const std::function<double(double)>& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < tau.size(); ++k) m = std::max(m, std::abs(v[k] - f(tau[k])));
  return m;
}

// Qubit concurrence from the test-side Kronecker/expm route, vacuum start.
double oracle_cq(Family f, double phi, double t, const oracle::Params& p, int levels = 3) {
  const oracle::V psi0 = oracle::product(oracle::bell(f == Family::psi1, phi), oracle::fock(0, levels),
                                         oracle::fock(0, levels));
  const oracle::V v = oracle::evolve(oracle::hamiltonian(p, levels, levels), psi0, t);
  return oracle::wootters(oracle::reduce(v, levels, levels, true));
}

// Runs of at least two samples at zero. A lone sample is an isolated zero
// (e.g. cos^2 tau at pi/2), not a finite stretch of dead entanglement.
int sustained_runs(const std::vector<double>& v, double threshold = 1e-9) {
  int runs = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] <= threshold && v[k - 1] <= threshold && (k < 2 || v[k - 2] > threshold)) ++runs;
  }
  return runs;
}

double total_length(const EsdReport& r) {
  double t = 0.0;
  for (const auto& i : r.intervals) t += i.end - i.start;
  return t;
}

template <class F>
Result timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r = f();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

const std::pair<Family, double> kFamPhi[] = {{Family::psi1, kPi / 4},  {Family::psi1, kPi / 12},
                                             {Family::psi1, kPi / 6},  {Family::psi2, kPi / 4},
                                             {Family::psi2, kPi / 12}, {Family::psi2, kPi / 6}};

// ---------------------------------------------------------------- 1
Result criterion1() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  const EvolutionGrid grid(2 * kPi, 400);
  double worst = 0.0;
  for (auto [f, phi] : kFamPhi) {
    const Series s = simulate({}, ground(f, phi), grid, OscMeasure::concurrence);
    const double dq = max_diff(s.tau, s.cq, [&](double t) { return djc_ground_concurrence(f, phi, t).qubits; });
    const double dofs =
        max_diff(s.tau, s.eo, [&](double t) { return djc_ground_concurrence(f, phi, t).oscillators; });
    worst = std::max({worst, dq, dofs});
    r.details.push_back(fmt("%s phi=%.4f  max|dC_q| %.2e  max|dC_o| %.2e", fam_name(f), phi, dq, dofs));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // independent check of the closed form itself, outside the timed block
  double orc = 0.0;
  for (auto [f, phi] : kFamPhi) {
    for (double t : {0.4, 1.3, 2.9, 5.0}) {
      orc = std::max(orc, std::abs(oracle_cq(f, phi, t, {}) - djc_ground_concurrence(f, phi, t).qubits));
    }
  }
  r.details.push_back(fmt("closed form vs Kronecker/expm oracle: %.2e", orc));
  r.pass = worst < 1e-8 && orc < 1e-8 && secs < 2.0;
  r.summary = fmt("DJC ground: max residual %.2e (tol 1e-8), pipeline %.2f s (limit 2 s)", worst, secs);
  return r;
}

// ---------------------------------------------------------------- 2
Result criterion2() {
  Result r;
  const EvolutionGrid grid(2 * kPi, 400);
  double worst = 0.0;
  for (Coupling c : {Coupling::bs, Coupling::dd, Coupling::ising}) {
    for (double ratio : {0.2, 0.5, 1.0}) {
      double w = 0.0;
      for (double phi : {kPi / 4, kPi / 12, kPi / 6}) {
        SystemParams p;
        (c == Coupling::bs ? p.r_b : c == Coupling::dd ? p.r_d : p.r_i) = ratio;
        const Series s = simulate(p, ground(Family::psi1, phi), grid, OscMeasure::concurrence);
        w = std::max(w, max_diff(s.tau, s.cq,
                                 [&](double t) { return psi1_coupled_concurrence(c, ratio, phi, t).qubits; }));
        w = std::max(w, max_diff(s.tau, s.eo,
                                 [&](double t) { return psi1_coupled_concurrence(c, ratio, phi, t).oscillators; }));
      }
      r.details.push_back(fmt("%-5s r=%.1f  max residual %.2e", to_string(c).c_str(), ratio, w));
      worst = std::max(worst, w);
    }
  }
  // lower bound of the Ising curve, located by Brent on the numerical series
  double bound_err = 0.0;
  for (double ri : {0.2, 0.5, 1.0}) {
    for (double phi : {kPi / 4, kPi / 12}) {
      SystemParams p;
      p.r_i = ri;
      const InitialStateSpec init = ground(Family::psi1, phi);
      const HilbertSpec spec = choose_truncation(init, {});
      const Propagator prop(sparse_total(p, spec));
      const auto e = prop.expand(compose_initial(init, spec).pure().amplitudes());
      auto cq = [&](double t) {
        return concurrence(reduce(StateVector(spec, prop.evaluate(e, t)), {Site::qubit1, Site::qubit2}));
      };
      const double k = std::sqrt(1 + ri * ri);
      const double t_star = kPi / (2 * k);
      const auto [tmin, cmin] = boost::math::tools::brent_find_minima(cq, t_star - 0.5, t_star + 0.5, 50);
      const double expect = ri * ri / (1 + ri * ri) * std::abs(std::sin(2 * phi));
      bound_err = std::max(bound_err, std::abs(cmin - expect));
      r.details.push_back(fmt("ising bound r=%.1f phi=%.4f  min C_q %.10f at %.4f, expected %.10f", ri, phi, cmin,
                              tmin, expect));
    }
  }
  r.pass = worst < 1e-8 && bound_err < 1e-6;
  r.summary = fmt("coupled psi1: max residual %.2e (tol 1e-8), Ising bound error %.2e (tol 1e-6)", worst, bound_err);
  return r;
}

// ---------------------------------------------------------------- 3
struct AmplitudeCheck {
  double modulus = 0.0;
  double phase_adjusted = 0.0;
  double norm = 0.0;
  std::map<std::string, double> per_constant;
};

AmplitudeCheck check_psi2_amplitudes(Coupling c, double ratio, double phi, Transcription tr) {
  SystemParams p;
  (c == Coupling::bs ? p.r_b : p.r_d) = ratio;
  const InitialStateSpec init = ground(Family::psi2, phi);
  TruncationRule rule;
  rule.beamsplitter = c == Coupling::bs;
  rule.dipole = c == Coupling::dd;
  const HilbertSpec spec = choose_truncation(init, rule);
  const Propagator prop(sparse_total(p, spec));
  const auto e = prop.expand(compose_initial(init, spec).pure().amplitudes());
  const EvolutionGrid grid(2 * kPi, 200);
  AmplitudeCheck out;
  for (int k = 0; k < grid.n_samples(); ++k) {
    const double t = grid.tau(k);
    const CVector num = prop.evaluate(e, t);
    const CoefficientSet s = c == Coupling::bs ? psi2_bs_coefficients(ratio, phi, t, p.omega_tilde, tr)
                                               : psi2_dd_coefficients(ratio, phi, t, p.omega_tilde, tr);
    out.norm = std::max(out.norm, std::abs(s.norm_sq() - 1.0));
    // common phase fixed by the overlap of the two full states
    Complex ov = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& l = s.labels[i];
      ov += std::conj(s.values[i]) * num[spec.index(l.q1, l.q2, l.n, l.m)];
    }
    const Complex align = std::abs(ov) > 0 ? std::conj(ov) / std::abs(ov) : Complex(1.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& l = s.labels[i];
      const Complex y = num[spec.index(l.q1, l.q2, l.n, l.m)];
      const double dm = std::abs(std::abs(y) - std::abs(s.values[i]));
      const double dp = std::abs(y * align - s.values[i]);
      out.modulus = std::max(out.modulus, dm);
      out.phase_adjusted = std::max(out.phase_adjusted, dp);
      std::istringstream names(s.constants[i].empty() ? s.names[i] : s.constants[i]);
      std::string token;
      while (names >> token) {
        const std::string key = s.names[i] + ":" + token;
        out.per_constant[key] = std::max(out.per_constant[key], std::max(dm, std::abs(y - s.values[i])));
      }
    }
  }
  return out;
}

Result criterion3() {
  Result r;
  double mod = 0.0, phs = 0.0, nrm = 0.0;
  std::set<std::string> flagged;
  for (Coupling c : {Coupling::bs, Coupling::dd}) {
    for (double ratio : {0.5, 1.0}) {
      for (double phi : {kPi / 4, kPi / 12}) {
        const AmplitudeCheck a = check_psi2_amplitudes(c, ratio, phi, Transcription::corrected);
        mod = std::max(mod, a.modulus);
        phs = std::max(phs, a.phase_adjusted);
        nrm = std::max(nrm, a.norm);
        r.details.push_back(fmt("%s r=%.1f phi=%.4f  modulus %.2e  phase-adjusted %.2e  norm %.2e",
                                to_string(c).c_str(), ratio, phi, a.modulus, a.phase_adjusted, a.norm));
        for (const auto& [key, v] : a.per_constant) {
          if (v > 1e-6) r.details.push_back(fmt("  FLAG %s %s residual %.2e", to_string(c).c_str(), key.c_str(), v));
        }
        const AmplitudeCheck printed = check_psi2_amplitudes(c, ratio, phi, Transcription::as_printed);
        for (const auto& [key, v] : printed.per_constant) {
          if (v > 1e-6) flagged.insert(to_string(c) + " " + key + fmt(" (up to %.2e)", v));
        }
      }
    }
  }
  // keep only the worst entry per amplitude/constant for the printed list
  std::map<std::string, std::string> worst_printed;
  for (const auto& f : flagged) worst_printed[f.substr(0, f.find(" (up"))] = f;
  r.details.push_back("printed transcription, amplitudes disagreeing with numerics (per constant):");
  for (const auto& [k, v] : worst_printed) r.details.push_back("  " + v);
  r.pass = mod < 1e-6 && phs < 1e-6 && nrm < 1e-8;
  r.summary = fmt("psi2 BS/DD amplitudes: modulus %.2e, phase-adjusted %.2e (tol 1e-6), norm %.2e (tol 1e-8); "
                  "%zu printed amplitude/constant pairs flagged",
                  mod, phs, nrm, worst_printed.size());
  return r;
}

// ---------------------------------------------------------------- 4
Result criterion4() {
  Result r;
  double worst = 0.0;
  const EvolutionGrid grid(2 * kPi, 400);
  for (double ri : {0.2, 0.5, 1.0}) {
    for (double phi : {kPi / 4, kPi / 12, kPi / 6}) {
      SystemParams p;
      p.r_i = ri;
      const Series s = simulate(p, ground(Family::psi2, phi), grid, OscMeasure::concurrence);
      const double dq = max_diff(s.tau, s.cq, [&](double t) { return psi2_ising(ri, phi, t, 20).concurrence.qubits; });
      const double dofs =
          max_diff(s.tau, s.eo, [&](double t) { return psi2_ising(ri, phi, t, 20).concurrence.oscillators; });
      worst = std::max({worst, dq, dofs});
    }
  }
  r.details.push_back(fmt("f+- vs numerics over r_i {0.2,0.5,1} x 3 angles: %.2e", worst));

  const EvolutionGrid long_grid(4 * kPi, 4001);
  bool no_esd = true;
  for (double ri : {0.0, 0.5, 1.0}) {
    SystemParams p;
    p.r_i = ri;
    const Series s = simulate(p, ground(Family::psi2, kPi / 4), long_grid, OscMeasure::none);
    const EsdReport e = detect_esd(s.tau, s.cq);
    const double mn = *std::min_element(s.cq.begin(), s.cq.end());
    const int held = sustained_runs(s.cq);
    r.details.push_back(fmt("phi=pi/4 r_i=%.1f  ESD intervals %zu, total %.3e, sustained runs %d, min C_q %.3e", ri,
                            e.intervals.size(), total_length(e), held, mn));
    // r_i = 0 is cos^4 tau, touching zero at odd multiples of pi/2. It stays
    // below 1e-9 within ~5.6e-3 of each touch, which the detector reports as
    // short intervals. The no-ESD claim is about the coupled curve.
    if (ri > 0 && !e.empty()) no_esd = false;
  }
  std::vector<double> first;
  for (double ri : {0.0, 0.5, 1.0}) {
    SystemParams p;
    p.r_i = ri;
    const Series s = simulate(p, ground(Family::psi2, kPi / 12), long_grid, OscMeasure::none);
    const EsdReport e = detect_esd(s.tau, s.cq);
    const double len = e.empty() ? 0.0 : e.intervals[0].end - e.intervals[0].start;
    first.push_back(len);
    r.details.push_back(fmt("phi=pi/12 r_i=%.1f  first ESD [%.4f, %.4f] length %.4f, %zu intervals, total %.4f", ri,
                            e.empty() ? 0.0 : e.intervals[0].start, e.empty() ? 0.0 : e.intervals[0].end, len,
                            e.intervals.size(), total_length(e)));
  }
  const bool shrinking = first[0] > first[1] && first[1] > first[2];
  r.pass = worst < 1e-8 && no_esd && shrinking;
  r.summary = fmt("Ising psi2: residual %.2e (tol 1e-8), no ESD at pi/4 for r_i>0: %s, ESD length %.3f > %.3f > %.3f",
                  worst, no_esd ? "yes" : "no", first[0], first[1], first[2]);
  return r;
}

// ---------------------------------------------------------------- 5
Result criterion5() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  const EvolutionGrid grid(2 * kPi, 400);
  const EvolutionGrid esd_grid(6 * kPi, 3001);
  double worst = 0.0;
  bool iff = true;
  for (int n = 0; n <= 3; ++n) {
    for (int m = 0; m <= 3; ++m) {
      std::string line = fmt("n=%d m=%d", n, m);
      for (Family f : {Family::psi1, Family::psi2}) {
        for (double phi : {kPi / 4, kPi / 12}) {
          InitialStateSpec init = ground(f, phi);
          init.osc_a = Fock{n};
          init.osc_b = Fock{m};
          const Series s = simulate({}, init, grid, OscMeasure::none);
          const double d = max_diff(s.tau, s.cq, [&](double t) { return fock_concurrence(f, phi, n, m, t); });
          worst = std::max(worst, d);
          line += fmt("  %s/%s %.1e", fam_name(f), phi == kPi / 4 ? "pi4" : "pi12", d);
        }
      }
      InitialStateSpec init = ground(Family::psi1, kPi / 4);
      init.osc_a = Fock{n};
      init.osc_b = Fock{m};
      const Series s = simulate({}, init, esd_grid, OscMeasure::none);
      const int touches = static_cast<int>(detect_esd(s.tau, s.cq).intervals.size());
      const bool has = sustained_runs(s.cq) > 0;
      line += fmt("  psi1 pi/4 ESD %s (%d zero runs)", has ? "yes" : "no", touches);
      if (has == (n == 0 && m == 0)) iff = false;
      r.details.push_back(line);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = worst < 1e-8 && iff && secs < 20.0;
  r.summary = fmt("Fock states: max residual %.2e (tol 1e-8), ESD iff n=m=0 %s, %.2f s (limit 20 s)", worst,
                  iff ? "holds" : "violated", secs);
  return r;
}

// ---------------------------------------------------------------- 6
Result criterion6() {
  Result r;
  const EvolutionGrid grid(2 * kPi, 400);
  double worst = 0.0;
  for (double ri : {0.0, 0.2, 0.5, 1.0}) {
    for (double phi : {kPi / 4, kPi / 12, kPi / 6}) {
      SystemParams p;
      p.r_i = ri;
      const Series s = simulate(p, ground(Family::psi1, phi), grid, OscMeasure::concurrence);
      double w = 0.0;
      for (std::size_t k = 0; k < s.tau.size(); ++k) {
        w = std::max(w, std::abs(s.cq[k] + s.eo[k] - std::abs(std::sin(2 * phi))));
      }
      worst = std::max(worst, w);
    }
    r.details.push_back(fmt("r_i=%.1f  max |C_q + C_o - |sin 2phi|| so far %.2e", ri, worst));
  }
  r.details.push_back(fmt("over %d unitary runs (%d states): norm %.2e, <H> %.2e, <N_exc> %.2e", g_cons.runs,
                          g_cons.states, g_cons.norm, g_cons.energy, g_cons.excitation));
  const bool conserved = g_cons.norm < 1e-9 && g_cons.energy < 1e-9 && g_cons.excitation < 1e-9;
  r.pass = worst < 1e-8 && conserved;
  r.summary = fmt("conservation: C_q + C_o residual %.2e (tol 1e-8); drift norm/H/N %.1e/%.1e/%.1e (tol 1e-9)", worst,
                  g_cons.norm, g_cons.energy, g_cons.excitation);
  return r;
}

// ---------------------------------------------------------------- 7
Result criterion7() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  double overlap = 0.0, robust = 0.0;
  for (double mean : {0.1, 0.5, 1.0}) {
    const Complex alpha(std::sqrt(mean), 0.0);
    for (Family f : {Family::psi1, Family::psi2}) {
      for (double phi : {kPi / 4, kPi / 12}) {
        InitialStateSpec init = ground(f, phi);
        init.osc_a = init.osc_b = Coherent{alpha};
        const HilbertSpec spec = choose_truncation(init, {});
        const SystemParams p;
        const Propagator prop(sparse_total(p, spec));
        const auto e = prop.expand(compose_initial(init, spec).pure().amplitudes());
        double defect = 0.0;
        const EvolutionGrid g(10.0, 101);
        for (int k = 0; k < g.n_samples(); ++k) {
          const CVector num = prop.evaluate(e, g.tau(k));
          const CVector ana = coherent_state_vector(f, phi, alpha, g.tau(k), p.omega_tilde, spec).amplitudes();
          defect = std::max(defect, 1.0 - std::abs(ana.dot(num)));
        }
        overlap = std::max(overlap, defect);
        const EvolutionGrid sg(10.0, 501);
        const Series a = simulate(p, init, sg, OscMeasure::none);
        const Series b = simulate(p, init, sg, OscMeasure::none, HilbertSpec(spec.n_a() + 10, spec.n_b() + 10));
        const double d = max_diff(a.cq, b.cq);
        robust = std::max(robust, d);
        r.details.push_back(fmt("|alpha|^2=%.1f %s phi=%.4f  N=%d  1-overlap %.2e  |C(N)-C(N+10)| %.2e", mean,
                                fam_name(f), phi, spec.n_a(), defect, d));
      }
    }
  }
  InitialStateSpec init = ground(Family::psi1, kPi / 12);
  init.osc_a = init.osc_b = Coherent{Complex(1.0, 0.0)};
  const Series s = simulate({}, init, EvolutionGrid(10.0, 2001), OscMeasure::none);
  const EsdReport esd = detect_esd(s.tau, s.cq);
  r.details.push_back(fmt("psi1 phi=pi/12 |alpha|^2=1: %zu ESD intervals, first at %.4f", esd.intervals.size(),
                          esd.empty() ? -1.0 : esd.intervals[0].start));
  init.qubits.phi = kPi / 4;
  const Series s4 = simulate({}, init, EvolutionGrid(10.0, 2001), OscMeasure::none);
  r.details.push_back(fmt("psi1 phi=pi/4  |alpha|^2=1: %zu ESD intervals", detect_esd(s4.tau, s4.cq).intervals.size()));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = overlap < 1e-8 && robust < 1e-8 && !esd.empty() && secs < 60.0;
  r.summary = fmt("coherent: 1-overlap %.2e (tol 1e-8), N vs N+10 %.2e (tol 1e-8), psi1 ESD at |alpha|^2=1: %s, "
                  "%.2f s (limit 60 s)",
                  overlap, robust, esd.empty() ? "no" : "yes", secs);
  return r;
}

// ---------------------------------------------------------------- 8
Result criterion8() {
  Result r;
  // branch route (library) against U rho U^dag on the full matrix (oracle)
  double worst = 0.0;
  for (Family f : {Family::psi1, Family::psi2}) {
    InitialStateSpec init = ground(f, kPi / 12);
    init.osc_a = init.osc_b = Thermal{0.1};
    const EvolutionGrid grid(10.0, 11);
    // library branches, reduced matrices kept
    const HilbertSpec spec = choose_truncation(init, {});
    const InitialState st = compose_initial(init, spec);
    const Propagator prop(sparse_total({}, spec));
    const auto traj = evolve_branches(prop, st.branches(), grid, {{Site::qubit1, Site::qubit2}});
    const int n = spec.n_a();
    const oracle::M h = oracle::hamiltonian({}, n, n);
    Eigen::SelfAdjointEigenSolver<oracle::M> es(h);
    const oracle::M& vec = es.eigenvectors();
    const Eigen::VectorXd& val = es.eigenvalues();
    oracle::M th = oracle::M::Zero(n, n);
    for (int k = 0; k < n; ++k) th(k, k) = std::pow(0.1, k) / std::pow(1.1, k + 1);
    th /= th.trace();
    const oracle::V q = oracle::bell(f == Family::psi1, kPi / 12);
    const oracle::M rho0 =
        Eigen::kroneckerProduct(Eigen::kroneckerProduct(oracle::M(q * q.adjoint()), th).eval(), th).eval();
    const oracle::M x = vec.adjoint() * rho0 * vec;
    double w = 0.0, wc = 0.0;
    for (int k = 0; k < grid.n_samples(); ++k) {
      const double t = grid.tau(k);
      oracle::M y = x;
      for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) y(i, j) *= std::exp(oracle::C(0, -(val[i] - val[j]) * t));
      const oracle::M wv = vec * y;  // rho = wv vec^dag, only the qubit block is formed
      CMatrix red = CMatrix::Zero(4, 4);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int o = 0; o < n * n; ++o) red(a, b) += vec.row(b * n * n + o).dot(wv.row(a * n * n + o));
      const CMatrix& lib = traj.reduced(k, 0).entries();
      w = std::max(w, max_abs_entry(lib - red));
      wc = std::max(wc, std::abs(concurrence(lib) - concurrence(red)));
    }
    w = std::max(w, wc);
    worst = std::max(worst, w);
    r.details.push_back(fmt("%s nbar=0.1 N=%d  branches vs full-matrix propagation: rho_qq and C_qq %.2e", fam_name(f), n, w));
  }

  bool earlier = true;
  for (Family f : {Family::psi1, Family::psi2}) {
    InitialStateSpec th = ground(f, kPi / 12);
    th.osc_a = th.osc_b = Thermal{0.5};
    InitialStateSpec co = ground(f, kPi / 12);
    co.osc_a = co.osc_b = Coherent{Complex(std::sqrt(0.5), 0.0)};
    const EvolutionGrid grid(3.0, 601);
    const Series a = simulate({}, th, grid, OscMeasure::none);
    const Series b = simulate({}, co, grid, OscMeasure::none);
    const EsdReport ea = detect_esd(a.tau, a.cq);
    const EsdReport eb = detect_esd(b.tau, b.cq);
    const double ta = ea.empty() ? INFINITY : ea.intervals[0].start;
    const double tb = eb.empty() ? INFINITY : eb.intervals[0].start;
    r.details.push_back(fmt("%s phi=pi/12  t_ESD thermal nbar=0.5 %.4f, coherent |alpha|^2=0.5 %.4f", fam_name(f), ta, tb));
    if (!(ta < tb)) earlier = false;
  }
  r.pass = worst < 1e-8 && earlier;
  r.summary = fmt("thermal: branch vs full-matrix %.2e (tol 1e-8), thermal ESD onset earlier: %s", worst,
                  earlier ? "yes" : "no");
  return r;
}

// ---------------------------------------------------------------- 9
Result criterion9() {
  Result r;
  double worst = 0.0;
  const EvolutionGrid grid(2 * kPi, 400);
  for (double d : {0.0, 1.0, 2.0}) {
    double w = 0.0;
    for (auto [f, phi] : kFamPhi) {
      SystemParams p;
      p.delta_tilde = d;
      const Series s = simulate(p, ground(f, phi), grid, OscMeasure::none);
      w = std::max(w, max_diff(s.tau, s.cq, [&](double t) { return detuned_concurrence(f, phi, d, t); }));
    }
    r.details.push_back(fmt("delta=%.0f  max residual %.2e", d, w));
    worst = std::max(worst, w);
  }
  oracle::Params op;
  op.omega = 100;
  op.delta = 2;
  const double orc = std::abs(oracle_cq(Family::psi2, kPi / 12, 1.7, op) - detuned_concurrence(Family::psi2, kPi / 12, 2, 1.7));
  r.details.push_back(fmt("oracle spot check at delta=2: %.2e", orc));

  bool saturates = true;
  for (Family f : {Family::psi1, Family::psi2}) {
    for (double phi : {kPi / 4, kPi / 12}) {
      SystemParams p;
      p.omega_tilde = 100;
      p.delta_tilde = 50;
      const Series s = simulate(p, ground(f, phi), EvolutionGrid(10.0, 2001), OscMeasure::none);
      const double mn = *std::min_element(s.cq.begin(), s.cq.end());
      const double floor = 0.95 * std::abs(std::sin(2 * phi));
      r.details.push_back(fmt("delta=50 %s phi=%.4f  min C_q %.6f, floor %.6f", fam_name(f), phi, mn, floor));
      if (mn < floor) saturates = false;
    }
  }

  // dispersive spectrum: exact pair eigenvalues against the diagonal H_eff;
  // the top oscillator level is left out since its JC partner is truncated
  bool disp = true;
  const WarningHandler previous = set_warning_handler([](const std::string&) {});
  for (double d : {20.0, 50.0, 100.0}) {
    SystemParams p;
    p.omega_tilde = 2 * d;
    p.delta_tilde = d;
    const int n = 8;
    const HilbertSpec spec(n, 2);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h_pair(p, spec, 1).entries());
    const CMatrix hd = h_dispersive(p, spec, 1).entries();
    double w = 0.0;
    for (int i = 0; i < spec.total(); ++i) {
      if (spec.digits(i)[2] >= n - 1) continue;
      const double e = hd(i, i).real();
      double best = INFINITY;
      for (int k = 0; k < es.eigenvalues().size(); ++k) best = std::min(best, std::abs(es.eigenvalues()[k] - e));
      w = std::max(w, best);
    }
    r.details.push_back(fmt("dispersive delta=%.0f  max level residual %.2e, bound 10/delta^2 = %.2e", d, w, 10 / (d * d)));
    if (w >= 10 / (d * d)) disp = false;
  }
  set_warning_handler(previous);
  r.pass = worst < 1e-8 && orc < 1e-8 && saturates && disp;
  r.summary = fmt("detuning: residual %.2e (tol 1e-8), delta=50 saturation %s, dispersive spectrum %s", worst,
                  saturates ? "ok" : "violated", disp ? "within 10/delta^2" : "outside bound");
  return r;
}

// ---------------------------------------------------------------- 10
cli::RunConfig open_config(Family f, double phi, double lr, double ld, double nth) {
  cli::RunConfig c;
  c.initial.qubits = {f, phi};
  c.grid = {10.0, 201};
  c.measure = OscMeasure::log_negativity;
  cli::LindbladConfig l;
  l.rates = {lr, ld, nth};
  c.lindblad = l;
  return c;
}

double window_mean(const cli::ResultTable& t, double lo, double hi) {
  double s = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < t.tau.size(); ++k) {
    if (t.tau[k] < lo || t.tau[k] > hi) continue;
    s += t.c_qq[k];
    ++n;
  }
  return s / n;
}

Result criterion10() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  // zero-rate limit through the full pipeline
  double zero = 0.0;
  for (Family f : {Family::psi1, Family::psi2}) {
    for (double rb : {0.0, 0.5}) {
      cli::RunConfig c = open_config(f, kPi / 12, 0, 0, 0);
      c.system.r_b = rb;
      cli::RunConfig u = c;
      u.lindblad.reset();
      u.truncation = cli::truncation_for(c);
      const auto a = cli::run(c);
      const auto b = cli::run(u);
      zero = std::max({zero, max_diff(a.c_qq, b.c_qq), max_diff(a.e_oo, b.e_oo)});
    }
  }
  r.details.push_back(fmt("zero rates vs unitary: %.2e", zero));

  double drift = 0.0;
  for (auto [lr, ld, nth] : {std::tuple{0.1, 0.0, 0.0}, {0.0, 0.1, 0.0}, {0.1, 0.1, 0.2}, {0.05, 0.05, 0.5}}) {
    const auto t = cli::run(open_config(Family::psi2, kPi / 4, lr, ld, nth));
    const double d = t.meta["integrator"]["max_trace_drift"].get<double>();
    drift = std::max(drift, d);
    r.details.push_back(fmt("lambda_r=%.2f lambda_d=%.2f nbar_th=%.1f  trace drift %.2e, min eigenvalue %.2e, N=%d", lr,
                            ld, nth, d, t.meta["integrator"]["min_eigenvalue"].get<double>(),
                            t.meta["truncation"]["n_a"].get<int>()));
  }

  // step-halving check on the default integrator step
  double richardson = 0.0;
  {
    cli::RunConfig c = open_config(Family::psi2, kPi / 4, 0.1, 0.1, 0.0);
    const auto a = cli::run(c);
    c.lindblad->step = a.meta["integrator"]["step"].get<double>() / 2;
    const auto b = cli::run(c);
    richardson = std::max(max_diff(a.c_qq, b.c_qq), max_diff(a.e_oo, b.e_oo));
    r.details.push_back(fmt("step %.4f vs half step: max difference %.2e", *c.lindblad->step * 2, richardson));
  }

  // one excited qubit decaying, the other holding a coherence
  double damp = 0.0;
  for (double lam : {0.05, 0.1, 0.3}) {
    const HilbertSpec s(2, 2);
    const SystemParams p;
    CVector v = CVector::Zero(s.total());
    v[s.index(kExcited, kExcited, 0, 0)] = std::sqrt(0.5);
    v[s.index(kExcited, kGround, 0, 0)] = std::sqrt(0.5);
    const EvolutionGrid grid(10.0, 51);
    const auto traj = lindblad_propagate(h_free(p, s), DensityMatrix::pure(StateVector(s, v)),
                                         lindblad_operators({lam, 0, 0}, s), grid);
    for (int k = 0; k < grid.n_samples(); ++k) {
      const double t = grid.tau(k);
      const CMatrix q1 = partial_trace(traj[k], {Site::qubit1}).entries();
      const CMatrix q2 = partial_trace(traj[k], {Site::qubit2}).entries();
      damp = std::max(damp, std::abs(q1(0, 0).real() - std::exp(-lam * t)));
      damp = std::max(damp, std::abs(std::abs(q2(0, 1)) - 0.5 * std::exp(-lam * t / 2)));
    }
  }
  r.details.push_back(fmt("amplitude damping vs exp(-lambda t): %.2e", damp));

  bool ordering = true;
  for (const char* model : {"djc", "bs", "dd", "ising"}) {
    cli::RunConfig diss = open_config(Family::psi1, kPi / 4, 0.05, 0.0, 0.0);
    cli::RunConfig deph = open_config(Family::psi1, kPi / 4, 0.0, 0.05, 0.0);
    for (cli::RunConfig* c : {&diss, &deph}) {
      if (std::string(model) == "bs") c->system.r_b = 1.0;
      if (std::string(model) == "dd") c->system.r_d = 1.0;
      if (std::string(model) == "ising") c->system.r_i = 1.0;
    }
    const double md = window_mean(cli::run(diss), 2, 10);
    const double mp = window_mean(cli::run(deph), 2, 10);
    r.details.push_back(fmt("%-5s mean C over [2,10]: dissipation %.4f, dephasing %.4f", model, md, mp));
    if (std::string(model) == "djc" && !(mp < md)) ordering = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = zero < 1e-6 && drift < 1e-8 && damp < 1e-6 && richardson < 1e-7 && ordering && secs < 120.0;
  r.summary = fmt("Lindblad: zero-rate %.2e (tol 1e-6), trace drift %.2e (tol 1e-8), damping %.2e (tol 1e-6), "
                  "half step %.2e (tol 1e-7), dephasing below dissipation: %s, %.1f s (limit 120 s)",
                  zero, drift, damp, richardson, ordering ? "yes" : "no", secs);
  return r;
}

// ---------------------------------------------------------------- 11
Result criterion11() {
  Result r;
  bool ok = true;
  double lowest = INFINITY;
  for (Family f : {Family::psi1, Family::psi2}) {
    for (double phi : {kPi / 4, kPi / 12}) {
      InitialStateSpec init = ground(f, phi);
      init.osc_a = init.osc_b = Coherent{Complex(std::sqrt(0.5), 0.0)};
      const Series s = simulate({}, init, EvolutionGrid(50.0, 2001), OscMeasure::none);
      double sum = 0.0, sq = 0.0;
      int n = 0;
      for (std::size_t k = 0; k < s.tau.size(); ++k) {
        if (s.tau[k] < 40.0) continue;
        sum += s.cq[k];
        sq += s.cq[k] * s.cq[k];
        ++n;
      }
      const double mean = sum / n;
      const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
      r.details.push_back(fmt("%s phi=%.4f  std of C_qq on [40,50] %.4f (mean %.4f)", fam_name(f), phi, sd, mean));
      lowest = std::min(lowest, sd);
      if (sd <= 0.01) ok = false;
    }
  }
  r.pass = ok;
  r.summary = fmt("long time: smallest std over [40,50] %.4f (needs > 0.01)", lowest);
  return r;
}

}  // namespace

// Optional arguments restrict the run to the listed criteria.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  std::vector<std::pair<int, std::function<Result()>>> order{
      {1, criterion1}, {2, criterion2}, {3, criterion3},  {4, criterion4},   {5, criterion5},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11},
      {6, criterion6}};  // 6 last: it aggregates conservation over every unitary run
  std::map<int, Result> results;
  for (auto& [id, fn] : order) {
    if (!only.empty() && !only.count(id)) continue;
    results[id] = timed(fn);
    std::fprintf(stderr, "criterion %d done in %.1f s\n", id, results[id].seconds);
  }

  int failed = 0;
  for (const auto& [id, res] : results) {
    for (const auto& d : res.details) std::printf("    [%d] %s\n", id, d.c_str());
    std::printf("criterion %2d %s  %s  (%.2f s)\n", id, res.pass ? "PASS" : "FAIL", res.summary.c_str(), res.seconds);
    std::fflush(stdout);
    if (!res.pass) ++failed;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
