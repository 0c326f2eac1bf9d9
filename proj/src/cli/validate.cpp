#include "hqs/cli/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <thread>

#include "hqs/analytic.hpp"
#include "hqs/cli/run.hpp"
#include "hqs/cli/scenario.hpp"

namespace hqs::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Job {
  std::string name;
  double tolerance;
  std::function<double()> residual;
};

RunConfig concurrence_case(Family f, double phi) {
  RunConfig c;
  c.initial.qubits = {f, phi};
  c.grid = {2 * kPi, 400};
  c.measure = OscMeasure::none;
  c.validation.enabled = true;
  return c;
}

Job from_run(std::string name, RunConfig c, double tol) {
  c.name = name;
  c.validation.tolerance = tol;
  return {std::move(name), tol, [c] { return run(c).max_residual(); }};
}

// Largest |y_analytic - y_numeric| over all amplitudes and 200 times.
double psi2_amplitude_residual(Coupling cp, double r, double phi) {
  SystemParams p;
  (cp == Coupling::bs ? p.r_b : p.r_d) = r;
  InitialStateSpec init;
  init.qubits = {Family::psi2, phi};
  TruncationRule rule;
  rule.beamsplitter = cp == Coupling::bs;
  rule.dipole = cp == Coupling::dd;
  const HilbertSpec spec = choose_truncation(init, rule);
  const Propagator prop(sparse_total(p, spec));
  const StateVector psi0 = compose_initial(init, spec).pure();
  const auto e = prop.expand(psi0.amplitudes());
  const EvolutionGrid grid(2 * kPi, 200);
  double worst = 0.0;
  for (int k = 0; k < grid.n_samples(); ++k) {
    const double t = grid.tau(k);
    const CVector num = prop.evaluate(e, t);
    const CoefficientSet s = cp == Coupling::bs ? psi2_bs_coefficients(r, phi, t, p.omega_tilde)
                                                : psi2_dd_coefficients(r, phi, t, p.omega_tilde);
    const CVector ana = s.to_state(spec).amplitudes();
    worst = std::max(worst, (num - ana).cwiseAbs().maxCoeff());
  }
  return worst;
}

double coherent_overlap_defect(Family f, double mean) {
  InitialStateSpec init;
  init.qubits = {f, kPi / 4};
  const Complex alpha(std::sqrt(mean), 0.0);
  init.osc_a = init.osc_b = Coherent{alpha};
  const HilbertSpec spec = choose_truncation(init, {});
  SystemParams p;
  const Propagator prop(sparse_total(p, spec));
  const StateVector psi0 = compose_initial(init, spec).pure();
  const auto e = prop.expand(psi0.amplitudes());
  double worst = 0.0;
  for (double t : {0.5, 1.7, 3.1, 6.0}) {
    const CVector num = prop.evaluate(e, t);
    const CVector ana = coherent_state_vector(f, kPi / 4, alpha, t, p.omega_tilde, spec).amplitudes();
    worst = std::max(worst, 1.0 - std::abs(ana.dot(num)));
  }
  return worst;
}

std::vector<Job> jobs() {
  std::vector<Job> out;
  const std::pair<Family, const char*> fams[] = {{Family::psi1, "psi1"}, {Family::psi2, "psi2"}};
  const std::pair<double, const char*> phis[] = {{kPi / 4, "pi/4"}, {kPi / 12, "pi/12"}, {kPi / 6, "pi/6"}};
  for (auto [f, fn] : fams) {
    for (auto [phi, pn] : phis) {
      out.push_back(from_run(std::string("djc ground ") + fn + " phi=" + pn, concurrence_case(f, phi), 1e-8));
    }
  }
  const std::pair<Coupling, const char*> cps[] = {{Coupling::bs, "bs"}, {Coupling::dd, "dd"}, {Coupling::ising, "ising"}};
  for (auto [cp, cn] : cps) {
    for (double r : {0.2, 0.5, 1.0}) {
      for (auto [f, fn] : fams) {
        for (auto [phi, pn] : {phis[0], phis[1]}) {
          RunConfig c = concurrence_case(f, phi);
          (cp == Coupling::bs ? c.system.r_b : cp == Coupling::dd ? c.system.r_d : c.system.r_i) = r;
          char buf[96];
          std::snprintf(buf, sizeof buf, "%s %s r=%g phi=%s", cn, fn, r, pn);
          out.push_back(from_run(buf, c, 1e-8));
        }
      }
    }
  }
  for (int n = 0; n <= 3; ++n) {
    for (int m = 0; m <= 3; ++m) {
      for (auto [f, fn] : fams) {
        RunConfig c = concurrence_case(f, kPi / 4);
        c.initial.osc_a = Fock{n};
        c.initial.osc_b = Fock{m};
        out.push_back(from_run("fock " + std::string(fn) + " n=" + std::to_string(n) + " m=" + std::to_string(m), c,
                               1e-8));
      }
    }
  }
  for (double mean : {0.1, 0.5, 1.0}) {
    for (auto [f, fn] : fams) {
      RunConfig c = concurrence_case(f, kPi / 12);
      c.initial.osc_a = c.initial.osc_b = Coherent{Complex(std::sqrt(mean), 0.0)};
      char buf[64];
      std::snprintf(buf, sizeof buf, "coherent %s |alpha|^2=%g", fn, mean);
      out.push_back(from_run(buf, c, 1e-6));
      std::snprintf(buf, sizeof buf, "coherent overlap %s |alpha|^2=%g", fn, mean);
      const Family ff = f;
      out.push_back({buf, 1e-8, [ff, mean] { return coherent_overlap_defect(ff, mean); }});
    }
  }
  for (double d : {1.0, 2.0}) {
    for (auto [f, fn] : fams) {
      RunConfig c = concurrence_case(f, kPi / 12);
      c.system.delta_tilde = d;
      char buf[64];
      std::snprintf(buf, sizeof buf, "detuned %s delta=%g", fn, d);
      out.push_back(from_run(buf, c, 1e-8));
    }
  }
  for (auto [cp, cn] : {cps[0], cps[1]}) {
    for (double r : {0.5, 1.0}) {
      for (auto [phi, pn] : {phis[0], phis[1]}) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "psi2 %s amplitudes r=%g phi=%s", cn, r, pn);
        const Coupling c = cp;
        const double ph = phi;
        out.push_back({buf, 1e-6, [c, r, ph] { return psi2_amplitude_residual(c, r, ph); }});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<ValidationCase> validate_all() {
  const std::vector<Job> js = jobs();
  std::vector<ValidationCase> out(js.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= js.size()) return;
      ValidationCase& c = out[i];
      c.name = js[i].name;
      c.tolerance = js[i].tolerance;
      try {
        c.max_residual = js[i].residual();
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  const int n = std::min<int>(worker_count(), static_cast<int>(js.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

bool print_report(const std::vector<ValidationCase>& cases, std::ostream& out) {
  bool all = true;
  char line[256];
  for (const auto& c : cases) {
    if (c.error.empty()) {
      std::snprintf(line, sizeof line, "%-44s %.3e  tol %.0e  %s\n", c.name.c_str(), c.max_residual, c.tolerance,
                    c.ok() ? "ok" : "EXCEEDED");
    } else {
      std::snprintf(line, sizeof line, "%-44s error: %s\n", c.name.c_str(), c.error.c_str());
    }
    out << line;
    all = all && c.ok();
  }
  return all;
}

}  // namespace hqs::cli
