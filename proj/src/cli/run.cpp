#include "hqs/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "hqs/analytic.hpp"

namespace hqs::cli {

namespace {

constexpr const char* kVersion = "hqs 1.0";

// Thermal bath occupation pumps the oscillators towards nbar_th; make room
// for the part of that distribution above 1e-4.
constexpr double kBathTail = 1e-4;

const std::vector<Site> kQubits{Site::qubit1, Site::qubit2};
const std::vector<Site> kOscillators{Site::osc_a, Site::osc_b};

int couplings_on(const SystemParams& p) { return (p.r_b > 0) + (p.r_d > 0) + (p.r_i > 0); }

// omega N_exc: commutes with every term of H and shifts each channel by a
// fixed amount, so it is a valid interaction frame for any parameters.
Eigen::VectorXd excitation_frame(const SystemParams& p, const HilbertSpec& spec) {
  Eigen::VectorXd f(spec.total());
  for (int i = 0; i < spec.total(); ++i) {
    const auto d = spec.digits(i);
    const double sz = (d[0] == kExcited ? 0.5 : -0.5) + (d[1] == kExcited ? 0.5 : -0.5);
    f[i] = p.omega_tilde * (d[2] + d[3] + sz);
  }
  return f;
}

double qubit_concurrence(const StateVector& psi) {
  return concurrence(reduce(psi, {Site::qubit1, Site::qubit2}));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace

double ResultTable::max_residual() const {
  double m = 0.0;
  for (std::size_t k = 0; k < c_qq_analytic.size(); ++k) m = std::max(m, std::abs(c_qq[k] - c_qq_analytic[k]));
  return m;
}

HilbertSpec truncation_for(const RunConfig& cfg) {
  if (cfg.truncation) return *cfg.truncation;
  TruncationRule rule;
  rule.beamsplitter = cfg.system.r_b > 0;
  rule.dipole = cfg.system.r_d > 0;
  rule.extra = cfg.lindblad ? 2 : 0;
  HilbertSpec hs = choose_truncation(cfg.initial, rule);
  if (cfg.lindblad && cfg.lindblad->rates.nbar_th > 0 && cfg.lindblad->rates.lambda_r > 0) {
    const int floor = std::min(kMaxTruncation, thermal_levels(cfg.lindblad->rates.nbar_th, kBathTail) + 1);
    hs = HilbertSpec(std::max(hs.n_a(), floor), std::max(hs.n_b(), floor));
  }
  return hs;
}

std::optional<std::vector<double>> analytic_series(const RunConfig& cfg, const HilbertSpec& spec) {
  const SystemParams& p = cfg.system;
  if (cfg.lindblad || p.g_ratio_2 != 1.0) return std::nullopt;
  const Family fam = cfg.initial.qubits.family;
  const double phi = cfg.initial.qubits.phi;
  const EvolutionGrid grid(cfg.grid.tau_max, cfg.grid.n_samples);
  const int on = couplings_on(p);
  const auto* fa = std::get_if<Fock>(&cfg.initial.osc_a);
  const auto* fb = std::get_if<Fock>(&cfg.initial.osc_b);
  const auto* ca = std::get_if<Coherent>(&cfg.initial.osc_a);
  const auto* cb = std::get_if<Coherent>(&cfg.initial.osc_b);
  const bool ground = fa && fb && fa->n == 0 && fb->n == 0;

  std::function<double(double)> f;
  if (p.delta_tilde != 0.0) {
    if (on == 0 && ground) f = [&](double t) { return detuned_concurrence(fam, phi, p.delta_tilde, t); };
  } else if (fa && fb && on == 0) {
    const int n = fa->n;
    const int m = fb->n;
    f = [&, n, m](double t) { return fock_concurrence(fam, phi, n, m, t); };
  } else if (ground && on == 1) {
    const Coupling c = p.r_b > 0 ? Coupling::bs : (p.r_d > 0 ? Coupling::dd : Coupling::ising);
    const double r = p.r_b + p.r_d + p.r_i;
    if (fam == Family::psi1) {
      f = [&, c, r](double t) { return psi1_coupled_concurrence(c, r, phi, t).qubits; };
    } else if (c == Coupling::ising) {
      f = [&, r](double t) { return psi2_ising(r, phi, t, p.omega_tilde).concurrence.qubits; };
    } else {
      f = [&, c, r](double t) {
        const CoefficientSet s = c == Coupling::bs ? psi2_bs_coefficients(r, phi, t, p.omega_tilde)
                                                   : psi2_dd_coefficients(r, phi, t, p.omega_tilde);
        return qubit_concurrence(s.to_state(spec));
      };
    }
  } else if (ca && cb && ca->alpha == cb->alpha && on == 0) {
    const Complex alpha = ca->alpha;
    f = [&, alpha](double t) {
      return qubit_concurrence(coherent_state_vector(fam, phi, alpha, t, p.omega_tilde, spec));
    };
  }
  if (!f) return std::nullopt;
  std::vector<double> out;
  out.reserve(grid.n_samples());
  for (int k = 0; k < grid.n_samples(); ++k) out.push_back(f(grid.tau(k)));
  return out;
}

ResultTable run(const RunConfig& cfg) {
  cfg.system.validate();
  const HilbertSpec spec = truncation_for(cfg);
  const EvolutionGrid grid(cfg.grid.tau_max, cfg.grid.n_samples);
  const InitialState init = compose_initial(cfg.initial, spec);
  const SparseMatrix h = sparse_total(cfg.system, spec);

  ResultTable table;
  table.kind = cfg.measure;
  table.tau = grid.samples();
  table.c_qq.assign(grid.n_samples(), 0.0);
  table.e_oo.assign(grid.n_samples(), 0.0);

  auto record = [&](int k, const DensityMatrix& q, const DensityMatrix* o) {
    table.c_qq[k] = concurrence(q);
    if (cfg.measure == OscMeasure::concurrence) {
      table.e_oo[k] = oscillator_concurrence(*o);
    } else if (cfg.measure == OscMeasure::log_negativity) {
      table.e_oo[k] = log_negativity(*o);
    }
  };

  nlohmann::json integrator;
  if (cfg.lindblad) {
    const auto channels = lindblad_operators(cfg.lindblad->rates, spec);
    LindbladOptions opt;
    opt.step = cfg.lindblad->step;
    opt.frame = excitation_frame(cfg.system, spec);
    const std::vector<Site> qq{Site::qubit1, Site::qubit2};
    const std::vector<Site> oo{Site::osc_a, Site::osc_b};
    const LindbladStats st =
        lindblad_visit(h, init.density(), channels, grid, opt, [&](int k, const DensityMatrix& rho) {
          const DensityMatrix q = partial_trace(rho, qq);
          if (cfg.measure == OscMeasure::none) {
            record(k, q, nullptr);
          } else {
            const DensityMatrix o = partial_trace(rho, oo);
            record(k, q, &o);
          }
        });
    integrator = {{"method", "rk4"},
                  {"step", st.step},
                  {"halvings", st.halvings},
                  {"channels", channels.size()},
                  {"max_trace_drift", st.max_trace_drift},
                  {"min_eigenvalue", st.min_eigenvalue},
                  {"max_edge_population", st.max_edge_population}};
  } else {
    const Propagator prop(h);
    std::vector<std::vector<Site>> keeps{kQubits};
    if (cfg.measure != OscMeasure::none) keeps.push_back(kOscillators);
    evolve_branches_visit(prop, init.branches(), grid, keeps, [&](int k, const std::vector<DensityMatrix>& r) {
      record(k, r[0], r.size() > 1 ? &r[1] : nullptr);
    });
    integrator = {{"method", "eigendecomposition"},
                  {"blocks", prop.block_count()},
                  {"branches", init.branches().size()}};
  }

  if (cfg.validation.enabled) {
    auto a = analytic_series(cfg, spec);
    if (!a) {
      throw ConfigError("validation requested but no closed form covers this configuration "
                        "(needs a closed system with Fock, vacuum or equal coherent oscillators)");
    }
    table.c_qq_analytic = std::move(*a);
  }

  table.meta = {{"version", kVersion},
                {"config", to_json(cfg)},
                {"truncation", {{"n_a", spec.n_a()}, {"n_b", spec.n_b()}, {"dimension", spec.total()}}},
                {"integrator", integrator},
                {"rows", table.tau.size()}};
  if (table.validated()) {
    table.meta["validation"] = {{"max_residual", table.max_residual()}, {"tolerance", cfg.validation.tolerance}};
  }
  return table;
}

void check_validation(const ResultTable& table, const RunConfig& cfg) {
  if (!table.validated()) return;
  const double r = table.max_residual();
  if (r > cfg.validation.tolerance) {
    throw ValidationFailure(cfg.name + ": max |C_qq - C_qq_analytic| = " + format_double(r) + " exceeds " +
                            format_double(cfg.validation.tolerance));
  }
}

void write_csv(const ResultTable& t, std::ostream& out) {
  out << "tau,C_qq,E_oo,measure_kind";
  if (t.validated()) out << ",C_qq_analytic,residual";
  out << '\n';
  const std::string kind = to_string(t.kind);
  for (std::size_t k = 0; k < t.tau.size(); ++k) {
    out << format_double(t.tau[k]) << ',' << format_double(t.c_qq[k]) << ',' << format_double(t.e_oo[k]) << ','
        << kind;
    if (t.validated()) {
      out << ',' << format_double(t.c_qq_analytic[k]) << ',' << format_double(t.c_qq[k] - t.c_qq_analytic[k]);
    }
    out << '\n';
  }
}

void write_outputs(const ResultTable& t, const RunConfig& cfg, std::ostream& fallback) {
  if (cfg.output.path.empty()) {
    write_csv(t, fallback);
    return;
  }
  namespace fs = std::filesystem;
  const fs::path csv(cfg.output.path);
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + csv.string());
    write_csv(t, out);
  }
  {
    std::ofstream meta(csv.string() + ".meta.json", std::ios::binary);
    meta << t.meta.dump(2) << '\n';
  }
  if (cfg.output.gnuplot) {
    fs::path gp = csv;
    gp.replace_extension(".gp");
    std::ofstream out(gp, std::ios::binary);
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set xlabel 'tau'\n"
        << "plot '" << csv.filename().string() << "' using 1:2 with lines, '' using 1:3 with lines";
    if (t.validated()) out << ", '' using 1:5 with lines dashtype 2";
    out << '\n';
  }
}

}  // namespace hqs::cli
