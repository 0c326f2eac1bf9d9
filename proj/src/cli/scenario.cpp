#include "hqs/cli/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "hqs/cli/run.hpp"

namespace hqs::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Angle {
  double value;
  const char* tag;
};
const Angle kPi4{kPi / 4, "pi4"};
const Angle kPi12{kPi / 12, "pi12"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

const char* fam_tag(Family f) { return f == Family::psi1 ? "psi1" : "psi2"; }

RunConfig base(const std::string& name, Family f, Angle phi) {
  RunConfig c;
  c.name = name + "_" + fam_tag(f) + "_phi" + phi.tag;
  c.initial.qubits = {f, phi.value};
  c.grid = {10.0, 1001};
  return c;
}

void set_coupling(SystemParams& p, const std::string& which, double r) {
  if (which == "bs") p.r_b = r;
  if (which == "dd") p.r_d = r;
  if (which == "ising") p.r_i = r;
}

const std::vector<std::string> kCouplings{"bs", "dd", "ising"};

std::vector<RunConfig> ground_couplings(const char* fig, Family f) {
  std::vector<RunConfig> out;
  for (Angle phi : {kPi4, kPi12}) {
    for (const auto& cp : kCouplings) {
      for (double r : {0.0, 0.2, 0.5, 1.0}) {
        if (r == 0.0 && cp != "bs") continue;  // the uncoupled reference once per angle
        RunConfig c = base(fig, f, phi);
        c.name += r == 0.0 ? "_djc" : "_" + cp + "_r" + num(r);
        set_coupling(c.system, cp, r);
        c.measure = default_measure(c);
        out.push_back(c);
      }
    }
  }
  return out;
}

std::vector<RunConfig> resource_runs(const char* fig, bool coherent, bool with_couplings) {
  std::vector<RunConfig> out;
  const Angle phi = with_couplings ? kPi4 : kPi12;
  for (Family f : {Family::psi1, Family::psi2}) {
    for (double level : {0.1, 0.5, 1.0}) {
      std::vector<std::pair<std::string, double>> sweep{{"djc", 0.0}};
      if (with_couplings) {
        sweep.clear();
        for (const auto& cp : kCouplings) {
          for (double r : {0.2, 0.8}) sweep.emplace_back(cp, r);
        }
      }
      for (bool thermal : {false, true}) {
        if (with_couplings && thermal == coherent) continue;
        for (const auto& [cp, r] : sweep) {
          RunConfig c = base(fig, f, phi);
          c.name += std::string(thermal ? "_thermal_nbar" : "_coherent_mean") + num(level);
          if (r > 0) c.name += "_" + cp + "_r" + num(r);
          set_coupling(c.system, cp, r);
          if (thermal) {
            c.initial.osc_a = c.initial.osc_b = Thermal{level};
          } else {
            c.initial.osc_a = c.initial.osc_b = Coherent{Complex(std::sqrt(level), 0.0)};
          }
          c.measure = OscMeasure::log_negativity;
          if (with_couplings) c.grid = {10.0, 501};
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

std::vector<RunConfig> detuning_runs(const char* fig, std::vector<double> deltas, std::vector<Angle> phis,
                                     std::vector<double> r_b) {
  std::vector<RunConfig> out;
  for (Family f : {Family::psi1, Family::psi2}) {
    for (Angle phi : phis) {
      for (double rb : r_b) {
        for (double d : deltas) {
          RunConfig c = base(fig, f, phi);
          c.name += "_delta" + num(d);
          if (r_b.size() > 1) c.name += "_rb" + num(rb);
          // a large carrier keeps omega_0 = omega - delta positive
          c.system.omega_tilde = 100.0;
          c.system.delta_tilde = d;
          c.system.r_b = rb;
          c.measure = default_measure(c);
          c.grid = {10.0, 2001};
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

struct Noise {
  const char* tag;
  double lambda_r;
  double lambda_d;
};

std::vector<Noise> noise_mix(double lam) {
  return {{"dissipation", lam, 0.0}, {"dephasing", 0.0, lam}, {"both", lam, lam}};
}

RunConfig open_run(RunConfig c, const Noise& n, double nbar) {
  c.name += std::string("_") + n.tag + "_lr" + num(n.lambda_r) + "_ld" + num(n.lambda_d);
  if (nbar > 0) c.name += "_nth" + num(nbar);
  LindbladConfig l;
  l.rates = {n.lambda_r, n.lambda_d, nbar};
  c.lindblad = l;
  c.measure = OscMeasure::log_negativity;
  return c;
}

std::vector<RunConfig> stability(bool thermal_bath) {
  std::vector<RunConfig> out;
  const char* fig = thermal_bath ? "figH2" : "figH1";
  for (Family f : {Family::psi1, Family::psi2}) {
    for (Angle phi : {kPi4, kPi12}) {
      for (double lam : {0.05, 0.1}) {
        if (thermal_bath) {
          for (double nbar : {0.0, 0.1, 0.2, 0.5}) out.push_back(open_run(base(fig, f, phi), {"dissipation", lam, 0.0}, nbar));
        } else {
          for (const auto& n : noise_mix(lam)) out.push_back(open_run(base(fig, f, phi), n, 0.0));
        }
      }
    }
  }
  return out;
}

std::vector<RunConfig> model_systems(bool thermal_bath) {
  std::vector<RunConfig> out;
  const char* fig = thermal_bath ? "figH4" : "figH3";
  const Family f = thermal_bath ? Family::psi2 : Family::psi1;
  for (const std::string model : {"djc", "bs", "dd", "ising"}) {
    RunConfig c = base(fig, f, kPi4);
    c.name += "_" + model;
    if (model != "djc") set_coupling(c.system, model, 1.0);
    if (thermal_bath) {
      for (double nbar : {0.0, 0.1, 0.2, 0.5}) out.push_back(open_run(c, {"both", 0.05, 0.05}, nbar));
    } else {
      for (double lam : {0.05, 0.1}) {
        for (const auto& n : noise_mix(lam)) out.push_back(open_run(c, n, 0.0));
      }
    }
  }
  return out;
}

std::vector<RunConfig> long_time() {
  std::vector<RunConfig> out;
  for (Family f : {Family::psi1, Family::psi2}) {
    RunConfig g = base("figF1", f, kPi12);
    g.name += "_ground";
    g.grid = {50.0, 2001};
    g.measure = OscMeasure::log_negativity;
    out.push_back(g);
    for (double level : {0.1, 0.5, 1.0}) {
      RunConfig c = g;
      c.name = base("figF1", f, kPi12).name + "_coherent_mean" + num(level);
      c.initial.osc_a = c.initial.osc_b = Coherent{Complex(std::sqrt(level), 0.0)};
      out.push_back(c);
      RunConfig t = g;
      t.name = base("figF1", f, kPi12).name + "_thermal_nbar" + num(level);
      t.initial.osc_a = t.initial.osc_b = Thermal{level};
      out.push_back(t);
    }
  }
  return out;
}

const std::map<std::string, std::function<std::vector<RunConfig>()>>& registry() {
  static const std::map<std::string, std::function<std::vector<RunConfig>()>> r{
      {"fig2", [] { return ground_couplings("fig2", Family::psi1); }},
      {"fig3", [] { return ground_couplings("fig3", Family::psi2); }},
      {"fig4", [] { return resource_runs("fig4", true, false); }},
      {"fig5", [] { return resource_runs("fig5", true, true); }},
      {"fig6", [] { return resource_runs("fig6", false, true); }},
      {"figE1", [] { return detuning_runs("figE1", {0, 0.5, 1, 2, 5, 10, 20, 50}, {kPi4, kPi12}, {0.0}); }},
      {"figE2", [] { return detuning_runs("figE2", {0, 1, 2, 5, 10}, {kPi12}, {0.0}); }},
      {"figE3", [] { return detuning_runs("figE3", {0, 1, 2, 5, 10}, {kPi12}, {0.0, 0.2}); }},
      {"figF1", long_time},
      {"figH1", [] { return stability(false); }},
      {"figH2", [] { return stability(true); }},
      {"figH3", [] { return model_systems(false); }},
      {"figH4", [] { return model_systems(true); }},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"fig2",  "fig3",  "fig4",  "fig5",  "fig6",  "figE1", "figE2",
                                              "figE3", "figF1", "figH1", "figH2", "figH3", "figH4"};
  return names;
}

std::vector<RunConfig> scenario(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    std::string known;
    for (const auto& n : scenario_names()) known += " " + n;
    throw ConfigError("unknown scenario '" + name + "'; known:" + known);
  }
  return it->second();
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("HQS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) throw ConfigError("HQS_THREADS must be a positive integer");
    n = std::min<long>(n, cap);
  }
  return n;
}

ScenarioSummary run_scenario(const std::string& name, const std::string& out_dir, std::ostream& log) {
  std::vector<RunConfig> cfgs = scenario(name);
  for (auto& c : cfgs) c.output.path = (std::filesystem::path(out_dir) / (c.name + ".csv")).string();

  struct Slot {
    std::optional<ResultTable> table;
    std::string error;
    int exit = 0;
    bool done = false;
  };
  std::vector<Slot> slots(cfgs.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= cfgs.size()) return;
      Slot s;
      try {
        s.table = run(cfgs[i]);
      } catch (const NumericalError& e) {
        s.error = e.what();
        s.exit = kNumericalFailure;
      } catch (const std::exception& e) {
        s.error = e.what();
        s.exit = kConfigFailure;
      }
      s.done = true;
      {
        std::lock_guard<std::mutex> lock(mu);
        slots[i] = std::move(s);
      }
      cv.notify_all();
    }
  };

  const int n = std::min<int>(worker_count(), static_cast<int>(cfgs.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);

  // Single collector: write results in config order as they complete.
  ScenarioSummary sum;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    Slot s;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return slots[i].done; });
      s = std::move(slots[i]);
    }
    ++sum.runs;
    if (s.table) {
      write_outputs(*s.table, cfgs[i], log);
      log << cfgs[i].name << ": ok -> " << cfgs[i].output.path << '\n';
    } else {
      ++sum.failures;
      sum.worst_exit = std::max(sum.worst_exit, s.exit);
      log << cfgs[i].name << ": FAILED: " << s.error << '\n';
    }
  }
  for (auto& t : pool) t.join();
  return sum;
}

}  // namespace hqs::cli
