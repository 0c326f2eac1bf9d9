#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqs/cli/config.hpp"
#include "hqs/cli/run.hpp"
#include "hqs/cli/scenario.hpp"
#include "hqs/cli/validate.hpp"
#include "hqs/entanglement.hpp"

using namespace hqs;
using namespace hqs::cli;

namespace {

// Leftover "--a.b value" / "--a.b=value" pairs become config overrides.
void apply_extras(nlohmann::json& doc, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      apply_override(doc, arg.substr(0, eq), arg.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("override " + arg + " has no value");
      apply_override(doc, arg, extras[++i]);
    }
  }
}

RunConfig load(const std::string& path, const std::vector<std::string>& extras) {
  nlohmann::json doc = load_json(path);
  apply_extras(doc, extras);
  return parse_config(doc);
}

void print_esd(const char* label, const std::vector<double>& tau, const std::vector<double>& v) {
  const EsdReport r = detect_esd(tau, v);
  std::printf("%s: ", label);
  if (r.empty()) {
    std::printf("no sudden death\n");
    return;
  }
  std::printf("%zu interval(s)\n", r.intervals.size());
  for (const auto& iv : r.intervals) std::printf("  t_ESD %.6f  t_ESB %.6f\n", iv.start, iv.end);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit double Jaynes-Cummings entanglement dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool validate_flag = false;
  auto* run_cmd = app.add_subcommand("run", "evolve one configuration");
  run_cmd->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_path, "CSV output path (stdout if omitted)");
  run_cmd->add_flag("--validate", validate_flag, "add the closed-form column and check it");
  run_cmd->allow_extras();

  std::string scenario_name;
  std::string out_dir = "out";
  auto* sc_cmd = app.add_subcommand("scenario", "run a named figure grid");
  sc_cmd->add_option("name", scenario_name, "scenario name")->required();
  sc_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* val_cmd = app.add_subcommand("validate", "closed forms against numerics");

  std::string esd_config;
  auto* esd_cmd = app.add_subcommand("esd", "sudden death intervals for one configuration");
  esd_cmd->add_option("--config", esd_config, "JSON config file")->required()->check(CLI::ExistingFile);
  esd_cmd->allow_extras();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunConfig cfg = load(config_path, run_cmd->remaining());
      if (!out_path.empty()) cfg.output.path = out_path;
      if (validate_flag) cfg.validation.enabled = true;
      const ResultTable t = run(cfg);
      write_outputs(t, cfg, std::cout);
      check_validation(t, cfg);
    } else if (*sc_cmd) {
      const ScenarioSummary s = run_scenario(scenario_name, out_dir, std::cerr);
      std::cerr << s.runs - s.failures << "/" << s.runs << " runs written to " << out_dir << '\n';
      return s.worst_exit;
    } else if (*val_cmd) {
      return print_report(validate_all(), std::cout) ? kOk : kValidationFailure;
    } else if (*esd_cmd) {
      RunConfig cfg = load(esd_config, esd_cmd->remaining());
      const ResultTable t = run(cfg);
      print_esd("C_qq", t.tau, t.c_qq);
      if (t.kind != OscMeasure::none) print_esd("E_oo", t.tau, t.e_oo);
    }
  } catch (const ValidationFailure& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
