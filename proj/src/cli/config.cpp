#include "hqs/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>

#include "hqs/error.hpp"

namespace hqs::cli {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(where + "." + it.key() + ": unknown key");
  }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + ": must be finite");
  return d;
}

int integer(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& obj, const char* key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string text(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

void non_negative(double v, const std::string& where) {
  if (v < 0) throw ConfigError(where + ": must be >= 0");
}

OscillatorSpec parse_oscillator(const json& o, const std::string& where) {
  only_keys(o, where, {"kind", "n", "alpha", "mean", "nbar"});
  const std::string kind = text(o, "kind", where, "fock");
  if (kind == "fock") {
    only_keys(o, where, {"kind", "n"});
    const int n = integer(o, "n", where, 0);
    if (n < 0) throw ConfigError(where + ".n: must be >= 0");
    return Fock{n};
  }
  if (kind == "coherent") {
    only_keys(o, where, {"kind", "alpha", "mean"});
    if (o.contains("alpha") && o.contains("mean")) throw ConfigError(where + ": give alpha or mean, not both");
    if (o.contains("mean")) {
      const double mean = number(o, "mean", where, 0.0);
      non_negative(mean, where + ".mean");
      return Coherent{Complex(std::sqrt(mean), 0.0)};
    }
    if (!o.contains("alpha")) return Coherent{};
    const json& a = o.at("alpha");
    if (a.is_number()) return Coherent{Complex(a.get<double>(), 0.0)};
    if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
      return Coherent{Complex(a[0].get<double>(), a[1].get<double>())};
    }
    throw ConfigError(where + ".alpha: expected a number or [re, im]");
  }
  if (kind == "thermal") {
    only_keys(o, where, {"kind", "nbar"});
    const double nbar = number(o, "nbar", where, 0.0);
    non_negative(nbar, where + ".nbar");
    return Thermal{nbar};
  }
  throw ConfigError(where + ".kind: expected fock, coherent or thermal");
}

json oscillator_json(const OscillatorSpec& osc) {
  if (const auto* f = std::get_if<Fock>(&osc)) return {{"kind", "fock"}, {"n", f->n}};
  if (const auto* c = std::get_if<Coherent>(&osc)) {
    return {{"kind", "coherent"}, {"alpha", {c->alpha.real(), c->alpha.imag()}}};
  }
  return {{"kind", "thermal"}, {"nbar", std::get<Thermal>(osc).nbar}};
}

OscMeasure parse_measure(const std::string& s) {
  if (s == "concurrence") return OscMeasure::concurrence;
  if (s == "log_negativity") return OscMeasure::log_negativity;
  if (s == "none") return OscMeasure::none;
  throw ConfigError("measure: expected concurrence, log_negativity or none");
}

}  // namespace

double parse_angle(const json& v, const std::string& where) {
  if (v.is_number()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + ": must be finite");
    return d;
  }
  if (!v.is_string()) throw ConfigError(where + ": expected a number or a multiple of pi");
  static const std::regex re(R"(^\s*(?:([0-9]*\.?[0-9]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)");
  std::smatch m;
  const std::string s = v.get<std::string>();
  if (!std::regex_match(s, m, re)) throw ConfigError(where + ": cannot read angle '" + s + "'");
  double x = std::numbers::pi;
  if (m[1].matched) x *= std::stod(m[1].str());
  if (m[2].matched) {
    const double d = std::stod(m[2].str());
    if (d == 0) throw ConfigError(where + ": division by zero");
    x /= d;
  }
  return x;
}

OscMeasure default_measure(const RunConfig& cfg) {
  auto vacuum = [](const OscillatorSpec& o) {
    const auto* f = std::get_if<Fock>(&o);
    return f && f->n == 0;
  };
  if (!vacuum(cfg.initial.osc_a) || !vacuum(cfg.initial.osc_b)) return OscMeasure::log_negativity;
  const SystemParams& p = cfg.system;
  if (cfg.initial.qubits.family == Family::psi2 && (p.r_b > 0 || p.r_d > 0)) return OscMeasure::log_negativity;
  if (cfg.lindblad && cfg.lindblad->rates.nbar_th > 0 && cfg.lindblad->rates.lambda_r > 0) {
    return OscMeasure::log_negativity;
  }
  return OscMeasure::concurrence;
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "config",
            {"schema_version", "name", "system", "initial", "grid", "lindblad", "measure", "truncation",
             "validation", "output"});
  if (!doc.contains("schema_version")) throw ConfigError("config.schema_version: missing");
  if (integer(doc, "schema_version", "config", 0) != kSchemaVersion) {
    throw ConfigError("config.schema_version: only version " + std::to_string(kSchemaVersion) + " is supported");
  }
  RunConfig cfg;
  cfg.name = text(doc, "name", "config", cfg.name);

  if (doc.contains("system")) {
    const json& s = doc.at("system");
    only_keys(s, "system", {"r_b", "r_d", "r_i", "omega_tilde", "delta_tilde", "g_ratio_2"});
    auto& p = cfg.system;
    p.r_b = number(s, "r_b", "system", p.r_b);
    p.r_d = number(s, "r_d", "system", p.r_d);
    p.r_i = number(s, "r_i", "system", p.r_i);
    p.omega_tilde = number(s, "omega_tilde", "system", p.omega_tilde);
    p.delta_tilde = number(s, "delta_tilde", "system", p.delta_tilde);
    p.g_ratio_2 = number(s, "g_ratio_2", "system", p.g_ratio_2);
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
  }

  if (doc.contains("initial")) {
    const json& i = doc.at("initial");
    only_keys(i, "initial", {"family", "phi", "osc_a", "osc_b"});
    const std::string fam = text(i, "family", "initial", "psi1");
    if (fam == "psi1") {
      cfg.initial.qubits.family = Family::psi1;
    } else if (fam == "psi2") {
      cfg.initial.qubits.family = Family::psi2;
    } else {
      throw ConfigError("initial.family: expected psi1 or psi2");
    }
    if (i.contains("phi")) cfg.initial.qubits.phi = parse_angle(i.at("phi"), "initial.phi");
    if (i.contains("osc_a")) cfg.initial.osc_a = parse_oscillator(i.at("osc_a"), "initial.osc_a");
    if (i.contains("osc_b")) cfg.initial.osc_b = parse_oscillator(i.at("osc_b"), "initial.osc_b");
  }

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    only_keys(g, "grid", {"tau_max", "n_samples"});
    cfg.grid.tau_max = number(g, "tau_max", "grid", cfg.grid.tau_max);
    cfg.grid.n_samples = integer(g, "n_samples", "grid", cfg.grid.n_samples);
  }
  if (!(cfg.grid.tau_max > 0)) throw ConfigError("grid.tau_max: must be > 0");
  if (cfg.grid.n_samples < 2) throw ConfigError("grid.n_samples: must be >= 2");

  if (doc.contains("lindblad") && !doc.at("lindblad").is_null()) {
    const json& l = doc.at("lindblad");
    only_keys(l, "lindblad", {"lambda_r", "lambda_d", "nbar_th", "step"});
    LindbladConfig lc;
    lc.rates.lambda_r = number(l, "lambda_r", "lindblad", 0.0);
    lc.rates.lambda_d = number(l, "lambda_d", "lindblad", 0.0);
    lc.rates.nbar_th = number(l, "nbar_th", "lindblad", 0.0);
    non_negative(lc.rates.lambda_r, "lindblad.lambda_r");
    non_negative(lc.rates.lambda_d, "lindblad.lambda_d");
    non_negative(lc.rates.nbar_th, "lindblad.nbar_th");
    if (l.contains("step")) {
      lc.step = number(l, "step", "lindblad", 0.0);
      if (!(*lc.step > 0)) throw ConfigError("lindblad.step: must be > 0");
    }
    cfg.lindblad = lc;
  }

  cfg.measure = doc.contains("measure") ? parse_measure(text(doc, "measure", "config", "")) : default_measure(cfg);

  if (doc.contains("truncation") && !doc.at("truncation").is_null()) {
    const json& t = doc.at("truncation");
    only_keys(t, "truncation", {"n_a", "n_b"});
    const int na = integer(t, "n_a", "truncation", 0);
    const int nb = integer(t, "n_b", "truncation", na);
    if (na < 2 || nb < 2) throw ConfigError("truncation: n_a and n_b must be >= 2");
    if (na > kMaxTruncation || nb > kMaxTruncation) {
      throw ConfigError("truncation: at most " + std::to_string(kMaxTruncation) + " levels per oscillator");
    }
    cfg.truncation = HilbertSpec(na, nb);
  }

  if (doc.contains("validation")) {
    const json& v = doc.at("validation");
    only_keys(v, "validation", {"enabled", "tolerance"});
    cfg.validation.enabled = boolean(v, "enabled", "validation", false);
    cfg.validation.tolerance = number(v, "tolerance", "validation", cfg.validation.tolerance);
    if (!(cfg.validation.tolerance > 0)) throw ConfigError("validation.tolerance: must be > 0");
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "output", {"path", "gnuplot"});
    cfg.output.path = text(o, "path", "output", "");
    cfg.output.gnuplot = boolean(o, "gnuplot", "output", false);
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = cfg.name;
  const auto& p = cfg.system;
  doc["system"] = {{"r_b", p.r_b},           {"r_d", p.r_d},
                   {"r_i", p.r_i},           {"omega_tilde", p.omega_tilde},
                   {"delta_tilde", p.delta_tilde}, {"g_ratio_2", p.g_ratio_2}};
  doc["initial"] = {{"family", cfg.initial.qubits.family == Family::psi1 ? "psi1" : "psi2"},
                    {"phi", cfg.initial.qubits.phi},
                    {"osc_a", oscillator_json(cfg.initial.osc_a)},
                    {"osc_b", oscillator_json(cfg.initial.osc_b)}};
  doc["grid"] = {{"tau_max", cfg.grid.tau_max}, {"n_samples", cfg.grid.n_samples}};
  if (cfg.lindblad) {
    json l = {{"lambda_r", cfg.lindblad->rates.lambda_r},
              {"lambda_d", cfg.lindblad->rates.lambda_d},
              {"nbar_th", cfg.lindblad->rates.nbar_th}};
    if (cfg.lindblad->step) l["step"] = *cfg.lindblad->step;
    doc["lindblad"] = l;
  }
  doc["measure"] = to_string(cfg.measure);
  if (cfg.truncation) doc["truncation"] = {{"n_a", cfg.truncation->n_a()}, {"n_b", cfg.truncation->n_b()}};
  doc["validation"] = {{"enabled", cfg.validation.enabled}, {"tolerance", cfg.validation.tolerance}};
  doc["output"] = {{"path", cfg.output.path}, {"gnuplot", cfg.output.gnuplot}};
  return doc;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(json& doc, const std::string& flag, const std::string& value) {
  std::string key = flag;
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  if (key.empty()) throw ConfigError("empty override flag");
  std::replace(key.begin(), key.end(), '-', '_');
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("malformed override --" + flag);
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace hqs::cli
