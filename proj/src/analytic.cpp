#include "hqs/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "hqs/error.hpp"

namespace hqs {

namespace {

constexpr int E = kExcited;
constexpr int G = kGround;
const Complex I(0.0, 1.0);

Complex phase(double x) { return std::exp(Complex(0.0, x)); }

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

void check_ratio(double r) {
  if (!std::isfinite(r) || r < 0) throw InvalidArgument("coupling ratio must be finite and >= 0");
}

struct Builder {
  CoefficientSet set;
  char prefix;

  void add(BasisLabel l, Complex v, std::string constants = {}) {
    set.names.push_back(prefix + std::to_string(set.names.size() + 1));
    set.labels.push_back(l);
    set.values.push_back(v);
    set.constants.push_back(std::move(constants));
  }
};

}  // namespace

std::string to_string(Coupling c) {
  switch (c) {
    case Coupling::bs:
      return "bs";
    case Coupling::dd:
      return "dd";
    case Coupling::ising:
      return "ising";
  }
  return "?";
}

std::string BasisLabel::text() const {
  auto q = [](int s) { return s == kExcited ? "e" : "g"; };
  return std::string("|") + q(q1) + " " + q(q2) + " " + std::to_string(n) + " " + std::to_string(m) + ">";
}

double CoefficientSet::norm_sq() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s;
}

Complex CoefficientSet::value(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values[i];
  }
  throw InvalidArgument("no amplitude named " + name);
}

StateVector CoefficientSet::to_state(const HilbertSpec& spec, double drop_tol) const {
  CVector a = CVector::Zero(spec.total());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& l = labels[i];
    if (!l.valid() || l.n >= spec.n_a() || l.m >= spec.n_b()) {
      if (std::abs(values[i]) > drop_tol) {
        throw InvalidArgument("amplitude " + names[i] + " at " + l.text() + " lies outside the truncation");
      }
      continue;
    }
    a[spec.index(l.q1, l.q2, l.n, l.m)] += values[i];
  }
  return StateVector(spec, std::move(a));
}

AnalyticTimescales psi1_timescales(Coupling c, double r, double tau) {
  check_ratio(r);
  AnalyticTimescales ts;
  if (c == Coupling::ising) {
    ts.tau1 = std::sqrt(1.0 + r * r) * tau;
  } else {
    ts.tau1 = 0.5 * r * tau;
    ts.tau2 = std::sqrt(1.0 + 0.25 * r * r) * tau;
  }
  return ts;
}

AnalyticTimescales psi2_timescales(Coupling c, double r, double tau) {
  check_ratio(r);
  AnalyticTimescales ts;
  const double r2 = r * r;
  if (c == Coupling::ising) {
    ts.tau1 = r * tau;
    ts.tau2 = std::sqrt(4.0 + r2) * tau;
    return ts;
  }
  double s = 0.0;
  if (c == Coupling::bs) {
    ts.gamma = std::sqrt(9 * r2 * r2 + 60 * r2 + 4);
    s = 5 * r2 + 6;
  } else {
    ts.gamma = std::sqrt(r2 * r2 + 12 * r2 + 4);
    s = r2 + 6;
  }
  ts.delta_plus = std::sqrt((s + ts.gamma) / 2);
  ts.delta_minus = std::sqrt((s - ts.gamma) / 2);
  ts.tau1 = ts.delta_plus * tau;
  ts.tau2 = ts.delta_minus * tau;
  return ts;
}

AnalyticTimescales fock_timescales(int n, int m, double tau) {
  if (n < 0 || m < 0) throw InvalidArgument("Fock occupations must be >= 0");
  AnalyticTimescales ts;
  ts.tau1 = std::sqrt(n + 1.0) * tau;
  ts.tau2 = std::sqrt(m + 1.0) * tau;
  ts.tau3 = std::sqrt(static_cast<double>(n)) * tau;
  ts.tau4 = std::sqrt(static_cast<double>(m)) * tau;
  return ts;
}

ConcurrencePair djc_ground_concurrence(Family f, double phi, double tau) {
  const double s2 = std::abs(std::sin(2 * phi));
  const double c = std::cos(tau);
  const double s = std::sin(tau);
  if (f == Family::psi1) return {s2 * c * c, s2 * s * s};
  const double cp2 = std::cos(phi) * std::cos(phi);
  return {std::max(0.0, c * c * (s2 - 2 * cp2 * s * s)), std::max(0.0, s * s * (s2 - 2 * cp2 * c * c))};
}

CoefficientSet djc_ground_coefficients(Family f, double phi, double tau, double omega_tilde) {
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const double c = std::cos(tau);
  const double s = std::sin(tau);
  if (f == Family::psi1) {
    Builder b{{}, 'x'};
    b.add({E, G, 0, 0}, cp * c);
    b.add({G, E, 0, 0}, sp * c);
    b.add({G, G, 1, 0}, -I * cp * s);
    b.add({G, G, 0, 1}, -I * sp * s);
    return b.set;
  }
  const Complex ph = phase(-omega_tilde * tau);
  Builder b{{}, 'y'};
  b.add({E, E, 0, 0}, cp * c * c * ph);
  b.add({G, G, 1, 1}, -cp * s * s * ph);
  b.add({E, G, 0, 1}, -I * cp * s * c * ph);
  b.add({G, E, 1, 0}, -I * cp * s * c * ph);
  b.add({G, G, 0, 0}, sp * std::conj(ph));
  return b.set;
}

namespace {

// Ratios that stay finite at tau = 0.
struct Psi1Shape {
  double t1;
  double t2;
  double over_t2;  // tau / tau2
  double ratio;    // tau1 / tau2
};

Psi1Shape psi1_shape(double r, double tau) {
  const double k = std::sqrt(1.0 + 0.25 * r * r);
  return {0.5 * r * tau, k * tau, 1.0 / k, 0.5 * r / k};
}

void psi1_gh(Coupling c, const Psi1Shape& s, double& g, double& h) {
  const double sign = c == Coupling::bs ? 1.0 : -1.0;
  g = std::cos(s.t1) * std::cos(s.t2) + sign * s.ratio * std::sin(s.t1) * std::sin(s.t2);
  h = std::sin(s.t1) * std::cos(s.t2) - sign * s.ratio * std::cos(s.t1) * std::sin(s.t2);
}

}  // namespace

ConcurrencePair psi1_coupled_concurrence(Coupling c, double r, double phi, double tau) {
  check_ratio(r);
  const double s2 = std::abs(std::sin(2 * phi));
  if (c == Coupling::ising) {
    const double k = std::sqrt(1.0 + r * r);
    const double s = std::sin(k * tau) / k;
    return {s2 * (1.0 - s * s), s2 * s * s};
  }
  const Psi1Shape s = psi1_shape(r, tau);
  double g = 0.0;
  double h = 0.0;
  psi1_gh(c, s, g, h);
  const double cc = std::cos(phi) * std::cos(phi);
  const double ss = std::sin(phi) * std::sin(phi);
  const double cq = 2.0 * std::sqrt((cc * g * g + ss * h * h) * (ss * g * g + cc * h * h));
  const double c1 = std::cos(s.t1);
  const double s1 = std::sin(s.t1);
  const double st2 = std::sin(s.t2);
  const double co = 2.0 * s.over_t2 * s.over_t2 * st2 * st2 *
                    std::sqrt((cc * c1 * c1 + ss * s1 * s1) * (cc * s1 * s1 + ss * c1 * c1));
  return {cq, co};
}

CoefficientSet psi1_coupled_coefficients(Coupling c, double r, double phi, double tau) {
  check_ratio(r);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  Builder b{{}, 'x'};
  if (c == Coupling::ising) {
    const double k = std::sqrt(1.0 + r * r);
    const double t1 = k * tau;
    const Complex u = std::cos(t1) + I * (r / k) * std::sin(t1);
    b.add({E, G, 0, 0}, cp * u);
    b.add({G, E, 0, 0}, sp * u);
    b.add({G, G, 1, 0}, -I * cp * std::sin(t1) / k);
    b.add({G, G, 0, 1}, -I * sp * std::sin(t1) / k);
    return b.set;
  }
  const Psi1Shape s = psi1_shape(r, tau);
  double g = 0.0;
  double h = 0.0;
  psi1_gh(c, s, g, h);
  const double c1 = std::cos(s.t1);
  const double s1 = std::sin(s.t1);
  const double st2 = std::sin(s.t2);
  b.add({E, G, 0, 0}, cp * g - I * sp * h);
  b.add({G, E, 0, 0}, sp * g - I * cp * h);
  b.add({G, G, 1, 0}, -s.over_t2 * (sp * s1 + I * cp * c1) * st2);
  b.add({G, G, 0, 1}, -s.over_t2 * (cp * s1 + I * sp * c1) * st2);
  return b.set;
}

namespace {

const BasisLabel kPsi2Labels[9] = {{E, E, 0, 0}, {G, G, 1, 1}, {E, G, 0, 1}, {G, E, 1, 0}, {G, G, 0, 0},
                                   {G, G, 2, 0}, {G, G, 0, 2}, {E, G, 1, 0}, {G, E, 0, 1}};

}  // namespace

CoefficientSet psi2_bs_coefficients(double r, double phi, double tau, double omega_tilde, Transcription t) {
  check_ratio(r);
  check_finite(tau, "tau");
  const AnalyticTimescales ts = psi2_timescales(Coupling::bs, r, tau);
  const double g = ts.gamma;
  const double dp = ts.delta_plus;
  const double dm = ts.delta_minus;
  const double tp = ts.tau1;
  const double tm = ts.tau2;
  const double r2 = r * r;
  const double r4 = r2 * r2;
  const double r6 = r4 * r2;
  const double r8 = r4 * r4;
  const double r10 = r8 * r2;

  const double a1 = (r4 + 2) * (27 * r4 + 3 * (3 * g + 16) * r2 + 2 * (g + 2));
  const double a2 = (r4 + 2) * (27 * r6 + 9 * (g + 15) * r4 + 15 * (g + 4) * r2 + 2 * (g + 2));
  const double a3 = (54 * r6 + 6 * (3 * g + 40) * r4 + 4 * (7 * g + 29) * r2 + 4 * (g + 2)) * dm;
  const double a8 = (r4 + 2) * (27 * r4 + (9 * g + 78) * r2 + 4 * (g + 2));
  const double b1 = 18 * r2 * (3 * r8 + (g + 28) * r6 + 2 * (3 * g + 34) * r4 + 2 * (4 * g + 21) * r2 + 2 * (g + 2));
  const double b2 = 6 * r2 * (9 * r8 + 3 * (g + 20) * r6 + 2 * (5 * g + 31) * r4 + 2 * (g - 7) * r2 - 2 * (g + 2));
  const double b3 = 9 * r2 * (3 * r6 + (g + 22) * r4 + (4 * g + 30) * r2 + 2 * (g + 2)) * dp;
  const double b8 = 3 * (9 * r10 + 3 * (g + 22) * r8 + 12 * (g + 5) * r6 - 4 * (g + 35) * r4 - 20 * (g + 5) * r2 -
                         4 * (g + 2));
  const double c1 = (r2 - 1) * (27 * r8 + 9 * (g + 28) * r6 + 6 * (9 * g + 85) * r4 + 2 * (23 * g + 76) * r2 +
                                4 * (g + 2));
  const double d1 = g * (r4 + 2) * (9 * r4 + 3 * (g + 12) * r2 + 2 * (g + 2)) * dp * dp;
  const double d3 = g * (9 * r4 + 3 * (g + 12) * r2 + 2 * (g + 2)) * dp * dp * dp * dm;
  const double n6 = 12 * std::sqrt(2.0) * (9 * r6 + 3 * (g + 18) * r4 + 2 * (4 * g + 23) * r2 + 2 * (g + 2));

  const Complex ph = phase(-omega_tilde * tau) * std::cos(phi);
  const double cp = std::cos(tp);
  const double cm = std::cos(tm);
  const double sp = std::sin(tp);
  const double sm = std::sin(tm);

  // The second amplitude printed with sines cannot meet y2(0) = 0; cosines do.
  const double y2_core = t == Transcription::as_printed ? a2 * sp - b2 * sm + c1 : a2 * cp - b2 * cm + c1;
  const Complex y34 = -I * 4.0 / d3 * (a3 * sp + b3 * sm) * ph;
  const Complex y67 = I * r * n6 / d3 * (dp * sm - dm * sp) * ph;
  const Complex y89 = 4 * r / d1 * (a8 * cp + b8 * cm - c1) * ph;

  Builder b{{}, 'y'};
  b.add(kPsi2Labels[0], 4 / d1 * (a1 * cp + b1 * cm + c1 * (r2 - 1)) * ph, "A1 B1 C1 D1");
  b.add(kPsi2Labels[1], 4 / d1 * y2_core * ph, "A2 B2 C1 D1");
  b.add(kPsi2Labels[2], y34, "A3 B3 D3");
  b.add(kPsi2Labels[3], y34, "A3 B3 D3");
  b.add(kPsi2Labels[4], phase(omega_tilde * tau) * std::sin(phi));
  b.add(kPsi2Labels[5], y67, "N6 D3");
  b.add(kPsi2Labels[6], y67, "N6 D3");
  b.add(kPsi2Labels[7], y89, "A8 B8 C1 D1");
  b.add(kPsi2Labels[8], y89, "A8 B8 C1 D1");
  return b.set;
}

CoefficientSet psi2_dd_coefficients(double r, double phi, double tau, double omega_tilde, Transcription t) {
  check_ratio(r);
  check_finite(tau, "tau");
  const AnalyticTimescales ts = psi2_timescales(Coupling::dd, r, tau);
  const double g = ts.gamma;
  const double dp = ts.delta_plus;
  const double dm = ts.delta_minus;
  const double tp = ts.tau1;
  const double tm = ts.tau2;
  const double r2 = r * r;
  const double r4 = r2 * r2;
  const double r6 = r4 * r2;

  const double a1p = (r2 + 2 + g) / (4 * g);
  const double a1m = (r2 + 2 - g) / (4 * g);
  const double a2p = -(r2 - 2 - g) / (4 * g);
  const double a2m = (r2 - 2 + g) / (4 * g);
  const Complex n3 = -I * (r4 + (g + 12) * r2 + 2 * (g + 2));
  const double d3 = 2 * g * g * g * (r4 + (g + 8) * r2 + 2 * (g + 2)) * dp * dm;
  const double a3 = dm * (r6 + (g + 14) * r4 + 4 * (2 * g + 7) * r2 + 4 * (g + 2));
  const double b3 = 4 * g * dp * r2;

  const Complex ph = phase(-omega_tilde * tau) * std::cos(phi);
  const double cp = std::cos(tp);
  const double cm = std::cos(tm);
  const double sp = std::sin(tp);
  const double sm = std::sin(tm);

  Complex y1;
  Complex y2;
  double y67_sign = -1.0;
  if (t == Transcription::as_printed) {
    y1 = (a1p * cp - a1m * cm + 0.5) * ph;
    y2 = (a2p * cp - a2m * cm - 0.5) * ph;
    y67_sign = 1.0;
  } else {
    // ee00 and gg11 share the oscillating part and differ by the constant.
    y1 = (0.5 + a2p * cp + a2m * cm) * ph;
    y2 = (-0.5 + a2p * cp + a2m * cm) * ph;
  }
  const Complex y34 = n3 / d3 * (a3 * sp + b3 * sm) * ph;
  const Complex y67 = y67_sign * I * std::sqrt(2.0) * (r / g) * (sp / dp - sm / dm) * ph;
  const Complex y89 = (r / g) * (cp - cm) * ph;

  Builder b{{}, 'y'};
  b.add(kPsi2Labels[0], y1, "A1+ A1-");
  b.add(kPsi2Labels[1], y2, "A2+ A2-");
  b.add(kPsi2Labels[2], y34, "N3 A3 B3 D3");
  b.add(kPsi2Labels[3], y34, "N3 A3 B3 D3");
  b.add(kPsi2Labels[4], phase(omega_tilde * tau) * std::sin(phi));
  b.add(kPsi2Labels[5], y67, "Gamma d+ d-");
  b.add(kPsi2Labels[6], y67, "Gamma d+ d-");
  b.add(kPsi2Labels[7], y89, "Gamma");
  b.add(kPsi2Labels[8], y89, "Gamma");
  return b.set;
}

IsingPsi2 psi2_ising(double r, double phi, double tau, double omega_tilde) {
  check_ratio(r);
  const double k = std::sqrt(4.0 + r * r);
  const double t1 = r * tau;
  const double t2 = k * tau;
  const double cp = std::cos(phi);
  const Complex ph = phase(-omega_tilde * tau);
  const Complex core = std::cos(t2) - I * (r / k) * std::sin(t2);
  const Complex e1 = phase(-t1);

  IsingPsi2 out;
  Builder b{{}, 'y'};
  b.add({E, E, 0, 0}, 0.5 * cp * (core + e1) * ph);
  b.add({G, G, 1, 1}, 0.5 * cp * (core - e1) * ph);
  b.add({E, G, 0, 1}, -I * cp * std::sin(t2) / k * ph);
  b.add({G, E, 1, 0}, -I * cp * std::sin(t2) / k * ph);
  b.add({G, G, 0, 0}, std::sin(phi) * e1 * std::conj(ph));
  out.coefficients = std::move(b.set);

  const double s2 = std::abs(std::sin(2 * phi));
  const double st2 = std::sin(t2) / k;
  auto f = [&](double sign) {
    const double u = std::cos(t1) + sign * std::cos(t2);
    const double v = std::sin(t1) + sign * (r / k) * std::sin(t2);
    return -2.0 * cp * cp * st2 * st2 + 0.5 * s2 * std::sqrt(u * u + v * v);
  };
  out.concurrence = {std::max(0.0, f(1.0)), std::max(0.0, f(-1.0))};
  return out;
}

double fock_concurrence(Family f, double phi, int n, int m, double tau, Transcription t) {
  const AnalyticTimescales ts = fock_timescales(n, m, tau);
  const double c1 = std::cos(ts.tau1), s1 = std::sin(ts.tau1);
  const double c2 = std::cos(ts.tau2), s2 = std::sin(ts.tau2);
  const double c3 = std::cos(ts.tau3), s3 = std::sin(ts.tau3);
  const double c4 = std::cos(ts.tau4), s4 = std::sin(ts.tau4);
  const double cc = std::cos(phi) * std::cos(phi);
  const double ss = std::sin(phi) * std::sin(phi);
  const double sin2 = std::sin(2 * phi);
  double value = 0.0;
  if (f == Family::psi1) {
    const double r44 = cc * s1 * s1 * c4 * c4 + ss * s2 * s2 * c3 * c3;
    if (t == Transcription::as_printed) {
      value = std::abs(sin2) * c1 * c2 * (c3 * c4 - s3 * s4 * std::sqrt(r44));
    } else {
      const double r11 = ss * c2 * c2 * s3 * s3 + cc * c1 * c1 * s4 * s4;
      value = std::abs(sin2 * c1 * c2 * c3 * c4) - 2.0 * std::sqrt(r11 * r44);
    }
  } else {
    const double a = cc * s1 * s1 * c2 * c2 + ss * c3 * c3 * s4 * s4;
    const double b = cc * c1 * c1 * s2 * s2 + ss * s3 * s3 * c4 * c4;
    if (t == Transcription::as_printed) {
      value = std::abs(sin2) * c1 * c2 * c3 * c4 - 2.0 * std::sqrt(a * a + b * b);
    } else {
      value = std::abs(sin2 * c1 * c2 * c3 * c4) - 2.0 * std::sqrt(a * b);
    }
  }
  return std::max(0.0, value);
}

CoefficientSet fock_coefficients(Family f, double phi, int n, int m, double tau, double omega_tilde) {
  const AnalyticTimescales ts = fock_timescales(n, m, tau);
  const double c1 = std::cos(ts.tau1), s1 = std::sin(ts.tau1);
  const double c2 = std::cos(ts.tau2), s2 = std::sin(ts.tau2);
  const double c3 = std::cos(ts.tau3), s3 = std::sin(ts.tau3);
  const double c4 = std::cos(ts.tau4), s4 = std::sin(ts.tau4);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  if (f == Family::psi1) {
    const Complex ph = phase(-(n + m) * omega_tilde * tau);
    Builder b{{}, 'x'};
    b.add({E, G, n, m}, cp * c1 * c4 * ph);
    b.add({G, E, n, m}, sp * c2 * c3 * ph);
    b.add({G, G, n + 1, m}, -I * cp * s1 * c4 * ph);
    b.add({G, G, n, m + 1}, -I * sp * s2 * c3 * ph);
    b.add({E, E, n - 1, m}, -I * sp * c2 * s3 * ph);
    b.add({E, E, n, m - 1}, -I * cp * c1 * s4 * ph);
    b.add({G, E, n + 1, m - 1}, -cp * s1 * s4 * ph);
    b.add({E, G, n - 1, m + 1}, -sp * s2 * s3 * ph);
    return b.set;
  }
  const Complex up = phase(-(n + m + 1) * omega_tilde * tau);
  const Complex dn = phase(-(n + m - 1) * omega_tilde * tau);
  Builder b{{}, 'y'};
  b.add({E, E, n, m}, cp * c1 * c2 * up);
  b.add({G, G, n + 1, m + 1}, -cp * s1 * s2 * up);
  b.add({E, G, n, m + 1}, -I * cp * c1 * s2 * up);
  b.add({G, E, n + 1, m}, -I * cp * s1 * c2 * up);
  b.add({G, G, n, m}, sp * c3 * c4 * dn);
  b.add({E, E, n - 1, m - 1}, -sp * s3 * s4 * dn);
  b.add({E, G, n - 1, m}, -I * sp * s3 * c4 * dn);
  b.add({G, E, n, m - 1}, -I * sp * c3 * s4 * dn);
  return b.set;
}

StateVector coherent_state_vector(Family f, double phi, Complex alpha, double tau, double omega_tilde,
                                  const HilbertSpec& spec) {
  const CVector qa = coherent_ket(alpha, spec.n_a());
  const CVector qb = coherent_ket(alpha, spec.n_b());
  CVector out = CVector::Zero(spec.total());
  for (int n = 0; n < spec.n_a(); ++n) {
    for (int m = 0; m < spec.n_b(); ++m) {
      const Complex w = qa[n] * qb[m];
      if (std::abs(w) < 1e-300) continue;
      const CoefficientSet set = fock_coefficients(f, phi, n, m, tau, omega_tilde);
      for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& l = set.labels[i];
        // Terms pushed past the truncation carry at most the dropped tail.
        if (!l.valid() || l.n >= spec.n_a() || l.m >= spec.n_b()) continue;
        out[spec.index(l.q1, l.q2, l.n, l.m)] += w * set.values[i];
      }
    }
  }
  return StateVector(spec, std::move(out));
}

double detuned_concurrence(Family f, double phi, double delta_tilde, double tau_raw) {
  check_finite(delta_tilde, "detuning");
  const double d = std::sqrt(delta_tilde * delta_tilde + 4.0);
  const double tau = 0.5 * d * tau_raw;
  const double flip = 4.0 / (d * d) * std::sin(tau) * std::sin(tau);  // 4 N sin^2 tau
  const double stay = 1.0 - flip;
  const double s2 = std::abs(std::sin(2 * phi));
  if (f == Family::psi1) return s2 * stay;
  const double cp2 = std::cos(phi) * std::cos(phi);
  return std::max(0.0, stay * (s2 - 2.0 * cp2 * flip));
}

}  // namespace hqs
