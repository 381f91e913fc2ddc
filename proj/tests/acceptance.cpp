// Acceptance suite: one PASS/FAIL line per criterion, followed by the
// measured values behind it. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "flow_oracle.hpp"
#include "interval_oracle.hpp"
#include "phi_oracle.hpp"
#include "saddlenf/flyby.hpp"
#include "saddlenf/io.hpp"

using namespace saddlenf;

namespace {

const std::string kData = SADDLENF_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& line) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + line);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double got, double want) { return (got - want) / want; }

void within(Outcome& o, const std::string& name, double got, double want, double tol) {
  o.check(std::fabs(rel(got, want)) <= tol, fmt("%-8s %.6g vs %.6g (%+.1f%%, band %.0f%%)", name.c_str(), got, want,
                                                100 * rel(got, want), 100 * tol));
}

void factor(Outcome& o, const std::string& name, double got, double want, double f) {
  const double q = got / want;
  o.check(q <= f && q >= 1 / f, fmt("%-8s %.4g vs %.4g (ratio %.3g)", name.c_str(), got, want, q));
}

void runtime(Outcome& o, double seconds, double limit) {
  o.check(seconds < limit, fmt("runtime %.2f s (limit %.0f s)", seconds, limit));
}

Certificate ex2() {
  return certify(to_diag(load_field(kData + "/ex2_field.txt")), load_config(kData + "/ex2_config.txt"));
}

Certificate ex1(const std::string& delta) {
  return certify(to_diag(load_field(kData + "/ex1_field.txt", {{"delta", Interval::from_decimal(delta)}})),
                 load_config(kData + "/ex1_config.txt"));
}

void residual_contains_zero(Outcome& o, const std::string& name, const Certificate& c) {
  const auto res = functional_residual(c.field, c.phi, c.flatness.l);
  int checked = 0, bad = 0;
  for (const auto& comp : res) {
    comp.for_each([&](const MultiIndex& m, const Interval& r) {
      if (m.order() < 2 || !in_filter(m, c.flatness.l, FilterSet::V)) return;
      ++checked;
      if (!r.contains_zero()) ++bad;
    });
  }
  o.check(bad == 0 && checked > 0,
          fmt("%s: %d coefficients up to order %d, %d exclude zero", name.c_str(), checked, c.n1, bad));
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Certificate c = ex2();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(c.flatness.l == 9 && c.flatness.N_l == 19 && c.n0 == 10 && c.n1 == 23,
          fmt("l=%d N_l=%d n0=%d n1=%d (want 9 19 10 23)", c.flatness.l, c.flatness.N_l, c.n0, c.n1));
  within(o, "C", c.C().mid(), 0.01805, 0.10);
  within(o, "M", c.M().mid(), 3.98535, 0.10);
  within(o, "A", c.A.mid(), 4.55205, 0.10);
  within(o, "K0", c.K0.mid(), 2.32235, 0.10);
  within(o, "D", c.D().mid(), 1.27015e-10, 0.10);
  within(o, "K", c.K().mid(), 12.56165, 0.10);
  within(o, "r_phi", c.r_phi.mid(), 0.25095, 0.25);
  within(o, "r0", c.r0.mid(), 0.03765, 0.25);
  within(o, "r1", c.r1.mid(), 0.07965, 0.25);
  within(o, "r2", c.r2.mid(), 0.02625, 0.25);
  within(o, "r3", c.r3.mid(), 0.02105, 0.25);
  o.check(c.kappa.hi() < 1e-15, fmt("kappa.hi %.3g < 1e-15", c.kappa.hi()));
  o.check(certificate_valid(c), "all certificate inequalities hold");
  runtime(o, secs, 30);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Certificate c = ex1("1e-3");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // The printed digits as exact decimals, enclosed outward.
  const auto dec = [](const char* x) { return Interval::from_decimal(x); };
  const Interval ps(dec("-0.7797885230264994").lo(), dec("-0.7797885230264989").hi());
  const Interval pu(dec("1.2182790230264988").lo(), dec("1.2182790230264995").hi());
  const auto& sp = c.field.spectrum;
  o.check(sp.lambda_s.subset_of(ps) && sp.lambda_u.subset_of(pu),
          fmt("eigenvalues [%.17g, %.17g], [%.17g, %.17g] inside the reference brackets", sp.lambda_s.lo(),
              sp.lambda_s.hi(), sp.lambda_u.lo(), sp.lambda_u.hi()));
  o.check(c.flatness.l == 10 && c.flatness.N_l == 25, fmt("l=%d N_l=%d (want 10 25)", c.flatness.l, c.flatness.N_l));
  o.check(c.n0 == 13 && c.n1 == 30, fmt("n0=%d n1=%d", c.n0, c.n1));
  within(o, "A", c.A.mid(), 1.64, 0.10);
  within(o, "K0", c.K0.mid(), 22.6, 0.20);
  within(o, "r_phi", c.r_phi.mid(), 2.52e-3, 0.25);
  o.check(c.kappa.hi() < 1e-19, fmt("kappa.hi %.3g < 1e-19", c.kappa.hi()));
  runtime(o, secs, 60);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Row {
    const char* delta;
    double r_phi, K0;
  };
  const Row rows[] = {{"1e-3", 2.52e-3, 22.6}, {"1e-5", 6.85e-2, 6.52}, {"1e-7", 9.97e-3, 74.5}, {"1e-9", 1.14e-3, 842}};
  std::vector<double> rp, k0;
  for (const Row& r : rows) {
    try {
      const Certificate c = ex1(r.delta);
      factor(o, std::string("r_phi ") + r.delta, c.r_phi.mid(), r.r_phi, 2);
      factor(o, std::string("K0 ") + r.delta, c.K0.mid(), r.K0, 2);
      rp.push_back(c.r_phi.mid());
      k0.push_back(c.K0.mid());
    } catch (const Error& e) {
      o.check(false, std::string("delta ") + r.delta + ": " + e.what());
      rp.push_back(NAN);
      k0.push_back(NAN);
    }
  }
  o.check(rp[1] > rp[2] && rp[2] > rp[3], "r_phi shrinks for delta <= 1e-5");
  o.check(k0[1] < k0[2] && k0[2] < k0[3], "K0 grows for delta <= 1e-5");
  runtime(o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 300);
  return o;
}

Outcome criterion4(const Certificate& c) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const LapTable t = graphic_laps(c, Interval(0.02), 0.01, 6);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(t.rows.size() == 7, "six laps completed" + (t.stop_reason.empty() ? "" : ": " + t.stop_reason));
  const double xu[] = {7.1e-3, 3.0e-3, 3.8e-4, 3.7e-6, 1.2e-10, 3.0e-17};
  const double tau[] = {1.7, 2.8, 5.6, 12, 26, 58};
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    factor(o, "x_u lap " + std::to_string(i), t.rows[i].x_u_upper, xu[i - 1], 2);
  }
  if (t.rows.size() == 7) {
    o.check(t.rows[4].x_u_upper <= 1e-5, fmt("lap 4 x_u %.3g <= 1e-5", t.rows[4].x_u_upper));
    o.check(t.rows[6].x_u_upper <= 1e-16, fmt("lap 6 x_u %.3g <= 1e-16", t.rows[6].x_u_upper));
  }
  // The reference times are the duration of each lap; the running total is
  // reported alongside for reference.
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    within(o, "time " + std::to_string(i), t.rows[i].lap_time_lower, tau[i - 1], 0.20);
    o.lines.push_back(fmt("     cumulative lower bound after lap %zu: %.4g", i, t.rows[i].cumulative_time_lower));
  }
  runtime(o, secs, 5);
  return o;
}

Outcome criterion5(const Certificate& c2) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  residual_contains_zero(o, "example 2", c2);
  residual_contains_zero(o, "example 1", ex1("1e-3"));
  runtime(o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10);
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rc = saddlenf_test::random_cubic(rng);
    const auto phi = solve_phi(rc.field, rc.l, 6);
    const auto ref = saddlenf_test::oracle_phi(rc.oracle, rc.l, 6);
    int checked = 0, bad = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      phi[i].for_each([&](const MultiIndex& m, const Interval& a) {
        if (m.order() < 2) return;
        const auto it = ref[i].find({m.s, m.u});
        const saddlenf_test::Real want = it == ref[i].end() ? saddlenf_test::Real(0) : it->second;
        ++checked;
        if (!(saddlenf_test::Real(a.lo()) <= want && want <= saddlenf_test::Real(a.hi()))) ++bad;
      });
    }
    o.check(bad == 0, fmt("field %d (l=%d, lambda=(%g, %g)): %d coefficients, %d outside", trial, rc.l,
                          rc.field.spectrum.lambda_s.mid(), rc.field.spectrum.lambda_u.mid(), checked, bad));
  }
  runtime(o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const double ls = -2.2, lu = 1.8;
  const Certificate c = certify(make_diag_field({Interval(ls), Interval(lu)}, {}), HeuristicConfig{});
  const double r = std::min(0.01, c.r3.lo());
  for (double xu : {1e-9, 1e-6, 1e-4, 1e-3, 5e-3}) {
    const FlybyResult f = flyby(c, {Interval(r), Interval(xu), Interval(r)});
    const long double ys = r * std::pow(static_cast<long double>(xu) / r, static_cast<long double>(-ls) / lu);
    const long double tau = std::log(static_cast<long double>(r) / xu) / lu;
    const bool ok = f.x_s_exit.width() < 1e-12 && f.time.width() < 1e-12 &&
                    std::fabs(f.x_s_exit.mid() - ys) <= 1e-12 * ys && std::fabs(f.time.mid() - tau) <= 1e-12;
    o.check(ok, fmt("x_u=%g: y_s %.15g vs %.15Lg, tau %.15g vs %.15Lg, widths %.1e %.1e", xu, f.x_s_exit.mid(), ys,
                    f.time.mid(), tau, f.x_s_exit.width(), f.time.width()));
  }
  return o;
}

Outcome criterion8(const Certificate& c) {
  Outcome o;
  const saddlenf_test::MidpointField field(c.field);
  const double r = 0.02;
  int inside = 0, total = 0;
  for (double side : {1.0, -1.0}) {
    for (int j = 0; j < 10; ++j) {
      const double xs = side * r;
      const double xu = (j % 2 ? -1 : 1) * side * 1e-4 * std::pow(150.0, j / 9.0);
      ++total;
      const FlybyResult f = flyby(c, {Interval(xs), Interval(xu), Interval(r)});
      const auto sim = saddlenf_test::simulate_exit(field, xs, xu, r);
      // The simulated crossing is located by bisection to ~1e-15.
      const bool ok = sim.exited && f.x_s_exit.contains(sim.x_s) && f.time.contains(sim.time) &&
                      std::fabs(sim.x_u - f.x_u_exit.mid()) < 1e-12;
      if (ok) {
        ++inside;
      } else {
        o.check(false, fmt("entry (%g, %g): simulated (%.10g, %.10g) at t=%.10g", xs, xu, sim.x_s, sim.x_u, sim.time));
      }
    }
  }
  o.check(inside == total, fmt("%d of %d simulated exits inside the enclosures", inside, total));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const auto a = saddlenf_test::containment_suite(31337, 10000);
  o.check(a.ok(), fmt("containment: %d cases, %d sample checks, %zu failures", a.cases, a.checked, a.failures.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(a.failures.size(), 5); ++i) o.lines.push_back("     " + a.failures[i]);
  const auto b = saddlenf_test::tightness_suite(4242, 2000);
  o.check(b.ok(), fmt("log / pow tightness: %d cases, %zu failures", b.cases, b.failures.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(b.failures.size(), 5); ++i) o.lines.push_back("     " + b.failures[i]);
  return o;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    Outcome o;
    o.check(false, std::string("error: ") + e.what());
    return o;
  }
}

}  // namespace

int main() {
  const Certificate c2 = ex2();
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"Example 2 certificate", criterion1},
      {"Example 1 certificate", criterion2},
      {"delta sweep", criterion3},
      {"graphic laps", [&] { return criterion4(c2); }},
      {"functional-equation residual", [&] { return criterion5(c2); }},
      {"phi against high-precision oracle", criterion6},
      {"linear limit of the flyby", criterion7},
      {"flyby containment of integrated orbits", [&] { return criterion8(c2); }},
      {"interval substrate", criterion9},
  };
  int failed = 0, n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    const Outcome o = guarded(run);
    std::printf("%s  criterion %d: %s\n", o.pass ? "PASS" : "FAIL", n, name);
    for (const auto& l : o.lines) std::printf("        %s\n", l.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("criteria evaluated: %d, passed: %d, failed: %d\n", n, n - failed, failed);
  return failed == 0 ? 0 : 1;
}
