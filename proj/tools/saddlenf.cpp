// Command line front end: certify, flyby, sweep, graphic-laps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "saddlenf/flyby.hpp"
#include "saddlenf/io.hpp"

namespace {

using namespace saddlenf;

enum ExitCode { kOk = 0, kParse = 2, kNotASaddle = 3, kCertification = 4, kFlybyDomain = 5 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
      return kParse;
    case ErrorKind::NotASaddle:
    case ErrorKind::NotAFixedPoint:
    case ErrorKind::SingularTransform:
    case ErrorKind::ResidualLinearTerms:
      return kNotASaddle;
    case ErrorKind::StraddlesStableManifold:
    case ErrorKind::LeftValidityDomain:
    case ErrorKind::DomainError:
    case ErrorKind::InverseDomainViolated:
    case ErrorKind::NegativeDiscriminant:
      return kFlybyDomain;
    default:
      return kCertification;
  }
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& item : split_csv(text)) {
    try {
      out.push_back(parse_exact(item));
    } catch (const Error&) {
      throw Error(ErrorKind::ParseError, std::string("bad ") + what + " value '" + item + "'");
    }
  }
  return out;
}

/// Reloaded certificates are re-checked before use.
Certificate load_checked(const std::string& path) {
  Certificate c = load_certificate(path);
  for (const auto& r : certificate_checks(c)) {
    if (!r.passed) throw Error(ErrorKind::CertificationFailed, "certificate check failed: " + r.name);
  }
  return c;
}

HeuristicConfig config_or_default(const std::string& path) {
  return path.empty() ? HeuristicConfig{} : load_config(path);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

int run_certify(const std::string& field, const std::string& config, const std::string& out) {
  const DiagField f = to_diag(load_field(field));
  const Certificate c = certify(f, config_or_default(config));
  std::cout << report(c);
  if (!out.empty()) {
    std::ofstream o(out);
    if (!o) throw Error(ErrorKind::ParseError, "cannot write '" + out + "'");
    write_certificate(o, c);
  }
  return kOk;
}

int run_flyby(const std::string& cert_path, const std::string& entry) {
  const Certificate c = load_checked(cert_path);
  const auto e = parse_list(entry, "entry");
  if (e.size() != 2) throw Error(ErrorKind::ParseError, "--entry expects r,x_u");
  const Interval r(e[0]);
  const FlybyResult res = flyby(c, {r, Interval(e[1]), r});
  std::cout << "exit side      : x_u " << (res.exit_side > 0 ? "> 0" : "< 0") << "\n";
  std::cout << "x_s on exit    : " << format(res.x_s_exit, 5, true) << "\n";
  std::cout << "x_u on exit    : " << format(res.x_u_exit, 5, true) << "\n";
  std::cout << "passage time   : " << format(res.time, 5) << "\n";
  std::cout << "box radius R   : " << format(res.R, 5, true) << "\n";
  for (const auto& a : res.audit) {
    std::cout << (a.passed ? "  ok   " : "  FAIL ") << a.name;
    if (!a.detail.empty()) std::cout << "  " << a.detail;
    std::cout << "\n";
  }
  return kOk;
}

int run_sweep(const std::string& field, const std::string& deltas, const std::string& config) {
  const HeuristicConfig cfg = config_or_default(config);
  std::cout << "delta       r_phi       r_1         r_3         K_0         kappa\n";
  for (const std::string& item : split_csv(deltas)) {
    const Interval delta = Interval::from_decimal(item);
    std::cout << item;
    for (std::size_t pad = item.size(); pad < 12; ++pad) std::cout << ' ';
    try {
      const Certificate c = certify(to_diag(load_field(field, {{"delta", delta}})), cfg);
      for (const Interval* x : {&c.r_phi, &c.r1, &c.r3, &c.K0, &c.kappa}) std::cout << sci(x->hi()) << "   ";
      std::cout << "\n";
    } catch (const Error& e) {
      std::cout << "failed: " << e.what() << "\n";
    }
  }
  return kOk;
}

int run_laps(const std::string& cert_path, const std::string& entry, int laps, int saddles) {
  const Certificate c = load_checked(cert_path);
  const auto e = parse_list(entry, "entry");
  if (e.size() != 2) throw Error(ErrorKind::ParseError, "--entry expects r,x_u");
  const LapTable t = graphic_laps(c, Interval(e[0]), e[1], laps, saddles);
  std::cout << "lap  x_u upper    lap time >=  total time >=\n";
  for (const auto& row : t.rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-4d %-12.3e %-12.4g %-12.4g\n", row.lap, row.x_u_upper, row.lap_time_lower,
                  row.cumulative_time_lower);
    std::cout << buf;
  }
  if (!t.stop_reason.empty()) std::cout << "stopped: " << t.stop_reason << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified normal forms near planar saddles"};
  app.require_subcommand(1);

  std::string field, config, cert, out, deltas, entry = "0.02,0.01";
  int laps = 6;
  int saddles = 4;
  bool transversal = false;

  auto* certify_cmd = app.add_subcommand("certify", "certify a field and print the report");
  certify_cmd->add_option("--field", field, "field file")->required();
  certify_cmd->add_option("--config", config, "key = value configuration");
  certify_cmd->add_option("--out", out, "write the machine-readable certificate here");

  auto* flyby_cmd = app.add_subcommand("flyby", "pass the saddle from (x_s, x_u) = (r, x_u)");
  flyby_cmd->add_option("--cert", cert, "certificate file")->required();
  flyby_cmd->add_option("--entry", entry, "r,x_u");

  auto* sweep_cmd = app.add_subcommand("sweep", "certify a template field for several delta values");
  sweep_cmd->add_option("--field", field, "field file with a 'param delta' entry")->required();
  sweep_cmd->add_option("--delta-list", deltas, "comma separated values")->required();
  sweep_cmd->add_option("--config", config, "key = value configuration");

  auto* laps_cmd = app.add_subcommand("graphic-laps", "iterate passages around a symmetric graphic");
  laps_cmd->add_option("--cert", cert, "certificate file")->required();
  laps_cmd->add_option("--entry", entry, "r,x_u");
  laps_cmd->add_option("--laps", laps, "number of laps")->check(CLI::NonNegativeNumber);
  laps_cmd->add_option("--saddles-per-lap", saddles, "saddle passages per lap")->check(CLI::PositiveNumber);
  laps_cmd
      ->add_flag("--assert-transversal", transversal,
                 "the user asserts that the flow between boxes maps exits to entries without moving away "
                 "from the graphic")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParse;
  }

  try {
    if (*certify_cmd) return run_certify(field, config, out);
    if (*flyby_cmd) return run_flyby(cert, entry);
    if (*sweep_cmd) return run_sweep(field, deltas, config);
    if (*laps_cmd) return run_laps(cert, entry, laps, saddles);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kOk;
}
