#include "anisobound/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "anisobound/config.hpp"
#include "anisobound/degiorgi.hpp"
#include "anisobound/format.hpp"
#include "anisobound/gridfn_io.hpp"
#include "anisobound/inequalities.hpp"
#include "anisobound/minimize.hpp"

namespace anisobound::cli {

namespace fs = std::filesystem;

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }

std::string maybe(const std::optional<double>& v) { return v ? fmt17(*v) : "na"; }

std::ofstream open_output(const fs::path& dir, const std::string& file) {
  fs::create_directories(dir);
  std::ofstream os(dir / file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write '" + (dir / file).string() + "'");
  return os;
}

fs::path resolve_out(const RunConfig& rc, const std::optional<fs::path>& out_dir) {
  return out_dir ? *out_dir : rc.output_dir();
}

// Runs a command body and turns exceptions into exit status 1 with a message.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUsageError;
}

GridFunction load_solution(const fs::path& solution, const Grid& expected) {
  GridFunction u = load_gridfn(solution);
  if (!(u.grid() == expected)) {
    throw std::runtime_error("solution grid does not match the configured grid");
  }
  return u;
}

}  // namespace

Fields admissibility_fields(const Exponents& e) {
  const ExponentProfile prof(e);
  const auto& a = prof.admissibility;
  Fields f{{"dimension_below", flag(a.dimension_below)},
           {"q_below", flag(a.q_below)},
           {"gamma_below", flag(a.gamma_below)},
           {"gamma_range_nonempty", flag(a.gamma_range_nonempty)},
           {"admissible", flag(a.admissible())},
           {"sigma_bar", fmt17(prof.derived.sigma_bar)},
           {"sigma_star", maybe(prof.derived.sigma_star)},
           {"gamma_upper", maybe(a.gamma_upper)}};
  const auto& c = prof.constants;
  auto constant = [&](double IterationConstants::*field) {
    return c ? fmt17((*c).*field) : std::string("na");
  };
  f.emplace_back("theta1", constant(&IterationConstants::theta1));
  f.emplace_back("theta2", constant(&IterationConstants::theta2));
  f.emplace_back("delta1", constant(&IterationConstants::delta1));
  f.emplace_back("delta2", constant(&IterationConstants::delta2));
  f.emplace_back("alpha", constant(&IterationConstants::alpha));
  f.emplace_back("lambda_base", constant(&IterationConstants::lambda_base));
  return f;
}

int cmd_admissible(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config);
    const Exponents e = rc.exponents();
    const Fields f = admissibility_fields(e);
    for (const auto& [k, v] : f) out << k << '=' << v << '\n';
    return ExponentProfile(e).admissibility.admissible() ? kOk : kInadmissible;
  });
}

int cmd_minimize(const fs::path& config, const std::optional<fs::path>& out_dir, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config);
    const ModelIntegrand m = rc.model();
    const Grid g = rc.grid();
    const BoundaryFunction bc = rc.boundary();
    if (bc.dim() != g.dim()) throw ConfigError("boundary dimension differs from the grid");
    if (g.dim() != m.dim()) throw ConfigError("grid dimension differs from exponents.n");
    const SolveConfig sc = rc.solver();
    const QuasiminimalitySettings qs = rc.quasiminimality();
    const fs::path dir = resolve_out(rc, out_dir);

    const SolveResult res = solve(m, dirichlet_start(g, bc, rc.initial_guess()), sc);
    const auto phis = random_perturbations(g, qs.count, qs.seed, qs.amplitude);
    const QuasiminimalityReport qr = verify_quasiminimality(m, res.u, 1.0, phis);

    {
      auto os = open_output(dir, "solution.gridfn");
      write_gridfn(os, res.u);
    }
    auto os = open_output(dir, "summary.csv");
    os << "energy,iterations,converged,residual,empirical_q\n"
       << fmt17(res.final_energy) << ',' << res.iterations << ',' << (res.converged ? 1 : 0) << ','
       << fmt17(res.residual) << ',' << fmt17(qr.empirical_q) << '\n';
    out << "energy=" << fmt17(res.final_energy) << "\niterations=" << res.iterations
        << "\nconverged=" << flag(res.converged) << "\nresidual=" << fmt17(res.residual)
        << "\nempirical_q=" << fmt17(qr.empirical_q) << '\n';
    if (!res.converged) {
      err << "solver did not reach the residual tolerance\n";
      return kNotConverged;
    }
    return kOk;
  });
}

int cmd_certify(const fs::path& config, const fs::path& solution,
                const std::optional<fs::path>& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config);
    const ModelIntegrand m = rc.model();
    const CertifySettings cs = rc.certify();
    const GridFunction u = load_solution(solution, rc.grid());
    const fs::path dir = resolve_out(rc, out_dir);
    if (!(cs.R > 0.0 && cs.R <= 1.0)) throw std::domain_error("certify.R must lie in (0, 1]");

    CertifyOptions opt;
    opt.H = cs.H;
    opt.holder_constant = cs.holder_constant;
    if (cs.C_cal) {
      opt.C_cal = *cs.C_cal;
    } else {
      opt.C_cal = calibrate_from_solution(u, ExponentProfile(m.exponents()), cs.x0, cs.R, cs.H);
    }

    const Certificate cert = certify(m, u, cs.x0, cs.R, opt);
    {
      auto os = open_output(dir, "certificate.csv");
      write_certificate_csv(os, {cert});
    }
    {
      auto os = open_output(dir, "trace.csv");
      write_trace_csv(os, {cert.trace_plus, cert.trace_minus});
    }
    out << "C_cal=" << fmt17(opt.C_cal) << "\nd=" << fmt17(cert.d)
        << "\nsup_half_ball=" << fmt17(cert.sup_half_ball) << "\nslack=" << fmt17(cert.slack)
        << "\nrhs_bound=" << fmt17(cert.rhs_bound) << "\ndecayed=" << flag(cert.decayed)
        << "\nvalid=" << flag(cert.valid) << '\n';
    return cert.valid ? kOk : kCheckFailed;
  });
}

int cmd_verify(const fs::path& config, const fs::path& solution,
               const std::optional<fs::path>& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config);
    const ModelIntegrand m = rc.model();
    const VerifySettings vs = rc.verify();
    const GridFunction u = load_solution(solution, rc.grid());
    const fs::path dir = resolve_out(rc, out_dir);
    const DerivedExponents d = derive(m.exponents());

    std::vector<InequalityReport> reports;
    reports.push_back(verify_lower_bound(m, u, vs.sub_box));
    // The Sobolev-type checks need zero boundary values, so they see a cut-off copy.
    const GridFunction v = bump_cutoff(u);
    reports.push_back(verify_embedding(v, d));
    reports.push_back(verify_poincare_sobolev(m, v, d));
    reports.push_back(verify_weight_domination(m, u.grid()));
    for (double R : vs.R) {
      for (double frac : vs.rho_fraction) {
        for (double k : vs.k) {
          reports.push_back(verify_caccioppoli(m, u, {k, frac * R, R, vs.x0}));
        }
      }
    }

    {
      auto os = open_output(dir, "reports.csv");
      write_reports_csv(os, reports);
    }
    std::size_t failures = 0;
    for (const auto& r : reports) {
      if (!r.passed || !std::isfinite(r.c_emp)) {
        ++failures;
        err << "failed: " << r.check << ' ' << r.parameters << " c_emp=" << fmt17(r.c_emp) << '\n';
      }
    }
    out << "checks=" << reports.size() << "\nfailures=" << failures << '\n';
    return failures == 0 ? kOk : kCheckFailed;
  });
}

namespace {

struct Axis {
  std::string param;
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;
};

Axis parse_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("axis must look like param=lo:hi:steps");
  Axis a;
  a.param = text.substr(0, eq);
  static const std::vector<std::string> known{"gamma", "q", "s", "r", "p"};
  if (std::find(known.begin(), known.end(), a.param) == known.end()) {
    throw std::invalid_argument("unknown axis '" + a.param + "' (expected gamma, q, s, r or p)");
  }
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(eq + 1));
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw std::invalid_argument("axis must look like param=lo:hi:steps");
  a.lo = parse_double(parts[0]);
  a.hi = parse_double(parts[1]);
  const double steps = parse_double(parts[2]);
  if (steps < 1 || steps != std::floor(steps) || steps > 1e7) {
    throw std::invalid_argument("axis steps must be a positive integer");
  }
  a.steps = static_cast<int>(steps);
  return a;
}

// Exponents with one parameter replaced; nullopt when the combination is not
// a valid exponent tuple at all (for instance q above gamma).
std::optional<Exponents> with_param(const Exponents& base, const std::string& param, double v) {
  std::vector<double> p = base.p();
  std::vector<Exponent> r = base.r();
  double q = base.q();
  double gamma = base.gamma();
  Exponent s = base.s();
  if (param == "gamma") gamma = v;
  if (param == "q") q = v;
  if (param == "s") s = Exponent::finite(v);
  if (param == "r") r.assign(r.size(), Exponent::finite(v));
  if (param == "p") p.assign(p.size(), v);
  try {
    return Exponents(base.n(), p, q, gamma, r, s);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

int cmd_sweep(const fs::path& config, const std::string& axis_spec,
              const std::optional<fs::path>& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Axis axis = parse_axis(axis_spec);
    const RunConfig rc = load_config(config);
    const Exponents base = rc.exponents();

    std::ostringstream csv;
    const Fields header = admissibility_fields(base);
    csv << axis.param;
    for (const auto& [k, v] : header) csv << ',' << k;
    csv << '\n';
    for (int i = 0; i < axis.steps; ++i) {
      // The last point is hi exactly so endpoints match a direct run.
      const double t = axis.steps == 1 ? axis.lo
                       : i == axis.steps - 1
                           ? axis.hi
                           : axis.lo + (axis.hi - axis.lo) * i / (axis.steps - 1);
      csv << fmt17(t);
      if (const auto e = with_param(base, axis.param, t)) {
        for (const auto& [k, v] : admissibility_fields(*e)) csv << ',' << v;
      } else {
        for (const auto& [k, v] : header) {
          const bool is_flag = v == "true" || v == "false";
          csv << ',' << (is_flag ? "false" : "na");
        }
      }
      csv << '\n';
    }
    out << csv.str();
    if (out_dir) {
      auto os = open_output(*out_dir, "sweep.csv");
      os << csv.str();
    }
    return kOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local boundedness toolkit for anisotropic p,q-growth energies", "anisobound"};
  app.require_subcommand(1);

  std::string config, solution, axis, out_dir;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration file")->required();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_dir, "output directory"); };
  auto add_solution = [&](CLI::App* sub) {
    sub->add_option("--solution", solution, "GRIDFN solution file")->required();
  };

  CLI::App* adm = app.add_subcommand("admissible", "check the exponent conditions");
  add_config(adm);
  CLI::App* mini = app.add_subcommand("minimize", "compute a discrete minimizer");
  add_config(mini);
  add_out(mini);
  CLI::App* cert = app.add_subcommand("certify", "build an L-infinity certificate");
  add_config(cert);
  add_solution(cert);
  add_out(cert);
  CLI::App* ver = app.add_subcommand("verify", "check the energy inequalities");
  add_config(ver);
  add_solution(ver);
  add_out(ver);
  CLI::App* sw = app.add_subcommand("sweep", "tabulate admissibility along one parameter");
  add_config(sw);
  sw->add_option("--axis", axis, "param=lo:hi:steps")->required();
  add_out(sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  const std::optional<fs::path> od = out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir);
  if (adm->parsed()) return cmd_admissible(config, out, err);
  if (mini->parsed()) return cmd_minimize(config, od, out, err);
  if (cert->parsed()) return cmd_certify(config, solution, od, out, err);
  if (ver->parsed()) return cmd_verify(config, solution, od, out, err);
  return cmd_sweep(config, axis, od, out, err);
}

}  // namespace anisobound::cli
