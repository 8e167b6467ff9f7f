#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <CLI11.hpp>

namespace wgf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const RateFit& f) {
  return json{{"rate", number_or_null(f.rate)}, {"r2", number_or_null(f.r2)}, {"points", f.points}};
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return obj.at(key).get<T>();
}

Scheme parse_scheme(const std::string& s) {
  if (s == "rk4") return Scheme::rk4;
  if (s == "euler") return Scheme::euler;
  throw InputError("unknown integrator scheme '" + s + "' (expected rk4 or euler)");
}

// Reference value of the center of mass matching the potential's treatment of ω.
double reference_com(const AttractionPotential& pot) {
  return pot.q_a() == 1.0 ? pot.profile().center_of_mass() : pot.sampled().center_of_mass();
}

}  // namespace

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  RunConfig cfg;
  try {
    if (!doc.is_object()) throw InputError("configuration must be a JSON object");
    if (doc.contains("profile")) {
      const json& p = doc.at("profile");
      cfg.profile = p.is_string() ? io::read_profile(base_dir / p.get<std::string>()) : io::profile_from_json(p);
    }
    if (doc.contains("exponents")) {
      const json& e = doc.at("exponents");
      cfg.exps = Exponents(e.at("q_a").get<double>(), e.at("q_r").get<double>());
    }
    const auto n = get_or<long long>(doc, "n", 200);
    if (n < 16) throw InputError("grid size n must be at least 16");
    cfg.n = static_cast<std::size_t>(n);
    const auto m = get_or<long long>(doc, "quadrature_nodes", 0);
    if (m < 0) throw InputError("quadrature_nodes must be nonnegative");
    cfg.quadrature_nodes = static_cast<std::size_t>(m);

    if (doc.contains("initial")) {
      const json& init = doc.at("initial");
      cfg.initial.type = get_or<std::string>(init, "type", "profile");
      if (cfg.initial.type == "uniform") {
        cfg.initial.a = init.at("a").get<double>();
        cfg.initial.b = init.at("b").get<double>();
        if (!(cfg.initial.b > cfg.initial.a)) throw InputError("uniform initial datum needs a < b");
      } else if (cfg.initial.type == "csv") {
        cfg.initial.csv = base_dir / init.at("path").get<std::string>();
      } else if (cfg.initial.type != "profile") {
        throw InputError("unknown initial type '" + cfg.initial.type + "' (expected profile, uniform or csv)");
      }
    }

    if (doc.contains("integrator")) {
      const json& it = doc.at("integrator");
      cfg.integrator.dt = get_or(it, "dt", cfg.integrator.dt);
      cfg.integrator.t_end = get_or(it, "t_end", cfg.integrator.t_end);
      cfg.integrator.safety = get_or(it, "safety", cfg.integrator.safety);
      const auto every = get_or<long long>(it, "record_every", 1);
      if (every < 1) throw InputError("record_every must be positive");
      cfg.integrator.record_every = static_cast<std::size_t>(every);
      cfg.integrator.scheme = parse_scheme(get_or<std::string>(it, "scheme", "rk4"));
    }

    if (doc.contains("reports")) {
      const json& r = doc.at("reports");
      cfg.reports.energy = get_or(r, "energy", cfg.reports.energy);
      cfg.reports.fourier = get_or(r, "fourier", cfg.reports.fourier);
      cfg.reports.wasserstein = get_or(r, "wasserstein", cfg.reports.wasserstein);
      cfg.reports.moments = get_or(r, "moments", cfg.reports.moments);
      if (r.contains("moment_r")) {
        const double order = r.at("moment_r").get<double>();
        if (!(order > 0.0)) throw InputError("moment_r must be positive");
        cfg.reports.moment_r = order;
      }
    }

    if (doc.contains("fit_window")) {
      const auto w = doc.at("fit_window").get<std::vector<double>>();
      if (w.size() != 2 || !(w[1] > w[0])) throw InputError("fit_window must be [t_lo, t_hi] with t_lo < t_hi");
      cfg.fit_window = std::make_pair(w[0], w[1]);
    }

    if (doc.contains("oracle")) {
      const json& o = doc.at("oracle");
      const auto states = get_or<long long>(o, "states", 10);
      if (states < 1) throw InputError("oracle states must be positive");
      cfg.oracle.states = static_cast<std::size_t>(states);
      cfg.oracle.tolerance = get_or(o, "tolerance", cfg.oracle.tolerance);
      if (o.contains("exponents")) {
        cfg.oracle.exponents.clear();
        for (const json& pair : o.at("exponents")) {
          const auto q = pair.get<std::vector<double>>();
          if (q.size() != 2) throw InputError("oracle exponents must be [q_a, q_r] pairs");
          Exponents check(q[0], q[1]);
          cfg.oracle.exponents.emplace_back(check.q_a(), check.q_r());
        }
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("configuration: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) { return parse_config(io::read_json(path), path.parent_path()); }

InverseCDF initial_datum(const RunConfig& cfg) {
  if (cfg.initial.type == "uniform") return InverseCDF::uniform(cfg.initial.a, cfg.initial.b, cfg.n);
  if (cfg.initial.type == "csv") {
    InverseCDF X = io::read_inverse_cdf(cfg.initial.csv);
    if (X.size() != cfg.n)
      throw InputError("initial CSV has " + std::to_string(X.size()) + " rows but n = " + std::to_string(cfg.n));
    return X;
  }
  return sample_normalized(cfg.profile, cfg.n);
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const AttractionPotential pot(cfg.profile, cfg.exps.q_a(), cfg.quadrature());
  cfg.integrator.validate(pot.lambda());
  const InverseCDF X0 = initial_datum(cfg);
  const double m = cfg.profile.mass();
  const double com_ref = reference_com(pot);

  // Limit used for the W2 column: the q_r = 1 steady state, or δ at the
  // reference center for q_a = q_r = 2 with m > 1.
  std::optional<InverseCDF> target;
  std::string target_kind = "none";
  if (cfg.reports.wasserstein) {
    if (cfg.exps.q_r() == 1.0) {
      SteadyState s = steady_qr1(pot, cfg.n);
      if (s.Xstar) {
        target = std::move(*s.Xstar);
        target_kind = to_string(s.kind);
      }
    } else if (cfg.exps.q_a() == 2.0 && cfg.exps.q_r() == 2.0 && m > 1.0) {
      target = InverseCDF(std::vector<double>(cfg.n, com_ref));
      target_kind = "point_mass";
    }
  }

  io::TrajectoryWriter writer(out / "trajectory");
  Trajectory traj;
  int status = ok;
  try {
    traj = simulate(X0, pot, cfg.exps, cfg.integrator, [&](const FlowState& s) { writer.add(s); });
  } catch (const MonotonicityError& e) {
    writer.finish();
    log << "simulate: " << e.what() << "\n";
    return monotonicity_abort;
  }
  writer.finish();

  std::vector<double> times, com_gap, w2;
  std::string diag = "t,com,w2_steady,min_slope\n";
  for (const FlowState& s : traj.snapshots) {
    const double com = s.X.mean();
    times.push_back(s.t);
    com_gap.push_back(std::abs(com - com_ref));
    const double w = target ? wasserstein(s.X, *target, 2.0) : std::numeric_limits<double>::quiet_NaN();
    w2.push_back(w);
    diag += io::format_double(s.t) + "," + io::format_double(com) + ",";
    if (target) diag += io::format_double(w);
    diag += "," + (std::isfinite(s.min_slope) ? io::format_double(s.min_slope) : std::string()) + "\n";
  }
  io::write_text(out / "diagnostics.csv", diag);

  const double t_end = traj.snapshots.back().t;
  const auto window = cfg.fit_window.value_or(std::make_pair(0.5 * t_end, t_end));

  json summary;
  summary["n"] = cfg.n;
  summary["q_a"] = cfg.exps.q_a();
  summary["q_r"] = cfg.exps.q_r();
  summary["mass"] = m;
  summary["lambda"] = pot.lambda();
  summary["t_end"] = t_end;
  summary["snapshots"] = traj.snapshots.size();
  summary["fit_window"] = {window.first, window.second};
  summary["com_reference"] = com_ref;
  summary["rate_com"] = fit_json(fit_log_rate(times, com_gap, window.first, window.second));
  summary["steady_target"] = target_kind;
  if (target) {
    summary["rate_w2"] = fit_json(fit_log_rate(times, w2, window.first, window.second));
    summary["final_w2"] = w2.back();
    bool monotone = true;
    for (std::size_t k = 1; k < w2.size(); ++k) monotone = monotone && w2[k] <= w2[k - 1] + 1e-10;
    summary["w2_monotone"] = monotone;
  } else {
    summary["rate_w2"] = nullptr;
    summary["final_w2"] = nullptr;
  }
  summary["slope_alpha"] = number_or_null(traj.alpha);
  summary["slope_certificate_min"] = number_or_null(traj.slope_certificate);
  summary["slope_ratio"] = number_or_null(traj.slope_ratio());

  if (cfg.reports.energy) {
    ReportOptions opts;
    opts.fourier = cfg.reports.fourier;
    opts.r = cfg.moment_order();
    const std::vector<EnergyReport> reports = report_trajectory(traj, pot, cfg.exps, opts);
    io::write_energy(out / "energy.csv", reports);
    double min_d = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      min_d = std::min(min_d, reports[k].D);
      if (k > 0 && reports[k].E > reports[k - 1].E + 1e-10) monotone = false;
    }
    summary["min_dissipation"] = min_d;
    summary["dissipation_formal"] = cfg.exps.q_r() == 1.0;
    summary["energy_initial"] = reports.front().E;
    summary["energy_final"] = reports.back().E;
    summary["energy_monotone"] = monotone;
    if (reports.size() >= 2) {
      const double defect = energy_balance(reports);
      summary["balance_defect"] = defect;
      const double drop = std::abs(reports.front().E - reports.back().E);
      summary["balance_relative"] = drop > 0.0 ? json(defect / drop) : json(nullptr);
    }
    if (cfg.reports.moments) {
      const bool balanced_ok = cfg.exps.regime() == Regime::balanced && cfg.exps.q_a() > 1.0 &&
                               cfg.exps.q_a() < 2.0 && std::abs(m - 1.0) <= 1e-12 && opts.r < 0.5 * cfg.exps.q_a();
      if (cfg.exps.regime() == Regime::attraction_dominated || balanced_ok) {
        const MomentCertificate c = moment_certificate(reports, cfg.exps, pot, opts.r);
        summary["moment_certificate"] = {{"pass", c.pass},         {"bound", c.bound},
                                         {"max_moment", c.max_moment}, {"order", c.order},
                                         {"energy_monotone", c.energy_monotone}};
      }
    }
  }
  io::write_json(out / "summary.json", summary);
  log << "simulate: " << traj.snapshots.size() << " snapshots to t = " << io::format_double(t_end) << " in "
      << out.string() << "\n";
  return status;
}

int cmd_steady(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  if (cfg.exps.q_r() != 1.0) throw PreconditionError("steady construction needs q_r = 1");
  const AttractionPotential pot(cfg.profile, cfg.exps.q_a(), cfg.quadrature());
  const SteadyState s = steady_qr1(pot, cfg.n);
  io::write_steady(out, s);
  if (s.Xstar) {
    json side = io::steady_sidecar(s);
    side["residual"] = steady_residual(*s.Xstar, pot, cfg.exps);
    side["n"] = cfg.n;
    io::write_json(out / "steady.json", side);
  }
  log << "steady: kind " << to_string(s.kind) << "\n";
  return ok;
}

int cmd_oracle_check(const RunConfig& cfg, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 rng(seed);
  const SampledProfile omega(cfg.profile, cfg.quadrature());
  const double lo = cfg.profile.support_lo();
  const double width = cfg.profile.support_hi() - lo;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  json cases = json::array();
  double worst_rhs = 0.0;
  double worst_energy = 0.0;
  for (const auto& [qa, qr] : cfg.oracle.exponents) {
    const Exponents exps(qa, qr);
    if (qr == 1.0) {
      log << "oracle-check: skipping q_r = 1 pair (" << qa << ", " << qr << ")\n";
      continue;
    }
    const AttractionPotential pot(omega, qa);
    double max_rhs = 0.0;
    double max_energy = 0.0;
    for (std::size_t k = 0; k < cfg.oracle.states; ++k) {
      std::vector<double> x(cfg.n);
      double acc = lo - 0.5 * width + width * unit(rng);
      for (double& v : x) {
        acc += 2.0 * width * unit(rng) / static_cast<double>(cfg.n);
        v = acc;
      }
      const InverseCDF X(std::move(x));
      const ParticleSystem sys(X);
      const std::vector<double> a = rhs(X, pot, exps);
      const std::vector<double> b = particle_rhs(sys, omega, exps);
      for (std::size_t i = 0; i < a.size(); ++i) max_rhs = std::max(max_rhs, std::abs(a[i] - b[i]));
      max_energy = std::max(max_energy, std::abs(energy(X, pot, exps) - discrete_energy(sys, omega, exps)));
    }
    worst_rhs = std::max(worst_rhs, max_rhs);
    worst_energy = std::max(worst_energy, max_energy);
    cases.push_back({{"q_a", qa}, {"q_r", qr}, {"max_rhs_diff", max_rhs}, {"max_energy_diff", max_energy}});
  }
  const bool pass = worst_rhs <= cfg.oracle.tolerance && worst_energy <= cfg.oracle.tolerance;
  io::write_json(out / "oracle.json", json{{"pass", pass},
                                           {"seed", seed},
                                           {"states", cfg.oracle.states},
                                           {"n", cfg.n},
                                           {"tolerance", cfg.oracle.tolerance},
                                           {"max_rhs_diff", worst_rhs},
                                           {"max_energy_diff", worst_energy},
                                           {"cases", cases}});
  log << "oracle-check: " << (pass ? "pass" : "FAIL") << " max rhs diff " << io::format_double(worst_rhs)
      << ", max energy diff " << io::format_double(worst_energy) << "\n";
  return pass ? ok : oracle_failure;
}

int cmd_energy_audit(const fs::path& dir, const fs::path& out, std::ostream& log) {
  const std::vector<EnergyReport> reports = io::read_energy(dir / "energy.csv");
  const double defect = energy_balance(reports);
  const double drop = reports.front().E - reports.back().E;
  bool monotone = true;
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    min_d = std::min(min_d, reports[k].D);
    if (k > 0 && reports[k].E > reports[k - 1].E + 1e-10) monotone = false;
  }
  io::write_json(out / "balance.json",
                 json{{"defect", defect},
                      {"energy_drop", drop},
                      {"relative_defect", drop != 0.0 ? json(defect / std::abs(drop)) : json(nullptr)},
                      {"snapshots", reports.size()},
                      {"energy_monotone", monotone},
                      {"min_dissipation", min_d}});
  log << "energy-audit: defect " << io::format_double(defect) << " over energy drop " << io::format_double(drop)
      << "\n";
  return ok;
}

int run(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  CLI::App app{"Pseudo-inverse Wasserstein gradient flow driver"};
  app.require_subcommand(1);
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads for pairwise sums")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "integrate the flow and write trajectory, energy and summary files");
  auto* steady = app.add_subcommand("steady", "construct the q_r = 1 steady state");
  auto* oracle = app.add_subcommand("oracle-check", "compare the solver against the particle oracle");
  auto* audit = app.add_subcommand("energy-audit", "check the energy-dissipation balance of a finished run");
  for (auto* sub : {sim, steady, oracle}) {
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads for pairwise sums")->check(CLI::PositiveNumber);
  }
  oracle->add_option("--seed", seed, "seed for the random test states");
  std::string run_dir;
  audit->add_option("dir", run_dir, "directory containing energy.csv")->required();
  audit->add_option("--out", out, "output directory (defaults to the run directory)");

  std::vector<const char*> argv{"wgf"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return config_error;
  }

  set_num_threads(threads);
  try {
    if (*audit) {
      const fs::path dest = audit->count("--out") ? fs::path(out) : fs::path(run_dir);
      return cmd_energy_audit(run_dir, dest, log);
    }
    const RunConfig cfg = load_config(config);
    if (*sim) return cmd_simulate(cfg, out, log);
    if (*steady) return cmd_steady(cfg, out, log);
    return cmd_oracle_check(cfg, out, seed, log);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return io_error;
  } catch (const MonotonicityError& e) {
    err << "error: " << e.what() << "\n";
    return monotonicity_abort;
  } catch (const StateError& e) {
    err << "error: " << e.what() << "\n";
    return monotonicity_abort;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return io_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }
}

}  // namespace wgf::cli
