#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "exosc/charts.hpp"
#include "exosc/cli.hpp"
#include "exosc/cycles.hpp"
#include "exosc/error.hpp"
#include "exosc/io.hpp"
#include "exosc/singular.hpp"
#include "exosc/slowmf.hpp"

using namespace exosc;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPartial = 4;

struct ParamFlags {
  std::string system;
  std::string alpha = "0.5", mu = "0.4", kappa = "0.2", gamma = "0.3";
  std::string a = "1", b = "0.25";
};

void add_param_flags(CLI::App* c, ParamFlags& f) {
  c->add_option("--system", f.system, "hester or corbeiller")->required();
  c->add_option("--alpha", f.alpha, "Hester alpha")->capture_default_str();
  c->add_option("--mu", f.mu, "Hester mu")->capture_default_str();
  c->add_option("--kappa", f.kappa, "Hester kappa")->capture_default_str();
  c->add_option("--gamma", f.gamma, "Hester gamma")->capture_default_str();
  c->add_option("--a", f.a, "Le Corbeiller a")->capture_default_str();
  c->add_option("--b", f.b, "Le Corbeiller b")->capture_default_str();
}

SystemParams make_params(System s, double alpha, double mu, double kappa, double gamma, double a, double b) {
  return s == System::Hester ? SystemParams::hester(HesterParams(alpha, mu, kappa, gamma))
                             : SystemParams::corbeiller(CorbeillerParams(a, b));
}

SystemParams params_from(const ParamFlags& f) {
  return make_params(parse_system(f.system), parse_number(f.alpha), parse_number(f.mu), parse_number(f.kappa),
                     parse_number(f.gamma), parse_number(f.a), parse_number(f.b));
}

// "-" or empty writes to standard output.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::DomainError, "cannot write '" + path + "'");
  os << text;
}

ManifoldOrder parse_order(const std::string& s) {
  if (s == "leading") return ManifoldOrder::Leading;
  if (s == "full") return ManifoldOrder::Full;
  throw Error(Errc::DomainError, "order must be leading or full");
}

void check_format(const std::string& f) {
  if (f != "csv" && f != "json") throw Error(Errc::DomainError, "format must be csv or json");
}

std::string polyline_csv(const std::vector<std::pair<std::string, Polyline>>& parts) {
  std::ostringstream os;
  os << std::setprecision(17) << "segment,index,x,y\n";
  for (const auto& [label, pl] : parts)
    for (std::size_t i = 0; i < pl.size(); ++i) os << label << ',' << i << ',' << pl[i].x << ',' << pl[i].y << '\n';
  return os.str();
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Relaxation oscillators with exponential nonlinearities: simulation, cycles and blow-up charts"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value file; command-line flags override it");

  ParamFlags pf;
  std::string out = "-";
  auto common = [&](CLI::App* c) {
    add_param_flags(c, pf);
    c->add_option("--out", out, "output path, - for standard output")->capture_default_str();
  };

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate the normalized field and write a trajectory CSV");
  common(sim);
  double eps = 0.0, x0 = 1.0, y0 = -1.0, t_end = 60.0, rtol = 1e-9, atol = 1e-12;
  std::string summary;
  sim->add_option("--eps", eps)->required();
  sim->add_option("--x0", x0)->capture_default_str();
  sim->add_option("--y0", y0)->capture_default_str();
  std::string time_base = "original";
  sim->add_option("--t-end", t_end, "end time in the chosen time base")->capture_default_str();
  sim->add_option("--time-base", time_base, "original (t) or rescaled (t1)")->capture_default_str();
  sim->add_option("--rtol", rtol)->capture_default_str();
  sim->add_option("--atol", atol)->capture_default_str();
  sim->add_option("--summary", summary, "summary JSON path (default: <out>.json when --out is a file)");

  // cycle
  auto* cyc = app.add_subcommand("cycle", "locate the attracting limit cycle");
  common(cyc);
  double delta = 0.1;
  std::optional<double> seed_x;
  std::string fmt_cycle = "json", fmt_singular = "json", fmt_converge = "csv";
  cyc->add_option("--eps", eps)->required();
  cyc->add_option("--delta", delta, "section y = -delta")->capture_default_str();
  cyc->add_option("--seed-x", seed_x, "secant start on the section (default: transient from the jump point)");
  cyc->add_option("--format", fmt_cycle, "json or csv")->capture_default_str();

  // singular
  auto* sng = app.add_subcommand("singular", "singular cycle of the piecewise-smooth limit");
  common(sng);
  bool blown_up = false;
  sng->add_option("--format", fmt_singular, "json or csv")->capture_default_str();
  sng->add_flag("--blown-up", blown_up, "Le Corbeiller only: chart polylines of the blown-up cycle as CSV");

  // manifold
  auto* man = app.add_subcommand("manifold", "slow manifold graph samples");
  common(man);
  std::optional<double> x_min, x_max;
  int n_samples = 201;
  std::string order = "leading";
  man->add_option("--eps", eps)->required();
  man->add_option("--x-min", x_min);
  man->add_option("--x-max", x_max);
  man->add_option("--n", n_samples)->capture_default_str();
  man->add_option("--order", order, "leading or full (Le Corbeiller)")->capture_default_str();

  // charts-verify
  auto* chv = app.add_subcommand("charts-verify", "run the blow-up chart invariant suite");
  common(chv);
  std::uint64_t seed = 42;
  int n_points = 100, n_inv = 50;
  std::string catalog_path, segments_path;
  chv->add_option("--seed", seed)->capture_default_str();
  chv->add_option("--n-points", n_points)->capture_default_str();
  chv->add_option("--n-invariant-points", n_inv)->capture_default_str();
  chv->add_option("--catalog", catalog_path, "also write the equilibria catalog JSON here");
  chv->add_option("--segments", segments_path, "also write the blown-up cycle polylines CSV here");

  // converge
  auto* cnv = app.add_subcommand("converge", "cycles over an eps ladder against the singular cycle");
  common(cnv);
  std::string eps_list = "0.1,0.05,0.02,0.01";
  double resample = 1e-3;
  cnv->add_option("--eps-list", eps_list)->capture_default_str();
  cnv->add_option("--delta", delta)->capture_default_str();
  cnv->add_option("--resample-step", resample)->capture_default_str();
  cnv->add_option("--format", fmt_converge, "csv or json")->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "existence classification over a parameter grid (lo:hi:n per flag)");
  common(swp);
  std::string eps_grid, journal;
  int n_seeds = 8;
  double ball = 5.0, t_equilibrium = 2000.0;
  bool with_hausdorff = false;
  swp->add_option("--eps", eps_grid, "value or lo:hi:n")->required();
  swp->add_option("--journal", journal, "resume journal (JSON lines keyed by grid index)");
  swp->add_option("--n-seeds", n_seeds)->capture_default_str();
  swp->add_option("--ball-radius", ball)->capture_default_str();
  swp->add_option("--t-equilibrium", t_equilibrium, "rescaled-time budget for the equilibrium test")
      ->capture_default_str();
  swp->add_option("--seed", seed)->capture_default_str();
  swp->add_option("--delta", delta)->capture_default_str();
  swp->add_flag("--hausdorff", with_hausdorff, "also measure the distance to the singular cycle");

  // --config is expanded into flags before parsing so that flags win.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    std::ifstream in(args[i + 1]);
    if (!in) throw Error(Errc::DomainError, "cannot read config '" + args[i + 1] + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto rest = std::vector<std::string>(args.begin(), args.begin() + static_cast<long>(i));
    rest.insert(rest.end(), args.begin() + static_cast<long>(i) + 2, args.end());
    args = merge_config(rest, parse_config_text(ss.str()));
    break;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (sim->parsed()) {
    const SystemParams p = params_from(pf);
    IntegratorConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = atol;
    cfg.h_max = default_h_max(eps);
    if (time_base != "original" && time_base != "rescaled")
      throw Error(Errc::DomainError, "time-base must be original or rescaled");
    if (!(eps > 0.0)) throw Error(Errc::DomainError, "eps must be positive");
    Trajectory tr;
    if (time_base == "original") {
      tr = simulate_original_time(p, eps, {x0, y0}, t_end, cfg);
    } else {
      const std::vector<EventSpec> ev = {{"y=0", [](State2 s) { return s.y; }, Direction::Any, false}};
      tr = integrate([&](State2 s) { return field_normalized(p, eps, s); }, {x0, y0}, 0.0, t_end, cfg, ev);
    }
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    emit(out, os.str());
    std::string sp = summary;
    if (sp.empty() && out != "-" && !out.empty()) sp = out + ".json";
    if (!sp.empty()) {
      Json j = trajectory_summary(p, eps, tr);
      j["time_base"] = time_base;
      emit(sp, dump(j));
    }
    return 0;
  }

  if (cyc->parsed()) {
    check_format(fmt_cycle);
    const SystemParams p = params_from(pf);
    const LimitCycle c = find_cycle(p, eps, SectionSpec{delta, Crossing::Descending}, seed_x);
    emit(out, fmt_cycle == "json" ? dump(to_json(c)) : polyline_csv({{"cycle", c.points}}));
    return 0;
  }

  if (sng->parsed()) {
    check_format(fmt_singular);
    const SystemParams p = params_from(pf);
    if (blown_up) {
      if (p.system != System::Corbeiller) throw Error(Errc::DomainError, "--blown-up needs --system corbeiller");
      std::ostringstream os;
      write_segments_csv(os, blown_up_singular_segments(p.as_corbeiller()));
      emit(out, os.str());
      return 0;
    }
    const SingularCycle sc = singular_cycle(p);
    if (fmt_singular == "json") {
      emit(out, dump(to_json(sc)));
    } else {
      std::vector<std::pair<std::string, Polyline>> parts;
      for (const auto& s : sc.segments) parts.emplace_back(s.label, s.points);
      emit(out, polyline_csv(parts));
    }
    return 0;
  }

  if (man->parsed()) {
    const SystemParams p = params_from(pf);
    if (!(eps > 0.0)) throw Error(Errc::DomainError, "eps must be positive");
    if (n_samples < 2) throw Error(Errc::DomainError, "--n must be at least 2");
    const ManifoldOrder ord = parse_order(order);
    const bool hester = p.system == System::Hester;
    const double lo = x_min.value_or(hester ? 0.2 : -1.0), hi = x_max.value_or(hester ? 1.0 : -0.05);
    if (!(lo < hi)) throw Error(Errc::DomainError, "--x-min must be below --x-max");
    std::vector<ManifoldSample> samples;
    for (int i = 0; i < n_samples; ++i) {
      const double x = lo + (hi - lo) * i / (n_samples - 1);
      const double y = hester ? eps * slow_manifold_hester(p.as_hester(), x)
                              : slow_manifold_corbeiller(p.as_corbeiller(), eps, x, ord);
      samples.push_back({x, y, hester ? ManifoldOrder::Leading : ord});
    }
    std::ostringstream os;
    write_manifold_csv(os, samples);
    emit(out, os.str());
    return 0;
  }

  if (chv->parsed()) {
    const SystemParams p = params_from(pf);
    if (p.system != System::Corbeiller)
      throw Error(Errc::DomainError, "the chart hierarchy is implemented for --system corbeiller");
    if (n_points < 1 || n_inv < 1) throw Error(Errc::DomainError, "point counts must be positive");
    const CorbeillerParams cp = p.as_corbeiller();
    SuiteOptions opt;
    opt.seed = seed;
    opt.n_points = n_points;
    opt.n_invariant_points = n_inv;
    const auto res = run_chart_suite(cp, opt);
    Json report = to_json(p);
    report["seed"] = seed;
    Json checks = Json::array();
    std::size_t failed = 0;
    for (const auto& r : res) {
      checks.push_back(to_json(r));
      if (!r.passed) {
        ++failed;
        std::ostringstream msg;
        msg << std::setprecision(6) << "FAILED " << r.category << " '" << r.name << "' chart=" << r.chart
            << " mismatch=" << r.mismatch << " tol=" << r.tolerance << " point=(";
        for (std::size_t i = 0; i < r.point.size(); ++i) msg << (i ? ", " : "") << std::setprecision(17) << r.point[i];
        msg << ")";
        std::cerr << msg.str() << '\n';
      }
    }
    report["n_checks"] = res.size();
    report["n_failed"] = failed;
    report["checks"] = checks;
    emit(out, dump(report));
    if (!catalog_path.empty()) emit(catalog_path, dump(catalog_to_json(equilibria_catalog(cp))));
    if (!segments_path.empty()) {
      std::ostringstream os;
      write_segments_csv(os, blown_up_singular_segments(cp));
      emit(segments_path, os.str());
    }
    if (failed) {
      std::cerr << failed << " of " << res.size() << " chart checks failed\n";
      return kExitNumerical;
    }
    return 0;
  }

  if (cnv->parsed()) {
    check_format(fmt_converge);
    const SystemParams p = params_from(pf);
    const auto list = parse_list(eps_list);
    for (std::size_t i = 1; i < list.size(); ++i)
      if (!(list[i] < list[i - 1])) throw Error(Errc::DomainError, "--eps-list must be strictly decreasing");
    const ConvergenceReport r =
        convergence_study(p, list, SectionSpec{delta, Crossing::Descending}, resample, env_threads());
    std::ostringstream os;
    if (fmt_converge == "json")
      os << dump(to_json(r));
    else
      write_convergence_csv(os, r);
    emit(out, os.str());
    for (const auto& row : r.rows)
      if (!row.ok) {
        std::cerr << "eps=" << row.eps << ": " << row.error << '\n';
        return kExitNumerical;
      }
    return 0;
  }

  if (swp->parsed()) {
    const System sys = parse_system(pf.system);
    std::vector<SweepAxis> axes;
    auto axis = [&](const char* name, const std::string& spec) { axes.push_back({name, parse_grid(spec)}); };
    if (sys == System::Hester) {
      axis("alpha", pf.alpha);
      axis("mu", pf.mu);
      axis("kappa", pf.kappa);
      axis("gamma", pf.gamma);
    } else {
      axis("a", pf.a);
      axis("b", pf.b);
    }
    axis("eps", eps_grid);
    if (n_seeds < 1) throw Error(Errc::DomainError, "--n-seeds must be positive");
    std::ostringstream extra;
    extra << std::setprecision(17) << system_name(sys) << ";seeds=" << n_seeds << ";ball=" << ball
          << ";seed=" << seed << ";t_eq=" << t_equilibrium << ";delta=" << delta << ";hausdorff=" << with_hausdorff;

    auto fn = [&](const SweepPoint& pt) {
      const auto& v = pt.values;
      const SystemParams p = sys == System::Hester
                                 ? make_params(sys, v.at("alpha"), v.at("mu"), v.at("kappa"), v.at("gamma"), 1, 0.5)
                                 : make_params(sys, 0, 0, 0, 0, v.at("a"), v.at("b"));
      ExistenceOptions eo;
      eo.n_seeds = n_seeds;
      eo.ball_radius = ball;
      eo.t_equilibrium = t_equilibrium;
      eo.seed = seed;
      eo.section = SectionSpec{delta, Crossing::Descending};
      const ExistenceResult er = classify_existence(p, v.at("eps"), eo);
      SweepResultRow row;
      row.classification = existence_name(er.kind);
      if (er.cycle) {
        row.fixed_point_x = er.cycle->fixed_point_x;
        row.period = er.cycle->period;
        row.floquet = er.cycle->floquet;
        if (with_hausdorff) {
          const SingularCycle sc = singular_cycle(p);
          std::vector<Polyline> segs;
          for (const auto& s : sc.segments) segs.push_back(s.points);
          row.hausdorff = hausdorff_distance({er.cycle->points}, segs, 1e-3);
        }
      }
      return row;
    };
    const SweepOutcome res = run_sweep(axes, sweep_signature(axes, extra.str()), fn, journal, env_threads());
    std::ostringstream os;
    os << "# seed=" << seed << '\n';
    write_sweep_csv(os, axes, res.rows);
    emit(out, os.str());
    if (res.failed) {
      std::cerr << res.failed << " of " << res.rows.size() << " grid points failed\n";
      return kExitPartial;
    }
    return 0;
  }
  return 0;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation(e.code()) ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
