#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance.hpp"
#include "shearhopf/errors.hpp"
#include "shearhopf/hopf.hpp"
#include "shearhopf/neutral_curve.hpp"
#include "shearhopf/ns_sim.hpp"
#include "shearhopf/orr_sommerfeld.hpp"
#include "shearhopf/report_io.hpp"
#include "shearhopf/run_config.hpp"
#include "shearhopf/spectral_regions.hpp"

namespace fs = std::filesystem;

namespace shearhopf {

namespace {

struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> profile;
  std::optional<double> alpha, nu, eta, ymax, seed_re, seed_im;
  std::optional<int> grid_points;
  std::string out;
  bool quick = false;
};

RunConfig resolve_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidParameter("--set expects section.key=value, got " + kv);
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.profile) c.profile = *o.profile;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.nu) c.nu = c.sim_nu = *o.nu;
  if (o.eta) c.eta = *o.eta;
  if (o.ymax) c.grid.y_max = *o.ymax;
  if (o.grid_points) c.grid.n_points = *o.grid_points;
  if (o.seed_re) c.seed_re = *o.seed_re;
  if (o.seed_im) c.seed_im = *o.seed_im;
  if (!o.out.empty()) c.out_dir = o.out;
  c.validate();
  return c;
}

// Fixed formatting so that identical inputs give identical files.
std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void write_text(const fs::path& p, const std::string& text) { open_out(p) << text; }

std::optional<cd> seed_of(const RunConfig& c) {
  if (c.seed_re == 0.0 && c.seed_im == 0.0) return std::nullopt;
  return cd(c.seed_re, c.seed_im);
}

MarginalPoint marginal(const RunConfig& c, const ShearProfile& prof, const GridPtr& g) {
  MarginalOptions mo;
  mo.tol = c.tol;
  const auto seed = seed_of(c);
  return find_marginal(c.alpha, {c.nu_lo, c.nu_hi}, prof, c.eta_value(), g, seed ? &*seed : nullptr, mo);
}

OSParams os_params(const RunConfig& c, const ShearProfile& prof, const GridPtr& g, double nu) {
  OSParams p;
  p.alpha = c.alpha;
  p.nu = nu;
  p.profile = prof;
  p.eta = c.eta_value();
  p.grid = g;
  p.tol = c.tol;
  return p;
}

void write_region_csv(const fs::path& p, const std::vector<std::vector<cd>>& lines) {
  std::ofstream os = open_out(p);
  os << "polyline,re,im\n";
  for (size_t i = 0; i < lines.size(); ++i)
    for (cd z : lines[i]) os << i << ',' << num(z.real()) << ',' << num(z.imag()) << '\n';
}

int cmd_spectrum(const RunConfig& c, const fs::path& out) {
  const ShearProfile prof = c.make_profile();
  const double nu = c.nu > 0.0 ? c.nu : c.nu_hi;
  const OSParams p = os_params(c, prof, c.make_grid(), nu);
  std::vector<cd> roots = multi_seed_scan(p, c.seeds_re, c.seeds_im);
  if (const auto seed = seed_of(c)) {
    const cd l = eigen_search(p, *seed).lambda;
    if (std::none_of(roots.begin(), roots.end(), [&](cd r) { return std::abs(r - l) < 1e-8 * std::abs(l); }))
      roots.push_back(l);
  }
  {
    std::ofstream os = open_out(out / "spectrum.csv");
    os << "re_lambda,im_lambda\n";
    for (cd l : roots) os << num(l.real()) << ',' << num(l.imag()) << '\n';
  }
  write_region_csv(out / "spectrum_region.csv", region_boundary(p.region(), c.re_min, c.im_max, c.region_samples));
  write_text(out / "spectrum.gp",
             "set datafile separator ','\n"
             "set key autotitle columnhead\n"
             "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n"
             "plot 'spectrum_region.csv' using 2:3 with dots title 'essential spectrum boundary', \\\n"
             "     'spectrum.csv' using 1:2 with points pt 7 title 'eigenvalues'\n"
             "pause -1\n");
  std::cout << roots.size() << " eigenvalues at alpha = " << num(c.alpha) << ", nu = " << num(nu) << "\n";
  for (cd l : roots) std::cout << "  " << num(l.real()) << ' ' << num(l.imag()) << "i\n";
  return kExitOk;
}

int cmd_neutral(const RunConfig& c, const fs::path& out, bool quick) {
  const ShearProfile prof = c.make_profile();
  const GridPtr g = c.make_grid();
  const MarginalPoint start = marginal(c, prof, g);
  const int n = quick ? std::min(c.branch_points, 3) : c.branch_points;
  MarginalOptions mo;
  mo.tol = c.tol;
  const double eta = c.eta > 0.0 ? c.eta : 0.45 * std::min(c.alpha, c.alpha_lo);
  const BranchTrace tr = trace_upper_branch(prof, {c.alpha_lo, c.alpha_hi}, n, eta, g, start, mo);
  {
    std::ofstream os = open_out(out / "neutral.csv");
    os << "alpha,nu0,omega0,dre_dnu,residual\n";
    for (const MarginalPoint& m : tr.points)
      os << num(m.alpha) << ',' << num(m.nu0) << ',' << num(m.omega0) << ',' << num(m.dre_dnu) << ','
         << num(m.eigen.residual) << '\n';
  }
  write_text(out / "neutral.gp",
             "set datafile separator ','\n"
             "set xlabel '1/nu'\nset ylabel 'alpha'\n"
             "plot 'neutral.csv' every ::1 using (1/$2):1 with linespoints pt 7 title 'upper branch'\n"
             "pause -1\n");
  std::cout << tr.points.size() << " points, nu0 " << (tr.monotone ? "monotone" : "not monotone") << " in alpha\n";
  for (const std::string& d : tr.diagnostics) std::cout << "  " << d << "\n";
  return kExitOk;
}

int cmd_hopf(const RunConfig& c, const fs::path& out, const Provenance& prov) {
  const ShearProfile prof = c.make_profile();
  const MarginalPoint mp = marginal(c, prof, c.make_grid());
  const AdjointPair adj = adjoint_eigenfunction(mp.eigen, mp.params);
  CoefficientOptions o;
  o.consistency_tol = c.consistency_tol;
  o.adjoint_tol = c.adjoint_tol;
  const HopfReport r = compute_coefficients(mp, adj, o);
  emit_report(r, out.string(), prov);
  std::cout << report_summary(r, prov);
  return kExitOk;
}

int cmd_simulate(const RunConfig& c, const fs::path& out, bool quick) {
  const ShearProfile prof = c.make_profile();
  const MarginalPoint mp = marginal(c, prof, c.make_grid());
  SimConfig s;
  s.alpha = c.alpha;
  s.profile = prof;
  s.grid = c.make_sim_grid();
  s.n_modes = c.n_modes;
  s.dt = c.dt;
  s.t_end = quick ? std::min(c.t_end, 50.0 * c.dt) : c.t_end;
  s.sample_every = c.sample_every;
  s.eta = c.eta_value();
  s.projection_nu = mp.nu0;
  s.projection_seed = mp.eigen.lambda;
  s.nu = c.sim_nu > 0.0 ? c.sim_nu : mp.nu0;
  if (c.sim_seed == "wave") {
    HopfFields f;
    const HopfReport r = coefficients_on_grid(mp, s.grid, f);
    auto w = std::make_shared<BifurcatedWave>(assemble_wave(r, f, c.epsilon, FieldRoute::galerkin));
    if (c.sim_nu <= 0.0) s.nu = mp.nu0 + w->mu_of_eps;
    s.init.kind = SimInit::Kind::wave;
    s.init.wave = w;
  } else {
    s.init.kind = c.sim_seed == "noise" ? SimInit::Kind::noise : SimInit::Kind::eigenmode;
    s.init.amplitude = c.amplitude;
    s.init.seed = c.noise_seed;
  }
  const AmplitudeTrace tr = NsSimulator(s).run();
  write_trace_csv(tr, (out / "trace.csv").string());
  write_text(out / "simulate.gp",
             "set datafile separator ','\n"
             "set key autotitle columnhead\n"
             "set logscale y\nset xlabel 't'\n"
             "plot 'trace.csv' using 1:4 with lines title '|A|', \\\n"
             "     'trace.csv' using 1:5 with lines title 'zero mode', \\\n"
             "     'trace.csv' using 1:6 with lines title 'oscillatory'\n"
             "pause -1\n");
  std::cout << "nu = " << num(s.nu) << ", " << tr.times.size() << " samples to t = " << num(s.t_end)
            << ", final |A| = " << num(tr.amplitude.empty() ? 0.0 : std::abs(tr.amplitude.back())) << "\n";
  return kExitOk;
}

int cmd_regions(const RunConfig& c, const fs::path& out) {
  RegionParams rp;
  rp.nu = c.nu > 0.0 ? c.nu : c.nu_hi;
  rp.alpha = c.alpha;
  rp.eta = c.eta_value();
  rp.u_plus = c.make_profile().u_plus;
  rp.validate();
  const auto lines = region_boundary(rp, c.re_min, c.im_max, c.region_samples);
  write_region_csv(out / "regions.csv", lines);
  write_text(out / "regions.gp",
             "set datafile separator ','\n"
             "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n"
             "plot 'regions.csv' every ::1 using 2:3 with dots title 'region boundary'\n"
             "pause -1\n");
  std::cout << lines.size() << " boundary polylines\n";
  return kExitOk;
}

int cmd_verify(const fs::path& out, bool quick) {
  acceptance::Options opt;
  opt.quick = quick;
  opt.log = &std::cerr;
  std::ofstream os = open_out(out / "verify.txt");
  int failed = 0;
  for (const auto& r : acceptance::run(opt)) {
    std::cout << acceptance::format(r) << std::endl;
    os << acceptance::format(r) << '\n';
    failed += !r.pass;
  }
  return failed == 0 ? kExitOk : kExitConsistency;
}

void write_diagnostic(const fs::path& out, const std::string& command, const std::string& kind,
                      const std::string& what, const std::string& config_text) {
  std::error_code ec;
  fs::create_directories(out, ec);
  std::ofstream os(out / "diagnostic.txt");
  if (!os) return;
  os << "command: " << command << "\nerror: " << kind << "\nmessage: " << what << "\n\n[config]\n" << config_text;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Hopf bifurcation analysis of a parallel shear layer"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  const char* env_out = std::getenv("SHEARHOPF_OUT");
  o.out = env_out ? env_out : "";
  app.add_option("--config", o.config_path, "configuration file ([section] and key = value lines)");
  app.add_option("--set", o.sets, "override one configuration key, section.key=value");
  app.add_option("--profile", o.profile, "shear profile name (exponential, tanh)");
  app.add_option("--alpha", o.alpha, "streamwise wavenumber");
  app.add_option("--nu", o.nu, "viscosity for spectrum, regions and simulate");
  app.add_option("--eta", o.eta, "decay weight of admissible modes (default 0.45 alpha)");
  app.add_option("--grid-points", o.grid_points, "wall-normal grid points");
  app.add_option("--ymax", o.ymax, "truncation of the half line (default 25/eta)");
  app.add_option("--out", o.out, "output directory (default $SHEARHOPF_OUT, else output.dir)");
  app.add_option("--seed-re", o.seed_re, "real part of the eigenvalue seed");
  app.add_option("--seed-im", o.seed_im, "imaginary part of the eigenvalue seed");
  app.add_flag("--quick", o.quick, "reduced run (fewer branch points, short simulation)");
  const char* names[][2] = {{"spectrum", "eigenvalue scan with the essential-spectrum boundary"},
                            {"neutral", "trace the upper branch of the neutral curve"},
                            {"hopf", "Landau coefficients, JSON report and summary"},
                            {"simulate", "time integration of the truncated Fourier system"},
                            {"regions", "essential-spectrum boundary polylines"},
                            {"verify", "run the acceptance criteria"}};
  for (const auto& n : names) app.add_subcommand(n[0], n[1]);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = resolve_config(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const fs::path out = cfg.out_dir;
  std::ostringstream cmdline;
  for (size_t i = 0; i < args.size(); ++i) cmdline << (i ? " " : "") << args[i];

  try {
    fs::create_directories(out);
    write_text(out / "config.txt", cfg.dump());
    if (command == "spectrum") return cmd_spectrum(cfg, out);
    if (command == "neutral") return cmd_neutral(cfg, out, o.quick);
    if (command == "hopf") return cmd_hopf(cfg, out, Provenance{cfg.hash(), cmdline.str()});
    if (command == "simulate") return cmd_simulate(cfg, out, o.quick);
    if (command == "regions") return cmd_regions(cfg, out);
    return cmd_verify(out, o.quick);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    write_diagnostic(out, cmdline.str(), "numerical failure", e.what(), cfg.dump());
    std::cerr << "numerical failure: " << e.what() << "\n(diagnostic in " << (out / "diagnostic.txt").string()
              << ")\n";
    return kExitNumerical;
  } catch (const ConsistencyError& e) {
    write_diagnostic(out, cmdline.str(), "consistency failure", e.what(), cfg.dump());
    std::cerr << "consistency failure: " << e.what() << "\n";
    return kExitConsistency;
  } catch (const std::exception& e) {
    write_diagnostic(out, cmdline.str(), "failure", e.what(), cfg.dump());
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace shearhopf
