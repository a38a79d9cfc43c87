#include "shearhopf/run_config.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "shearhopf/errors.hpp"

namespace shearhopf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidParameter("config: " + k + " expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidParameter("config: " + k + " expects an integer, got '" + v + "'");
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

struct Field {
  std::string help;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field dbl(double RunConfig::*m, std::string help) {
  return {std::move(help), [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Field num(int RunConfig::*m, std::string help) {
  return {std::move(help),
          [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = static_cast<int>(to_long(k, v)); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field str(std::string RunConfig::*m, std::string help) {
  return {std::move(help), [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) { return c.*m; }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"profile.name", str(&RunConfig::profile, "base profile: exponential or tanh")},
      {"profile.scale", dbl(&RunConfig::profile_scale, "length scale of the tanh profile")},
      {"grid.points", {"wall-normal collocation points",
                       [](RunConfig& c, const std::string& k, const std::string& v) {
                         c.grid.n_points = static_cast<int>(to_long(k, v));
                       },
                       [](const RunConfig& c) { return std::to_string(c.grid.n_points); }}},
      {"grid.y_half", {"median node position", [](RunConfig& c, const std::string& k,
                                                   const std::string& v) { c.grid.y_half = to_double(k, v); },
                       [](const RunConfig& c) { return fmt(c.grid.y_half); }}},
      {"grid.y_max", {"truncation height; 0 selects 25/eta",
                      [](RunConfig& c, const std::string& k, const std::string& v) { c.grid.y_max = to_double(k, v); },
                      [](const RunConfig& c) { return fmt(c.grid.y_max); }}},
      {"solver.eta", dbl(&RunConfig::eta, "decay weight; 0 selects 0.45 alpha")},
      {"solver.tol", dbl(&RunConfig::tol, "ODE marcher tolerance")},
      {"solver.consistency_tol", dbl(&RunConfig::consistency_tol, "allowed gap between the two forms of b and c")},
      {"solver.adjoint_tol", dbl(&RunConfig::adjoint_tol, "allowed gap between <Lap zeta, zeta*> and d lambda/d nu")},
      {"marginal.alpha", dbl(&RunConfig::alpha, "wavenumber")},
      {"marginal.nu_lo", dbl(&RunConfig::nu_lo, "lower end of the viscosity bracket")},
      {"marginal.nu_hi", dbl(&RunConfig::nu_hi, "upper end of the viscosity bracket")},
      {"marginal.seed_re", dbl(&RunConfig::seed_re, "real part of the eigenvalue seed")},
      {"marginal.seed_im", dbl(&RunConfig::seed_im, "imaginary part of the eigenvalue seed")},
      {"spectrum.nu", dbl(&RunConfig::nu, "viscosity for spectrum and regions; 0 selects nu_hi")},
      {"spectrum.seeds_re", num(&RunConfig::seeds_re, "seed lattice columns")},
      {"spectrum.seeds_im", num(&RunConfig::seeds_im, "seed lattice rows")},
      {"neutral.alpha_lo", dbl(&RunConfig::alpha_lo, "lower end of the traced alpha range")},
      {"neutral.alpha_hi", dbl(&RunConfig::alpha_hi, "upper end of the traced alpha range")},
      {"neutral.points", num(&RunConfig::branch_points, "traced points")},
      {"simulate.seed", str(&RunConfig::sim_seed, "initial condition: wave, eigenmode or noise")},
      {"simulate.epsilon", dbl(&RunConfig::epsilon, "wave amplitude")},
      {"simulate.nu", dbl(&RunConfig::sim_nu, "viscosity; 0 selects nu0 + mu2 eps^2 (wave) or nu0")},
      {"simulate.amplitude", dbl(&RunConfig::amplitude, "eigenmode or noise amplitude")},
      {"simulate.n_modes", num(&RunConfig::n_modes, "Fourier modes")},
      {"simulate.points", num(&RunConfig::sim_points, "wall-normal points of the simulation grid")},
      {"simulate.y_half", dbl(&RunConfig::sim_y_half, "median node of the simulation grid")},
      {"simulate.dt", dbl(&RunConfig::dt, "time step")},
      {"simulate.t_end", dbl(&RunConfig::t_end, "duration")},
      {"simulate.sample_every", dbl(&RunConfig::sample_every, "trace sampling interval")},
      {"simulate.noise_seed", {"random seed for noise initial data",
                               [](RunConfig& c, const std::string& k, const std::string& v) {
                                 const long x = to_long(k, v);
                                 if (x < 0) throw InvalidParameter("config: " + k + " must be non-negative");
                                 c.noise_seed = static_cast<unsigned long>(x);
                               },
                               [](const RunConfig& c) { return std::to_string(c.noise_seed); }}},
      {"regions.re_min", dbl(&RunConfig::re_min, "left edge of the plotted window")},
      {"regions.im_max", dbl(&RunConfig::im_max, "half height of the plotted window")},
      {"regions.samples", num(&RunConfig::region_samples, "samples per boundary arc")},
      {"output.dir", str(&RunConfig::out_dir, "output directory")},
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : fields())
    if (k == key) return &f;
  return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> s = [] {
    std::vector<ConfigKey> v;
    for (const auto& [k, f] : fields()) v.push_back({k, f.help});
    return v;
  }();
  return s;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw InvalidParameter("config: unknown key '" + key + "'");
  f->set(*this, key, trim(value));
}

ShearProfile RunConfig::make_profile() const { return shearhopf::make_profile(profile, profile_scale); }

GridPtr RunConfig::make_grid() const { return build_grid(grid, eta_value()); }

GridPtr RunConfig::make_sim_grid() const {
  GridSpec s = grid;
  s.n_points = sim_points;
  s.y_half = sim_y_half;
  return build_grid(s, eta_value());
}

void RunConfig::validate() const {
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw InvalidParameter(std::string("config: ") + msg);
  };
  make_profile();
  need(grid.n_points >= 16, "grid.points must be at least 16");
  need(grid.y_half > 0.0, "grid.y_half must be positive");
  need(grid.y_max >= 0.0, "grid.y_max must be non-negative");
  need(eta >= 0.0, "solver.eta must be non-negative");
  need(tol > 0.0, "solver.tol must be positive");
  need(alpha > 0.0, "marginal.alpha must be positive");
  need(nu_lo > 0.0 && nu_hi > nu_lo, "marginal.nu_lo < marginal.nu_hi required, both positive");
  need(nu >= 0.0, "spectrum.nu must be non-negative");
  need(seeds_re > 0 && seeds_im > 0, "spectrum seed counts must be positive");
  need(alpha_lo > 0.0 && alpha_hi > alpha_lo, "neutral.alpha_lo < neutral.alpha_hi required");
  need(branch_points >= 2, "neutral.points must be at least 2");
  need(sim_seed == "wave" || sim_seed == "eigenmode" || sim_seed == "noise",
       "simulate.seed must be wave, eigenmode or noise");
  need(n_modes >= 4, "simulate.n_modes must be at least 4");
  need(sim_points >= 16, "simulate.points must be at least 16");
  need(dt > 0.0 && t_end >= 0.0 && sample_every > 0.0, "simulate.dt, t_end, sample_every out of range");
  need(region_samples >= 2, "regions.samples must be at least 2");
  need(!out_dir.empty(), "output.dir must not be empty");
}

std::string RunConfig::dump() const {
  std::ostringstream os;
  std::string section;
  for (const auto& [k, f] : fields()) {
    const auto dot = k.find('.');
    const std::string sec = k.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << k.substr(dot + 1) << " = " << f.get(*this) << '\n';
  }
  return os.str();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidParameter(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw InvalidParameter(where + "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidParameter(where + "expected key = value");
    if (section.empty()) throw InvalidParameter(where + "key outside a section");
    const std::string key = trim(line.substr(0, eq));
    try {
      c.set(section + "." + key, line.substr(eq + 1));
    } catch (const InvalidParameter& e) {
      throw InvalidParameter(where + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidParameter("config: cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str());
}

}  // namespace shearhopf
