#include "shearhopf/report_io.hpp"

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "shearhopf/errors.hpp"

namespace shearhopf {

namespace {

nlohmann::json cplx(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cd cplx_from(const nlohmann::json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::string library_version() {
  std::ostringstream os;
  os << "shearhopf 1.0.0; Eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
     << EIGEN_MINOR_VERSION << "; nlohmann_json " << NLOHMANN_JSON_VERSION_MAJOR << '.'
     << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
  return os.str();
}

nlohmann::json report_to_json(const HopfReport& r) {
  const auto& cc = r.cross_checks;
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["verdict"] = r.verdict();
  j["b"] = cplx(r.b);
  j["c"] = cplx(r.c);
  j["mu2"] = r.mu2;
  j["omega2"] = r.omega2;
  j["sigma_coeff"] = r.sigma_coeff;
  j["d_pair"] = cplx(r.d_pair);
  j["marginal"] = {{"alpha", r.alpha}, {"nu0", r.nu0}, {"omega0", r.omega0}, {"dre_dnu", r.dre_dnu}};
  j["cross_checks"] = {{"b_theorem", cplx(cc.b_theorem)},
                       {"b_direct", cplx(cc.b_direct)},
                       {"c_theorem", cplx(cc.c_theorem)},
                       {"c_direct", cplx(cc.c_direct)},
                       {"b_rel_diff", cc.b_rel_diff},
                       {"c_rel_diff", cc.c_rel_diff},
                       {"dlambda_dnu_fd", cplx(cc.dlambda_dnu_fd)},
                       {"adjoint_rel_diff", cc.adjoint_rel_diff},
                       {"v20_limit", cc.v20_limit},
                       {"v20_limit_formula", cc.v20_limit_formula}};
  j["provenance"] = {{"profile", r.profile_name},
                     {"grid", {{"n_points", r.n_points}, {"y_max", r.y_max}, {"stretch", r.stretch}}},
                     {"eta", r.eta},
                     {"tol", r.tol}};
  return j;
}

HopfReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
      throw InvalidParameter("report: unsupported schema_version");
    HopfReport r;
    r.b = cplx_from(j.at("b"));
    r.c = cplx_from(j.at("c"));
    r.mu2 = j.at("mu2");
    r.omega2 = j.at("omega2");
    r.sigma_coeff = j.at("sigma_coeff");
    r.d_pair = cplx_from(j.at("d_pair"));
    const std::string v = j.at("verdict");
    if (v != "supercritical" && v != "subcritical") throw InvalidParameter("report: bad verdict " + v);
    r.supercritical = v == "supercritical";
    const auto& m = j.at("marginal");
    r.alpha = m.at("alpha");
    r.nu0 = m.at("nu0");
    r.omega0 = m.at("omega0");
    r.dre_dnu = m.at("dre_dnu");
    const auto& c = j.at("cross_checks");
    auto& cc = r.cross_checks;
    cc.b_theorem = cplx_from(c.at("b_theorem"));
    cc.b_direct = cplx_from(c.at("b_direct"));
    cc.c_theorem = cplx_from(c.at("c_theorem"));
    cc.c_direct = cplx_from(c.at("c_direct"));
    cc.b_rel_diff = c.at("b_rel_diff");
    cc.c_rel_diff = c.at("c_rel_diff");
    cc.dlambda_dnu_fd = cplx_from(c.at("dlambda_dnu_fd"));
    cc.adjoint_rel_diff = c.at("adjoint_rel_diff");
    cc.v20_limit = c.at("v20_limit");
    cc.v20_limit_formula = c.at("v20_limit_formula");
    const auto& p = j.at("provenance");
    r.profile_name = p.at("profile");
    r.n_points = p.at("grid").at("n_points");
    r.y_max = p.at("grid").at("y_max");
    r.stretch = p.at("grid").at("stretch");
    r.eta = p.at("eta");
    r.tol = p.at("tol");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("report: ") + e.what());
  }
}

std::string report_summary(const HopfReport& r, const Provenance& prov) {
  const cd bmc = r.b - r.c;
  std::ostringstream os;
  os << "Hopf bifurcation summary (" << r.verdict() << ")\n\n";
  os << "profile " << r.profile_name << ", alpha = " << num(r.alpha) << "\n";
  os << "nu0 = " << num(r.nu0) << "  (Re = 1/nu0 = " << num(1.0 / r.nu0) << ")\n";
  os << "omega0 = " << num(r.omega0) << "\n";
  os << "d Re lambda / d nu = " << num(r.dre_dnu) << "\n\n";
  os << "b = " << num(r.b.real()) << " + " << num(r.b.imag()) << " i\n";
  os << "c = " << num(r.c.real()) << " + " << num(r.c.imag()) << " i\n";
  os << "<(D^2 - alpha^2) zeta, zeta*> = " << num(r.d_pair.real()) << " + " << num(r.d_pair.imag()) << " i\n\n";
  os << "mu(eps) = mu2*eps^2 = " << num(r.mu2) << " * eps^2\n";
  os << "omega(eps) = omega0 + omega2*eps^2 = " << num(r.omega0) << " + " << num(r.omega2) << " * eps^2\n";
  os << "sigma_eps = 2*Re(b-c)*eps^2 = " << num(2.0 * bmc.real()) << " * eps^2\n\n";
  const auto& cc = r.cross_checks;
  os << "cross checks: |b1-b2|/|b| = " << num(cc.b_rel_diff) << ", |c1-c2|/|c| = " << num(cc.c_rel_diff)
     << ", adjoint vs d lambda/d nu = " << num(cc.adjoint_rel_diff) << "\n\n";
  os << "provenance:\n";
  os << "  config_hash " << (prov.config_hash.empty() ? "-" : prov.config_hash) << "\n";
  if (!prov.command.empty()) os << "  command " << prov.command << "\n";
  os << "  grid " << r.n_points << " points, y_max " << num(r.y_max) << ", stretch " << num(r.stretch)
     << ", eta " << num(r.eta) << ", tol " << num(r.tol) << "\n";
  os << "  versions " << library_version() << "\n";
  return os.str();
}

std::vector<std::string> emit_report(const HopfReport& r, const std::string& dir, const Provenance& prov) {
  std::filesystem::create_directories(dir);
  const std::string jp = (std::filesystem::path(dir) / "hopf_report.json").string();
  const std::string sp = (std::filesystem::path(dir) / "summary.txt").string();
  std::ofstream js(jp);
  if (!js) throw std::runtime_error("cannot write " + jp);
  js << report_to_json(r).dump(2) << '\n';
  std::ofstream ss(sp);
  if (!ss) throw std::runtime_error("cannot write " + sp);
  ss << report_summary(r, prov);
  return {jp, sp};
}

}  // namespace shearhopf
