// flatvisc command line driver. Exit codes: 0 pass, 1 a check failed, 2 error.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <flatvisc/flatvisc.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace flatvisc;

namespace {

constexpr int kPass = 0, kCheckFail = 1, kError = 2;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

SampledFunction read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

// Accepts a bare Hamiltonian object or one nested under "hamiltonian".
Hamiltonian read_hamiltonian(const std::string& path) {
  const json j = read_json(path);
  return hamiltonian_from_json(j.contains("hamiltonian") ? j.at("hamiltonian") : j);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_flatness(const std::string& ham, double diam, const std::string& out, std::size_t resolution,
                 double t_lo, const std::string& curves) {
  const auto H = read_hamiltonian(ham);
  KernelOptions opt;
  opt.resolution = resolution;
  opt.t_lo = t_lo;
  const auto k = build_kernel(H, diam, opt);
  json j = k;
  j["hamiltonian"] = H;
  write_json(out, j);
  if (!curves.empty()) {
    std::ofstream c(curves, std::ios::binary);
    c << "t,phi,T,Tprime,theta,thetaprime\n";
    for (double t : log_space(std::max(k.T.lo(), 1e-8), k.diam, 200))
      c << detail::fmt17(t) << ',' << detail::fmt17(k.phi(t)) << ',' << detail::fmt17(k.T(t)) << ','
        << detail::fmt17(k.Tprime(t)) << ',' << detail::fmt17(k.theta(t * t)) << ','
        << detail::fmt17(k.thetaprime(t * t)) << '\n';
  }
  return kPass;
}

int cmd_supconv(const std::string& input, const std::string& kernel_path, double eps, const std::string& checks,
                bool inf, double tol_factor, const std::string& out, const std::string& field_out) {
  const auto u = read_field(input);
  const auto kernel = std::make_shared<const FlatKernel>(read_json(kernel_path).get<FlatKernel>());
  const auto res = inf ? inf_convolve(u, kernel, eps) : sup_convolve(u, kernel, eps);
  const double h = u.h_max(), tol = tol_factor * h;
  std::vector<CheckReport> reports;
  const auto wanted = split(checks);
  const bool all = wanted.empty() || (wanted.size() == 1 && wanted[0] == "all");
  if (all) {
    reports = standard_checks(res, u, tol);
  } else {
    for (const auto& c : wanted) {
      if (c == "dominance") reports.push_back(check_dominance(res, u));
      else if (c == "localization") reports.push_back(check_localization(res));
      else if (c == "semiconvexity") reports.push_back(check_semiconvexity(res, tol));
      else if (c == "flatness") reports.push_back(check_flatness(res, tol));
      else if (c == "magic") reports.push_back(check_magic(res, 2.0 * h));
      else if (c == "gradient_bound") reports.push_back(check_gradient_bound(res, tol));
      else if (c == "lipschitz") reports.push_back(check_lipschitz(res, u, 0.0, tol));
      else throw std::invalid_argument("unknown check '" + c + "'");
    }
  }
  bool pass = true;
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back(r);
    pass = pass && r.pass;
  }
  json j = {{"schema_version", kSchemaVersion},
            {"eps", eps},
            {"inf", inf},
            {"loc_radius", res.loc_radius},
            {"search_radius", res.search_radius},
            {"radius_floored", res.radius_floored},
            {"ties", res.tie_count()},
            {"checks", arr},
            {"pass", pass}};
  write_json(out, j);
  if (!field_out.empty()) {
    std::ofstream f(field_out, std::ios::binary);
    write_csv(f, res.u_eps);
  }
  return pass ? kPass : kCheckFail;
}

int cmd_minimize(const std::string& problem, const std::string& out, const std::string& log) {
  const json j = read_json(problem);
  const auto H = hamiltonian_from_json(j.at("hamiltonian"));
  const auto& d = j.at("domain");
  const Box box(d.at("lo").get<std::vector<double>>(), d.at("hi").get<std::vector<double>>());
  const auto bd = boundary_data(j.at("boundary").get<std::string>());
  const DirichletProblem prob(H, box, j.at("h").get<double>(), bd.b);
  MinimizeOptions opt;
  std::vector<double> delta;
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    opt.max_iter = o.value("max_iter", opt.max_iter);
    opt.grad_tol = o.value("grad_tol", opt.grad_tol);
    if (o.contains("delta")) delta = o.at("delta").get<std::vector<double>>();
  }
  MinimizeResult r;
  if (delta.empty()) r = minimize(prob, opt);
  else r = continuation_minimize(prob, delta, opt).result;
  {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    write_csv(f, r.u);
  }
  if (!log.empty()) {
    std::ofstream f(log, std::ios::binary);
    f << "iteration,energy\n";
    for (std::size_t i = 0; i < r.energies.size(); ++i) f << i << ',' << detail::fmt17(r.energies[i]) << '\n';
  }
  std::cout << "stop=" << r.stop << " iterations=" << r.iterations << " energy=" << detail::fmt17(r.energy)
            << " grad_max=" << detail::fmt17(r.grad_max) << "\n";
  return r.converged ? kPass : kCheckFail;
}

int cmd_verify(const std::string& input, const std::string& ham, double tol, double margin, const std::string& out) {
  const auto u = read_field(input);
  const auto H = read_hamiltonian(ham);
  const auto rep = verify_region(u, H, margin, tol);
  json j = rep;
  j["schema_version"] = kSchemaVersion;
  j["pass_verdict"] = rep.ok();
  write_json(out, j);
  return rep.ok() ? kPass : kCheckFail;
}

int cmd_pipeline(const std::string& config, const std::string& out) {
  auto cfg = load_config(config);
  if (!out.empty()) cfg.output_dir = out;
  const auto o = run_pipeline(cfg);
  std::cout << cfg.name << ": " << (o.pass ? "pass" : "FAIL") << "\n";
  return o.pass ? kPass : kCheckFail;
}

int cmd_report(const std::string& summary) {
  const json S = read_json(summary);
  std::cout << S.value("name", std::string{"?"}) << "  " << (S.value("pass", false) ? "pass" : "FAIL") << "\n";
  if (S.contains("kernel")) std::cout << "  kernel " << S.at("kernel").dump() << "\n";
  for (const auto& R : S.value("runs", json::array())) {
    std::cout << "  h=" << R.at("h").get<double>() << "  " << (R.value("pass", false) ? "pass" : "FAIL");
    if (R.contains("sup_error")) std::cout << "  sup_error=" << R.at("sup_error").get<double>();
    const auto& J = R.at("jets");
    std::cout << "  jets pass/fail/vacuous=" << J.at("pass") << "/" << J.at("fail") << "/" << J.at("vacuous");
    std::cout << "  residual=" << R.at("weak_residuals").at("max_over_l1").get<double>() << "\n";
    for (const auto& C : R.at("supconv")) {
      std::cout << "    eps=" << C.at("eps").get<double>();
      for (const auto& c : C.at("checks"))
        std::cout << "  " << c.at("name").get<std::string>() << (c.at("pass").get<bool>() ? "+" : "-");
      std::cout << "\n";
    }
  }
  if (S.contains("refinement")) std::cout << "  refinement " << S.at("refinement").dump() << "\n";
  return S.value("pass", false) ? kPass : kCheckFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flat sup-convolution and feeble viscosity experiments"};
  app.require_subcommand(1);

  std::string ham, out, input, kernel, checks = "all", problem, log, config, curves, field_out, summary;
  double diam = 0.0, eps = 0.0, tol = 1e-6, t_lo = 1e-10, tol_factor = 10.0, margin = 0.0;
  std::size_t resolution = 4096;
  bool inf = false;

  auto* fl = app.add_subcommand("flatness", "build a flat kernel and dump its tables");
  fl->add_option("--hamiltonian", ham, "Hamiltonian JSON")->required();
  fl->add_option("--diam", diam, "domain diameter")->required();
  fl->add_option("--out", out, "kernel JSON")->required();
  fl->add_option("--resolution", resolution, "T table knots");
  fl->add_option("--t-lo", t_lo, "smallest T knot");
  fl->add_option("--curves", curves, "CSV of the kernel curves");

  auto* sc = app.add_subcommand("supconv", "sup-convolve a field and run the checks");
  sc->add_option("--input", input, "field CSV")->required();
  sc->add_option("--kernel", kernel, "kernel JSON")->required();
  sc->add_option("--eps", eps, "epsilon")->required();
  sc->add_option("--check", checks, "all or a comma list");
  sc->add_flag("--inf", inf, "inf-convolution");
  sc->add_option("--tol-factor", tol_factor, "tolerance in units of h");
  sc->add_option("--out", out, "report JSON")->required();
  sc->add_option("--field", field_out, "write u^eps as CSV");

  auto* mn = app.add_subcommand("minimize", "solve a Dirichlet problem");
  mn->add_option("--problem", problem, "problem JSON")->required();
  mn->add_option("--out", out, "solution CSV")->required();
  mn->add_option("--log", log, "energy log CSV");

  auto* vf = app.add_subcommand("verify", "feeble viscosity verification of a field");
  vf->add_option("--input", input, "field CSV")->required();
  vf->add_option("--hamiltonian", ham, "Hamiltonian JSON")->required();
  vf->add_option("--tol", tol, "tolerance on G");
  vf->add_option("--margin", margin, "skip nodes closer than this to the boundary");
  vf->add_option("--out", out, "report JSON")->required();

  auto* pl = app.add_subcommand("pipeline", "run a bundled experiment");
  pl->add_option("--config", config, "experiment JSON")->required();
  pl->add_option("--out", out, "output directory");

  auto* rp = app.add_subcommand("report", "print a pipeline summary");
  rp->add_option("--summary", summary, "summary.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*fl) return cmd_flatness(ham, diam, out, resolution, t_lo, curves);
    if (*sc) return cmd_supconv(input, kernel, eps, checks, inf, tol_factor, out, field_out);
    if (*mn) return cmd_minimize(problem, out, log);
    if (*vf) return cmd_verify(input, ham, tol, margin, out);
    if (*pl) return cmd_pipeline(config, out);
    if (*rp) return cmd_report(summary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
