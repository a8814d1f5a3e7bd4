// fqsl: command-line front end for the time-fractional JC / QSL toolkit.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fqsl/caputo.hpp"
#include "fqsl/error.hpp"
#include "fqsl/sweep.hpp"

using namespace fqsl;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  JCParams p;
  double tau = 1.0;
  std::string grid;
  double tol = 1e-12;
  int threads = 1;
  std::string format = "csv";
  std::string out;
};

int default_threads() {
  if (const char* env = std::getenv("FQSL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "fqsl: ignoring invalid FQSL_THREADS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void add_model(CLI::App* app, Common& c) {
  app->add_option("--beta", c.p.beta, "fractional order in (0, 1]")->capture_default_str();
  app->add_option("--lambda", c.p.lambda, "coupling strength in [0, 1]")->capture_default_str();
  app->add_option("--n", c.p.n, "cavity photon number")->capture_default_str();
  app->add_option("--a", c.p.a, "eigenvector weight a")->capture_default_str();
  app->add_option("--b", c.p.b, "eigenvector weight b")->capture_default_str();
  app->add_option("--tau", c.tau, "driving time")->capture_default_str();
}

void add_run(CLI::App* app, Common& c, const std::string& grid_help) {
  app->add_option("--grid", c.grid, grid_help);
  app->add_option("--tol", c.tol, "relative tolerance")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (default: $FQSL_THREADS or all cores)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_option("--out", c.out, "output file (figure: directory); default stdout");
}

EvalConfig config(const Common& c) {
  EvalConfig cfg;
  cfg.rel_tol = c.tol;
  cfg.validate();
  return cfg;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "could not write " + c.out);
}

// "start:stop:count" or a comma-separated list.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> v;
  if (s.find(':') != std::string::npos) {
    std::stringstream ss(s);
    std::string a, b, n;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, n, ':');
    return linspace(std::stod(a), std::stod(b), std::stoi(n));
  }
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) v.push_back(std::stod(item));
  return v;
}

int grid_count(const Common& c, int fallback) { return c.grid.empty() ? fallback : std::stoi(c.grid); }

int cmd_ml(double beta, double gamma, double re, double im, const std::string& method, const Common& c) {
  const EvalConfig cfg = config(c);
  const MLOrder order{beta, gamma};
  const cplx z{re, im};
  cplx v;
  std::string regime(ml::to_string(ml::select_regime(order, z)));
  if (method == "global") v = ml::ml_global(order, z, cfg);
  else if (method == "series") v = ml::ml_series(order, z, cfg), regime = "series";
  else if (method == "contour") v = ml::ml_contour(order, z, cfg), regime = "contour";
  else v = ml::ml_asymptotic(order, z, cfg), regime = "asymptotic";
  if (c.format == "json") {
    emit(c, json{{"beta", beta}, {"gamma", gamma}, {"z", {re, im}}, {"regime", regime}, {"value", {v.real(), v.imag()}}}
                    .dump() +
                "\n");
  } else {
    emit(c, "re,im,regime\n" + format_double(v.real()) + "," + format_double(v.imag()) + "," + regime + "\n");
  }
  return 0;
}

int cmd_evolve(const Common& c) {
  const EvalConfig cfg = config(c);
  const int count = grid_count(c, 101);
  const auto t = linspace(0.0, c.tau, count);
  std::vector<DiagonalSample> rows(t.size());
  rows[0] = {1.0, 0.0, std::nan("")};
  parallel_for(t.size() - 1, c.threads, [&](std::size_t i) { rows[i + 1] = diagonal_sample(c.p, t[i + 1], cfg); });
  std::string s;
  if (c.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < t.size(); ++i)
      arr.push_back({{"t", t[i]},
                     {"rho_gg", rows[i].rho_gg},
                     {"rho_ee", rows[i].rho_ee},
                     {"drho_ee", std::isfinite(rows[i].drho_ee) ? json(rows[i].drho_ee) : json(nullptr)}});
    s = arr.dump(2) + "\n";
  } else {
    s = "t,rho_gg,rho_ee,drho_ee\n";
    for (std::size_t i = 0; i < t.size(); ++i)
      s += format_double(t[i]) + "," + format_double(rows[i].rho_gg) + "," + format_double(rows[i].rho_ee) + "," +
           format_double(rows[i].drho_ee) + "\n";
  }
  emit(c, s);
  return 0;
}

int cmd_verify(const Common& c, double max_residual) {
  const EvalConfig cfg = config(c);
  const int steps = grid_count(c, static_cast<int>(std::lround(c.tau / 1e-4)));
  SampledState traj;
  traj.times = linspace(0.0, c.tau, steps + 1);
  traj.values.resize(traj.times.size());
  parallel_for(traj.times.size(), c.threads, [&](std::size_t i) {
    const auto amp = evolve(c.p, traj.times[i], cfg);
    traj.values[i] = {amp.c_g, amp.c_e};
  });
  const Mat2 h = interaction_hamiltonian(c.p.lambda, c.p.n, 0.0, 0.0);
  const double r = tfse_residual(c.p.beta, h, traj);
  const bool ok = !(max_residual > 0.0) || r <= max_residual;
  emit(c, json{{"beta", c.p.beta},
               {"lambda", c.p.lambda},
               {"n", c.p.n},
               {"tau", c.tau},
               {"step", c.tau / steps},
               {"residual", r},
               {"default_weights", c.p.default_weights()},
               {"pass", ok}}
                  .dump() +
              "\n");
  return ok ? 0 : 1;
}

int cmd_qsl(const Common& c) {
  const EvalConfig cfg = config(c);
  GridSpec grid;
  if (!c.grid.empty()) grid.points = std::stoi(c.grid);
  const QslPoint q = qsl_ml(make_trajectory(c.p, c.tau, grid, cfg), BoundRule::MaxOfThree, cfg);
  emit(c, json{{"tau", q.tau},
               {"sin2_bures", q.sin2_bures},
               {"lambda_tr", q.lambda_tr},
               {"lambda_hs", q.lambda_hs},
               {"lambda_op", q.lambda_op},
               {"ratio_op", q.ratio_op},
               {"ratio_max", q.ratio_max}}
                  .dump(2) +
              "\n");
  return 0;
}

int cmd_sweep(const Common& c, const std::string& axis) {
  SweepSpec s;
  s.axis = parse_axis(axis);
  s.grid = parse_grid(c.grid.empty() ? "0.01:1:100" : c.grid);
  s.fixed = c.p;
  s.tau = c.tau;
  s.quadrature = config(c);
  s.threads = c.threads;
  s.output = c.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  const auto rec = run_sweep(s);
  emit(c, s.output == OutputFormat::Json ? to_json(s, rec) : to_csv(s, rec));
  int failed = 0;
  for (const auto& r : rec)
    if (!r.error.empty()) ++failed;
  if (failed) std::cerr << "fqsl: " << failed << " of " << rec.size() << " points failed\n";
  return failed ? 1 : 0;
}

int cmd_figure(const Common& c, const std::string& id) {
  auto specs = figure_preset(id);
  for (auto& s : specs) {
    s.quadrature = config(c);
    s.threads = c.threads;
    s.output = c.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  }
  const auto results = run_sweeps(specs, c.threads);
  const auto out = write_figure(id, specs, results, c.out.empty() ? "." : c.out);
  for (const auto& f : out.files) std::cout << f << "\n";
  if (out.failed_points) std::cerr << "fqsl: " << out.failed_points << " points failed\n";
  return out.failed_points ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-fractional Jaynes-Cummings dynamics and quantum speed limits"};
  app.set_version_flag("--version", std::string(FQSL_VERSION));
  app.require_subcommand(1);

  Common c;
  c.threads = default_threads();

  double gamma = 1.0, re = 0.0, im = 0.0;
  std::string method = "global";
  auto* ml = app.add_subcommand("ml", "evaluate E_{beta,gamma}(z)");
  ml->add_option("--beta", c.p.beta, "order beta in (0, 1]")->capture_default_str();
  ml->add_option("--gamma", gamma, "second parameter")->capture_default_str();
  ml->add_option("--re", re, "Re z")->capture_default_str();
  ml->add_option("--im", im, "Im z")->capture_default_str();
  ml->add_option("--method", method, "global, series, contour or asymptotic")
      ->check(CLI::IsMember({"global", "series", "contour", "asymptotic"}))
      ->capture_default_str();
  ml->add_option("--tol", c.tol, "relative tolerance")->capture_default_str();
  ml->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  ml->add_option("--out", c.out, "output file");

  auto* evolve_cmd = app.add_subcommand("evolve", "print t, rho_gg, rho_ee, d rho_ee/dt on [0, tau]");
  add_model(evolve_cmd, c);
  add_run(evolve_cmd, c, "number of time points (default 101)");

  double max_residual = 0.0;
  auto* verify = app.add_subcommand("verify", "TFSE residual of the evolved state (Caputo L1 check)");
  add_model(verify, c);
  add_run(verify, c, "number of time steps (default tau / 1e-4)");
  verify->add_option("--max-residual", max_residual, "exit 1 when the residual exceeds this");

  auto* qsl = app.add_subcommand("qsl", "ML-type QSL bound at one driving time, as JSON");
  add_model(qsl, c);
  add_run(qsl, c, "number of quadrature cells (default: from the oscillation frequency)");

  std::string axis = "lambda";
  auto* sweep = app.add_subcommand("sweep", "QSL ratio along one parameter axis");
  add_model(sweep, c);
  add_run(sweep, c, "start:stop:count or comma-separated values (default 0.01:1:100)");
  sweep->add_option("--axis", axis, "tau, lambda, n or beta")
      ->check(CLI::IsMember({"tau", "lambda", "n", "beta"}))
      ->capture_default_str();

  std::string figure_id;
  auto* figure = app.add_subcommand("figure", "reproduce a figure preset into a directory");
  figure->add_option("id", figure_id, "fig2, fig3, fig4 or fig5")->required();
  add_run(figure, c, "unused");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ml) return cmd_ml(c.p.beta, gamma, re, im, method, c);
    if (*evolve_cmd) return cmd_evolve(c);
    if (*verify) return cmd_verify(c, max_residual);
    if (*qsl) return cmd_qsl(c);
    if (*sweep) return cmd_sweep(c, axis);
    if (*figure) return cmd_figure(c, figure_id);
  } catch (const std::exception& e) {
    std::cerr << "fqsl: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
