#include "fqsl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "fqsl/error.hpp"

namespace fqsl {

namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kCsvHeader =
    "axis,axis_value,tau,sin2_bures,lambda_tr,lambda_hs,lambda_op,ratio_op,ratio_max,error";

JCParams point_params(const SweepSpec& spec, double value) {
  JCParams p = spec.fixed;
  switch (spec.axis) {
    case Axis::Lambda: p.lambda = value; break;
    case Axis::Beta: p.beta = value; break;
    case Axis::N:
      if (value != std::floor(value) || value < 0.0)
        throw Error(ErrorCode::InvalidArgument, "photon-number axis needs nonnegative integers");
      p.n = static_cast<int>(value);
      break;
    case Axis::Tau: break;
  }
  return p;
}

CurveRecord failed(double x, const std::exception& e) {
  CurveRecord r;
  r.axis_value = x;
  r.point.tau = std::nan("");
  r.point.sin2_bures = r.point.lambda_tr = r.point.lambda_hs = r.point.lambda_op = std::nan("");
  r.point.ratio_op = r.point.ratio_max = std::nan("");
  r.error = e.what();
  return r;
}

CurveRecord run_point(const SweepSpec& spec, std::size_t i) {
  const double x = spec.grid[i];
  try {
    const JCParams p = point_params(spec, x);
    const Trajectory traj = make_trajectory(p, spec.tau, spec.trajectory_grid, spec.quadrature);
    return {x, qsl_ml(traj, BoundRule::MaxOfThree, spec.quadrature), {}};
  } catch (const std::exception& e) {
    return failed(x, e);
  }
}

std::vector<CurveRecord> run_tau_axis(const SweepSpec& spec) {
  std::vector<CurveRecord> out;
  out.reserve(spec.grid.size());
  try {
    GridSpec grid = spec.trajectory_grid;
    grid.required.insert(grid.required.end(), spec.grid.begin(), spec.grid.end());
    const Trajectory traj = make_trajectory(spec.fixed, spec.grid.back(), grid, spec.quadrature);
    const auto pts = qsl_ml_prefix(traj, spec.grid, BoundRule::MaxOfThree, spec.quadrature);
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({spec.grid[i], pts[i], {}});
  } catch (const std::exception& e) {
    out.clear();
    for (double x : spec.grid) out.push_back(failed(x, e));
  }
  return out;
}

ojson params_json(const JCParams& p) {
  return ojson{{"beta", p.beta}, {"lambda", p.lambda}, {"n", p.n},
               {"a", p.a},       {"b", p.b},           {"delta", p.delta}};
}

ojson number_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

}  // namespace

std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::Tau: return "tau";
    case Axis::Lambda: return "lambda";
    case Axis::N: return "n";
    case Axis::Beta: return "beta";
  }
  return "unknown";
}

Axis parse_axis(std::string_view s) {
  if (s == "tau") return Axis::Tau;
  if (s == "lambda") return Axis::Lambda;
  if (s == "n") return Axis::N;
  if (s == "beta") return Axis::Beta;
  throw Error(ErrorCode::InvalidArgument, "unknown sweep axis '" + std::string(s) + "'");
}

std::vector<double> linspace(double start, double stop, int count) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "grid count must be >= 2");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = start + (stop - start) * i / (count - 1);
  v.back() = stop;
  return v;
}

void SweepSpec::validate() const {
  if (grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "sweep grid needs at least 2 values");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "sweep grid must be strictly increasing");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
  quadrature.validate();
  JCParams probe = fixed;
  if (axis == Axis::Tau) {
    if (!(grid.front() > 0.0)) throw Error(ErrorCode::InvalidArgument, "driving times must be > 0");
  } else {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "driving time must be > 0");
    probe = point_params(*this, grid.front());
  }
  probe.validate();
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::uint64_t config_hash(const SweepSpec& s) {
  std::string text = std::string("fracqsl ") + FQSL_VERSION + "|" + std::string(to_string(s.axis));
  auto add = [&](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "|%a", x);
    text += buf;
  };
  for (double x : s.grid) add(x);
  for (double x : {s.fixed.beta, s.fixed.lambda, static_cast<double>(s.fixed.n), s.fixed.a, s.fixed.b, s.fixed.delta,
                   s.tau, s.quadrature.rel_tol, s.quadrature.abs_tol, static_cast<double>(s.quadrature.max_terms),
                   static_cast<double>(s.quadrature.quad_points), s.quadrature.quad_cutoff,
                   static_cast<double>(s.trajectory_grid.points), static_cast<double>(s.trajectory_grid.min_points),
                   s.trajectory_grid.cells_per_half_period, s.trajectory_grid.grading})
    add(x);
  for (double x : s.trajectory_grid.required) add(x);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex guard;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(guard);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::vector<CurveRecord> run_sweep(const SweepSpec& spec) { return run_sweeps({spec}, spec.threads).front(); }

std::vector<std::vector<CurveRecord>> run_sweeps(const std::vector<SweepSpec>& specs, int threads) {
  for (const auto& s : specs) s.validate();
  struct Task {
    std::size_t spec;
    std::size_t point;  // ignored for tau sweeps
  };
  std::vector<Task> tasks;
  std::vector<std::vector<CurveRecord>> out(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    out[s].resize(specs[s].grid.size());
    if (specs[s].axis == Axis::Tau) {
      tasks.push_back({s, 0});
    } else {
      for (std::size_t i = 0; i < specs[s].grid.size(); ++i) tasks.push_back({s, i});
    }
  }
  // Each task writes only its own slots, so no locking is needed.
  parallel_for(tasks.size(), threads, [&](std::size_t k) {
    const Task& t = tasks[k];
    const SweepSpec& spec = specs[t.spec];
    if (spec.axis == Axis::Tau) {
      out[t.spec] = run_tau_axis(spec);
    } else {
      out[t.spec][t.point] = run_point(spec, t.point);
    }
  });
  return out;
}

std::vector<SweepSpec> figure_preset(std::string_view id) {
  std::vector<double> tau_grid, lambda_grid;
  for (int k = 1; k <= 400; ++k) tau_grid.push_back(3.0 * k / 400.0);
  for (int k = 1; k <= 100; ++k) lambda_grid.push_back(k / 100.0);
  auto tag = [](std::initializer_list<std::pair<const char*, double>> kv) {
    std::string s;
    for (const auto& [k, v] : kv) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%s%s%g", s.empty() ? "" : "_", k, v);
      s += buf;
    }
    return s;
  };
  std::vector<SweepSpec> specs;
  if (id == "fig2" || id == "fig4") {
    const bool two = id == "fig2";
    for (double v : two ? std::vector<double>{0.1, 0.4, 0.7, 1.0} : std::vector<double>{0.3, 0.5, 0.8, 1.0}) {
      SweepSpec s;
      s.axis = Axis::Tau;
      s.grid = tau_grid;
      s.fixed.n = 20;
      s.fixed.beta = two ? v : 0.5;
      s.fixed.lambda = two ? 0.5 : v;
      s.tau = 3.0;
      s.tag = tag({{"beta", s.fixed.beta}, {"lambda", s.fixed.lambda}, {"n", 20}});
      specs.push_back(s);
    }
  } else if (id == "fig3" || id == "fig5") {
    const bool three = id == "fig3";
    for (double beta : {0.2, 0.5, 0.8, 1.0}) {
      for (double v : three ? std::vector<double>{0.1, 0.4, 0.7, 1.0} : std::vector<double>{0, 5, 10, 20}) {
        SweepSpec s;
        s.axis = Axis::Lambda;
        s.grid = lambda_grid;
        s.fixed.beta = beta;
        s.fixed.n = three ? 40 : static_cast<int>(v);
        s.tau = three ? v : 1.0;
        s.tag = three ? tag({{"beta", beta}, {"tau", v}, {"n", 40}}) : tag({{"beta", beta}, {"n", v}, {"tau", 1}});
        specs.push_back(s);
      }
    }
  } else {
    throw Error(ErrorCode::UnknownFigure, "no preset named '" + std::string(id) + "' (fig2..fig5)");
  }
  return specs;
}

RevivalReport detect_revivals(const std::vector<double>& v, double floor) {
  if (v.size() < 8) throw Error(ErrorCode::TooFewPoints, "revival detection needs at least 8 points");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "curve contains non-finite values");
  RevivalReport r;
  bool seeking_min = true;
  std::size_t imin = 0;
  double lo = v[0], hi = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (seeking_min) {
      if (v[i] < lo) {
        lo = v[i];
        imin = i;
      } else if (v[i] > lo + floor) {
        // A rise straight from the first sample is not a local minimum.
        if (imin > 0) r.minima.push_back(imin);
        seeking_min = false;
        hi = v[i];
      }
    } else if (v[i] > hi) {
      hi = v[i];
    } else if (v[i] < hi - floor) {
      seeking_min = true;
      lo = v[i];
      imin = i;
    }
  }
  r.count = static_cast<int>(r.minima.size());
  if (r.count > 0) {
    const std::size_t m = r.minima.front();
    for (std::size_t i = m; i < v.size(); ++i) r.first_rise = std::max(r.first_rise, v[i] - v[m]);
  }
  return r;
}

RevivalReport detect_revivals(const std::vector<CurveRecord>& curve, double floor) {
  std::vector<double> v;
  v.reserve(curve.size());
  for (const auto& c : curve) {
    if (!c.error.empty()) throw Error(ErrorCode::InvalidArgument, "curve contains failed points");
    v.push_back(c.point.ratio_op);
  }
  return detect_revivals(v, floor);
}

std::string csv_escape(std::string_view f) {
  if (f.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(f);
  std::string s = "\"";
  for (char c : f) {
    if (c == '"') s += '"';
    s += c;
  }
  return s + "\"";
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const SweepSpec& spec, const std::vector<CurveRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  const std::string axis(to_string(spec.axis));
  for (const auto& r : records) {
    const QslPoint& p = r.point;
    out += axis + "," + format_double(r.axis_value);
    for (double x : {p.tau, p.sin2_bures, p.lambda_tr, p.lambda_hs, p.lambda_op, p.ratio_op, p.ratio_max})
      out += "," + format_double(x);
    out += "," + csv_escape(r.error) + "\n";
  }
  return out;
}

std::string spec_parameters_json(const SweepSpec& spec) {
  ojson j = params_json(spec.fixed);
  j["axis"] = std::string(to_string(spec.axis));
  if (spec.axis != Axis::Tau) j["tau"] = spec.tau;
  j["grid_start"] = spec.grid.front();
  j["grid_stop"] = spec.grid.back();
  j["grid_count"] = spec.grid.size();
  j["rel_tol"] = spec.quadrature.rel_tol;
  j["abs_tol"] = spec.quadrature.abs_tol;
  j["default_weights"] = spec.fixed.default_weights();
  return j.dump();
}

std::string to_json(const SweepSpec& spec, const std::vector<CurveRecord>& records) {
  ojson meta;
  meta["version"] = FQSL_VERSION;
  meta["config_hash"] = hex64(config_hash(spec));
  meta["parameters"] = ojson::parse(spec_parameters_json(spec));
  ojson rows = ojson::array();
  const std::string axis(to_string(spec.axis));
  for (const auto& r : records) {
    const QslPoint& p = r.point;
    rows.push_back(ojson{{"axis", axis},
                         {"axis_value", r.axis_value},
                         {"tau", number_or_null(p.tau)},
                         {"sin2_bures", number_or_null(p.sin2_bures)},
                         {"lambda_tr", number_or_null(p.lambda_tr)},
                         {"lambda_hs", number_or_null(p.lambda_hs)},
                         {"lambda_op", number_or_null(p.lambda_op)},
                         {"ratio_op", number_or_null(p.ratio_op)},
                         {"ratio_max", number_or_null(p.ratio_max)},
                         {"error", r.error.empty() ? ojson(nullptr) : ojson(r.error)}});
  }
  return ojson{{"meta", meta}, {"records", rows}}.dump(2) + "\n";
}

FigureOutput write_figure(std::string_view id, const std::vector<SweepSpec>& specs,
                          const std::vector<std::vector<CurveRecord>>& results, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  FigureOutput out;
  ojson files = ojson::array();
  std::string all_hashes;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SweepSpec& s = specs[i];
    const bool json = s.output == OutputFormat::Json;
    const std::string name = std::string(id) + "_" + s.tag + (json ? ".json" : ".csv");
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << (json ? to_json(s, results[i]) : to_csv(s, results[i]));
    if (!f) throw Error(ErrorCode::InvalidArgument, "could not write " + name);
    int failed = 0;
    for (const auto& r : results[i]) failed += r.error.empty() ? 0 : 1;
    out.failed_points += failed;
    out.files.push_back(name);
    const std::string h = hex64(config_hash(s));
    all_hashes += h;
    files.push_back(ojson{{"file", name},
                          {"parameters", ojson::parse(spec_parameters_json(s))},
                          {"config_hash", h},
                          {"failed_points", failed}});
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : all_hashes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  ojson manifest{{"figure", std::string(id)},
                 {"version", FQSL_VERSION},
                 {"config_hash", hex64(h)},
                 {"defaults",
                  {{"tau_grid", "400 points on (0, 3]; toolkit default"},
                   {"lambda_grid", "100 points on (0, 1]; toolkit default"}}},
                 {"files", files}};
  std::ofstream m(fs::path(dir) / "manifest.json", std::ios::binary);
  m << manifest.dump(2) << "\n";
  if (!m) throw Error(ErrorCode::InvalidArgument, "could not write manifest.json");
  out.files.push_back("manifest.json");
  return out;
}

}  // namespace fqsl
