#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fqsl/sweep.hpp"
#include "support.hpp"

using namespace fqsl;
using fqsl::test::error_of;

namespace {

SweepSpec small_spec(Axis axis, std::vector<double> grid) {
  SweepSpec s;
  s.axis = axis;
  s.grid = std::move(grid);
  s.fixed.beta = 0.7;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("axis names") {
  for (Axis a : {Axis::Tau, Axis::Lambda, Axis::N, Axis::Beta}) CHECK(parse_axis(to_string(a)) == a);
  CHECK(error_of([] { parse_axis("gamma"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("linspace") {
  const auto v = linspace(0.0, 1.0, 5);
  CHECK(v == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(error_of([] { linspace(0.0, 1.0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("spec validation") {
  CHECK(error_of([] { small_spec(Axis::Tau, {0.5}).validate(); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([] { small_spec(Axis::Tau, {0.5, 0.4}).validate(); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([] { small_spec(Axis::Tau, {0.0, 0.4}).validate(); }) == ErrorCode::InvalidArgument);
  auto s = small_spec(Axis::Lambda, {0.1, 0.2});
  s.threads = 0;
  CHECK(error_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("tau sweep equals pointwise evaluation") {
  const auto spec = small_spec(Axis::Tau, linspace(0.1, 1.0, 10));
  const auto rec = run_sweep(spec);
  REQUIRE(rec.size() == 10);
  for (const auto& r : rec) {
    CHECK(r.error.empty());
    CHECK(r.point.tau == r.axis_value);
    CHECK(r.point.ratio_op == doctest::Approx(qsl_ratio_formula(spec.fixed, r.axis_value)).epsilon(1e-9));
  }
}

TEST_CASE("failures are recorded, not thrown") {
  auto spec = small_spec(Axis::Lambda, {0.5, 1.5});
  const auto rec = run_sweep(spec);
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].error.empty());
  CHECK(rec[1].error.find("InvalidArgument") != std::string::npos);
  CHECK(std::isnan(rec[1].point.ratio_op));
  const auto frac = run_sweep(small_spec(Axis::N, {0.0, 1.5}));
  CHECK(frac[1].error.find("nonnegative integers") != std::string::npos);
  const std::string csv = to_csv(spec, rec);
  CHECK(csv.find("lambda,1.5,,,,,,,,\"InvalidArgument: lambda must lie in [0, 1]\"\n") != std::string::npos);
}

TEST_CASE("CSV quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(NAN).empty());
}

TEST_CASE("CSV and JSON layout") {
  const auto spec = small_spec(Axis::N, {0, 5});
  const auto rec = run_sweep(spec);
  const std::string csv = to_csv(spec, rec);
  CHECK(csv.rfind("axis,axis_value,tau,sin2_bures,lambda_tr,lambda_hs,lambda_op,ratio_op,ratio_max,error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  const auto j = nlohmann::json::parse(to_json(spec, rec));
  CHECK(j["meta"]["config_hash"] == hex64(config_hash(spec)));
  CHECK(j["meta"]["parameters"]["beta"] == 0.7);
  REQUIRE(j["records"].size() == 2);
  CHECK(j["records"][1]["axis_value"] == 5.0);
  CHECK(j["records"][1]["ratio_op"] == rec[1].point.ratio_op);
}

TEST_CASE("config hash tracks inputs") {
  auto a = small_spec(Axis::Lambda, {0.1, 0.2});
  auto b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.fixed.n = 21;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.grid[1] = 0.2000000001;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.threads = 8;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(hex64(0xabc).size() == 16);
}

TEST_CASE("threads do not change output") {
  const auto spec = small_spec(Axis::Lambda, linspace(0.05, 1.0, 12));
  auto par = spec;
  par.threads = 4;
  CHECK(to_csv(spec, run_sweep(spec)) == to_csv(par, run_sweep(par)));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 6, [&](std::size_t i) { hit[i] += 1; });
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
}

TEST_CASE("figure presets carry the figure parameters") {
  auto f2 = figure_preset("fig2");
  REQUIRE(f2.size() == 4);
  const double b2[] = {0.1, 0.4, 0.7, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(f2[i].axis == Axis::Tau);
    CHECK(f2[i].fixed.beta == b2[i]);
    CHECK(f2[i].fixed.lambda == 0.5);
    CHECK(f2[i].fixed.n == 20);
    CHECK(f2[i].grid.size() == 400);
    CHECK(f2[i].grid.back() == 3.0);
  }
  CHECK(f2[0].tag == "beta0.1_lambda0.5_n20");

  auto f4 = figure_preset("fig4");
  REQUIRE(f4.size() == 4);
  const double l4[] = {0.3, 0.5, 0.8, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(f4[i].fixed.beta == 0.5);
    CHECK(f4[i].fixed.lambda == l4[i]);
    CHECK(f4[i].fixed.n == 20);
  }

  auto f3 = figure_preset("fig3");
  REQUIRE(f3.size() == 16);
  for (const auto& s : f3) {
    CHECK(s.axis == Axis::Lambda);
    CHECK(s.fixed.n == 40);
    CHECK(s.grid.size() == 100);
    CHECK(s.grid.back() == 1.0);
  }
  CHECK(f3[0].fixed.beta == 0.2);
  CHECK(f3[0].tau == 0.1);

  auto f5 = figure_preset("fig5");
  REQUIRE(f5.size() == 16);
  for (const auto& s : f5) {
    CHECK(s.axis == Axis::Lambda);
    CHECK(s.tau == 1.0);
  }
  const int n5[] = {0, 5, 10, 20};
  for (int n : n5)
    CHECK(std::count_if(f5.begin(), f5.end(), [n](const SweepSpec& s) { return s.fixed.n == n; }) == 4);

  CHECK(error_of([] { figure_preset("fig9"); }) == ErrorCode::UnknownFigure);
}

TEST_CASE("revival detection") {
  CHECK(detect_revivals(std::vector<double>(20, 0.4)).count == 0);
  std::vector<double> down;
  for (int i = 0; i < 20; ++i) down.push_back(1.0 - 0.01 * i);
  CHECK(detect_revivals(down).count == 0);

  std::vector<double> wave;
  for (int i = 0; i < 200; ++i) wave.push_back(1.0 - 0.3 * std::sin(i * 0.1) * std::sin(i * 0.1));
  const auto r = detect_revivals(wave);
  CHECK(r.count == 6);
  CHECK(r.first_rise == doctest::Approx(0.3).epsilon(1e-3));

  CHECK(error_of([] { detect_revivals(std::vector<double>{1, 0, 1}); }) == ErrorCode::TooFewPoints);
}

TEST_CASE("revivals survive grid refinement") {
  // beta = 0.1 oscillates at ~g^10, far beyond what 400 points on (0, 3] resolve
  std::vector<SweepSpec> specs;
  for (auto s : figure_preset("fig2"))
    if (s.fixed.beta >= 0.4) specs.push_back(s);
  for (auto s : figure_preset("fig4")) specs.push_back(s);
  auto fine = specs;
  for (auto& s : fine) s.grid = linspace(s.grid.front() / 2, s.grid.back(), 2 * static_cast<int>(s.grid.size()));
  const auto a = run_sweeps(specs, 2), b = run_sweeps(fine, 2);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CAPTURE(specs[i].tag);
    CHECK(detect_revivals(a[i]).count == detect_revivals(b[i]).count);
  }
}

TEST_CASE("figure files and manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "fqsl_unit_fig4";
  std::filesystem::remove_all(dir);
  auto specs = figure_preset("fig4");
  for (auto& s : specs) s.grid = linspace(0.1, 1.0, 10);
  const auto out = write_figure("fig4", specs, run_sweeps(specs, 2), dir.string());
  CHECK(out.failed_points == 0);
  REQUIRE(out.files.size() == 5);
  CHECK(out.files.back() == "manifest.json");
  CHECK(std::filesystem::exists(dir / "fig4_beta0.5_lambda0.3_n20.csv"));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["figure"] == "fig4");
  REQUIRE(m["files"].size() == 4);
  CHECK(m["files"][0]["file"] == "fig4_beta0.5_lambda0.3_n20.csv");
  CHECK(m["files"][0]["config_hash"] == hex64(config_hash(specs[0])));
  std::filesystem::remove_all(dir);
}
