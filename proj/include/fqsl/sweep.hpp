#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fqsl/qsl.hpp"

namespace fqsl {

enum class Axis { Tau, Lambda, N, Beta };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Axis a) noexcept;
Axis parse_axis(std::string_view s);

struct SweepSpec {
  Axis axis = Axis::Tau;
  std::vector<double> grid;
  // Values of the non-swept parameters; the swept one is overwritten per point.
  JCParams fixed;
  // Driving time when the axis is not tau.
  double tau = 1.0;
  EvalConfig quadrature;
  GridSpec trajectory_grid;
  OutputFormat output = OutputFormat::Csv;
  int threads = 1;
  // Short identifier used in file names, e.g. "beta0.1_lambda0.5_n20".
  std::string tag;

  void validate() const;
};

/// count points spaced evenly from start to stop inclusive; count >= 2.
std::vector<double> linspace(double start, double stop, int count);

struct CurveRecord {
  double axis_value = 0.0;
  QslPoint point;
  // Empty when the point succeeded.
  std::string error;
};

/// Deterministic 64-bit FNV-1a hash of the sweep inputs (threads excluded).
std::uint64_t config_hash(const SweepSpec& spec);
std::string hex64(std::uint64_t h);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// One record per grid value, in grid order. A tau sweep shares a single
/// trajectory on (0, max tau] whose nodes include every grid value.
std::vector<CurveRecord> run_sweep(const SweepSpec& spec);

/// Several sweeps on one worker pool (points of non-tau sweeps are
/// scheduled individually). Results are indexed like specs.
std::vector<std::vector<CurveRecord>> run_sweeps(const std::vector<SweepSpec>& specs, int threads);

/// Parameter sets of figures fig2 to fig5. Tau axes default to 400 points
/// on (0, 3], lambda axes to 100 points on (0, 1].
std::vector<SweepSpec> figure_preset(std::string_view id);

struct RevivalReport {
  int count = 0;
  // Indices of the counted local minima.
  std::vector<std::size_t> minima;
  // Largest rise above the first counted minimum; 0 when count = 0.
  double first_rise = 0.0;
};

/// Strict local minima of ratio_op followed by a rise above noise_floor.
RevivalReport detect_revivals(const std::vector<double>& values, double noise_floor = 1e-6);
RevivalReport detect_revivals(const std::vector<CurveRecord>& curve, double noise_floor = 1e-6);

std::string csv_escape(std::string_view field);
std::string format_double(double x);

/// Header axis,axis_value,tau,sin2_bures,lambda_tr,lambda_hs,lambda_op,ratio_op,ratio_max,error
std::string to_csv(const SweepSpec& spec, const std::vector<CurveRecord>& records);
/// {"meta": {...}, "records": [...]} with the CSV field names.
std::string to_json(const SweepSpec& spec, const std::vector<CurveRecord>& records);

std::string spec_parameters_json(const SweepSpec& spec);

struct FigureOutput {
  std::vector<std::string> files;
  int failed_points = 0;
};

/// Writes <figid>_<tag>.csv (or .json) per sub-curve and manifest.json into dir.
FigureOutput write_figure(std::string_view id, const std::vector<SweepSpec>& specs,
                          const std::vector<std::vector<CurveRecord>>& results, const std::string& dir);

}  // namespace fqsl
