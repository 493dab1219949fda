#ifndef CRIBSE_SWEEP_HPP
#define CRIBSE_SWEEP_HPP

#include <string>
#include <vector>

#include "cribse/fim.hpp"

namespace cribse::sweep {

enum class Axis { Alpha, Gamma, Tau };

std::string axis_name(Axis a);
Axis axis_from_name(const std::string& name);

/// Swept-axis grid; log spacing requires a positive range.
struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  int points = 21;
  bool log_spacing = false;

  std::vector<double> values() const;
};

/// One bound-sweep request: fixed shape parameters, one swept axis, the
/// models to evaluate. `pins` lists axis values that replace their nearest
/// grid point, so special points (like the Gaussian alpha = 1) land on the
/// grid exactly.
struct SweepSpec {
  int d = 5;
  int N = 5000;
  int T = 10;
  double alpha = 1.0;
  double gamma = 0.0;
  double tau = 0.0;
  Axis axis = Axis::Alpha;
  GridSpec grid;
  std::vector<double> pins;
  std::vector<fim::Model> models = {fim::Model::CvxCsv, fim::Model::Csv,
                                    fim::Model::Bice};

  void validate() const;
  std::vector<double> grid_values() const;  // with pins applied
};

/// chart1: alpha swept log over [0.1, 4] (21 points, alpha = 1 pinned),
/// gamma = 0, tau = 0. chart2: gamma swept over [0, 0.95] (20 points),
/// alpha = 1, tau = 0. chart3: tau swept over [0, 1] (21 points),
/// alpha = 1, gamma = 0. All at d = 5, N = 5000, T = 10, all models.
SweepSpec preset(const std::string& name);

/// One row per (grid point, model); the parameter columns echo the
/// effective values at that point, swept axis included.
struct ResultRow {
  fim::Model model = fim::Model::CvxCsv;
  Axis axis = Axis::Alpha;
  double value = 0.0;
  int d = 0, N = 0, T = 0;
  double alpha = 0.0, gamma = 0.0, tau = 0.0;
  double isr = 0.0, isr_db = 0.0;
  bool identifiable = false;
  double rcond = 0.0;
};

/// Grid points evaluate concurrently; row order is grid-major then model.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

/// Fixed column order, "inf" for infinite bounds, shortest round-trip
/// number formatting; serialization is byte-stable under parse + re-emit.
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);

/// JSON schema: {"schema": 1, "rows": [...]}; infinite isr becomes the
/// string "inf" and infinite isr_db becomes null.
std::string to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const std::string& text);

/// Plain-text gnuplot script plotting isr_db against the swept axis from
/// the referenced CSV, one series per model.
std::string gnuplot_script(const SweepSpec& spec, const std::string& csv_path);

}  // namespace cribse::sweep

#endif
