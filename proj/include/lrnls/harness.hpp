#pragma once

// Temporal and spatial convergence studies, rate fitting and reporting.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrnls/initial_data.hpp"
#include "lrnls/integrator.hpp"
#include "lrnls/reference.hpp"

namespace lrnls {

enum class StudyAxis { temporal, spatial };
enum class Comparison { self_halving, self_doubling, vs_reference };

// plancherel: ||f||^2 = 2 pi sum |f_k|^2. normalized: sum |f_k|^2, i.e. the
// same norm divided by sqrt(2 pi).
enum class NormConvention { plancherel, normalized };

std::string to_string(StudyAxis axis);
std::string to_string(Comparison comparison);
std::string to_string(NormConvention norm);
StudyAxis parse_study_axis(const std::string& name);
Comparison parse_comparison(const std::string& name);
NormConvention parse_norm_convention(const std::string& name);

double to_convention(double plancherel_norm, NormConvention norm);

struct StudySpec {
  StudyAxis axis = StudyAxis::temporal;
  InitialDataSpec initial;
  int lambda = -1;
  double T = 1.0;
  // Temporal: rows, each half the previous. Spatial: fixed columns.
  std::vector<double> tau_list;
  // Temporal: fixed columns. Spatial: rows, each double the previous.
  std::vector<int> N_list;
  // Unset picks self_halving (temporal) or self_doubling (spatial).
  std::optional<Comparison> comparison;
  ReferenceScheme scheme = ReferenceScheme::lowreg_fine;
  InitMode init_mode = InitMode::truncated;
  NormConvention norm = NormConvention::plancherel;
  // Used with Comparison::vs_reference.
  ReferenceConfig reference;
  // Worker threads; 0 uses the hardware concurrency.
  int jobs = 0;

  Comparison effective_comparison() const;
  // Throws std::invalid_argument.
  void validate() const;
};

struct ConvergenceCell {
  double row_param = 0.0;
  double col_param = 0.0;
  // NaN when invalid.
  double error = 0.0;
  bool valid = true;
  std::string failure;
  // Wall time of the cell's own trajectory u_{tau,N}.
  double wall_ms = 0.0;
};

struct ConvergenceReport {
  StudySpec spec;
  // Temporal: rows are tau, columns N. Spatial: rows are N, columns tau.
  std::vector<double> rows;
  std::vector<double> cols;
  // cells[row][col]
  std::vector<std::vector<ConvergenceCell>> cells;
  // One entry per column; empty when the rate is undefined.
  std::vector<std::optional<double>> rates;
  std::map<std::string, std::string> metadata;

  bool all_valid() const;
  const ConvergenceCell& cell(std::size_t row, std::size_t col) const { return cells.at(row).at(col); }
};

// Least-squares slope of log2(error) against log2(parameter). Empty when
// fewer than two points are given or an error is not positive and finite.
std::optional<double> fit_rate(const std::vector<double>& errors, const std::vector<double>& parameters);

ConvergenceReport temporal_study(const StudySpec& spec);
ConvergenceReport spatial_study(const StudySpec& spec);
ConvergenceReport run_study(const StudySpec& spec);

struct DiagnosticsRow {
  int step = 0;
  double time = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
  double mass_drift = 0.0;
  double momentum_drift = 0.0;
};

std::vector<DiagnosticsRow> diagnostics_series(const Trajectory& trajectory);

// study,alpha,lambda,T,row_param,col_param,error,rate,wall_ms
void write_csv(std::ostream& out, const ConvergenceReport& report);
// key=value lines: metadata plus flags for invalid cells and undefined rates.
void write_metadata(std::ostream& out, const ConvergenceReport& report);
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows);
// Human-readable grid with errors as %.3E and rates to two decimals.
std::string format_table(const ConvergenceReport& report);

}  // namespace lrnls
