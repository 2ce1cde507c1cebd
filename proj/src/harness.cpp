#include "lrnls/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace lrnls {

namespace {

constexpr const char* kVersion = "1.0.0";

// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
// exception is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct RunKey {
  int L;
  int N;
  auto operator<=>(const RunKey&) const = default;
};

struct RunResult {
  std::optional<SpectralField> field;
  std::string failure;
  double wall_ms = 0.0;
};

// Every trajectory a study needs, run once each.
class RunCache {
 public:
  explicit RunCache(const StudySpec& spec) : spec_(spec) {}

  void require(RunKey key) { results_.emplace(key, RunResult{}); }
  void require_reference(RunKey key) { references_.emplace(key, RunResult{}); }

  void run() {
    std::map<int, SpectralField> initial;
    for (const auto& [key, result] : results_) initial.emplace(key.N, SpectralField(0));
    std::vector<int> cutoffs;
    for (const auto& [n, field] : initial) cutoffs.push_back(n);
    std::vector<SpectralField> fields(cutoffs.size(), SpectralField(0));
    parallel_for(cutoffs.size(), spec_.jobs,
                 [&](std::size_t i) { fields[i] = initialize(spec_.initial, cutoffs[i], spec_.init_mode); });
    for (std::size_t i = 0; i < cutoffs.size(); ++i) initial.at(cutoffs[i]) = fields[i];

    std::vector<std::pair<RunKey, RunResult*>> tasks;
    for (auto& [key, result] : results_) tasks.emplace_back(key, &result);
    const std::size_t plain = tasks.size();
    for (auto& [key, result] : references_) tasks.emplace_back(key, &result);
    // Longest runs first keeps the pool busy.
    std::stable_sort(tasks.begin(), tasks.begin() + static_cast<std::ptrdiff_t>(plain), [](const auto& a, const auto& b) {
      return static_cast<double>(a.first.L) * a.first.N > static_cast<double>(b.first.L) * b.first.N;
    });
    parallel_for(tasks.size(), spec_.jobs, [&](std::size_t i) {
      const auto [key, result] = tasks[i];
      const auto params = SchemeParams::from_steps(spec_.lambda, spec_.T, key.L, key.N);
      const auto start = std::chrono::steady_clock::now();
      try {
        if (i < plain) {
          result->field = evolve_scheme(spec_.scheme, params, initial.at(key.N)).final_field();
        } else {
          ReferenceConfig config = spec_.reference;
          config.init_mode = spec_.init_mode;
          result->field = reference_solution(params, spec_.initial, config);
        }
      } catch (const BlowUp& e) {
        result->failure = e.what();
      }
      result->wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });
  }

  const RunResult& result(RunKey key) const { return results_.at(key); }
  const RunResult& reference(RunKey key) const { return references_.at(key); }

 private:
  const StudySpec& spec_;
  std::map<RunKey, RunResult> results_;
  std::map<RunKey, RunResult> references_;
};

int steps_for(const StudySpec& spec, double tau) { return SchemeParams::from_step_size(spec.lambda, spec.T, tau, 1).L; }

ConvergenceCell compare(const StudySpec& spec, const RunResult& own, const RunResult& other, double row, double col) {
  ConvergenceCell cell;
  cell.row_param = row;
  cell.col_param = col;
  cell.wall_ms = own.wall_ms;
  if (!own.field || !other.field) {
    cell.valid = false;
    cell.error = std::numeric_limits<double>::quiet_NaN();
    cell.failure = !own.field ? own.failure : other.failure;
    return cell;
  }
  cell.error = to_convention(l2_error(*own.field, *other.field), spec.norm);
  return cell;
}

void fill_rates(ConvergenceReport& report, bool spatial) {
  report.rates.assign(report.cols.size(), std::nullopt);
  for (std::size_t c = 0; c < report.cols.size(); ++c) {
    std::vector<double> errors, params;
    bool valid = true;
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      valid = valid && report.cells[r][c].valid;
      errors.push_back(report.cells[r][c].error);
      params.push_back(spatial ? 1.0 / report.rows[r] : report.rows[r]);
    }
    if (valid) report.rates[c] = fit_rate(errors, params);
  }
}

void fill_metadata(ConvergenceReport& report, double wall_ms) {
  const StudySpec& s = report.spec;
  auto& m = report.metadata;
  m["version"] = kVersion;
  m["study"] = to_string(s.axis);
  m["comparison"] = to_string(s.effective_comparison());
  m["scheme"] = to_string(s.scheme);
  m["norm"] = to_string(s.norm);
  m["init_mode"] = to_string(s.init_mode);
  m["initial"] = to_string(s.initial.kind);
  m["alpha"] = format_double(s.initial.alpha);
  m["amplitude"] = format_double(s.initial.amplitude);
  m["exponent_offset"] = format_double(s.initial.exponent_offset);
  m["tail_cutoff"] = s.initial.tail_cutoff ? std::to_string(*s.initial.tail_cutoff) : "default";
  m["lambda"] = std::to_string(s.lambda);
  m["T"] = format_double(s.T);
  if (s.effective_comparison() == Comparison::vs_reference) {
    m["reference_scheme"] = to_string(s.reference.scheme);
    m["reference_refinement"] = std::to_string(s.reference.refinement);
  }
  m["jobs"] = std::to_string(s.jobs);
  m["wall_ms"] = format_double(wall_ms);
}

std::string power_of_two_label(double value) {
  const double e = std::log2(value);
  if (std::abs(e - std::round(e)) < 1e-12) {
    const long k = std::lround(e);
    return k >= 0 && value >= 1 ? std::to_string(1L << k) : "2^" + std::to_string(k);
  }
  return format_double(value);
}

std::string sci(double value) {
  if (!std::isfinite(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3E", value);
  return buf;
}

}  // namespace

std::string to_string(StudyAxis axis) { return axis == StudyAxis::temporal ? "temporal" : "spatial"; }

std::string to_string(Comparison comparison) {
  switch (comparison) {
    case Comparison::self_halving: return "self_halving";
    case Comparison::self_doubling: return "self_doubling";
    case Comparison::vs_reference: return "vs_reference";
  }
  return "unknown";
}

std::string to_string(NormConvention norm) { return norm == NormConvention::plancherel ? "plancherel" : "normalized"; }

StudyAxis parse_study_axis(const std::string& name) {
  if (name == "temporal") return StudyAxis::temporal;
  if (name == "spatial") return StudyAxis::spatial;
  throw std::invalid_argument("unknown study axis '" + name + "'");
}

Comparison parse_comparison(const std::string& name) {
  if (name == "self_halving") return Comparison::self_halving;
  if (name == "self_doubling") return Comparison::self_doubling;
  if (name == "vs_reference" || name == "reference") return Comparison::vs_reference;
  throw std::invalid_argument("unknown comparison '" + name + "'");
}

NormConvention parse_norm_convention(const std::string& name) {
  if (name == "plancherel") return NormConvention::plancherel;
  if (name == "normalized") return NormConvention::normalized;
  throw std::invalid_argument("unknown norm convention '" + name + "' (expected plancherel or normalized)");
}

double to_convention(double plancherel_norm, NormConvention norm) {
  return norm == NormConvention::plancherel ? plancherel_norm : plancherel_norm / std::sqrt(2.0 * std::numbers::pi);
}

Comparison StudySpec::effective_comparison() const {
  if (comparison) return *comparison;
  return axis == StudyAxis::temporal ? Comparison::self_halving : Comparison::self_doubling;
}

void StudySpec::validate() const {
  initial.validate();
  if (lambda != 1 && lambda != -1) throw std::invalid_argument("lambda must be +1 or -1");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("final time T must be positive");
  if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
  if (tau_list.empty() || N_list.empty()) throw std::invalid_argument("study needs a tau list and an N list");
  for (const int n : N_list) {
    if (n < 1) throw std::invalid_argument("cutoffs must be >= 1");
  }
  for (const double tau : tau_list) (void)SchemeParams::from_step_size(lambda, T, tau, 1);
  const Comparison c = effective_comparison();
  if (axis == StudyAxis::temporal) {
    if (tau_list.size() < 3) throw std::invalid_argument("temporal study needs at least 3 step sizes");
    for (std::size_t i = 1; i < tau_list.size(); ++i) {
      if (std::abs(tau_list[i] * 2.0 - tau_list[i - 1]) > 1e-12 * tau_list[i - 1]) {
        throw std::invalid_argument("temporal study step sizes must halve from row to row");
      }
    }
    if (c == Comparison::self_doubling) throw std::invalid_argument("temporal study compares by halving tau");
  } else {
    if (N_list.size() < 3) throw std::invalid_argument("spatial study needs at least 3 cutoffs");
    for (std::size_t i = 1; i < N_list.size(); ++i) {
      if (N_list[i] != 2 * N_list[i - 1]) throw std::invalid_argument("spatial study cutoffs must double from row to row");
    }
    if (c == Comparison::self_halving) throw std::invalid_argument("spatial study compares by doubling N");
  }
  if (c == Comparison::vs_reference) reference.validate();
}

bool ConvergenceReport::all_valid() const {
  for (const auto& row : cells) {
    for (const auto& c : row) {
      if (!c.valid) return false;
    }
  }
  return true;
}

std::optional<double> fit_rate(const std::vector<double>& errors, const std::vector<double>& parameters) {
  if (errors.size() != parameters.size()) throw std::invalid_argument("fit_rate: size mismatch");
  if (errors.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]) || !(parameters[i] > 0.0)) return std::nullopt;
    const double x = std::log2(parameters[i]);
    const double y = std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(errors.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

ConvergenceReport temporal_study(const StudySpec& spec) {
  if (spec.axis != StudyAxis::temporal) throw std::invalid_argument("temporal_study: spec is not temporal");
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const bool reference = spec.effective_comparison() == Comparison::vs_reference;
  RunCache cache(spec);
  for (const int n : spec.N_list) {
    for (const double tau : spec.tau_list) {
      const int l = steps_for(spec, tau);
      cache.require({l, n});
      if (reference) {
        cache.require_reference({l, n});
      } else {
        cache.require({2 * l, n});
      }
    }
  }
  cache.run();

  ConvergenceReport report;
  report.spec = spec;
  report.rows = spec.tau_list;
  report.cols.assign(spec.N_list.begin(), spec.N_list.end());
  for (const double tau : spec.tau_list) {
    auto& row = report.cells.emplace_back();
    const int l = steps_for(spec, tau);
    for (const int n : spec.N_list) {
      const RunResult& other = reference ? cache.reference({l, n}) : cache.result({2 * l, n});
      row.push_back(compare(spec, cache.result({l, n}), other, tau, n));
    }
  }
  fill_rates(report, false);
  fill_metadata(report, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  return report;
}

ConvergenceReport spatial_study(const StudySpec& spec) {
  if (spec.axis != StudyAxis::spatial) throw std::invalid_argument("spatial_study: spec is not spatial");
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const bool reference = spec.effective_comparison() == Comparison::vs_reference;
  RunCache cache(spec);
  for (const double tau : spec.tau_list) {
    const int l = steps_for(spec, tau);
    for (const int n : spec.N_list) {
      cache.require({l, n});
      if (reference) {
        cache.require_reference({l, n});
      } else {
        cache.require({l, 2 * n});
      }
    }
  }
  cache.run();

  ConvergenceReport report;
  report.spec = spec;
  report.rows.assign(spec.N_list.begin(), spec.N_list.end());
  report.cols = spec.tau_list;
  for (const int n : spec.N_list) {
    auto& row = report.cells.emplace_back();
    for (const double tau : spec.tau_list) {
      const int l = steps_for(spec, tau);
      const RunResult& other = reference ? cache.reference({l, n}) : cache.result({l, 2 * n});
      row.push_back(compare(spec, cache.result({l, n}), other, n, tau));
    }
  }
  fill_rates(report, true);
  fill_metadata(report, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  return report;
}

ConvergenceReport run_study(const StudySpec& spec) {
  return spec.axis == StudyAxis::temporal ? temporal_study(spec) : spatial_study(spec);
}

std::vector<DiagnosticsRow> diagnostics_series(const Trajectory& trajectory) {
  std::vector<DiagnosticsRow> rows;
  for (const auto& s : trajectory.snapshots) {
    rows.push_back({s.step, s.time, s.diagnostics.l2, s.diagnostics.h1, s.diagnostics.mass_drift,
                    s.diagnostics.momentum_drift});
  }
  return rows;
}

void write_csv(std::ostream& out, const ConvergenceReport& report) {
  const StudySpec& s = report.spec;
  const std::string prefix =
      to_string(s.axis) + "," + format_double(s.initial.alpha) + "," + std::to_string(s.lambda) + "," + format_double(s.T) + ",";
  auto number = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); };
  out << "study,alpha,lambda,T,row_param,col_param,error,rate,wall_ms\n";
  for (std::size_t c = 0; c < report.cols.size(); ++c) {
    double column_ms = 0.0;
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      const auto& cell = report.cells[r][c];
      column_ms += cell.wall_ms;
      out << prefix << number(cell.row_param) << ',' << number(cell.col_param) << ',' << number(cell.error) << ",,"
          << number(cell.wall_ms) << '\n';
    }
    out << prefix << "rate," << number(report.cols[c]) << ",," << (report.rates[c] ? number(*report.rates[c]) : "nan")
        << ',' << number(column_ms) << '\n';
  }
}

void write_metadata(std::ostream& out, const ConvergenceReport& report) {
  for (const auto& [key, value] : report.metadata) out << key << '=' << value << '\n';
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    for (std::size_t c = 0; c < report.cols.size(); ++c) {
      const auto& cell = report.cells[r][c];
      if (!cell.valid) {
        out << "invalid_cell=" << format_double(cell.row_param) << ',' << format_double(cell.col_param) << ','
            << cell.failure << '\n';
      }
    }
  }
  for (std::size_t c = 0; c < report.cols.size(); ++c) {
    if (!report.rates[c]) out << "undefined_rate=" << format_double(report.cols[c]) << '\n';
  }
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRow>& rows) {
  out << "step,t,l2,h1,mass_drift,momentum_drift\n";
  for (const auto& r : rows) {
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.l2) << ',' << format_double(r.h1) << ','
        << format_double(r.mass_drift) << ',' << format_double(r.momentum_drift) << '\n';
  }
}

std::string format_table(const ConvergenceReport& report) {
  const bool temporal = report.spec.axis == StudyAxis::temporal;
  std::ostringstream out;
  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
  };
  out << pad(temporal ? "tau \\ N" : "N \\ tau", 10);
  for (const double c : report.cols) out << ' ' << pad(power_of_two_label(c), 10);
  out << '\n';
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    out << pad(power_of_two_label(report.rows[r]), 10);
    for (std::size_t c = 0; c < report.cols.size(); ++c) out << ' ' << pad(sci(report.cells[r][c].error), 10);
    out << '\n';
  }
  out << pad("rate", 10);
  for (const auto& rate : report.rates) {
    char buf[32];
    if (rate) {
      std::snprintf(buf, sizeof buf, "%.2f", *rate);
    } else {
      std::snprintf(buf, sizeof buf, "nan");
    }
    out << ' ' << pad(buf, 10);
  }
  out << '\n';
  return out.str();
}

}  // namespace lrnls
