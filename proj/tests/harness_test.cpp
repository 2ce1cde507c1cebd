#include "lrnls/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace lrnls {
namespace {

StudySpec small_temporal(InitialDataSpec initial) {
  StudySpec spec;
  spec.axis = StudyAxis::temporal;
  spec.initial = initial;
  spec.tau_list = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  spec.N_list = {16, 32};
  return spec;
}

StudySpec small_spatial(InitialDataSpec initial) {
  StudySpec spec;
  spec.axis = StudyAxis::spatial;
  spec.initial = initial;
  spec.tau_list = {1.0 / 16, 1.0 / 32};
  spec.N_list = {8, 16, 32};
  return spec;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(FitRate, Examples) {
  EXPECT_NEAR(*fit_rate({4, 2, 1}, {4, 2, 1}), 1.0, 1e-15);
  EXPECT_NEAR(*fit_rate({16, 4, 1}, {4, 2, 1}), 2.0, 1e-15);
  // Least squares over three points of an exact halving sequence is the mean pairwise rate.
  EXPECT_NEAR(*fit_rate({8, 4, 1}, {4, 2, 1}), 1.5, 1e-15);
  EXPECT_FALSE(fit_rate({1}, {1}));
  EXPECT_FALSE(fit_rate({1, 0}, {2, 1}));
  EXPECT_FALSE(fit_rate({1, std::nan("")}, {2, 1}));
  EXPECT_FALSE(fit_rate({2, 1}, {1, 1}));
  EXPECT_THROW(fit_rate({1, 2}, {1}), std::invalid_argument);
}

TEST(StudySpec, Validation) {
  auto spec = small_temporal(InitialDataSpec::sobolev(1.0));
  EXPECT_NO_THROW(spec.validate());
  spec.tau_list = {0.25, 0.125};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.tau_list = {0.25, 0.125, 0.1};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.tau_list = {0.3, 0.15, 0.075};
  EXPECT_THROW(spec.validate(), std::invalid_argument);

  auto spatial = small_spatial(InitialDataSpec::sobolev(1.0));
  EXPECT_NO_THROW(spatial.validate());
  spatial.N_list = {8, 16, 24};
  EXPECT_THROW(spatial.validate(), std::invalid_argument);
  spatial.N_list = {8, 16};
  EXPECT_THROW(spatial.validate(), std::invalid_argument);
  spatial.N_list = {8, 16, 32};
  spatial.comparison = Comparison::self_halving;
  EXPECT_THROW(spatial.validate(), std::invalid_argument);
  spatial.comparison.reset();
  spatial.lambda = 2;
  EXPECT_THROW(spatial.validate(), std::invalid_argument);
  EXPECT_THROW(temporal_study(small_spatial(InitialDataSpec::sobolev(1.0))), std::invalid_argument);
}

TEST(NormConvention, Scaling) {
  EXPECT_EQ(to_convention(3.0, NormConvention::plancherel), 3.0);
  EXPECT_NEAR(to_convention(std::sqrt(2 * std::numbers::pi), NormConvention::normalized), 1.0, 1e-15);
  EXPECT_EQ(parse_norm_convention("normalized"), NormConvention::normalized);
  EXPECT_THROW(parse_norm_convention("sup"), std::invalid_argument);
}

TEST(TemporalStudy, KnownFirstColumnAlphaTwo) {
  StudySpec spec;
  spec.initial = InitialDataSpec::sobolev(2.0);
  spec.tau_list = {1.0 / 64, 1.0 / 128, 1.0 / 256};
  spec.N_list = {256};
  spec.norm = NormConvention::normalized;
  const auto report = temporal_study(spec);
  ASSERT_TRUE(report.rates[0]);
  EXPECT_NEAR(*report.rates[0], 1.00, 0.01);
  EXPECT_NEAR(report.cell(0, 0).error, 7.662e-06, 0.05 * 7.662e-06);
  EXPECT_EQ(report.metadata.at("norm"), "normalized");
}

TEST(TemporalStudy, ZeroDataHasUndefinedRates) {
  const auto report = temporal_study(small_temporal(InitialDataSpec::constant(0.0)));
  for (const auto& row : report.cells) {
    for (const auto& c : row) EXPECT_EQ(c.error, 0.0);
  }
  for (const auto& r : report.rates) EXPECT_FALSE(r);
  std::ostringstream meta, csv;
  write_metadata(meta, report);
  EXPECT_NE(meta.str().find("undefined_rate=16"), std::string::npos);
  write_csv(csv, report);
  EXPECT_NE(csv.str().find(",rate,16,,nan,"), std::string::npos);
}

TEST(TemporalStudy, ColumnsAreIndependentOfScheduling) {
  auto spec = small_temporal(InitialDataSpec::sobolev(1.0));
  spec.N_list = {32, 8, 16};
  spec.jobs = 1;
  const auto serial = temporal_study(spec);
  spec.jobs = 4;
  const auto parallel = temporal_study(spec);
  const auto again = temporal_study(spec);
  for (std::size_t r = 0; r < serial.rows.size(); ++r) {
    for (std::size_t c = 0; c < serial.cols.size(); ++c) {
      EXPECT_EQ(serial.cell(r, c).error, parallel.cell(r, c).error);
      EXPECT_EQ(again.cell(r, c).error, parallel.cell(r, c).error);
    }
  }
  // Column N=16 alone matches its entry in the full study.
  spec.N_list = {16};
  const auto alone = temporal_study(spec);
  for (std::size_t r = 0; r < serial.rows.size(); ++r) EXPECT_EQ(alone.cell(r, 0).error, serial.cell(r, 2).error);
}

TEST(TemporalStudy, BlowUpMarksCellsInvalid) {
  auto spec = small_temporal(InitialDataSpec::plane(1, 1e150));
  spec.N_list = {4};
  const auto report = temporal_study(spec);
  EXPECT_FALSE(report.all_valid());
  EXPECT_FALSE(report.cell(0, 0).valid);
  EXPECT_TRUE(std::isnan(report.cell(0, 0).error));
  EXPECT_NE(report.cell(0, 0).failure.find("blow-up"), std::string::npos);
  EXPECT_FALSE(report.rates[0]);
  std::ostringstream meta;
  write_metadata(meta, report);
  EXPECT_NE(meta.str().find("invalid_cell="), std::string::npos);
}

TEST(TemporalStudy, AgainstReference) {
  auto spec = small_temporal(InitialDataSpec::sobolev(2.0));
  spec.N_list = {16};
  spec.comparison = Comparison::vs_reference;
  spec.reference.refinement = 8;
  spec.reference.refine_space = false;
  const auto report = temporal_study(spec);
  ASSERT_TRUE(report.rates[0]);
  EXPECT_NEAR(*report.rates[0], 1.0, 0.15);
  EXPECT_EQ(report.metadata.at("comparison"), "vs_reference");
}

TEST(SpatialStudy, BandLimitedDataHasNoSpatialError) {
  const auto report = spatial_study(small_spatial(InitialDataSpec::plane(1)));
  for (const auto& row : report.cells) {
    for (const auto& c : row) EXPECT_LE(c.error, 1e-13);
  }
}

TEST(SpatialStudy, RateForH2Data) {
  const auto report = spatial_study(small_spatial(InitialDataSpec::sobolev(2.0)));
  for (const auto& r : report.rates) {
    ASSERT_TRUE(r);
    EXPECT_NEAR(*r, 2.0, 0.1);
  }
  EXPECT_EQ(report.metadata.at("norm"), "plancherel");
  EXPECT_EQ(report.metadata.at("comparison"), "self_doubling");
}

TEST(Report, CsvLayout) {
  const auto report = spatial_study(small_spatial(InitialDataSpec::sobolev(1.0)));
  std::ostringstream out;
  write_csv(out, report);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 1 + report.cols.size() * (report.rows.size() + 1));
  EXPECT_EQ(rows[0], "study,alpha,lambda,T,row_param,col_param,error,rate,wall_ms");
  EXPECT_EQ(rows[1].rfind("spatial,1,-1,1,8,0.0625,", 0), 0u);
  EXPECT_EQ(rows[4].rfind("spatial,1,-1,1,rate,0.0625,,", 0), 0u);
  for (const auto& line : rows) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8) << line;
  EXPECT_EQ(out.str().find('\r'), std::string::npos);

  // Errors are written in full precision.
  const auto first = rows[1];
  std::vector<std::string> fields;
  std::stringstream split(first);
  for (std::string f; std::getline(split, f, ',');) fields.push_back(f);
  EXPECT_EQ(std::stod(fields[6]), report.cell(0, 0).error);
}

TEST(Report, Table) {
  const auto report = spatial_study(small_spatial(InitialDataSpec::sobolev(1.0)));
  const auto text = lines(format_table(report));
  ASSERT_EQ(text.size(), 5u);
  EXPECT_NE(text[0].find("2^-4"), std::string::npos);
  EXPECT_NE(text[1].find("E-0"), std::string::npos);
  EXPECT_EQ(text[4].find("rate"), 6u);
}

TEST(Diagnostics, Series) {
  const auto p = SchemeParams::from_steps(-1, 1.0, 32, 8);
  const Complex c(0.7, 0.2);
  const auto constant = evolve(p, constant_field(8, c), {0, 8, 16, 32});
  const auto rows = diagnostics_series(constant);
  ASSERT_EQ(rows.size(), 4u);
  // Each step maps the mass m to m (1 + tau^2 m^2).
  std::vector<double> mass{std::norm(c)};
  for (int n = 0; n < p.L; ++n) mass.push_back(mass.back() * (1.0 + p.tau * p.tau * mass.back() * mass.back()));
  for (const auto& r : rows) {
    const double m = mass[static_cast<std::size_t>(r.step)];
    EXPECT_NEAR(r.mass_drift, m - std::norm(c), 1e-14);
    EXPECT_NEAR(r.l2, std::sqrt(2 * std::numbers::pi * m), 1e-14);
    EXPECT_LE(r.momentum_drift, 1e-30);
  }
  EXPECT_DOUBLE_EQ(rows[2].time, 0.5);

  const auto zero = diagnostics_series(evolve(p, SpectralField(8), {0, 32}));
  for (const auto& r : zero) {
    EXPECT_EQ(r.l2, 0.0);
    EXPECT_EQ(r.h1, 0.0);
    EXPECT_EQ(r.mass_drift, 0.0);
    EXPECT_EQ(r.momentum_drift, 0.0);
  }
  std::ostringstream out;
  write_diagnostics_csv(out, rows);
  EXPECT_EQ(lines(out.str()).front(), "step,t,l2,h1,mass_drift,momentum_drift");
  EXPECT_EQ(lines(out.str()).size(), 5u);
}

}  // namespace
}  // namespace lrnls
