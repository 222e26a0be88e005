#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>

#include "epe/report.hpp"

using namespace epe;

namespace {

RunConfig base(double T, std::int64_t N) {
  RunConfig c;
  c.grid = make_time_grid(T, N);
  return c;
}

StudyRow row(Scheme s, int n, const ErrorNorms& e, RunTimings t = {0.1, 0.2, 0.3}) {
  StudyRow r;
  r.scheme = s;
  r.n = n;
  r.h = 1.0 / n;
  r.tau = 0.0025;
  r.errors = e;
  r.timings = t;
  r.fingerprint = "0123456789abcdef";
  return r;
}

StudyReport synthetic(int rows) {
  StudyReport rep;
  for (int k = 0; k < rows; ++k) {
    const double h = 1.0 / (4 << k);
    rep.rows.push_back(row(Scheme::Splitting, 4 << k, {h, 2 * h, h * h, 3 * h, h * h / 7}));
  }
  fill_orders(rep);
  return rep;
}

int count(const std::string& s, const std::string& what) {
  int c = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++c;
  return c;
}

}  // namespace

TEST(Orders, QuadraticSequence) {
  for (double h1 : {0.5, 0.25, 0.1}) {
    const double h2 = h1 / 2;
    EXPECT_NEAR(convergence_order(h1 * h1, h2 * h2, h1, h2), 2.0, 1e-12);
  }
  // Ratios other than two.
  EXPECT_NEAR(convergence_order(std::pow(1.0 / 4, 1.5), std::pow(1.0 / 12, 1.5), 1.0 / 4, 1.0 / 12), 1.5, 1e-12);
}

TEST(Orders, FilledFromConsecutiveRows) {
  const StudyReport rep = synthetic(3);
  EXPECT_FALSE(rep.rows[0].orders.has_value());
  for (int k = 1; k < 3; ++k) {
    ASSERT_TRUE(rep.rows[k].orders.has_value());
    EXPECT_NEAR(rep.rows[k].orders->E_L2, 1.0, 1e-12);
    EXPECT_NEAR(rep.rows[k].orders->u_L2, 2.0, 1e-12);
    EXPECT_NEAR(rep.rows[k].orders->p_L2, 2.0, 1e-12);
  }
}

TEST(Orders, SingleRowHasNone) {
  const StudyReport rep = synthetic(1);
  EXPECT_FALSE(rep.rows[0].orders.has_value());
  const std::string csv = to_csv(rep);
  EXPECT_EQ(count(csv, "\n"), 2);
  EXPECT_NE(csv.find(",,,,,"), std::string::npos);
}

TEST(Orders, SchemesAreNotMixed) {
  StudyReport rep;
  rep.kind = StudyKind::Benchmark;
  rep.rows = {row(Scheme::Splitting, 4, {1, 1, 1, 1, 1}), row(Scheme::Monolithic, 4, {1, 1, 1, 1, 1}),
              row(Scheme::Splitting, 8, {0.5, 0.5, 0.5, 0.5, 0.5}), row(Scheme::Monolithic, 8, {0.25, 0.25, 0.25, 0.25, 0.25})};
  fill_orders(rep);
  EXPECT_FALSE(rep.rows[1].orders.has_value());
  ASSERT_TRUE(rep.rows[2].orders.has_value());
  ASSERT_TRUE(rep.rows[3].orders.has_value());
  EXPECT_NEAR(rep.rows[2].orders->E_L2, 1.0, 1e-12);
  EXPECT_NEAR(rep.rows[3].orders->E_L2, 2.0, 1e-12);
}

TEST(Csv, HeaderIsExact) {
  const std::string csv = to_csv(synthetic(2));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "scheme,n,h,tau,err_E_L2,err_H_L2,err_u_L2,err_u_H1,err_p_L2,ord_E_L2,ord_H_L2,ord_u_L2,ord_u_H1,"
            "ord_p_L2,t_assemble_s,t_factor_s,t_loop_s,t_total_s");
  EXPECT_EQ(count(csv, "\n"), 3);
}

TEST(Csv, RoundTripsFifteenDigits) {
  StudyReport rep = synthetic(3);
  rep.rows[1].errors.H_L2 = 0.123456789012345678;
  const StudyReport back = parse_csv(to_csv(rep));
  ASSERT_EQ(back.rows.size(), rep.rows.size());
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto a = as_array(rep.rows[k].errors), b = as_array(back.rows[k].errors);
    for (int f = 0; f < 5; ++f) EXPECT_NEAR(b[f], a[f], 1e-14 * std::abs(a[f]));
    EXPECT_EQ(back.rows[k].n, rep.rows[k].n);
    EXPECT_EQ(back.rows[k].scheme, rep.rows[k].scheme);
    EXPECT_EQ(back.rows[k].orders.has_value(), rep.rows[k].orders.has_value());
    EXPECT_NEAR(back.rows[k].timings.total(), 0.6, 1e-5);
  }
  EXPECT_NEAR(back.rows[2].orders->u_L2, 2.0, 1e-13);
}

TEST(Csv, MalformedInputRejected) {
  EXPECT_THROW(parse_csv("scheme,n\n"), IoError);
  std::string csv = to_csv(synthetic(1));
  EXPECT_THROW(parse_csv(csv + "splitting,4\n"), IoError);
  csv.replace(csv.find("splitting,4"), 11, "splitting,x");
  EXPECT_THROW(parse_csv(csv), IoError);
}

TEST(Svg, FiveSeriesTwoGuides) {
  const std::string svg = to_svg(synthetic(3));
  EXPECT_EQ(count(svg, "class=\"series\""), 5);
  EXPECT_EQ(count(svg, "class=\"guide\""), 2);
  for (auto f : kErrorFields) EXPECT_NE(svg.find("data-field=\"" + std::string(f) + "\""), std::string::npos);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST(Markdown, SpatialTableHasOrders) {
  const std::string md = to_markdown(synthetic(3));
  EXPECT_EQ(count(md, "\n| splitting"), 3);
  EXPECT_NE(md.find("2.0000"), std::string::npos);
}

TEST(Markdown, BenchmarkHasSpeedup) {
  StudyReport rep;
  rep.kind = StudyKind::Benchmark;
  rep.rows = {row(Scheme::Splitting, 4, {1, 1, 1, 1, 1}, {0.1, 0.1, 0.3}),
              row(Scheme::Monolithic, 4, {1, 1, 1, 1, 1}, {0.1, 0.4, 0.5})};
  const std::string md = to_markdown(rep);
  EXPECT_NE(md.find("speedup"), std::string::npos);
  EXPECT_NE(md.find("2.0000"), std::string::npos);
  EXPECT_NE(md.find("fingerprints match"), std::string::npos);
  ASSERT_TRUE(speedup(rep, 4).has_value());
  EXPECT_NEAR(*speedup(rep, 4), 2.0, 1e-12);
  EXPECT_FALSE(speedup(rep, 8).has_value());
  rep.rows[1].fingerprint = "ffffffffffffffff";
  EXPECT_FALSE(rep.fingerprints_match());
  EXPECT_NE(to_markdown(rep).find("DIFFER"), std::string::npos);
}

TEST(Emit, WritesThreeFiles) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "emit_test";
  std::filesystem::remove_all(dir);
  const auto files = emit_report(synthetic(2), dir, "convergence");
  ASSERT_EQ(files.size(), 3u);
  for (const auto& f : files) EXPECT_GT(std::filesystem::file_size(f), 0u);
  std::ifstream in(dir / "convergence.csv");
  std::stringstream s;
  s << in.rdbuf();
  EXPECT_EQ(parse_csv(s.str()).rows.size(), 2u);
}

TEST(Emit, UnwritableDirectory) {
  const auto blocker = std::filesystem::path(::testing::TempDir()) / "emit_blocker";
  std::ofstream(blocker) << "x";
  EXPECT_THROW(emit_report(synthetic(1), blocker / "sub", "x"), IoError);
}

TEST(Fingerprint, IgnoresSchemeAndMesh) {
  RunConfig a = base(0.1, 40), b = a;
  b.scheme = Scheme::Monolithic;
  b.mesh_n = 12;
  EXPECT_EQ(config_fingerprint(a), config_fingerprint(b));
  EXPECT_TRUE(std::regex_match(config_fingerprint(a), std::regex("[0-9a-f]{16}")));
  b.params.kappa = 1.0 + 1e-12;
  EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
  b = a;
  b.grid = make_time_grid(0.1, 41);
  EXPECT_NE(config_fingerprint(a), config_fingerprint(b));
}

TEST(Temporal, ReferenceStepValidated) {
  const RunConfig c = base(0.1, 4);
  EXPECT_THROW(temporal_convergence(c, 2, {0.025, 0.0125}, 0.0125 / 4), ValidationError);
  EXPECT_THROW(temporal_convergence(c, 2, {}, 0.001), ValidationError);
  EXPECT_THROW(temporal_convergence(c, 2, {0.025}, 0.0), ValidationError);
}

TEST(Temporal, DifferencesShrinkWithTau) {
  const StudyReport rep = temporal_convergence(base(0.1, 4), 2, {0.025, 0.0125}, 0.0125 / 8);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.kind, StudyKind::Temporal);
  EXPECT_LT(rep.rows[1].errors.E_L2, rep.rows[0].errors.E_L2);
  EXPECT_LT(rep.rows[1].errors.p_L2, rep.rows[0].errors.p_L2);
  ASSERT_TRUE(rep.rows[1].orders.has_value());
  EXPECT_GT(rep.rows[1].orders->E_L2, 0.5);
}

TEST(Spatial, ErrorsDecrease) {
  const StudyReport rep = spatial_convergence(base(0.1, 10), {2, 3, 4});
  ASSERT_EQ(rep.rows.size(), 3u);
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_LT(rep.rows[k].errors.E_L2, rep.rows[k - 1].errors.E_L2);
    EXPECT_LT(rep.rows[k].errors.u_H1, rep.rows[k - 1].errors.u_H1);
    EXPECT_NEAR(rep.rows[k].h, 1.0 / rep.rows[k].n, 0.0);
  }
  EXPECT_TRUE(rep.fingerprints_match());
}

TEST(Spatial, WorkersDoNotChangeResults) {
  const StudyReport a = spatial_convergence(base(0.05, 5), {2, 3}, 1), b = spatial_convergence(base(0.05, 5), {2, 3}, 2);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(as_array(a.rows[k].errors), as_array(b.rows[k].errors));
}

TEST(Spatial, EmptyListRejected) {
  EXPECT_THROW(spatial_convergence(base(0.1, 4), {}), ValidationError);
  EXPECT_THROW(benchmark(base(0.1, 4), {}), ValidationError);
}

TEST(Benchmark, DecoupledSchemesGiveSameErrors) {
  RunConfig c = base(0.05, 5);
  c.params.L = 0.0;
  c.allow_decoupled = true;
  const StudyReport rep = benchmark(c, {2});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].scheme, Scheme::Splitting);
  EXPECT_EQ(rep.rows[1].scheme, Scheme::Monolithic);
  const auto a = as_array(rep.rows[0].errors), b = as_array(rep.rows[1].errors);
  for (int f = 0; f < 5; ++f) EXPECT_NEAR(a[f], b[f], 1e-8 * a[f]);
  EXPECT_TRUE(rep.fingerprints_match());
}
