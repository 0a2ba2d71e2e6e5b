// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <regex>

#include "mmwpl/channel.hpp"
#include "mmwpl/manifest.hpp"
#include "mmwpl/report.hpp"
#include "support.hpp"
#include "svg_check.hpp"

using namespace mmwpl;

namespace {

std::string squash(const std::string& s) { return std::regex_replace(s, std::regex(" +"), " "); }

TabularDataset tiny_table() {
  using namespace columns;
  TabularDataset t({std::string(kSeason), std::string(kFrequency), std::string(kSeparation), std::string(kPathLoss),
                    std::string(kRmsDelaySpread)});
  // Two winter drops at 28 GHz / 10 m: one with three records, one with one.
  for (int i = 0; i < 3; ++i) t.add_row({std::string("Winter"), 28.0, 10.0, 100.0, 5.0});
  t.add_row({std::string("Winter"), 28.0, 10.0, 110.0, 6.0});
  t.add_row({std::string("Winter"), 28.0, 20.0, 120.0, 6.0});
  t.add_row({std::string("Winter"), 60.0, 10.0, 130.0, 4.0});
  t.add_row({std::string("Spring"), 28.0, 10.0, 999.0, 4.0});
  return t;
}

TabularDataset simulated(std::vector<Season> seasons) {
  auto cfg = default_scenario();
  cfg.seasons = std::move(seasons);
  cfg.dist_steps = 4;
  cfg.drops = 2;
  const auto records = sweep_scenario(cfg);
  return to_table(records);
}

}  // namespace

// ------------------------------------------------------------- series ----

TEST(Series, PerDropAndPerRowMeans) {
  const auto t = tiny_table();
  const auto drop = path_loss_series(t, Season::Winter);
  ASSERT_EQ(drop.size(), 2u);
  EXPECT_EQ(drop[0].label, "28 GHz");
  EXPECT_EQ(drop[1].label, "60 GHz");
  EXPECT_EQ(drop[0].x, (std::vector<double>{10, 20}));
  EXPECT_EQ(drop[0].y[0], 105.0);
  EXPECT_EQ(drop[0].spread[0], 5.0);
  EXPECT_EQ(drop[0].y[1], 120.0);
  EXPECT_EQ(drop[0].spread[1], 0.0);

  const auto row = path_loss_series(t, Season::Winter, true);
  EXPECT_EQ(row[0].y[0], 102.5);
  EXPECT_NEAR(row[0].spread[0], std::sqrt(75.0 / 4.0), 1e-12);

  EXPECT_TRUE(path_loss_series(t, Season::Summer).empty());
  EXPECT_EQ(seasons_in(t), (std::vector<Season>{Season::Spring, Season::Winter}));
}

TEST(Series, MissingColumnIsSchemaError) {
  TabularDataset t({"Season", "Frequency"});
  EXPECT_THROW(path_loss_series(t, Season::Winter), SchemaError);
  EXPECT_THROW(seasons_in(TabularDataset({"x"})), SchemaError);
}

TEST(Series, SimulatedWinterOnlyGivesOneSeasonFourCarriers) {
  const auto t = simulated({Season::Winter});
  ASSERT_EQ(seasons_in(t), std::vector<Season>{Season::Winter});
  const auto s = path_loss_series(t, Season::Winter);
  ASSERT_EQ(s.size(), 4u);
  for (const auto& series : s) {
    EXPECT_EQ(series.x.size(), 4u);
    EXPECT_TRUE(std::is_sorted(series.x.begin(), series.x.end()));
  }
  // Higher carriers lose more at every distance on average over drops.
  EXPECT_LT(s.front().y.back(), s.back().y.back());
}

// ---------------------------------------------------------------- svg ----

TEST(Svg, LineChartIsWellFormedWithOneGroupPerSeries) {
  const auto t = simulated({Season::Fall});
  const auto series = path_loss_series(t, Season::Fall);
  const auto svg = test::inspect_svg(render_line_chart(series, "Fall", "distance (m)", "path loss (dB)"));
  ASSERT_TRUE(svg.well_formed) << svg.error;
  ASSERT_EQ(svg.series.size(), 4u);
  EXPECT_EQ(svg.series[0].label, "7.125 GHz");
  EXPECT_EQ(svg.series[3].label, "71 GHz");
}

TEST(Svg, EscapesMarkupInLabels) {
  std::vector<PlotSeries> s{{"a<b & \"c\"", {1, 2}, {3, 4}, {}}};
  const auto svg = test::inspect_svg(render_line_chart(s, "<title>", "x & y", "'z'"));
  ASSERT_TRUE(svg.well_formed) << svg.error;
  ASSERT_EQ(svg.series.size(), 1u);
  EXPECT_EQ(svg.series[0].label, "a<b & \"c\"");
}

TEST(Svg, DegenerateInputsStillRender) {
  EXPECT_TRUE(test::inspect_svg(render_line_chart({}, "empty", "x", "y")).well_formed);
  std::vector<PlotSeries> one{{"p", {5}, {5}, {0}}};
  EXPECT_TRUE(test::inspect_svg(render_line_chart(one, "point", "x", "y")).well_formed);
  EXPECT_TRUE(test::inspect_svg(render_bar_chart({}, "none", "y")).well_formed);
  EXPECT_TRUE(test::inspect_svg(render_bar_chart({{"neg", -2.0, "g"}}, "neg", "y")).well_formed);
}

TEST(Svg, RmseComparisonCarriesReferenceValues) {
  const MetricsRow best{"RF Regressor", {1.0, 1.5, 1.2247, 0.95}};
  const auto bars = rmse_comparison_bars(best);
  ASSERT_EQ(bars.size(), 5u);
  const auto svg = test::inspect_svg(render_bar_chart(bars, "RMSE", "RMSE (dB)"));
  ASSERT_TRUE(svg.well_formed) << svg.error;
  ASSERT_EQ(svg.bars.size(), 5u);
  const std::vector<double> expected{6.27, 8.67, 5.60, 6.67, 1.2247};
  for (std::size_t i = 0; i < 5; ++i) {
    ASSERT_TRUE(svg.bars[i].value);
    EXPECT_DOUBLE_EQ(*svg.bars[i].value, expected[i]);
  }
  EXPECT_EQ(svg.bars[4].label, "This run: RF Regressor");
}

TEST(Svg, SidecarsParseAsCsv) {
  const auto series = path_loss_series(tiny_table(), Season::Winter);
  std::istringstream in(series_csv(series));
  const auto t = read_csv(in);
  EXPECT_EQ(t.row_count(), 3u);
  EXPECT_EQ(t.columns().front(), "Series");
  std::istringstream in2(bars_csv({{"a", 1.5, "g"}, {"b", 2.5, "g"}}, "RMSE (dB)"));
  const auto b = read_csv(in2);
  EXPECT_EQ(b.columns(), (std::vector<std::string>{"Label", "RMSE (dB)", "Group"}));
  EXPECT_EQ(b.row_count(), 2u);
}

// ------------------------------------------------------------ metrics ----

TEST(MetricsTable, PublishedRowFormatting) {
  const auto& rf = published_results()[7];
  ASSERT_EQ(rf.kind, RegressorKind::RandomForest);
  MetricsReport m{rf.mae, rf.mse, rf.rmse, rf.r2};
  const auto text = metrics_table_text({{std::string(kind_label(rf.kind)), m}});
  EXPECT_NE(squash(text).find("RF Regressor 3.485 24.809 4.980 0.891"), std::string::npos) << text;
  EXPECT_EQ(text.substr(0, 6), "Models");
}

TEST(MetricsTable, UndefinedR2PrintsNa) {
  const auto text = metrics_table_text({{"SGD", {1, 1, 1, std::nullopt}}});
  EXPECT_NE(text.find("n/a"), std::string::npos);
}

TEST(MetricsCsv, RoundTripIsExact) {
  test::ScratchDir dir("metrics");
  const std::vector<MetricsRow> rows{{"RF Regressor", {0.1, 1.0 / 3.0, std::sqrt(1.0 / 3.0), 0.987654321}},
                                     {"SGD", {2.5, 7.25, std::sqrt(7.25), std::nullopt}}};
  {
    std::ofstream out(dir / "m.csv");
    write_metrics_csv(rows, out);
  }
  const auto back = read_metrics_csv(dir / "m.csv");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].model, rows[i].model);
    EXPECT_EQ(back[i].metrics.mae, rows[i].metrics.mae);
    EXPECT_EQ(back[i].metrics.mse, rows[i].metrics.mse);
    EXPECT_EQ(back[i].metrics.rmse, rows[i].metrics.rmse);
    EXPECT_EQ(back[i].metrics.r2, rows[i].metrics.r2);
  }
}

TEST(MetricsCsv, WrongHeaderRejected) {
  test::ScratchDir dir("metrics-bad");
  test::spit(dir / "m.csv", "Model,MAE\nx,1\n");
  EXPECT_THROW(read_metrics_csv(dir / "m.csv"), SchemaError);
}

TEST(LiteratureTable, ListsStudiesAndBestRow) {
  const auto text = literature_table_text(MetricsRow{"RF Regressor", {1.25, 2.5, 1.581, 0.97}});
  for (const char* v : {"6.27", "8.67", "5.60", "6.67", "0.72", "This run (RF Regressor)", "1.581"})
    EXPECT_NE(text.find(v), std::string::npos) << v;
  EXPECT_EQ(literature_table_text(std::nullopt).find("This run"), std::string::npos);
}

// ----------------------------------------------------------- manifest ----

TEST(Scenario, RenderRoundTrip) {
  auto cfg = default_scenario();
  cfg.seed = 18446744073709551557ull;
  cfg.frequencies = {7.125, 71.0};
  cfg.seasons = {Season::Winter, Season::Spring};
  cfg.dist_min = 12.345678901234567;
  cfg.channel.shadow_sigma = 0.1 + 0.2;
  const auto text = render_scenario(cfg);
  const auto back = load_scenario(config::parse_string(text));
  EXPECT_EQ(render_scenario(back), text);
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.frequencies, cfg.frequencies);
  EXPECT_EQ(back.seasons, cfg.seasons);
  EXPECT_EQ(back.dist_min, cfg.dist_min);
  EXPECT_EQ(back.channel.shadow_sigma, cfg.channel.shadow_sigma);
  EXPECT_EQ(back.atmosphere.seasons, cfg.atmosphere.seasons);
  EXPECT_EQ(back.atmosphere.coefficients.entries(), cfg.atmosphere.coefficients.entries());
}

TEST(Manifest, WriteReadRoundTrip) {
  test::ScratchDir dir("manifest");
  auto m = make_manifest("simulate", 77);
  m["config"] = render_scenario(default_scenario());
  write_manifest(m, dir / "manifest.json");
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back, m);
  EXPECT_EQ(back["tool"], "mmwpl");
  EXPECT_EQ(back["version"], std::string(kVersion));
  EXPECT_EQ(back["seed"].get<std::uint64_t>(), 77u);
  EXPECT_TRUE(std::regex_match(back["created_utc"].get<std::string>(),
                               std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
}

TEST(Manifest, RejectsForeignOrBrokenFiles) {
  test::ScratchDir dir("manifest-bad");
  test::spit(dir / "a.json", R"({"tool": "other"})");
  test::spit(dir / "b.json", "{broken");
  EXPECT_THROW(read_manifest(dir / "a.json"), ParseError);
  EXPECT_THROW(read_manifest(dir / "b.json"), ParseError);
  EXPECT_THROW(read_manifest(dir / "missing.json"), Error);
}
