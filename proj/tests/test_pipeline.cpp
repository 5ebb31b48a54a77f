#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "biovit/pipeline.hpp"
#include "biovit/synth.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace biovit;
using namespace biovit::pipeline;

namespace {

std::vector<session::AttentionSession> fixture_cohort() {
  auto spec = [](const char* id, trend::TrendModelKind model, std::vector<double> c, double sd) {
    synth::SynthSpec s;
    s.participant_id = id;
    s.n_samples = 40;
    s.model = model;
    s.coefficients = std::move(c);
    s.noise_sd = sd;
    s.clamp = true;
    s.quantize = true;
    s.seed = 7;
    return s;
  };
  using K = trend::TrendModelKind;
  return synth::generate_cohort({spec("P01", K::Quadratic, {70, -0.5, 0.004}, 6),
                                 spec("P02", K::Linear, {35, 0.2}, 9),
                                 spec("P03", K::Quadratic, {50, 0.3, -0.006}, 12),
                                 spec("P04", K::Quadratic, {25, 0.1, 0.0}, 10)});
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Compares against tests/golden/<name>; BIOVIT_UPDATE_GOLDEN=1 rewrites it.
void expect_golden(const std::string& name, const std::string& actual) {
  const auto path = std::filesystem::path(BIOVIT_GOLDEN_DIR) / name;
  if (std::getenv("BIOVIT_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(actual, read_file(path)) << "golden mismatch: " << name;
}

std::vector<efga::EfgaRecord> published_records() {
  std::vector<efga::EfgaRecord> out;
  for (const auto& row : fixtures::published_cohort()) out.push_back(efga::make_record(row.id, row.mo, row.mape));
  return out;
}

void expect_close_12(const nlohmann::json& j, double want) {
  ASSERT_TRUE(j.is_number());
  const double got = j.get<double>();
  EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST(Pipeline, ConfigValidation) {
  PipelineConfig c;
  EXPECT_NO_THROW(c.validate());
  c.models.clear();
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.efga_threshold = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Pipeline, PublishedRecordsTables) {
  std::vector<std::string> warnings;
  const auto section = efga_section(published_records(), PipelineConfig{}, warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_EQ(section.retained.size(), 14u);
  EXPECT_EQ(section.declined.size(), 4u);
  EXPECT_EQ(section.retention_rate, 77.8);
  ASSERT_TRUE(section.tests.retained.has_value());
  EXPECT_NEAR(section.tests.retained->bound, 23.13, 5e-3);
  expect_golden("published_efga.md", render_efga_markdown(section));
}

TEST(Pipeline, FixtureGoldenFiles) {
  const auto report = analyze_sessions(fixture_cohort(), PipelineConfig{});
  expect_golden("fixture_report.md", render_markdown(report));
  expect_golden("fixture_report.json", render_json(report));
  for (const auto& [name, text] : render_csv(report)) expect_golden("fixture_" + name, text);
}

TEST(Pipeline, EmptyCohortRendersHeadersOnly) {
  const auto report = analyze_sessions({}, PipelineConfig{});
  EXPECT_TRUE(report.table2.empty());
  EXPECT_TRUE(report.efga.retained.empty());
  const auto md = render_markdown(report);
  EXPECT_NE(md.find("| Variable | Average | Std. Dev. | Observations | A² | P-value |"), std::string::npos);
  EXPECT_NE(md.find("Table 8"), std::string::npos);
  // every table line is a header or its separator
  std::size_t table_lines = 0, separators = 0;
  for (std::size_t pos = 0; pos < md.size();) {
    const auto end = md.find('\n', pos);
    const auto line = md.substr(pos, end - pos);
    table_lines += line.starts_with("| ");
    separators += line.starts_with("|---");
    pos = end == std::string::npos ? md.size() : end + 1;
  }
  EXPECT_GT(separators, 0u);
  EXPECT_EQ(table_lines, separators);
  const auto j = nlohmann::json::parse(render_json(report));
  EXPECT_TRUE(j.at("table2").empty());
  for (const auto& [name, text] : render_csv(report)) {
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1) << name;
  }
}

TEST(Pipeline, JsonKeepsTwelveSignificantDigits) {
  const auto report = analyze_sessions(fixture_cohort(), PipelineConfig{});
  const auto j = nlohmann::json::parse(render_json(report));
  ASSERT_EQ(j.at("table2").size(), report.table2.size());
  for (std::size_t i = 0; i < report.table2.size(); ++i) {
    expect_close_12(j["table2"][i]["mean"], report.table2[i].mean);
    expect_close_12(j["table2"][i]["std_dev"], report.table2[i].std_dev);
    expect_close_12(j["table2"][i]["statistic"], report.table2[i].ad->statistic);
    expect_close_12(j["table2"][i]["p_value"], report.table2[i].ad->p_value);
  }
  for (std::size_t i = 0; i < report.table4.size(); ++i) {
    expect_close_12(j["table4"][i]["accuracy"]["mape"], report.table4[i].accuracy->mape);
    expect_close_12(j["table4"][i]["accuracy"]["msd"], report.table4[i].accuracy->msd);
  }
  expect_close_12(j["efga"]["validation"]["pearson_r"], report.efga.validation->pearson_r);
}

TEST(Pipeline, Deterministic) {
  const auto a = analyze_sessions(fixture_cohort(), PipelineConfig{});
  const auto b = analyze_sessions(fixture_cohort(), PipelineConfig{});
  EXPECT_EQ(render_json(a), render_json(b));
  EXPECT_EQ(render_markdown(a), render_markdown(b));
}

TEST(Pipeline, BandsAndGroupsAgree) {
  const auto report = analyze_sessions(fixture_cohort(), PipelineConfig{});
  for (const auto& row : report.table4) {
    ASSERT_TRUE(row.mo && row.band);
    EXPECT_EQ(*row.band, session::classify_band(*row.mo));
  }
  for (const auto& r : report.efga.retained) {
    EXPECT_GE(r.efga, 1.0);
    EXPECT_EQ(r.band, session::classify_band(r.mo));
  }
  for (const auto& r : report.efga.declined) EXPECT_LT(r.efga, 1.0);
  EXPECT_EQ(report.efga.retained.size() + report.efga.declined.size(), report.table4.size());
}

TEST(Pipeline, ModelSubsetFeedsEfga) {
  PipelineConfig config;
  config.models = {trend::TrendModelKind::Linear};
  const auto report = analyze_sessions(fixture_cohort(), config);
  for (const auto& row : report.table4) {
    ASSERT_TRUE(row.model.has_value());
    EXPECT_EQ(*row.model, trend::TrendModelKind::Linear);
    EXPECT_FALSE(row.shape.has_value());
  }
}

TEST(Pipeline, ConstantSessionDegradesGracefully) {
  std::vector<session::AttentionSample> samples;
  for (std::size_t i = 0; i < 30; ++i) samples.push_back({i + 1, static_cast<double>(i), 50.0, {}, {}});
  auto cohort = fixture_cohort();
  cohort.emplace_back("FLAT", samples);
  const auto report = analyze_sessions(cohort, PipelineConfig{});
  ASSERT_EQ(report.table2.size(), 5u);
  EXPECT_FALSE(report.table2.back().ad.has_value());
  EXPECT_FALSE(report.table2.back().error.empty());
  // a perfect fit has MAPE 0, so EFGA is undefined for this row
  EXPECT_FALSE(report.warnings.empty());
  EXPECT_EQ(report.efga.retained.size() + report.efga.declined.size(), 4u);
}

TEST(Pipeline, SyntheticCohortRunsEndToEnd) {
  std::vector<synth::SynthSpec> specs;
  for (int i = 0; i < 18; ++i) {
    synth::SynthSpec s;
    s.n_samples = 600;
    s.coefficients = {80.0 - 3.5 * i, 0.01 * (i % 5 - 2), -1e-5 * (i % 3)};
    s.noise_sd = 2.0 + 1.5 * i;
    s.clamp = true;
    s.quantize = true;
    s.seed = 2024;
    specs.push_back(s);
  }
  const auto report = analyze_sessions(synth::generate_cohort(specs), PipelineConfig{});
  EXPECT_EQ(report.table4.size(), 18u);
  EXPECT_EQ(report.efga.retained.size() + report.efga.declined.size(), 18u);
  EXPECT_FALSE(report.efga.retained.empty());
  EXPECT_FALSE(report.efga.declined.empty());
  EXPECT_TRUE(report.efga.validation.has_value());
}

TEST(Pipeline, LoadSessionFromCapture) {
  const auto dir = std::filesystem::temp_directory_path() / "biovit_pipeline_capture";
  std::filesystem::create_directories(dir);
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < 20; ++i) {
    protocol::DataPacket p;
    p.attention = static_cast<std::uint8_t>(40 + i);
    const auto f = protocol::encode_packet(p);
    bytes.insert(bytes.end(), f.begin(), f.end());
  }
  bytes[5] ^= 0x40;  // corrupt the first frame
  const auto path = dir / "CAP01.bin";
  std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                              static_cast<std::streamsize>(bytes.size()));
  std::size_t errors = 0;
  const auto s = load_session(path.string(), InputFormat::Capture, &errors);
  EXPECT_EQ(s.participant_id(), "CAP01");
  EXPECT_EQ(s.size(), 19u);
  EXPECT_EQ(errors, 1u);
  EXPECT_THROW(load_session((dir / "missing.csv").string(), InputFormat::Csv), Error);
}

TEST(Pipeline, FormatFixed) {
  EXPECT_EQ(format_fixed(-0.001, 2), "0.00");
  EXPECT_EQ(format_fixed(2.345, 1), "2.3");
  EXPECT_EQ(format_fixed(-1.5, 0), "-2");
}
