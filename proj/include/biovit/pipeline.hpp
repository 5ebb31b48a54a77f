#pragma once

// Cohort pipeline: normality screen, descriptives, trend selection, EFGA,
// grouping, group tests. Each stage is row-wise independent; a participant
// that fails a stage keeps its row with an error and the cohort carries on.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biovit/efga.hpp"
#include "biovit/session.hpp"
#include "biovit/stats.hpp"
#include "biovit/trend.hpp"

namespace biovit::pipeline {

enum class InputFormat { Csv, Capture };
enum class OutputFormat { Markdown, Csv, Json };

struct PipelineConfig {
  std::vector<std::string> input_paths;
  InputFormat input_format = InputFormat::Csv;
  std::vector<trend::TrendModelKind> models{std::begin(trend::kAllModels), std::end(trend::kAllModels)};
  double efga_threshold = efga::kDefaultThreshold;
  bool efga_x100 = false;
  OutputFormat output_format = OutputFormat::Markdown;
  efga::Item validation_first = efga::Item::Mo;
  efga::Item validation_second = efga::Item::Efga;

  void validate() const;
};

struct NormalityRow {
  std::string participant_id;
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  std::optional<stats::AdResult> ad;
  std::string error;
};

struct DescriptiveRow {
  std::string participant_id;
  std::optional<stats::Descriptives> d;
  std::string error;
};

struct ModelScore {
  trend::TrendModelKind kind;
  trend::AccuracyMeasures accuracy;
};

// One per participant: Table 4 growth measures plus the trend equation.
struct GrowthRow {
  std::string participant_id;
  std::optional<double> mo;
  std::optional<trend::TrendModelKind> model;  // model feeding MAPE/EFGA
  std::optional<trend::AccuracyMeasures> accuracy;
  double duration_seconds = 0.0;
  std::optional<trend::TrendModelKind> best;  // lowest-MAPE candidate
  std::vector<ModelScore> scores;
  std::vector<trend::SkippedModel> skipped;
  std::string equation;       // rounded 3/6/6
  std::string equation_full;  // full precision
  std::optional<trend::QuadraticShape> shape;
  std::optional<session::EsenseBand> band;
  std::string error;
};

struct EfgaSection {
  std::vector<efga::EfgaRecord> retained;
  std::vector<efga::EfgaRecord> declined;
  std::optional<double> retention_rate;
  std::optional<efga::ValidationReport> validation;
  std::string validation_error;
  efga::GroupTests tests;
};

struct TestReport {
  std::vector<NormalityRow> table2;
  std::vector<DescriptiveRow> table3;
  std::vector<GrowthRow> table4;  // also carries the per-participant trend section
  EfgaSection efga;
  std::vector<std::string> warnings;
};

// Tables 5-8 and the scale validation from ready-made records.
EfgaSection efga_section(const std::vector<efga::EfgaRecord>& records, const PipelineConfig& config,
                         std::vector<std::string>& warnings);

TestReport analyze_sessions(const std::vector<session::AttentionSession>& sessions, const PipelineConfig& config);

// Loads every input (CSV or binary capture) and analyzes the cohort. Throws
// biovit::Error on unreadable files or when no session loads.
TestReport run_pipeline(const PipelineConfig& config);

// Session from a file; the participant id is the file stem.
session::AttentionSession load_session(const std::string& path, InputFormat format,
                                       std::size_t* frame_errors = nullptr);

std::string render_markdown(const TestReport& report);
// Tables 5-8 plus the scale validation, as embedded in render_markdown.
std::string render_efga_markdown(const EfgaSection& section);
std::string render_json(const TestReport& report);
// (file name, contents) per table.
std::vector<std::pair<std::string, std::string>> render_csv(const TestReport& report);

std::string format_fixed(double v, int decimals);

}  // namespace biovit::pipeline
