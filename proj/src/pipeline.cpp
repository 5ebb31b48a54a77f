#include "biovit/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "biovit/protocol.hpp"

namespace biovit::pipeline {

void PipelineConfig::validate() const {
  if (!(efga_threshold > 0.0)) throw Error("EFGA threshold must be > 0");
  if (models.empty()) throw Error("at least one trend model must be enabled");
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, p);
  // Avoid "-0.00" after rounding.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

namespace {

std::string read_file(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

session::AttentionSession load_session(const std::string& path, InputFormat format, std::size_t* frame_errors) {
  const std::string id = std::filesystem::path(path).stem().string();
  if (format == InputFormat::Csv) {
    try {
      return session::ingest_csv(read_file(path, false), id);
    } catch (const session::CsvError& e) {
      throw Error(path + ": " + e.what());
    }
  }
  const std::string bytes = read_file(path, true);
  const auto decoded = protocol::decode_stream(
      std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  if (frame_errors != nullptr) *frame_errors = decoded.errors.size();
  return session::from_packets(decoded.packets, id);
}

EfgaSection efga_section(const std::vector<efga::EfgaRecord>& records, const PipelineConfig& config,
                         std::vector<std::string>& warnings) {
  EfgaSection s;
  if (records.empty()) return s;
  auto split = efga::split_groups(records, config.efga_threshold);
  s.retained = std::move(split.retained);
  s.declined = std::move(split.declined);
  s.retention_rate = efga::retention_rate(records, config.efga_threshold);
  try {
    s.validation = efga::validate_scale(records, config.validation_first, config.validation_second);
  } catch (const Error& e) {
    s.validation_error = e.what();
    warnings.push_back(std::string("scale validation: ") + e.what());
  }
  s.tests = efga::group_tests({s.retained, s.declined});
  return s;
}

TestReport analyze_sessions(const std::vector<session::AttentionSession>& sessions, const PipelineConfig& config) {
  config.validate();
  TestReport report;
  std::set<std::string> ids;
  for (const auto& s : sessions) {
    if (!ids.insert(s.participant_id()).second) throw Error("duplicate participant id: " + s.participant_id());
  }
  const bool use_quadratic = std::find(config.models.begin(), config.models.end(), trend::TrendModelKind::Quadratic) !=
                             config.models.end();

  efga::EfgaOptions efga_options;
  efga_options.threshold = config.efga_threshold;
  efga_options.times_100 = config.efga_x100;
  std::vector<efga::EfgaRecord> records;

  for (const auto& s : sessions) {
    const auto& id = s.participant_id();
    const auto values = s.attention_values();

    NormalityRow norm;
    norm.participant_id = id;
    norm.n = values.size();
    DescriptiveRow desc;
    desc.participant_id = id;
    GrowthRow growth;
    growth.participant_id = id;
    growth.duration_seconds = s.duration_seconds();

    // normality screen
    try {
      const auto d = stats::descriptives(values);
      norm.mean = d.mean;
      norm.std_dev = d.std_dev;
      norm.ad = stats::anderson_darling(values);
    } catch (const Error& e) {
      norm.error = e.what();
      report.warnings.push_back(id + ": normality: " + e.what());
    }

    // descriptives
    try {
      desc.d = stats::descriptives(values);
      growth.mo = desc.d->mode;
      growth.band = session::classify_band(desc.d->mode);
    } catch (const Error& e) {
      desc.error = e.what();
      report.warnings.push_back(id + ": descriptives: " + e.what());
    }

    // trend selection
    try {
      const auto sel = trend::select_model(values, config.models);
      growth.best = sel.best;
      for (const auto& f : sel.fits) growth.scores.push_back({f.kind, f.accuracy});
      growth.skipped = sel.skipped;
      for (const auto& sk : sel.skipped) {
        report.warnings.push_back(id + ": " + std::string(trend::to_string(sk.kind)) + " skipped: " + sk.reason);
      }
      const trend::TrendFit* used = use_quadratic ? sel.find(trend::TrendModelKind::Quadratic) : &sel.best_fit();
      if (used == nullptr) throw Error("quadratic model could not be fitted");
      growth.model = used->kind;
      growth.accuracy = used->accuracy;
      growth.equation = trend::format_equation(*used);
      growth.equation_full = trend::format_equation_full(*used);
      if (used->kind == trend::TrendModelKind::Quadratic) growth.shape = trend::classify_shape(*used);
    } catch (const Error& e) {
      growth.error = e.what();
      report.warnings.push_back(id + ": trend: " + e.what());
    }

    // EFGA record
    if (growth.mo && growth.accuracy) {
      try {
        records.push_back(efga::make_record(id, *growth.mo, growth.accuracy->mape, efga_options));
      } catch (const Error& e) {
        report.warnings.push_back(id + ": EFGA: " + e.what());
      }
    }

    report.table2.push_back(std::move(norm));
    report.table3.push_back(std::move(desc));
    report.table4.push_back(std::move(growth));
  }

  report.efga = efga_section(records, config, report.warnings);
  return report;
}

TestReport run_pipeline(const PipelineConfig& config) {
  config.validate();
  if (config.input_paths.empty()) throw Error("no input files");
  std::vector<session::AttentionSession> sessions;
  std::vector<std::string> load_warnings;
  for (const auto& path : config.input_paths) {
    std::size_t frame_errors = 0;
    sessions.push_back(load_session(path, config.input_format, &frame_errors));
    if (frame_errors > 0) {
      load_warnings.push_back(sessions.back().participant_id() + ": " + std::to_string(frame_errors) +
                              " malformed frame(s) skipped");
    }
  }
  if (sessions.empty()) throw Error("no valid sessions");
  auto report = analyze_sessions(sessions, config);
  report.warnings.insert(report.warnings.begin(), load_warnings.begin(), load_warnings.end());
  return report;
}

}  // namespace biovit::pipeline
