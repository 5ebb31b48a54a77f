// biovit: command-line front end for the attention analytics toolkit.
//
//   biovit decode <capture> -o <csv>
//   biovit analyze <csv...> [--input-format csv|capture] [--models ...]
//                  [--efga-threshold X] [--efga-x100] [--output-format markdown|csv|json]
//                  [-o path] [--config file.ini]
//   biovit synth --spec <file> -o <dir> [--seed N]
//   biovit trend <csv> --model <kind>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>

#include "CLI11.hpp"
#include "biovit/pipeline.hpp"
#include "biovit/protocol.hpp"
#include "biovit/session.hpp"
#include "biovit/synth.hpp"
#include "biovit/trend.hpp"
#include "json.hpp"

namespace {

using namespace biovit;

bool use_color() { return std::getenv("BIOVIT_NO_COLOR") == nullptr && isatty(STDERR_FILENO) != 0; }

void warn(const std::string& msg) {
  if (use_color()) {
    std::cerr << "\033[33mwarning:\033[0m " << msg << "\n";
  } else {
    std::cerr << "warning: " << msg << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int run_decode(const std::string& capture, const std::string& out_path) {
  const std::string bytes = read_text(capture);
  const auto decoded =
      protocol::decode_stream(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  const auto id = std::filesystem::path(capture).stem().string();
  const auto session = session::from_packets(decoded.packets, id);
  write_text(out_path, session::export_csv(session));
  if (!decoded.errors.empty()) {
    warn(std::to_string(decoded.errors.size()) + " malformed frame(s) skipped; first " +
         std::string(protocol::to_string(decoded.errors.front().kind)) + " at byte " +
         std::to_string(decoded.errors.front().byte_offset));
  }
  std::cout << "decoded " << decoded.packets.size() << " packets, " << session.size() << " attention samples, "
            << decoded.errors.size() << " frame errors\n";
  return 0;
}

int run_analyze(const pipeline::PipelineConfig& config, const std::string& out_path) {
  const auto report = pipeline::run_pipeline(config);
  for (const auto& w : report.warnings) warn(w);

  switch (config.output_format) {
    case pipeline::OutputFormat::Markdown:
    case pipeline::OutputFormat::Json: {
      const auto text = config.output_format == pipeline::OutputFormat::Json ? pipeline::render_json(report)
                                                                              : pipeline::render_markdown(report);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_text(out_path, text);
      }
      break;
    }
    case pipeline::OutputFormat::Csv: {
      const auto files = pipeline::render_csv(report);
      if (out_path.empty()) {
        for (const auto& [name, text] : files) std::cout << "# " << name << "\n" << text << "\n";
      } else {
        std::filesystem::create_directories(out_path);
        for (const auto& [name, text] : files) write_text((std::filesystem::path(out_path) / name).string(), text);
      }
      break;
    }
  }
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir, const std::optional<std::uint64_t>& seed) {
  const auto doc = nlohmann::json::parse(read_text(spec_path));
  const std::uint64_t base_seed = seed.value_or(doc.value("seed", std::uint64_t{0}));
  std::vector<synth::SynthSpec> specs;
  for (const auto& p : doc.at("participants")) {
    synth::SynthSpec s;
    s.participant_id = p.value("participant_id", std::string());
    s.n_samples = p.at("n_samples").get<std::size_t>();
    const auto model = trend::parse_model_kind(p.value("model", std::string("quadratic")));
    if (!model) throw Error("unknown model in synth spec: " + p.value("model", std::string()));
    s.model = *model;
    s.coefficients = p.at("coefficients").get<std::vector<double>>();
    s.noise_sd = p.value("noise_sd", 0.0);
    s.clamp = p.value("clamp", false);
    s.quantize = p.value("quantize", false);
    s.seed = seed ? base_seed : p.value("seed", base_seed);
    specs.push_back(std::move(s));
  }
  const auto cohort = synth::generate_cohort(specs);
  std::filesystem::create_directories(out_dir);
  for (const auto& session : cohort) {
    write_text((std::filesystem::path(out_dir) / (session.participant_id() + ".csv")).string(),
               session::export_csv(session));
    if (session.clamped_count() > 0) {
      warn(session.participant_id() + ": " + std::to_string(session.clamped_count()) + " value(s) clamped to [0,100]");
    }
  }
  std::cout << "wrote " << cohort.size() << " session(s) to " << out_dir << "\n";
  return 0;
}

int run_trend(const std::string& csv, trend::TrendModelKind kind) {
  const auto session = pipeline::load_session(csv, pipeline::InputFormat::Csv);
  const auto f = trend::fit(kind, session.attention_values());
  std::cout << trend::format_equation(f) << "\n";
  std::cout << "full precision: " << trend::format_equation_full(f) << "\n";
  std::cout << "MAPE " << pipeline::format_fixed(f.accuracy.mape, 2) << "  MAD " << pipeline::format_fixed(f.accuracy.mad, 3)
            << "  MSD " << pipeline::format_fixed(f.accuracy.msd, 3) << "\n";
  if (kind == trend::TrendModelKind::Quadratic) {
    std::cout << "shape " << trend::to_string(trend::classify_shape(f)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention analytics for eSense headset sessions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI configuration file; analyze keys go under [analyze]");

  std::string capture;
  std::string decode_out;
  auto* decode = app.add_subcommand("decode", "Decode a binary capture into a session CSV");
  decode->add_option("capture", capture, "Raw frame capture")->required()->check(CLI::ExistingFile);
  decode->add_option("-o,--output", decode_out, "Output CSV")->required();

  pipeline::PipelineConfig config;
  std::string input_format = "csv";
  std::vector<std::string> models;
  std::string output_format = "markdown";
  std::string analyze_out;
  std::vector<std::string> items{"Mo", "EFGA"};
  auto* analyze = app.add_subcommand("analyze", "Run the cohort pipeline and render the report tables");
  analyze->add_option("inputs", config.input_paths, "Session files")->required();
  analyze->add_option("--input-format", input_format, "csv or capture")
      ->check(CLI::IsMember({"csv", "capture"}));
  analyze->add_option("--models", models, "Trend models to fit (linear, exponential, quadratic, scurve)")
      ->delimiter(',');
  analyze->add_option("--efga-threshold", config.efga_threshold, "EFGA cut between the two groups")
      ->check(CLI::PositiveNumber);
  analyze->add_flag("--efga-x100", config.efga_x100, "Multiply EFGA by 100");
  analyze->add_option("--output-format", output_format, "markdown, csv or json")
      ->check(CLI::IsMember({"markdown", "csv", "json"}));
  analyze->add_option("--items", items, "Scale validation item pair (Mo, MAPE, EFGA)")->delimiter(',')->expected(2);
  analyze->add_option("-o,--output", analyze_out, "Output file (directory for csv)");

  std::string spec_path;
  std::string synth_out;
  std::optional<std::uint64_t> seed;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic session CSVs from a JSON cohort spec");
  synth_cmd->add_option("--spec", spec_path, "Cohort spec (JSON)")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("-o,--output", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Override the cohort seed");

  std::string trend_csv;
  std::string trend_model = "quadratic";
  auto* trend_cmd = app.add_subcommand("trend", "Fit one trend model and print its equation");
  trend_cmd->add_option("csv", trend_csv, "Session CSV")->required()->check(CLI::ExistingFile);
  trend_cmd->add_option("--model", trend_model, "linear, exponential, quadratic or scurve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*decode) return run_decode(capture, decode_out);
    if (*analyze) {
      config.input_format = input_format == "capture" ? pipeline::InputFormat::Capture : pipeline::InputFormat::Csv;
      if (!models.empty()) {
        config.models.clear();
        for (const auto& m : models) {
          const auto kind = trend::parse_model_kind(m);
          if (!kind) throw Error("unknown model: " + m);
          config.models.push_back(*kind);
        }
      }
      config.output_format = output_format == "json"  ? pipeline::OutputFormat::Json
                             : output_format == "csv" ? pipeline::OutputFormat::Csv
                                                      : pipeline::OutputFormat::Markdown;
      auto parse_item = [](const std::string& s) {
        if (s == "Mo" || s == "mo") return efga::Item::Mo;
        if (s == "MAPE" || s == "mape") return efga::Item::Mape;
        if (s == "EFGA" || s == "efga") return efga::Item::Efga;
        throw Error("unknown validation item: " + s);
      };
      config.validation_first = parse_item(items.at(0));
      config.validation_second = parse_item(items.at(1));
      return run_analyze(config, analyze_out);
    }
    if (*synth_cmd) return run_synth(spec_path, synth_out, seed);
    if (*trend_cmd) {
      const auto kind = trend::parse_model_kind(trend_model);
      if (!kind) throw Error("unknown model: " + trend_model);
      return run_trend(trend_csv, *kind);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
