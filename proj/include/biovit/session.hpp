#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biovit/error.hpp"
#include "biovit/protocol.hpp"

namespace biovit::session {

// eSense performance bands: 1-39 low, 40-60 normal, 61-100 superior.
enum class EsenseBand { Low, Normal, Superior };

std::string_view to_string(EsenseBand band);

// Score 0 ("no reliable signal" on the headset) maps to Low.
// Throws biovit::Error outside [0, 100].
EsenseBand classify_band(double score);

struct AttentionSample {
  std::size_t t = 1;      // 1-based sample index, the trend regressor
  double seconds = 0.0;   // offset from session start
  double attention = 0.0;
  std::optional<double> meditation;
  std::optional<double> poor_signal;

  bool operator==(const AttentionSample&) const = default;
};

// Immutable per-participant series. The constructor enforces the sample
// invariants: attention in [0,100], t == 1..N, seconds >= 0 and nondecreasing.
class AttentionSession {
 public:
  AttentionSession() = default;
  AttentionSession(std::string participant_id, std::vector<AttentionSample> samples,
                   std::optional<double> duration_seconds = std::nullopt,
                   std::size_t clamped_count = 0);

  const std::string& participant_id() const { return participant_id_; }
  std::span<const AttentionSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_seconds() const { return duration_seconds_; }
  // Number of synthetic values clipped into [0,100] at generation time.
  std::size_t clamped_count() const { return clamped_count_; }

  std::vector<double> attention_values() const;

  bool operator==(const AttentionSession&) const = default;

 private:
  std::string participant_id_;
  std::vector<AttentionSample> samples_;
  double duration_seconds_ = 0.0;
  std::size_t clamped_count_ = 0;
};

// Renders a duration in the minutes.seconds notation used by the session
// reports: 337 s -> "5.37", 180 s -> "3.00".
std::string format_duration(double seconds);

// Inverse of format_duration ("5.37" -> 337). Throws on seconds >= 60.
double parse_duration(std::string_view notation);

class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Header: t,seconds,attention[,meditation][,poor_signal]. Optional cells may
// be empty. Duration defaults to the last sample's offset.
AttentionSession ingest_csv(std::string_view text, std::string participant_id = {});

// Optional columns are written only when at least one sample carries them.
std::string export_csv(const AttentionSession& session);

// One sample per attention-bearing packet, values copied bit-exactly.
AttentionSession from_packets(std::span<const protocol::DataPacket> packets,
                              std::string participant_id = {});

}  // namespace biovit::session
