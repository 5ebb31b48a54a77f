#include "biovit/session.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace biovit::session {

std::string_view to_string(EsenseBand band) {
  switch (band) {
    case EsenseBand::Low: return "Low";
    case EsenseBand::Normal: return "Normal";
    case EsenseBand::Superior: return "Superior";
  }
  return "?";
}

EsenseBand classify_band(double score) {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw Error("eSense score out of range [0,100]: " + std::to_string(score));
  }
  if (score < 40.0) return EsenseBand::Low;
  if (score <= 60.0) return EsenseBand::Normal;
  return EsenseBand::Superior;
}

AttentionSession::AttentionSession(std::string participant_id, std::vector<AttentionSample> samples,
                                   std::optional<double> duration_seconds, std::size_t clamped_count)
    : participant_id_(std::move(participant_id)), samples_(std::move(samples)), clamped_count_(clamped_count) {
  double prev = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.t != i + 1) {
      throw Error("sample " + std::to_string(i + 1) + " has t=" + std::to_string(s.t) + ", expected contiguous 1..N");
    }
    if (!(s.attention >= 0.0 && s.attention <= 100.0)) {
      throw Error("sample " + std::to_string(s.t) + " attention out of range [0,100]");
    }
    if (s.meditation && !(*s.meditation >= 0.0 && *s.meditation <= 100.0)) {
      throw Error("sample " + std::to_string(s.t) + " meditation out of range [0,100]");
    }
    if (s.poor_signal && !(*s.poor_signal >= 0.0 && *s.poor_signal <= 200.0)) {
      throw Error("sample " + std::to_string(s.t) + " poor_signal out of range [0,200]");
    }
    if (!(s.seconds >= prev) || !std::isfinite(s.seconds)) {
      throw Error("sample " + std::to_string(s.t) + " seconds must be finite, >= 0 and nondecreasing");
    }
    prev = s.seconds;
  }
  const double last = samples_.empty() ? 0.0 : samples_.back().seconds;
  duration_seconds_ = duration_seconds.value_or(last);
  if (!(duration_seconds_ >= last)) {
    throw Error("session duration is shorter than its last sample offset");
  }
}

std::vector<double> AttentionSession::attention_values() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.attention);
  return out;
}

std::string format_duration(double seconds) {
  const auto total = static_cast<long long>(std::llround(seconds));
  const long long minutes = total / 60;
  const long long rest = total % 60;
  std::string out = std::to_string(minutes) + ".";
  if (rest < 10) out += '0';
  out += std::to_string(rest);
  return out;
}

double parse_duration(std::string_view notation) {
  const auto dot = notation.find('.');
  long long minutes = 0;
  long long secs = 0;
  auto parse_int = [](std::string_view s, long long& v) {
    if (s.empty()) return false;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size() && v >= 0;
  };
  if (!parse_int(notation.substr(0, dot), minutes)) throw Error("bad duration: " + std::string(notation));
  if (dot != std::string_view::npos) {
    auto frac = notation.substr(dot + 1);
    if (frac.size() == 1) {
      // "3.5" reads as 3 min 50 s in this notation
      if (!parse_int(frac, secs)) throw Error("bad duration: " + std::string(notation));
      secs *= 10;
    } else if (frac.size() != 2 || !parse_int(frac, secs)) {
      throw Error("bad duration: " + std::string(notation));
    }
  }
  if (secs >= 60) throw Error("duration seconds field must be < 60: " + std::string(notation));
  return static_cast<double>(minutes * 60 + secs);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line, const char* column) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || p != field.data() + field.size() || !std::isfinite(v)) {
    throw CsvError(line, std::string("column '") + column + "' is not a number: '" + std::string(field) + "'");
  }
  return v;
}

void append_shortest(std::string& out, double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

void append_seconds(std::string& out, double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  std::string_view s(buf, static_cast<std::size_t>(p - buf));
  while (s.back() == '0') s.remove_suffix(1);
  if (s.back() == '.') s.remove_suffix(1);
  out.append(s);
}

}  // namespace

AttentionSession ingest_csv(std::string_view text, std::string participant_id) {
  enum Column { T, Seconds, Attention, Meditation, PoorSignal };
  std::vector<Column> columns;
  std::vector<AttentionSample> samples;

  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (!have_header) {
      static constexpr std::string_view kNames[] = {"t", "seconds", "attention", "meditation", "poor_signal"};
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = trim(fields[i]);
        std::size_t idx = 0;
        while (idx < 5 && kNames[idx] != name) ++idx;
        if (idx == 5) throw CsvError(line_no, "unknown column '" + std::string(name) + "'");
        if (i < 3 ? idx != i : (idx < 3 || (!columns.empty() && idx <= static_cast<std::size_t>(columns.back())))) {
          throw CsvError(line_no, "header must be t,seconds,attention[,meditation][,poor_signal]");
        }
        columns.push_back(static_cast<Column>(idx));
      }
      if (columns.size() < 3) throw CsvError(line_no, "header must be t,seconds,attention[,meditation][,poor_signal]");
      have_header = true;
      continue;
    }

    if (fields.size() != columns.size()) {
      throw CsvError(line_no, "expected " + std::to_string(columns.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    AttentionSample s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto f = trim(fields[i]);
      switch (columns[i]) {
        case T: {
          const double t = parse_number(f, line_no, "t");
          if (t != std::floor(t) || t < 1.0) throw CsvError(line_no, "t must be a positive integer");
          if (static_cast<std::size_t>(t) != samples.size() + 1) {
            throw CsvError(line_no, "t is not contiguous: expected " + std::to_string(samples.size() + 1));
          }
          s.t = static_cast<std::size_t>(t);
          break;
        }
        case Seconds:
          s.seconds = parse_number(f, line_no, "seconds");
          if (s.seconds < 0.0 || (!samples.empty() && s.seconds < samples.back().seconds)) {
            throw CsvError(line_no, "seconds must be >= 0 and nondecreasing");
          }
          break;
        case Attention:
          s.attention = parse_number(f, line_no, "attention");
          if (s.attention < 0.0 || s.attention > 100.0) throw CsvError(line_no, "attention out of range [0,100]");
          break;
        case Meditation:
          if (!f.empty()) {
            s.meditation = parse_number(f, line_no, "meditation");
            if (*s.meditation < 0.0 || *s.meditation > 100.0) {
              throw CsvError(line_no, "meditation out of range [0,100]");
            }
          }
          break;
        case PoorSignal:
          if (!f.empty()) {
            s.poor_signal = parse_number(f, line_no, "poor_signal");
            if (*s.poor_signal < 0.0 || *s.poor_signal > 200.0) {
              throw CsvError(line_no, "poor_signal out of range [0,200]");
            }
          }
          break;
      }
    }
    samples.push_back(s);
  }
  if (!have_header) throw CsvError(line_no == 0 ? 1 : line_no, "missing header row");
  return AttentionSession(std::move(participant_id), std::move(samples));
}

std::string export_csv(const AttentionSession& session) {
  bool has_meditation = false;
  bool has_poor_signal = false;
  for (const auto& s : session.samples()) {
    has_meditation = has_meditation || s.meditation.has_value();
    has_poor_signal = has_poor_signal || s.poor_signal.has_value();
  }

  std::string out = "t,seconds,attention";
  if (has_meditation) out += ",meditation";
  if (has_poor_signal) out += ",poor_signal";
  out += '\n';
  out.reserve(out.size() + session.size() * 24);

  for (const auto& s : session.samples()) {
    out += std::to_string(s.t);
    out += ',';
    append_seconds(out, s.seconds);
    out += ',';
    append_shortest(out, s.attention);
    if (has_meditation) {
      out += ',';
      if (s.meditation) append_shortest(out, *s.meditation);
    }
    if (has_poor_signal) {
      out += ',';
      if (s.poor_signal) append_shortest(out, *s.poor_signal);
    }
    out += '\n';
  }
  return out;
}

AttentionSession from_packets(std::span<const protocol::DataPacket> packets, std::string participant_id) {
  std::vector<AttentionSample> samples;
  for (const auto& p : packets) {
    if (!p.attention) continue;
    AttentionSample s;
    s.t = samples.size() + 1;
    s.seconds = p.timestamp_offset;
    s.attention = *p.attention;
    if (p.meditation) s.meditation = *p.meditation;
    if (p.poor_signal) s.poor_signal = *p.poor_signal;
    samples.push_back(s);
  }
  if (samples.empty()) throw Error("empty session: no attention-bearing packets");
  return AttentionSession(std::move(participant_id), std::move(samples));
}

}  // namespace biovit::session
