#include "biovit/protocol.hpp"

#include <limits>
#include <string>

#include "biovit/error.hpp"

namespace biovit::protocol {

void DeviceSpec::validate() const {
  if (baud_rate != 57600 || raw_sample_rate_hz != 512 || esense_rate_hz != 1 || adc_bits != 12) {
    throw Error("device constants do not match the supported headset");
  }
  const double nyquist = raw_sample_rate_hz / 2.0;
  if (!(filter_low_hz > 0.0 && filter_low_hz < filter_high_hz && filter_high_hz <= nyquist)) {
    throw Error("hardware filter band must satisfy 0 < low < high <= raw_sample_rate/2");
  }
  if (!(max_packet_loss >= 0.0 && max_packet_loss <= 1.0)) {
    throw Error("max_packet_loss must be a fraction");
  }
}

DeviceSpec default_device() {
  DeviceSpec spec;
  spec.validate();
  return spec;
}

bool is_valid(const DataPacket& packet) {
  if (packet.poor_signal && *packet.poor_signal > 200) return false;
  if (packet.attention && *packet.attention > 100) return false;
  if (packet.meditation && *packet.meditation > 100) return false;
  for (const std::int16_t s : packet.raw_samples) {
    if (s == std::numeric_limits<std::int16_t>::min()) return false;
  }
  return true;
}

std::string_view to_string(FrameErrorKind kind) {
  switch (kind) {
    case FrameErrorKind::BadSync: return "BadSync";
    case FrameErrorKind::LengthOutOfRange: return "LengthOutOfRange";
    case FrameErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case FrameErrorKind::UnknownRowCode: return "UnknownRowCode";
    case FrameErrorKind::Truncated: return "Truncated";
  }
  return "?";
}

namespace {

std::uint8_t checksum_of(std::span<const std::uint8_t> payload) {
  unsigned sum = 0;
  for (const std::uint8_t b : payload) sum += b;
  return static_cast<std::uint8_t>(~sum & 0xFFu);
}

// Returns false when a row cannot be interpreted.
bool parse_rows(std::span<const std::uint8_t> payload, DataPacket& packet) {
  std::size_t i = 0;
  while (i < payload.size()) {
    int excode = 0;
    while (i < payload.size() && payload[i] == kExtendedCode) {
      ++excode;
      ++i;
    }
    if (i >= payload.size()) return false;
    const std::uint8_t code = payload[i++];

    std::size_t vlen = 1;
    if (code >= 0x80) {
      if (i >= payload.size()) return false;
      vlen = payload[i++];
    }
    if (vlen > payload.size() - i) return false;
    const auto value = payload.subspan(i, vlen);
    i += vlen;

    if (excode != 0) continue;
    switch (code) {
      case kCodePoorSignal:
        if (value[0] > 200) return false;
        packet.poor_signal = value[0];
        break;
      case kCodeAttention:
        if (value[0] > 100) return false;
        packet.attention = value[0];
        break;
      case kCodeMeditation:
        if (value[0] > 100) return false;
        packet.meditation = value[0];
        break;
      case kCodeRawWave: {
        if (vlen != 2) return false;
        const auto raw = static_cast<std::int16_t>(static_cast<std::uint16_t>((value[0] << 8) | value[1]));
        if (raw == std::numeric_limits<std::int16_t>::min()) return false;
        packet.raw_samples.push_back(raw);
        break;
      }
      default:
        break;
    }
  }
  return true;
}

}  // namespace

void StreamDecoder::note_junk(std::size_t offset, DecodeResult& out) {
  if (!in_junk_) {
    out.errors.push_back({FrameErrorKind::BadSync, offset});
    in_junk_ = true;
  }
}

void StreamDecoder::on_frame(DecodeResult& out) {
  const std::span<const std::uint8_t> payload(payload_, payload_len_);
  DataPacket packet;
  if (!parse_rows(payload, packet)) {
    out.errors.push_back({FrameErrorKind::UnknownRowCode, frame_start_});
    return;
  }
  if (packet.attention) {
    packet.timestamp_offset = static_cast<double>(attention_frames_);
    ++attention_frames_;
  } else if (attention_frames_ > 0) {
    packet.timestamp_offset = static_cast<double>(attention_frames_ - 1);
  }
  out.packets.push_back(std::move(packet));
}

void StreamDecoder::feed(std::span<const std::uint8_t> bytes, DecodeResult& out) {
  for (const std::uint8_t b : bytes) {
    const std::size_t pos = offset_++;
    switch (state_) {
      case State::Sync1:
        if (b == kSync) {
          frame_start_ = pos;
          state_ = State::Sync2;
        } else {
          note_junk(pos, out);
        }
        break;
      case State::Sync2:
        if (b == kSync) {
          state_ = State::Length;
        } else {
          note_junk(frame_start_, out);
          state_ = State::Sync1;
        }
        break;
      case State::Length:
        if (b == kSync) {
          // Runs of more than two sync bytes are allowed; the frame starts at
          // the last pair.
          frame_start_ = pos - 1;
          break;
        }
        in_junk_ = false;
        if (b > kMaxPayload) {
          out.errors.push_back({FrameErrorKind::LengthOutOfRange, frame_start_});
          state_ = State::Sync1;
          break;
        }
        payload_len_ = b;
        payload_fill_ = 0;
        state_ = payload_len_ == 0 ? State::Checksum : State::Payload;
        break;
      case State::Payload:
        payload_[payload_fill_++] = b;
        if (payload_fill_ == payload_len_) state_ = State::Checksum;
        break;
      case State::Checksum:
        if (b != checksum_of({payload_, payload_len_})) {
          out.errors.push_back({FrameErrorKind::ChecksumMismatch, frame_start_});
        } else {
          on_frame(out);
        }
        state_ = State::Sync1;
        break;
    }
  }
}

void StreamDecoder::finish(DecodeResult& out) {
  if (state_ != State::Sync1) {
    out.errors.push_back({FrameErrorKind::Truncated, frame_start_});
  }
  state_ = State::Sync1;
  in_junk_ = false;
}

DecodeResult decode_stream(std::span<const std::uint8_t> bytes) {
  DecodeResult out;
  StreamDecoder decoder;
  decoder.feed(bytes, out);
  decoder.finish(out);
  return out;
}

std::vector<std::uint8_t> encode_packet(const DataPacket& packet) {
  if (!is_valid(packet)) throw Error("packet violates field ranges");

  std::vector<std::uint8_t> payload;
  if (packet.poor_signal) payload.insert(payload.end(), {kCodePoorSignal, *packet.poor_signal});
  if (packet.attention) payload.insert(payload.end(), {kCodeAttention, *packet.attention});
  if (packet.meditation) payload.insert(payload.end(), {kCodeMeditation, *packet.meditation});
  for (const std::int16_t s : packet.raw_samples) {
    const auto u = static_cast<std::uint16_t>(s);
    payload.insert(payload.end(), {kCodeRawWave, 0x02, static_cast<std::uint8_t>(u >> 8),
                                   static_cast<std::uint8_t>(u & 0xFF)});
  }
  if (payload.size() > kMaxPayload) {
    throw Error("packet payload of " + std::to_string(payload.size()) + " bytes exceeds the " +
                std::to_string(kMaxPayload) + "-byte frame limit");
  }

  std::vector<std::uint8_t> frame;
  frame.reserve(payload.size() + 4);
  frame.push_back(kSync);
  frame.push_back(kSync);
  frame.push_back(static_cast<std::uint8_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  frame.push_back(checksum_of(payload));
  return frame;
}

}  // namespace biovit::protocol
