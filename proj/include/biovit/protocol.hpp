#pragma once

// Codec for the ThinkGear-style serial stream emitted by single-electrode
// EEG headsets.
//
// Frame layout:
//
//   0xAA 0xAA <plength> <payload: plength bytes> <checksum>
//
// plength is at most 169. The checksum is the bitwise inverse of the low
// eight bits of the payload byte sum. The payload is a sequence of rows; each
// row is an optional run of 0x55 extended-code bytes, a code byte, and a
// value. Codes below 0x80 carry a single value byte; codes at or above 0x80
// carry a length byte followed by that many value bytes.
//
// Rows understood here:
//   0x02  poor signal quality (0..200)
//   0x04  attention eSense (0..100)
//   0x05  meditation eSense (0..100)
//   0x80  raw wave sample, 2 bytes, big-endian signed
// Everything else is skipped.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace biovit::protocol {

inline constexpr std::uint8_t kSync = 0xAA;
inline constexpr std::uint8_t kExtendedCode = 0x55;
inline constexpr std::size_t kMaxPayload = 169;
inline constexpr std::size_t kMaxFrameSize = 2 + 1 + kMaxPayload + 1;

inline constexpr std::uint8_t kCodePoorSignal = 0x02;
inline constexpr std::uint8_t kCodeAttention = 0x04;
inline constexpr std::uint8_t kCodeMeditation = 0x05;
inline constexpr std::uint8_t kCodeRawWave = 0x80;

// Headset constants. The RF rows of the datasheet are documentation only.
struct DeviceSpec {
  unsigned baud_rate = 57600;
  unsigned raw_sample_rate_hz = 512;
  unsigned esense_rate_hz = 1;
  unsigned adc_bits = 12;
  double filter_low_hz = 3.0;
  double filter_high_hz = 100.0;
  double max_packet_loss = 0.05;

  // Throws biovit::Error when the fixed constants or the filter band are off.
  void validate() const;
};

DeviceSpec default_device();

struct DataPacket {
  std::optional<std::uint8_t> poor_signal;
  std::optional<std::uint8_t> attention;
  std::optional<std::uint8_t> meditation;
  std::vector<std::int16_t> raw_samples;
  // Not carried on the wire; assigned by the decoder from the 1 Hz eSense
  // cadence.
  double timestamp_offset = 0.0;

  bool operator==(const DataPacket&) const = default;
};

// True when every field satisfies the packet invariants.
bool is_valid(const DataPacket& packet);

enum class FrameErrorKind {
  BadSync,
  LengthOutOfRange,
  ChecksumMismatch,
  // A row that cannot be interpreted: overruns the payload, or carries a
  // known code with a malformed or out-of-range value.
  UnknownRowCode,
  Truncated,
};

std::string_view to_string(FrameErrorKind kind);

struct FrameError {
  FrameErrorKind kind;
  std::size_t byte_offset;

  bool operator==(const FrameError&) const = default;
};

struct DecodeResult {
  std::vector<DataPacket> packets;
  std::vector<FrameError> errors;
};

// Incremental single-pass decoder. Holds at most one frame's worth of bytes
// between feed() calls.
class StreamDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes, DecodeResult& out);
  // Reports a trailing partial frame, if any, as Truncated.
  void finish(DecodeResult& out);

 private:
  enum class State { Sync1, Sync2, Length, Payload, Checksum };

  void on_frame(DecodeResult& out);
  void note_junk(std::size_t offset, DecodeResult& out);

  State state_ = State::Sync1;
  std::size_t offset_ = 0;        // absolute position of the next input byte
  std::size_t frame_start_ = 0;   // offset of the first sync byte of the frame
  std::size_t payload_len_ = 0;
  std::uint8_t payload_[kMaxPayload] = {};
  std::size_t payload_fill_ = 0;
  bool in_junk_ = false;
  std::size_t attention_frames_ = 0;
};

// Decodes a complete capture. Never throws on malformed input.
DecodeResult decode_stream(std::span<const std::uint8_t> bytes);

// Throws biovit::Error if the packet is invalid or its payload would exceed
// kMaxPayload bytes.
std::vector<std::uint8_t> encode_packet(const DataPacket& packet);

}  // namespace biovit::protocol
