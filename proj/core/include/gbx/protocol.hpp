// Copyright 2026 The gbx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GBX_PROTOCOL_HPP_
#define GBX_PROTOCOL_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Host <-> device line protocol. Frames are ASCII, one per line, terminated
// by a single '\n'; the host keeps at most one command outstanding.
//
//   host:   SETV <mv> | SETF <khz> | RUN <seed_hex> <N> <R> | RST
//   device: OK | VAL <16 hex digits> | ERR <code>
//
// Numbers are unsigned decimal without sign or padding; hex digits may be
// either case on input and are upper case on output. A missing response
// within the host timeout is a lockup.
namespace gbx::wire {

inline constexpr std::size_t kMaxFrameBytes = 64;

struct SetVoltage {
  std::uint32_t mv;
  friend bool operator==(const SetVoltage&, const SetVoltage&) = default;
};
struct SetFrequency {
  std::uint64_t khz;
  friend bool operator==(const SetFrequency&, const SetFrequency&) = default;
};
struct Run {
  std::uint64_t seed;
  std::uint64_t n_items;
  std::uint64_t repetitions;
  friend bool operator==(const Run&, const Run&) = default;
};
// Reserved: device reset after a lockup.
struct Reset {
  friend bool operator==(const Reset&, const Reset&) = default;
};

using Command = std::variant<SetVoltage, SetFrequency, Run, Reset>;

struct Ok {
  friend bool operator==(const Ok&, const Ok&) = default;
};
struct Value {
  std::uint64_t value;
  friend bool operator==(const Value&, const Value&) = default;
};
struct DeviceError {
  std::uint32_t code;
  friend bool operator==(const DeviceError&, const DeviceError&) = default;
};

using Response = std::variant<Ok, Value, DeviceError>;

// Device error codes.
inline constexpr std::uint32_t kErrUnknownCommand = 1;
inline constexpr std::uint32_t kErrBadArgument = 2;
inline constexpr std::uint32_t kErrNotConfigured = 3;

std::string encode(const Command& command);
std::string encode(const Response& response);

// Both throw MalformedFrame carrying the byte offset of the first bad byte.
Command decode_command(std::string_view frame);
Response decode_response(std::string_view frame);

// Splits a byte stream into '\n'-terminated frames.
class LineFramer {
 public:
  // Appends bytes and returns every frame completed by them, newline
  // included. Throws MalformedFrame when a frame exceeds kMaxFrameBytes.
  std::vector<std::string> feed(std::string_view bytes);

  bool has_partial() const noexcept { return !pending_.empty(); }

 private:
  std::string pending_;
};

}  // namespace gbx::wire

#endif  // GBX_PROTOCOL_HPP_
