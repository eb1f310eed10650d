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

#include "gbx/protocol.hpp"

#include <array>
#include <limits>

#include "gbx/error.hpp"

namespace gbx::wire {
namespace {

std::string hex16(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Cursor over one frame; every failure reports the absolute byte offset.
class Reader {
 public:
  explicit Reader(std::string_view frame) : frame_(frame) {
    if (frame_.empty() || frame_.back() != '\n') {
      throw MalformedFrame(frame_.size(), "frame is not newline-terminated");
    }
    body_ = frame_.substr(0, frame_.size() - 1);
    for (std::size_t i = 0; i < body_.size(); ++i) {
      const auto c = static_cast<unsigned char>(body_[i]);
      if (c < 0x20 || c > 0x7E) throw MalformedFrame(i, "non-printable byte");
    }
  }

  std::string_view keyword() {
    const auto end = body_.find(' ', pos_);
    const auto stop = end == std::string_view::npos ? body_.size() : end;
    const auto word = body_.substr(pos_, stop - pos_);
    pos_ = stop;
    return word;
  }

  void space() {
    if (pos_ >= body_.size() || body_[pos_] != ' ') {
      throw MalformedFrame(pos_, "expected a single space");
    }
    ++pos_;
  }

  std::uint64_t decimal() {
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < body_.size() && body_[pos_] != ' ') {
      const char c = body_[pos_];
      if (c < '0' || c > '9') throw MalformedFrame(pos_, "expected a decimal digit");
      const auto digit = static_cast<std::uint64_t>(c - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
        throw MalformedFrame(pos_, "decimal overflow");
      }
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) throw MalformedFrame(start, "expected a decimal number");
    return value;
  }

  std::uint64_t hex(std::size_t min_digits, std::size_t max_digits) {
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < body_.size() && body_[pos_] != ' ') {
      const int d = hex_digit(body_[pos_]);
      if (d < 0) throw MalformedFrame(pos_, "expected a hex digit");
      if (pos_ - start == max_digits) throw MalformedFrame(pos_, "too many hex digits");
      value = (value << 4) | static_cast<std::uint64_t>(d);
      ++pos_;
    }
    if (pos_ - start < min_digits) throw MalformedFrame(pos_, "too few hex digits");
    return value;
  }

  void end() const {
    if (pos_ != body_.size()) throw MalformedFrame(pos_, "trailing bytes");
  }

  std::size_t pos() const noexcept { return pos_; }

 private:
  std::string_view frame_;
  std::string_view body_;
  std::size_t pos_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string encode(const Command& command) {
  return std::visit(
      Overloaded{
          [](const SetVoltage& c) { return "SETV " + std::to_string(c.mv) + "\n"; },
          [](const SetFrequency& c) {
            return "SETF " + std::to_string(c.khz) + "\n";
          },
          [](const Run& c) {
            return "RUN " + hex16(c.seed) + " " + std::to_string(c.n_items) +
                   " " + std::to_string(c.repetitions) + "\n";
          },
          [](const Reset&) { return std::string("RST\n"); },
      },
      command);
}

std::string encode(const Response& response) {
  return std::visit(
      Overloaded{
          [](const Ok&) { return std::string("OK\n"); },
          [](const Value& r) { return "VAL " + hex16(r.value) + "\n"; },
          [](const DeviceError& r) {
            return "ERR " + std::to_string(r.code) + "\n";
          },
      },
      response);
}

Command decode_command(std::string_view frame) {
  Reader in(frame);
  const auto word = in.keyword();
  Command result;
  if (word == "SETV") {
    in.space();
    const auto at = in.pos();
    const auto mv = in.decimal();
    if (mv > std::numeric_limits<std::uint32_t>::max()) {
      throw MalformedFrame(at, "voltage out of range");
    }
    result = SetVoltage{static_cast<std::uint32_t>(mv)};
  } else if (word == "SETF") {
    in.space();
    result = SetFrequency{in.decimal()};
  } else if (word == "RUN") {
    in.space();
    Run run{};
    run.seed = in.hex(1, 16);
    in.space();
    run.n_items = in.decimal();
    in.space();
    run.repetitions = in.decimal();
    result = run;
  } else if (word == "RST") {
    result = Reset{};
  } else {
    throw MalformedFrame(0, "unknown command");
  }
  in.end();
  return result;
}

Response decode_response(std::string_view frame) {
  Reader in(frame);
  const auto word = in.keyword();
  Response result;
  if (word == "OK") {
    result = Ok{};
  } else if (word == "VAL") {
    in.space();
    result = Value{in.hex(16, 16)};
  } else if (word == "ERR") {
    in.space();
    const auto at = in.pos();
    const auto code = in.decimal();
    if (code > std::numeric_limits<std::uint32_t>::max()) {
      throw MalformedFrame(at, "error code out of range");
    }
    result = DeviceError{static_cast<std::uint32_t>(code)};
  } else {
    throw MalformedFrame(0, "unknown response");
  }
  in.end();
  return result;
}

std::vector<std::string> LineFramer::feed(std::string_view bytes) {
  std::vector<std::string> frames;
  for (const char c : bytes) {
    pending_.push_back(c);
    if (c == '\n') {
      frames.push_back(std::move(pending_));
      pending_.clear();
    } else if (pending_.size() >= kMaxFrameBytes) {
      const auto offset = pending_.size() - 1;
      pending_.clear();
      throw MalformedFrame(offset, "frame exceeds " +
                                       std::to_string(kMaxFrameBytes) + " bytes");
    }
  }
  return frames;
}

}  // namespace gbx::wire
