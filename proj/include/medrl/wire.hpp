#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "medrl/crop.hpp"
#include "medrl/env.hpp"
#include "medrl/error.hpp"

namespace medrl::wire {

// Line formats (keys in this order, one JSON object per line, "\n"-terminated):
//   {"type":"sensor","node_id":S,"metric":M,"value":X,"ts":T}
//   {"type":"morph","node_id":S,"stem_length_cm":X,"leaf_count":N,"leaf_area_cm2":X,
//    "flower_volume_cm3":X,"ts":T}
//   {"type":"setpoint","seq":N,"temperature_c":X,"humidity_rel":X,"light_ppfd":X,
//    "co2_ppm":X,"ts":T}
//   {"type":"ack","seq":N,"status":"ok"|"rejected","ts":T}
// M is one of temperature_c, humidity_rel, light_ppfd, co2_ppm. Reals use the
// shortest decimal form that round-trips; T and N are non-negative integers.

struct SensorReading {
  std::string node_id;
  Var metric = Var::Temperature;
  double value = 0.0;
  std::uint64_t ts = 0;
  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

struct MorphReport {
  std::string node_id;
  Morphology morphology{};
  std::uint64_t ts = 0;
  friend bool operator==(const MorphReport&, const MorphReport&) = default;
};

struct SetpointCommand {
  std::uint64_t seq = 0;
  Setpoints setpoints{};
  std::uint64_t ts = 0;
  friend bool operator==(const SetpointCommand&, const SetpointCommand&) = default;
};

enum class AckStatus { Ok, Rejected };

struct Ack {
  std::uint64_t seq = 0;
  AckStatus status = AckStatus::Ok;
  std::uint64_t ts = 0;
  friend bool operator==(const Ack&, const Ack&) = default;
};

using Message = std::variant<SensorReading, MorphReport, SetpointCommand, Ack>;

enum class ErrorKind { MalformedSyntax, UnknownType, InvariantViolation };
std::string_view error_kind_name(ErrorKind k);

class DecodeError : public Error {
 public:
  DecodeError(ErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// True if m satisfies the message invariants (finite in-bound values,
/// non-empty node ids, integral leaf count).
bool is_valid(const Message& m);

/// Canonical single line, including the trailing "\n". Throws
/// std::invalid_argument for a message that is not is_valid().
std::string encode(const Message& m);

/// Strict inverse of encode. A single trailing "\n" is accepted. Throws
/// DecodeError: MalformedSyntax when the line is not a JSON object,
/// UnknownType for an absent or unrecognized "type", InvariantViolation for
/// missing, extra or mistyped fields and out-of-bound values.
Message decode(std::string_view line);

struct ReplayOptions {
  /// Largest allowed ts gap between a command and its Ack.
  std::uint64_t ack_window_s = 60;
};

enum class ViolationKind { Undecodable, NonMonotonicSeq, UnackedCommand, UnexpectedAck };
std::string_view violation_kind_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::size_t line = 0;  ///< zero-based line index
  std::string detail;
};

struct SessionReport {
  std::vector<Message> messages;
  std::vector<Violation> violations;
};

/// Decodes a session and checks that command seq numbers strictly increase
/// and every command is acknowledged within the window. Violations are
/// reported, never thrown.
SessionReport session_replay(std::span<const std::string> lines, const ReplayOptions& options = {});
SessionReport session_replay(std::istream& in, const ReplayOptions& options = {});

}  // namespace medrl::wire
