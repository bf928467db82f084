#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "message_gen.hpp"
#include "medrl/wire.hpp"

using namespace medrl;
using namespace medrl::wire;

namespace {

ErrorKind decode_error(std::string_view line) {
  try {
    decode(line);
  } catch (const DecodeError& e) {
    return e.kind();
  }
  FAIL("line decoded: " << line);
  return ErrorKind::MalformedSyntax;
}

std::vector<std::string> lines(std::initializer_list<Message> ms) {
  std::vector<std::string> out;
  for (const Message& m : ms) out.push_back(encode(m));
  return out;
}

SetpointCommand command(std::uint64_t seq, std::uint64_t ts) {
  return {seq, Setpoints::make(20.0, 0.5, 100.0, 400.0), ts};
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("encoding") {
  CHECK(encode(SensorReading{"t1", Var::Temperature, 21.5, 300}) ==
        "{\"type\":\"sensor\",\"node_id\":\"t1\",\"metric\":\"temperature_c\",\"value\":21.5,\"ts\":300}\n");
  CHECK(encode(Ack{7, AckStatus::Ok, 0}) == "{\"type\":\"ack\",\"seq\":7,\"status\":\"ok\",\"ts\":0}\n");
  CHECK(encode(SetpointCommand{3, Setpoints::make(22.0, 0.6, 0.0, 800.0), 900}) ==
        "{\"type\":\"setpoint\",\"seq\":3,\"temperature_c\":22,\"humidity_rel\":0.6,"
        "\"light_ppfd\":0,\"co2_ppm\":800,\"ts\":900}\n");
  Morphology m;
  m.stem_length_cm = 12.25;
  m.leaf_count = 6;
  CHECK(encode(MorphReport{"cam", m, 5}) ==
        "{\"type\":\"morph\",\"node_id\":\"cam\",\"stem_length_cm\":12.25,\"leaf_count\":6,"
        "\"leaf_area_cm2\":0,\"flower_volume_cm3\":0,\"ts\":5}\n");
  CHECK_THROWS_AS(encode(SensorReading{"", Var::Humidity, 0.5, 0}), std::invalid_argument);
  CHECK_THROWS_AS(encode(SensorReading{"h", Var::Humidity, 1.5, 0}), std::invalid_argument);
}

TEST_CASE("decoding") {
  const Message m = decode(
      "{\"type\":\"sensor\",\"node_id\":\"t1\",\"metric\":\"temperature_c\",\"value\":21.5,\"ts\":300}");
  CHECK(std::get<SensorReading>(m) == SensorReading{"t1", Var::Temperature, 21.5, 300});
  // Insignificant numeric formatting and whitespace are accepted.
  const Message n = decode(
      "{ \"type\":\"sensor\", \"node_id\":\"t1\", \"metric\":\"temperature_c\", \"value\":2.15e1, \"ts\":300 }\n");
  CHECK(n == m);
}

TEST_CASE("malformed input") {
  CHECK(decode_error("{\"type\":\"sensor\",\"node_id\":\"t1\",\"metric\":\"pressure\",\"value\":1,\"ts\":0}") ==
        ErrorKind::InvariantViolation);
  CHECK(decode_error("{\"type\":\"sensor\",\"node_id\":\"t1\",\"met") == ErrorKind::MalformedSyntax);
  CHECK(decode_error("{\"type\":\"weather\",\"ts\":0}") == ErrorKind::UnknownType);
  CHECK(decode_error("{\"ts\":0}") == ErrorKind::UnknownType);
  CHECK(decode_error("[1,2]") == ErrorKind::MalformedSyntax);
  CHECK(decode_error("{\"type\":\"ack\",\"seq\":1,\"status\":\"ok\"}") == ErrorKind::InvariantViolation);
  CHECK(decode_error("{\"type\":\"ack\",\"seq\":1,\"status\":\"ok\",\"ts\":0,\"x\":1}") ==
        ErrorKind::InvariantViolation);
  CHECK(decode_error("{\"type\":\"ack\",\"seq\":-1,\"status\":\"ok\",\"ts\":0}") ==
        ErrorKind::InvariantViolation);
  CHECK(decode_error("{\"type\":\"morph\",\"node_id\":\"c\",\"stem_length_cm\":1,\"leaf_count\":1.5,"
                     "\"leaf_area_cm2\":0,\"flower_volume_cm3\":0,\"ts\":0}") == ErrorKind::InvariantViolation);
  CHECK(decode_error("{\"type\":\"ack\",\"seq\":1,\"status\":\"ok\",\"ts\":0}\n\n") ==
        ErrorKind::MalformedSyntax);
}

TEST_CASE("round trip and canonical bytes") {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const Message m = msggen::message(rng);
    const std::string line = encode(m);
    CHECK(decode(line) == m);
    CHECK(encode(decode(line)) == line);
    CHECK(line.find('\n') == line.size() - 1);
  }
}

TEST_CASE("session replay") {
  {
    const auto s = lines({command(1, 0), Ack{1, AckStatus::Ok, 1}, command(2, 300),
                          Ack{2, AckStatus::Ok, 301}});
    CHECK(session_replay(s).violations.empty());
  }
  {
    const auto s = lines({command(1, 0), Ack{1, AckStatus::Ok, 1}, command(1, 300),
                          Ack{1, AckStatus::Ok, 301}});
    const auto r = session_replay(s);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::NonMonotonicSeq);
    CHECK(r.violations[0].line == 2);
  }
  {
    const auto s = lines({command(1, 0), Ack{1, AckStatus::Ok, 1}, command(2, 300)});
    const auto r = session_replay(s);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::UnackedCommand);
  }
  {
    // An ack outside the window does not count.
    const auto s = lines({command(1, 0), Ack{1, AckStatus::Ok, 61}});
    const auto r = session_replay(s);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::UnackedCommand);
    CHECK(session_replay(s, {61}).violations.empty());
  }
  {
    auto s = lines({command(1, 0), Ack{9, AckStatus::Ok, 1}, Ack{1, AckStatus::Ok, 2}});
    s.push_back("not json");
    const auto r = session_replay(s);
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0].kind == ViolationKind::UnexpectedAck);
    CHECK(r.violations[1].kind == ViolationKind::Undecodable);
    CHECK(r.messages.size() == 3);
  }
  std::istringstream in(encode(command(4, 0)) + encode(Ack{4, AckStatus::Rejected, 0}));
  CHECK(session_replay(in).violations.empty());
}

}  // TEST_SUITE
