#include "socialsim/events.hpp"

#include <sstream>

#include <fmt/format.h>

#include "socialsim/error.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

json Event::to_json() const {
  return {{"turn", turn}, {"actor", actor}, {"kind", kind},
          {"target", target}, {"payload", payload}, {"suppressed", suppressed}};
}

Event Event::from_json(const json& j) {
  Event e;
  e.turn = j.at("turn").get<Turn>();
  e.actor = j.at("actor").get<std::string>();
  e.kind = j.at("kind").get<std::string>();
  e.target = j.at("target").get<std::string>();
  e.payload = j.at("payload");
  e.suppressed = j.at("suppressed").get<bool>();
  return e;
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.to_json().dump();
    out += '\n';
  }
  return out;
}

EventLog EventLog::from_jsonl(std::string_view text) {
  EventLog log;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      log.append(Event::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("line {}", line_no), fmt::format("events line {}: {}", line_no, e.what()));
    }
  }
  return log;
}

void EventLog::write(const std::filesystem::path& path) const { text::write_file(path, to_jsonl()); }

EventLog EventLog::read(const std::filesystem::path& path) { return from_jsonl(text::read_file(path)); }

}  // namespace socialsim
