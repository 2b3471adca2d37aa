#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socialsim/platform.hpp"

namespace socialsim {

/// Event kinds written to the simulation trace.
namespace event_kind {
inline constexpr std::string_view browse = "browse";
inline constexpr std::string_view like = "like";
inline constexpr std::string_view reblog = "reblog";
inline constexpr std::string_view comment = "comment";
inline constexpr std::string_view post = "post";
inline constexpr std::string_view follow = "follow";
inline constexpr std::string_view reflect = "reflect";
inline constexpr std::string_view anomaly = "anomaly";
}  // namespace event_kind

/// One line of events.jsonl. Every line carries the same six fields.
struct Event {
  Turn turn = 0;
  std::string actor;
  std::string kind;
  std::string target;
  nlohmann::json payload = nlohmann::json::object();
  bool suppressed = false;

  nlohmann::json to_json() const;
  static Event from_json(const nlohmann::json& j);

  bool operator==(const Event&) const = default;
};

/// Append-only simulation trace.
class EventLog {
 public:
  void append(Event e) { events_.push_back(std::move(e)); }
  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }

  std::string to_jsonl() const;
  static EventLog from_jsonl(std::string_view text);

  void write(const std::filesystem::path& path) const;
  static EventLog read(const std::filesystem::path& path);

 private:
  std::vector<Event> events_;
};

}  // namespace socialsim
