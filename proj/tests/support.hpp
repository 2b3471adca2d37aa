#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <json.hpp>

#include "socialsim/persona.hpp"
#include "socialsim/text.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(SOCIALSIM_FIXTURES) / name; }

inline nlohmann::json load_json(const std::string& name) { return nlohmann::json::parse(socialsim::text::read_file(fixture(name))); }

inline socialsim::PersonaProfile mara() { return socialsim::PersonaProfile::from_json(load_json("persona_mara.json")); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("socialsim_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
