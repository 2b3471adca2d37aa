#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

// Minimal blocking HTTP client. All network traffic in the library goes
// through these two calls.
namespace socialsim::http {

struct Response {
  int status = 0;  // 0 when the request never got an HTTP answer
  std::string body;
  std::string error;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// `url` is absolute, e.g. "http://127.0.0.1:8080/v1/chat/completions".
Response post_json(const std::string& url, const std::string& body, const Headers& headers,
                   std::chrono::seconds timeout);
Response get(const std::string& url, const Headers& headers, std::chrono::seconds timeout);

}  // namespace socialsim::http
