#include "socialsim/http.hpp"

#include <httplib.h>

namespace socialsim::http {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split(const std::string& url) {
  auto scheme_end = url.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

httplib::Headers to_headers(const Headers& headers) {
  httplib::Headers out;
  for (const auto& [k, v] : headers) out.emplace(k, v);
  return out;
}

Response convert(const httplib::Result& result) {
  Response r;
  if (!result) {
    r.error = httplib::to_string(result.error());
    return r;
  }
  r.status = result->status;
  r.body = result->body;
  return r;
}

}  // namespace

Response post_json(const std::string& url, const std::string& body, const Headers& headers,
                   std::chrono::seconds timeout) {
  auto parts = split(url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return convert(client.Post(parts.path, to_headers(headers), body, "application/json"));
}

Response get(const std::string& url, const Headers& headers, std::chrono::seconds timeout) {
  auto parts = split(url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  return convert(client.Get(parts.path, to_headers(headers)));
}

}  // namespace socialsim::http
