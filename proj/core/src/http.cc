// Copyright 2026 The textprobe Authors
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

#include "http.h"

#include <chrono>

#include "httplib.h"
#include "textprobe/errors.h"

namespace textprobe::internal {

SplitUrl ParseUrl(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("URL '" + url + "' has no scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported URL scheme '" + scheme + "'");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  if (out.origin.size() <= scheme_end + 3) {
    throw ConfigError("URL '" + url + "' has no host");
  }
  return out;
}

HttpResponse HttpPost(
    const std::string& url, const std::string& body,
    const std::string& content_type,
    const std::vector<std::pair<std::string, std::string>>& headers,
    double timeout_seconds) {
  const SplitUrl split = ParseUrl(url);
  httplib::Client client(split.origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  const std::string path = split.path.empty() ? "/" : split.path;
  auto result = client.Post(path, hdrs, body, content_type);
  if (!result) {
    const httplib::Error err = result.error();
    const std::string what = url + ": " + httplib::to_string(err);
    switch (err) {
      case httplib::Error::Read:
      case httplib::Error::Write:
        throw TimeoutError(what);
      default:
        throw EndpointUnreachableError(what);
    }
  }
  return HttpResponse{result->status, result->body};
}

}  // namespace textprobe::internal
