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

// Thin blocking HTTP POST used by the remote model, grammar checker and
// remote perplexity scorer. Keeps cpp-httplib out of public headers.

#ifndef TEXTPROBE_SRC_HTTP_H_
#define TEXTPROBE_SRC_HTTP_H_

#include <string>
#include <utility>
#include <vector>

namespace textprobe::internal {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // no trailing '/'
};

// Throws ConfigError for URLs without an http(s) scheme.
SplitUrl ParseUrl(const std::string& url);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Throws EndpointUnreachableError when no connection can be made and
// TimeoutError when the exchange does not complete in time.
HttpResponse HttpPost(
    const std::string& url, const std::string& body,
    const std::string& content_type,
    const std::vector<std::pair<std::string, std::string>>& headers,
    double timeout_seconds);

}  // namespace textprobe::internal

#endif  // TEXTPROBE_SRC_HTTP_H_
