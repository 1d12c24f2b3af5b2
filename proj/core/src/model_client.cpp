#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "nyaya/harness.hpp"

namespace nyaya {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

struct ReplayClient::State {
  std::string directory;
  mutable std::mutex mutex;
  std::map<std::string, int> calls;
};

ReplayClient::ReplayClient(std::string directory) : state_(std::make_shared<State>()) {
  state_->directory = std::move(directory);
}

GenerationResult ReplayClient::generate(const GenerationRequest&, std::string_view example_id) {
  GenerationResult result;
  std::string id(example_id);
  int attempt;
  {
    std::lock_guard lock(state_->mutex);
    attempt = ++state_->calls[id];
  }
  fs::path dir(state_->directory);
  if (auto single = read_file(dir / (id + ".md"))) {
    result.text = *single;
    return result;
  }
  // numbered attempts; the last stored output repeats once exhausted
  for (int i = attempt; i >= 1; --i) {
    if (auto stored = read_file(dir / (id + "." + std::to_string(i) + ".md"))) {
      result.text = *stored;
      return result;
    }
  }
  result.error = ClientError{ClientErrorKind::not_found,
                             "no stored output for example id '" + id + "'"};
  return result;
}

int ReplayClient::calls_for(std::string_view example_id) const {
  std::lock_guard lock(state_->mutex);
  auto it = state_->calls.find(std::string(example_id));
  return it == state_->calls.end() ? 0 : it->second;
}

int ReplayClient::total_calls() const {
  std::lock_guard lock(state_->mutex);
  int total = 0;
  for (const auto& [_, n] : state_->calls) total += n;
  return total;
}

HttpClient::HttpClient(std::string endpoint_url, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint_url)), timeout_(timeout) {}

GenerationResult HttpClient::generate(const GenerationRequest& request,
                                      std::string_view example_id) {
  GenerationResult result;

  std::string scheme_host;
  std::string path = "/";
  {
    std::size_t scheme = endpoint_.find("://");
    std::size_t slash = scheme == std::string::npos ? endpoint_.find('/')
                                                    : endpoint_.find('/', scheme + 3);
    if (slash == std::string::npos) {
      scheme_host = endpoint_;
    } else {
      scheme_host = endpoint_.substr(0, slash);
      path = endpoint_.substr(slash);
    }
  }

  httplib::Client client(scheme_host);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  auto microseconds =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
  client.set_connection_timeout(seconds.count(), microseconds.count());
  client.set_read_timeout(seconds.count(), microseconds.count());

  httplib::Headers headers;
  if (const char* key = std::getenv("MODEL_API_KEY"); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  headers.emplace("X-Example-Id", std::string(example_id));

  json body = {
      {"system", request.system},
      {"user", request.user},
      {"temperature", request.temperature},
      {"max_new_tokens", request.max_new_tokens},
  };
  auto response = client.Post(path, headers, body.dump(), "application/json");
  if (!response) {
    auto err = httplib::to_string(response.error());
    bool timed_out = response.error() == httplib::Error::ConnectionTimeout ||
                     response.error() == httplib::Error::Read;
    result.error = ClientError{timed_out ? ClientErrorKind::timeout : ClientErrorKind::transport,
                               "transport failure: " + err};
    return result;
  }
  if (response->status < 200 || response->status >= 300) {
    result.error = ClientError{ClientErrorKind::endpoint,
                               "endpoint returned status " + std::to_string(response->status)};
    return result;
  }
  json payload = json::parse(response->body, nullptr, false);
  if (payload.is_discarded()) {
    result.error = ClientError{ClientErrorKind::endpoint, "endpoint returned non-JSON body"};
    return result;
  }
  if (payload.contains("error")) {
    result.error = ClientError{ClientErrorKind::endpoint,
                               payload["error"].is_string() ? payload["error"].get<std::string>()
                                                            : payload["error"].dump()};
    return result;
  }
  if (!payload.contains("text") || !payload["text"].is_string() ||
      payload["text"].get<std::string>().empty()) {
    result.error = ClientError{ClientErrorKind::endpoint, "endpoint returned empty text"};
    return result;
  }
  result.text = payload["text"].get<std::string>();
  return result;
}

}  // namespace nyaya
