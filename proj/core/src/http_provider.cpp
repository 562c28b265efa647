#include "tutorgen/http_provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace tutorgen::llm {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError(ProviderErrorCode::Unreachable, "endpoint '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string HttpProvider::request_body(const prompt::MessageList& messages, const ProviderConfig& config) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", std::string(prompt::to_string(m.role))}, {"content", m.content}});
  }
  nlohmann::json body = {
      {"model", config.model},
      {"messages", std::move(msgs)},
      {"temperature", config.temperature},
      {"max_tokens", config.max_tokens},
  };
  return body.dump();
}

std::string HttpProvider::parse_response(std::string_view body) {
  const auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw ProviderError(ProviderErrorCode::MalformedProviderResponse, "provider reply is not JSON");
  }
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw ProviderError(ProviderErrorCode::MalformedProviderResponse, "provider reply has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw ProviderError(ProviderErrorCode::MalformedProviderResponse,
                        "provider reply has no choices[0].message.content");
  }
  return first["message"]["content"].get<std::string>();
}

std::string HttpProvider::complete(const prompt::MessageList& messages, const ProviderConfig& config) {
  config.validate();
  const char* credential = std::getenv(config.credential_env.c_str());
  if (credential == nullptr || *credential == '\0') {
    throw ProviderError(ProviderErrorCode::AuthFailure,
                        "credential variable " + config.credential_env + " is not set");
  }

  const Endpoint endpoint = split_endpoint(config.endpoint);
  httplib::Client client(endpoint.origin);
  if (!client.is_valid()) {
    throw ProviderError(ProviderErrorCode::Unreachable, "cannot create client for " + endpoint.origin);
  }
  client.set_connection_timeout(config.timeout_seconds, 0);
  client.set_read_timeout(config.timeout_seconds, 0);
  client.set_write_timeout(config.timeout_seconds, 0);
  client.set_bearer_token_auth(credential);

  auto res = client.Post(endpoint.path, request_body(messages, config), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw ProviderError(ProviderErrorCode::Timeout,
                          "provider did not answer within " + std::to_string(config.timeout_seconds) + " s");
    }
    throw ProviderError(ProviderErrorCode::Unreachable, "request failed: " + httplib::to_string(err));
  }
  if (res->status == 401 || res->status == 403) {
    throw ProviderError(ProviderErrorCode::AuthFailure,
                        "provider rejected the credential (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw ProviderError(ProviderErrorCode::UpstreamError, "provider returned HTTP " + std::to_string(res->status));
  }
  return parse_response(res->body);
}

}  // namespace tutorgen::llm

namespace tutorgen::llm {

std::unique_ptr<Provider> make_provider(std::string_view kind, const std::filesystem::path& replay_file,
                                        const std::filesystem::path& script_file) {
  if (kind == "http") return std::make_unique<HttpProvider>();
  if (kind == "replay") {
    if (replay_file.empty()) throw std::invalid_argument("replay provider needs a replay file");
    return std::make_unique<ReplayProvider>(ReplayProvider::from_file(replay_file));
  }
  if (kind == "scripted") {
    if (script_file.empty()) throw std::invalid_argument("scripted provider needs a script file");
    std::ifstream in(script_file);
    if (!in) throw std::invalid_argument("cannot open script file " + script_file.string());
    const auto doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (!doc.is_array() || !std::all_of(doc.begin(), doc.end(), [](const auto& v) { return v.is_string(); })) {
      throw std::invalid_argument("script file must be a JSON array of strings");
    }
    return std::make_unique<ScriptedProvider>(doc.get<std::vector<std::string>>());
  }
  throw std::invalid_argument("unknown provider '" + std::string(kind) + "'; expected http, replay or scripted");
}

}  // namespace tutorgen::llm
