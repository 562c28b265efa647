#pragma once

// JSON-over-HTTP surface for the builder UI and external tools.
//
//   GET    /api/health                  {"status":"ok"}
//   POST   /api/render                  {dsl, mode?}            -> HtmlText
//   POST   /api/validate                {dsl, mode?}            -> {mode, dsl, counts, lint}
//   POST   /api/generate/interface      {description, max_repairs?} -> GenerationResult
//   POST   /api/generate/component      {description, max_repairs?} -> GenerationResult
//   GET    /api/components[?tag=t]                              -> [ComponentRecord]
//   POST   /api/components              {name, description?, dsl, tags?} -> 201 ComponentRecord
//   GET    /api/components/{id}                                 -> ComponentRecord
//   DELETE /api/components/{id}                                 -> {"deleted": id}
//
// Errors are {code, message, span?, findings?, ...}: 400 for malformed
// requests, 404 for missing resources, 422 for domain errors and 502 for
// provider failures.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tutorgen/component_store.hpp"
#include "tutorgen/gateway.hpp"
#include "tutorgen/lint.hpp"
#include "tutorgen/prompt.hpp"

namespace tutorgen::api {

struct ApiError {
  std::string code;
  std::string message;
  std::optional<dsl::Span> span;
  std::optional<std::vector<lint::Finding>> findings;
  // Extra members merged into the error object (e.g. attempts, errors).
  nlohmann::json extra = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const ApiError& error);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
};

struct ServiceDeps {
  const prompt::PromptAssets* assets = nullptr;
  llm::Provider* provider = nullptr;
  llm::ProviderConfig provider_config;
  library::ComponentStore* store = nullptr;
};

/// Routing and error mapping, independent of the HTTP transport. Safe to
/// call from many threads as long as the provider is.
class ApiHandler {
 public:
  explicit ApiHandler(ServiceDeps deps);

  Response handle(const Request& request) const;

 private:
  ServiceDeps deps_;
};

enum class ServiceErrorCode { PortInUse, BadConfig };

class ServiceError : public std::runtime_error {
 public:
  ServiceError(ServiceErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ServiceErrorCode code() const noexcept { return code_; }

 private:
  ServiceErrorCode code_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_dir = "components";
  // Empty means prompt::default_asset_dir().
  std::filesystem::path asset_dir;
  // "http", "replay" or "scripted".
  std::string provider = "http";
  std::filesystem::path replay_file;
  std::filesystem::path script_file;
  llm::ProviderConfig provider_config;

  /// Throws ServiceError(BadConfig).
  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::filesystem::path& path);
  void validate() const;
};

/// HTTP transport over an ApiHandler.
class Server {
 public:
  explicit Server(const ApiHandler& handler);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws PortInUse.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// Returns once run() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Opens the store, builds the provider and serves until SIGINT or SIGTERM.
void serve(const ServiceConfig& config, std::ostream& log);

}  // namespace tutorgen::api
