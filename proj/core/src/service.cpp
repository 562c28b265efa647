#include "tutorgen/service.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "text_util.hpp"
#include "tutorgen/http_provider.hpp"
#include "tutorgen/json_io.hpp"
#include "tutorgen/render.hpp"

namespace tutorgen::api {

using nlohmann::json;

void to_json(json& j, const ApiError& e) {
  j = {{"code", e.code}, {"message", e.message}};
  if (e.span) j["span"] = *e.span;
  if (e.findings) j["findings"] = *e.findings;
  for (const auto& [key, value] : e.extra.items()) j[key] = value;
}

namespace {

// Thrown for requests that are well-formed JSON but miss required members.
struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Response json_response(int status, const json& body) { return {status, body.dump()}; }

Response error_response(int status, ApiError error) { return json_response(status, json(error)); }

ApiError api_error(std::string code, std::string message, std::optional<dsl::Span> span = std::nullopt) {
  ApiError e;
  e.code = std::move(code);
  e.message = std::move(message);
  e.span = span;
  return e;
}

json parse_body(const Request& req) {
  auto body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded()) throw BadRequest("request body is not valid JSON");
  if (!body.is_object()) throw BadRequest("request body must be a JSON object");
  return body;
}

std::string require_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) throw BadRequest(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::string optional_string(const json& body, const char* key, std::string fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw BadRequest(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

prompt::Mode parse_mode(const json& body) {
  const auto mode = optional_string(body, "mode", "interface");
  if (mode == "interface") return prompt::Mode::Interface;
  if (mode == "component") return prompt::Mode::Component;
  throw BadRequest("\"mode\" must be \"interface\" or \"component\"");
}

Response handle_render(const Request& req) {
  const auto body = parse_body(req);
  const auto source = require_string(body, "dsl");
  if (parse_mode(body) == prompt::Mode::Component) {
    return json_response(200, json(html::render_fragment(dsl::parse_fragment(source))));
  }
  return json_response(200, json(html::render_document(dsl::parse_document(source))));
}

Response handle_validate(const Request& req) {
  const auto body = parse_body(req);
  const auto source = require_string(body, "dsl");
  const auto mode = parse_mode(body);
  json out;
  if (mode == prompt::Mode::Component) {
    const auto fragment = dsl::parse_fragment(source);
    out = {{"mode", "component"},
           {"dsl", dsl::pretty_print(fragment)},
           {"counts", dsl::count_nodes(fragment)},
           {"lint", lint::lint_fragment(fragment)}};
  } else {
    const auto layout = dsl::parse_document(source);
    out = {{"mode", "interface"},
           {"dsl", dsl::pretty_print(layout)},
           {"counts", dsl::count_nodes(layout)},
           {"lint", lint::lint_document(layout)}};
  }
  return json_response(200, out);
}

Response handle_generate(const ServiceDeps& deps, const Request& req, prompt::Mode mode) {
  const auto body = parse_body(req);
  llm::GenerationRequest gen;
  gen.mode = mode;
  gen.description = require_string(body, "description");
  if (auto it = body.find("max_repairs"); it != body.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int>() < 0) {
      throw BadRequest("\"max_repairs\" must be a non-negative integer");
    }
    gen.max_repairs = it->get<int>();
  }
  const auto result = llm::generate(gen, *deps.provider, deps.provider_config, *deps.assets);
  return json_response(200, json(result));
}

Response handle_create_component(const ServiceDeps& deps, const Request& req) {
  const auto body = parse_body(req);
  std::vector<std::string> tags;
  if (auto it = body.find("tags"); it != body.end() && !it->is_null()) {
    if (!it->is_array() || !std::all_of(it->begin(), it->end(), [](const json& t) { return t.is_string(); })) {
      throw BadRequest("\"tags\" must be an array of strings");
    }
    tags = it->get<std::vector<std::string>>();
  }
  const auto record = deps.store->create(require_string(body, "name"), optional_string(body, "description", ""),
                                         require_string(body, "dsl"), std::move(tags));
  return json_response(201, json(record));
}

Response handle_list_components(const ServiceDeps& deps, const Request& req) {
  std::optional<std::string> tag;
  if (auto it = req.query.find("tag"); it != req.query.end()) tag = it->second;
  return json_response(200, json(deps.store->list(tag)));
}

Response method_not_allowed(const Request& req) {
  return error_response(405, api_error("MethodNotAllowed", req.method + " is not supported on " + req.path));
}

constexpr std::string_view kComponentsPrefix = "/api/components/";

Response route(const ServiceDeps& deps, const Request& req) {
  const auto& p = req.path;
  const auto& m = req.method;
  if (p == "/api/health") {
    return m == "GET" ? json_response(200, {{"status", "ok"}}) : method_not_allowed(req);
  }
  if (p == "/api/render") return m == "POST" ? handle_render(req) : method_not_allowed(req);
  if (p == "/api/validate") return m == "POST" ? handle_validate(req) : method_not_allowed(req);
  if (p == "/api/generate/interface") {
    return m == "POST" ? handle_generate(deps, req, prompt::Mode::Interface) : method_not_allowed(req);
  }
  if (p == "/api/generate/component") {
    return m == "POST" ? handle_generate(deps, req, prompt::Mode::Component) : method_not_allowed(req);
  }
  if (p == "/api/components") {
    if (m == "GET") return handle_list_components(deps, req);
    if (m == "POST") return handle_create_component(deps, req);
    return method_not_allowed(req);
  }
  if (p.size() > kComponentsPrefix.size() && p.compare(0, kComponentsPrefix.size(), kComponentsPrefix) == 0) {
    const std::string id = p.substr(kComponentsPrefix.size());
    if (m == "GET") return json_response(200, json(deps.store->get(id)));
    if (m == "DELETE") {
      deps.store->remove(id);
      return json_response(200, {{"deleted", id}});
    }
    return method_not_allowed(req);
  }
  return error_response(404, api_error("NotFound", "no endpoint at " + p));
}

}  // namespace

ApiHandler::ApiHandler(ServiceDeps deps) : deps_(std::move(deps)) {
  if (deps_.assets == nullptr || deps_.provider == nullptr || deps_.store == nullptr) {
    throw std::invalid_argument("ApiHandler needs assets, a provider and a store");
  }
}

Response ApiHandler::handle(const Request& req) const {
  try {
    return route(deps_, req);
  } catch (const BadRequest& e) {
    return error_response(400, api_error("BadRequest", e.what()));
  } catch (const dsl::ParseError& e) {
    return error_response(422, api_error(std::string(dsl::to_string(e.code())), e.message(), e.span()));
  } catch (const prompt::PromptError& e) {
    return error_response(422, api_error(std::string(prompt::to_string(e.code())), e.what()));
  } catch (const llm::GenerationFailure& e) {
    ApiError err = api_error("GenerationFailure", e.what());
    std::vector<lint::Finding> findings;
    json errors = json::array();
    for (const auto& issue : e.last_errors()) {
      errors.push_back(prompt::issue_to_json(issue));
      if (const auto* f = std::get_if<lint::Finding>(&issue)) findings.push_back(*f);
      if (const auto* pe = std::get_if<dsl::ParseError>(&issue); pe && !err.span) err.span = pe->span();
    }
    if (!findings.empty()) err.findings = std::move(findings);
    err.extra = {{"attempts", e.attempts()}, {"errors", std::move(errors)}, {"last_output", e.last_output()}};
    return error_response(422, std::move(err));
  } catch (const llm::ProviderError& e) {
    return error_response(502, api_error(std::string(llm::to_string(e.code())), e.what()));
  } catch (const library::StoreError& e) {
    const int status = e.code() == library::StoreErrorCode::NotFound ? 404
                       : e.code() == library::StoreErrorCode::Io     ? 500
                                                                      : 422;
    return error_response(status, api_error(std::string(library::to_string(e.code())), e.what()));
  } catch (const std::exception& e) {
    return error_response(500, api_error("Internal", e.what()));
  }
}

// ---------------------------------------------------------------------------

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  try {
    if (!j.is_object()) throw ServiceError(ServiceErrorCode::BadConfig, "config must be a JSON object");
    if (j.contains("host")) j.at("host").get_to(c.host);
    if (j.contains("port")) j.at("port").get_to(c.port);
    if (j.contains("store")) c.store_dir = j.at("store").get<std::string>();
    if (j.contains("assets")) c.asset_dir = j.at("assets").get<std::string>();
    if (j.contains("provider")) {
      const auto& p = j.at("provider");
      if (p.contains("kind")) p.at("kind").get_to(c.provider);
      if (p.contains("replay_file")) c.replay_file = p.at("replay_file").get<std::string>();
      if (p.contains("script_file")) c.script_file = p.at("script_file").get<std::string>();
      llm::from_json(p, c.provider_config);
    }
  } catch (const json::exception& e) {
    throw ServiceError(ServiceErrorCode::BadConfig, std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = util::read_file(path.string());
  } catch (const std::exception& e) {
    throw ServiceError(ServiceErrorCode::BadConfig, e.what());
  }
  const auto j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ServiceError(ServiceErrorCode::BadConfig, path.string() + " is not valid JSON");
  return from_json(j);
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ServiceError(ServiceErrorCode::BadConfig, "port must be within 0..65535");
  if (host.empty()) throw ServiceError(ServiceErrorCode::BadConfig, "host must not be empty");
  if (provider != "http" && provider != "replay" && provider != "scripted") {
    throw ServiceError(ServiceErrorCode::BadConfig, "provider kind must be http, replay or scripted");
  }
  try {
    provider_config.validate();
  } catch (const std::invalid_argument& e) {
    throw ServiceError(ServiceErrorCode::BadConfig, e.what());
  }
}

// ---------------------------------------------------------------------------

struct Server::Impl {
  explicit Impl(const ApiHandler& h) : handler(h) {
    auto adapter = [this](const httplib::Request& in, httplib::Response& out) {
      Request req{in.method, in.path, {}, in.body};
      for (const auto& [k, v] : in.params) req.query.emplace(k, v);
      const Response res = handler.handle(req);
      out.status = res.status;
      out.set_content(res.body, "application/json");
    };
    server.Get(".*", adapter);
    server.Post(".*", adapter);
    server.Delete(".*", adapter);
    server.Put(".*", adapter);
    server.Patch(".*", adapter);
    // The library default also sets SO_REUSEPORT, which would let a second
    // server share the port instead of failing to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
  }

  const ApiHandler& handler;
  httplib::Server server;
};

Server::Server(const ApiHandler& handler) : impl_(std::make_unique<Impl>(handler)) {}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw ServiceError(ServiceErrorCode::PortInUse, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw ServiceError(ServiceErrorCode::PortInUse, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Server::run() { impl_->server.listen_after_bind(); }

void Server::wait_until_ready() const { impl_->server.wait_until_ready(); }

void Server::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void serve(const ServiceConfig& config, std::ostream& log) {
  config.validate();
  const auto asset_dir = config.asset_dir.empty() ? prompt::default_asset_dir() : config.asset_dir;
  const auto assets = prompt::PromptAssets::load(asset_dir / "prompt");
  library::ComponentStore store(config.store_dir);
  std::unique_ptr<llm::Provider> provider;
  try {
    provider = llm::make_provider(config.provider, config.replay_file, config.script_file);
  } catch (const std::exception& e) {
    throw ServiceError(ServiceErrorCode::BadConfig, e.what());
  }

  ApiHandler handler({&assets, provider.get(), config.provider_config, &store});
  Server server(handler);
  const int port = server.bind(config.host, config.port);

  // Block the shutdown signals everywhere and wait for them on one thread;
  // worker threads inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });

  log << "tutorgen listening on http://" << config.host << ":" << port << " (provider: " << config.provider
      << ", store: " << config.store_dir.string() << ")" << std::endl;
  server.run();
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  log << "tutorgen stopped" << std::endl;
}

}  // namespace tutorgen::api
