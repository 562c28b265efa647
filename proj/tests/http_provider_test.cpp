#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <stdlib.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tutorgen/http_provider.hpp"

using namespace tutorgen;
using llm::ProviderErrorCode;

namespace {

constexpr const char* kCredentialEnv = "TUTORGEN_TEST_FAKE_CREDENTIAL";

// Chat-completions stand-in on an ephemeral localhost port.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  void respond(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    handler_ = std::move(handler);
  }

  llm::ProviderConfig config() const {
    llm::ProviderConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.credential_env = kCredentialEnv;
    c.timeout_seconds = 1;
    return c;
  }

  int hits() const { return hits_; }
  const std::string& last_body() const { return last_body_; }
  const std::string& last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::function<void(const httplib::Request&, httplib::Response&)> handler_;
  std::atomic<int> hits_{0};
  std::string last_body_;
  std::string last_auth_;
};

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

ProviderErrorCode error_code(const llm::ProviderConfig& config) {
  llm::HttpProvider provider;
  try {
    (void)provider.complete({{prompt::Role::User, "hello"}}, config);
  } catch (const llm::ProviderError& e) {
    return e.code();
  }
  FAIL("expected a ProviderError");
  throw std::logic_error("unreachable");
}

struct CredentialGuard {
  explicit CredentialGuard(const char* value) { setenv(kCredentialEnv, value, 1); }
  ~CredentialGuard() { unsetenv(kCredentialEnv); }
};

}  // namespace

TEST_SUITE("http provider") {
  TEST_CASE("successful completion sends the configured request") {
    CredentialGuard cred("secret-token");
    FakeEndpoint fake;
    fake.respond([](const httplib::Request&, httplib::Response& res) {
      res.set_content(completion("title[T]\ninput"), "application/json");
    });
    llm::HttpProvider provider;
    const auto text = provider.complete({{prompt::Role::System, "s"}, {prompt::Role::User, "u"}}, fake.config());
    CHECK(text == "title[T]\ninput");
    CHECK(fake.last_auth() == "Bearer secret-token");
    const auto body = nlohmann::json::parse(fake.last_body());
    CHECK(body["model"] == "gpt-4-0613");
    CHECK(body["temperature"] == doctest::Approx(0.2));
    CHECK(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "u");
  }

  TEST_CASE("rejected credential") {
    CredentialGuard cred("expired");
    FakeEndpoint fake;
    fake.respond([](const httplib::Request&, httplib::Response& res) {
      res.status = 401;
      res.set_content(R"({"error":{"message":"invalid api key"}})", "application/json");
    });
    CHECK(error_code(fake.config()) == ProviderErrorCode::AuthFailure);
    fake.respond([](const httplib::Request&, httplib::Response& res) { res.status = 403; });
    CHECK(error_code(fake.config()) == ProviderErrorCode::AuthFailure);
  }

  TEST_CASE("missing credential never reaches the network") {
    unsetenv(kCredentialEnv);
    FakeEndpoint fake;
    fake.respond([](const httplib::Request&, httplib::Response& res) { res.set_content(completion("x"), "application/json"); });
    CHECK(error_code(fake.config()) == ProviderErrorCode::AuthFailure);
    CHECK(fake.hits() == 0);
  }

  TEST_CASE("server errors") {
    CredentialGuard cred("k");
    FakeEndpoint fake;
    fake.respond([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    CHECK(error_code(fake.config()) == ProviderErrorCode::UpstreamError);
    fake.respond([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
    CHECK(error_code(fake.config()) == ProviderErrorCode::UpstreamError);
  }

  TEST_CASE("malformed replies") {
    CredentialGuard cred("k");
    FakeEndpoint fake;
    for (const std::string body : {"not json", "{}", R"({"choices":[]})", R"({"choices":[{"message":{}}]})",
                                   R"({"choices":[{"message":{"content":7}}]})"}) {
      CAPTURE(body);
      fake.respond([body](const httplib::Request&, httplib::Response& res) { res.set_content(body, "application/json"); });
      CHECK(error_code(fake.config()) == ProviderErrorCode::MalformedProviderResponse);
    }
  }

  TEST_CASE("slow provider times out") {
    CredentialGuard cred("k");
    FakeEndpoint fake;
    fake.respond([](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2500));
      res.set_content(completion("late"), "application/json");
    });
    const auto started = std::chrono::steady_clock::now();
    CHECK(error_code(fake.config()) == ProviderErrorCode::Timeout);
    CHECK(std::chrono::steady_clock::now() - started < std::chrono::milliseconds(2400));
  }

  TEST_CASE("nothing listening") {
    CredentialGuard cred("k");
    // Bind an ephemeral port, then close it so nothing is listening there.
    int port = 0;
    {
      const int fd = socket(AF_INET, SOCK_STREAM, 0);
      REQUIRE(fd >= 0);
      sockaddr_in addr{};
      addr.sin_family = AF_INET;
      addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
      socklen_t len = sizeof addr;
      REQUIRE(bind(fd, reinterpret_cast<sockaddr*>(&addr), len) == 0);
      REQUIRE(getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
      port = ntohs(addr.sin_port);
      close(fd);
    }
    llm::ProviderConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    c.credential_env = kCredentialEnv;
    c.timeout_seconds = 1;
    CHECK(error_code(c) == ProviderErrorCode::Unreachable);
    c.endpoint = "no-scheme";
    CHECK(error_code(c) == ProviderErrorCode::Unreachable);
  }
}

TEST_SUITE("wire format") {
  TEST_CASE("request body") {
    llm::ProviderConfig c;
    c.model = "m";
    c.max_tokens = 7;
    const auto body = nlohmann::json::parse(llm::HttpProvider::request_body({{prompt::Role::User, "q"}}, c));
    CHECK(body["model"] == "m");
    CHECK(body["max_tokens"] == 7);
    CHECK(body["messages"] == nlohmann::json::parse(R"([{"role":"user","content":"q"}])"));
  }

  TEST_CASE("response content") {
    CHECK(llm::HttpProvider::parse_response(completion("abc")) == "abc");
  }
}
