#pragma once

// Text-generation providers and the generate -> parse -> lint -> repair
// pipeline behind interface- and component-level generation.

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tutorgen/dsl.hpp"
#include "tutorgen/lint.hpp"
#include "tutorgen/prompt.hpp"
#include "tutorgen/render.hpp"

namespace tutorgen::llm {

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4-0613";
  // Name of the environment variable holding the bearer credential.
  std::string credential_env = "TUTORGEN_API_KEY";
  double temperature = 0.2;
  int max_tokens = 1024;
  int timeout_seconds = 60;

  /// Throws std::invalid_argument when temperature is outside [0, 2] or the
  /// timeout is not positive.
  void validate() const;
};

enum class ProviderErrorCode { Timeout, AuthFailure, MalformedProviderResponse, Unreachable, UpstreamError };

std::string_view to_string(ProviderErrorCode code);

/// Transport-level failure. The model never saw the request, so these are
/// not repair-worthy and surface straight to the caller.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(ProviderErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ProviderErrorCode code() const noexcept { return code_; }

 private:
  ProviderErrorCode code_;
};

/// Implementations must be safe to call concurrently.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const prompt::MessageList& messages, const ProviderConfig& config) = 0;
};

/// Returns a fixed sequence of responses across successive calls.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses) : responses_(std::move(responses)) {}

  std::string complete(const prompt::MessageList& messages, const ProviderConfig& config) override;

  std::size_t calls() const;
  /// Messages received on every call so far, in order.
  std::vector<prompt::MessageList> received() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> responses_;
  std::vector<prompt::MessageList> received_;
};

/// Returns canned text keyed by the SHA-256 of the serialized messages.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}

  /// Cassette file: {"entries": {"<sha256 hex>": "<response text>", ...}}.
  static ReplayProvider from_file(const std::filesystem::path& path);

  static std::string key_for(const prompt::MessageList& messages);

  std::string complete(const prompt::MessageList& messages, const ProviderConfig& config) override;

 private:
  std::map<std::string, std::string> entries_;
};

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interior of the first fenced code block, or the whole text trimmed when
/// there is no fence. Throws ExtractionError when the result is blank.
std::string extract_dsl(std::string_view raw);

struct GenerationRequest {
  prompt::Mode mode = prompt::Mode::Interface;
  std::string description;
  int max_repairs = 2;
};

struct GenerationResult {
  prompt::Mode mode = prompt::Mode::Interface;
  // Canonical (pretty-printed) DSL.
  std::string dsl;
  std::variant<dsl::TutorLayout, dsl::Fragment> ast;
  html::HtmlText html;
  lint::LintReport lint;
  int attempts = 0;
  std::string provider_raw;
};

class GenerationFailure : public std::runtime_error {
 public:
  GenerationFailure(int attempts, std::vector<prompt::Issue> last_errors, std::string last_output);

  int attempts() const noexcept { return attempts_; }
  const std::vector<prompt::Issue>& last_errors() const noexcept { return last_errors_; }
  /// The DSL text the last errors refer to.
  const std::string& last_output() const noexcept { return last_output_; }

 private:
  int attempts_;
  std::vector<prompt::Issue> last_errors_;
  std::string last_output_;
};

/// Runs at most 1 + max_repairs provider calls. Throws GenerationFailure on
/// exhaustion, ProviderError on transport failure, PromptError on a bad
/// request and std::invalid_argument on a negative repair budget.
GenerationResult generate(const GenerationRequest& request, Provider& provider, const ProviderConfig& config,
                          const prompt::PromptAssets& assets);

}  // namespace tutorgen::llm
