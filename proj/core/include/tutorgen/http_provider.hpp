#pragma once

#include <filesystem>
#include <memory>

#include "tutorgen/gateway.hpp"

namespace tutorgen::llm {

/// Chat-completions client. Each call opens its own connection, so one
/// instance can serve concurrent requests.
///
/// Request body: {model, messages: [{role, content}], temperature, max_tokens}.
/// The reply text is read from choices[0].message.content. The bearer
/// credential comes from the environment variable named in the config.
class HttpProvider : public Provider {
 public:
  std::string complete(const prompt::MessageList& messages, const ProviderConfig& config) override;

  static std::string request_body(const prompt::MessageList& messages, const ProviderConfig& config);
  /// Throws ProviderError(MalformedProviderResponse) when the reply text is missing.
  static std::string parse_response(std::string_view body);
};

}  // namespace tutorgen::llm

namespace tutorgen::llm {

/// "http", "replay" (needs a cassette file) or "scripted" (needs a JSON
/// array of responses). Throws std::invalid_argument for anything else.
std::unique_ptr<Provider> make_provider(std::string_view kind, const std::filesystem::path& replay_file,
                                        const std::filesystem::path& script_file);

}  // namespace tutorgen::llm
