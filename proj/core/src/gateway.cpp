#include "tutorgen/gateway.hpp"

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "text_util.hpp"

namespace tutorgen::llm {

void ProviderConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw std::invalid_argument("temperature must be within [0, 2]");
  }
  if (timeout_seconds <= 0) throw std::invalid_argument("timeout must be positive");
  if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
}

std::string_view to_string(ProviderErrorCode code) {
  switch (code) {
    case ProviderErrorCode::Timeout: return "Timeout";
    case ProviderErrorCode::AuthFailure: return "AuthFailure";
    case ProviderErrorCode::MalformedProviderResponse: return "MalformedProviderResponse";
    case ProviderErrorCode::Unreachable: return "Unreachable";
    case ProviderErrorCode::UpstreamError: return "UpstreamError";
  }
  return "?";
}

// ---------------------------------------------------------------------------

std::string ScriptedProvider::complete(const prompt::MessageList& messages, const ProviderConfig&) {
  std::lock_guard lock(mu_);
  const std::size_t index = received_.size();
  received_.push_back(messages);
  if (index >= responses_.size()) {
    throw ProviderError(ProviderErrorCode::MalformedProviderResponse,
                        "scripted provider exhausted after " + std::to_string(responses_.size()) + " responses");
  }
  return responses_[index];
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mu_);
  return received_.size();
}

std::vector<prompt::MessageList> ScriptedProvider::received() const {
  std::lock_guard lock(mu_);
  return received_;
}

ReplayProvider ReplayProvider::from_file(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(util::read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("replay file " + path.string() + " is not valid JSON: " + e.what());
  }
  std::map<std::string, std::string> entries;
  if (!doc.contains("entries") || !doc["entries"].is_object()) {
    throw std::runtime_error("replay file " + path.string() + " has no \"entries\" object");
  }
  for (const auto& [key, value] : doc["entries"].items()) entries.emplace(key, value.get<std::string>());
  return ReplayProvider(std::move(entries));
}

std::string ReplayProvider::key_for(const prompt::MessageList& messages) {
  const std::string transcript = prompt::to_transcript(messages);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(transcript.data(), transcript.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string ReplayProvider::complete(const prompt::MessageList& messages, const ProviderConfig&) {
  const std::string key = key_for(messages);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ProviderError(ProviderErrorCode::MalformedProviderResponse, "no replay entry for request " + key);
  }
  return it->second;
}

// ---------------------------------------------------------------------------

std::string extract_dsl(std::string_view raw) {
  std::string_view body = raw;
  if (const auto open = raw.find("```"); open != std::string_view::npos) {
    // Skip the info string ("```dsl") up to the end of the fence line.
    auto start = raw.find('\n', open);
    start = start == std::string_view::npos ? raw.size() : start + 1;
    auto close = raw.find("```", start);
    body = raw.substr(start, close == std::string_view::npos ? std::string_view::npos : close - start);
  }
  const auto trimmed = util::trim(body);
  if (trimmed.empty()) throw ExtractionError("model output contains no DSL");
  return std::string(trimmed);
}

GenerationFailure::GenerationFailure(int attempts, std::vector<prompt::Issue> last_errors,
                                     std::string last_output)
    : std::runtime_error("generation failed after " + std::to_string(attempts) + " attempt(s)"),
      attempts_(attempts),
      last_errors_(std::move(last_errors)),
      last_output_(std::move(last_output)) {}

namespace {

struct Attempt {
  std::string dsl_text;
  std::vector<prompt::Issue> issues;
};

}  // namespace

GenerationResult generate(const GenerationRequest& request, Provider& provider, const ProviderConfig& config,
                          const prompt::PromptAssets& assets) {
  if (request.mode == prompt::Mode::Repair) {
    throw prompt::PromptError(prompt::PromptErrorCode::BadMode, "generation mode must be interface or component");
  }
  if (request.max_repairs < 0) throw std::invalid_argument("max_repairs must be >= 0");
  config.validate();

  const bool interface = request.mode == prompt::Mode::Interface;
  prompt::PromptBundle bundle =
      interface ? prompt::build_interface_prompt(assets, request.description, assets.interface_examples)
                : prompt::build_component_prompt(assets, request.description, assets.component_examples);

  const int max_attempts = 1 + request.max_repairs;
  Attempt last;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::string raw = provider.complete(prompt::serialize(bundle), config);

    last = Attempt{};
    try {
      last.dsl_text = extract_dsl(raw);
    } catch (const ExtractionError& e) {
      last.dsl_text = raw;
      last.issues.emplace_back(dsl::ParseError(dsl::ErrorCode::EmptyDocument, e.what(), {0, raw.size()}));
    }

    if (last.issues.empty()) {
      try {
        GenerationResult result;
        result.mode = request.mode;
        result.attempts = attempt;
        if (interface) {
          auto layout = dsl::parse_document(last.dsl_text);
          result.lint = lint::lint_document(layout);
          if (result.lint.clean) {
            result.dsl = dsl::pretty_print(layout);
            auto canonical = dsl::parse_document(result.dsl);
            result.html = html::render_document(canonical);
            result.ast = std::move(canonical);
          }
        } else {
          auto fragment = dsl::parse_fragment(last.dsl_text);
          result.lint = lint::lint_fragment(fragment);
          if (result.lint.clean) {
            result.dsl = dsl::pretty_print(fragment);
            auto canonical = dsl::parse_fragment(result.dsl);
            result.html = html::render_fragment(canonical);
            result.ast = std::move(canonical);
          }
        }
        if (result.lint.clean) {
          result.provider_raw = std::move(raw);
          return result;
        }
        for (const auto& f : result.lint.errors()) last.issues.emplace_back(f);
      } catch (const dsl::ParseError& e) {
        last.issues.emplace_back(e);
      }
    }

    if (attempt < max_attempts) {
      bundle = prompt::build_repair_prompt(assets, request.mode, request.description, last.dsl_text, last.issues);
    }
  }
  throw GenerationFailure(max_attempts, std::move(last.issues), std::move(last.dsl_text));
}

}  // namespace tutorgen::llm
