#pragma once

// JSON shapes shared by the HTTP service, the CLI and on-disk reports.

#include <nlohmann/json.hpp>

#include "tutorgen/component_store.hpp"
#include "tutorgen/dsl.hpp"
#include "tutorgen/gateway.hpp"
#include "tutorgen/klm.hpp"
#include "tutorgen/lint.hpp"
#include "tutorgen/prompt.hpp"
#include "tutorgen/render.hpp"

namespace tutorgen {

namespace dsl {
void to_json(nlohmann::json& j, const Span& span);
// {code, message, span: {start, end}}
void to_json(nlohmann::json& j, const ParseError& error);
void to_json(nlohmann::json& j, const NodeCounts& counts);
}  // namespace dsl

namespace html {
// {html, element_index: {id: kind}}
void to_json(nlohmann::json& j, const HtmlText& text);
}  // namespace html

namespace lint {
// {rule, severity, message, element_id}; element_id is null when absent.
void to_json(nlohmann::json& j, const Finding& finding);
void to_json(nlohmann::json& j, const LintReport& report);
}  // namespace lint

namespace prompt {
void to_json(nlohmann::json& j, const Message& message);
nlohmann::json issue_to_json(const Issue& issue);
}  // namespace prompt

namespace llm {
void to_json(nlohmann::json& j, const GenerationResult& result);
/// Reads the keys present in `j`; missing keys keep their defaults.
void from_json(const nlohmann::json& j, ProviderConfig& config);
}  // namespace llm

namespace library {
void to_json(nlohmann::json& j, const ComponentRecord& record);
}  // namespace library

namespace klm {
void to_json(nlohmann::json& j, const KlmEstimate& estimate);
void to_json(nlohmann::json& j, const ComparisonReport& report);
}  // namespace klm

}  // namespace tutorgen
