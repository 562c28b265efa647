#include "tutorgen/json_io.hpp"

namespace tutorgen {

using nlohmann::json;

namespace dsl {

void to_json(json& j, const Span& span) { j = {{"start", span.start}, {"end", span.end}}; }

void to_json(json& j, const ParseError& error) {
  j = {{"code", to_string(error.code())}, {"message", error.message()}, {"span", error.span()}};
}

void to_json(json& j, const NodeCounts& c) {
  j = {{"inputs", c.inputs}, {"labels", c.labels}, {"rows", c.rows}, {"columns", c.columns}, {"depth", c.depth}};
}

}  // namespace dsl

namespace html {

void to_json(json& j, const HtmlText& text) {
  json index = json::object();
  for (const auto& [id, kind] : text.element_index) index[id] = to_string(kind);
  j = {{"html", text.text}, {"element_index", std::move(index)}};
}

}  // namespace html

namespace lint {

void to_json(json& j, const Finding& f) {
  j = {{"rule", to_string(f.rule)},
       {"severity", to_string(f.severity)},
       {"message", f.message},
       {"element_id", f.element_id ? json(*f.element_id) : json(nullptr)}};
}

void to_json(json& j, const LintReport& report) {
  j = {{"clean", report.clean}, {"findings", report.findings}};
}

}  // namespace lint

namespace prompt {

void to_json(json& j, const Message& m) { j = {{"role", to_string(m.role)}, {"content", m.content}}; }

json issue_to_json(const Issue& issue) {
  if (const auto* pe = std::get_if<dsl::ParseError>(&issue)) return *pe;
  const auto& f = std::get<lint::Finding>(issue);
  json j = f;
  j["code"] = lint::to_string(f.rule);
  return j;
}

}  // namespace prompt

namespace llm {

void to_json(json& j, const GenerationResult& r) {
  const auto counts = std::visit([](const auto& ast) { return dsl::count_nodes(ast); }, r.ast);
  j = {{"mode", prompt::to_string(r.mode)},
       {"dsl", r.dsl},
       {"html", r.html.text},
       {"element_index", json(r.html)["element_index"]},
       {"lint", r.lint},
       {"counts", counts},
       {"attempts", r.attempts},
       {"provider_raw", r.provider_raw}};
}

void from_json(const json& j, ProviderConfig& c) {
  if (j.contains("endpoint")) j.at("endpoint").get_to(c.endpoint);
  if (j.contains("model")) j.at("model").get_to(c.model);
  if (j.contains("credential_env")) j.at("credential_env").get_to(c.credential_env);
  if (j.contains("temperature")) j.at("temperature").get_to(c.temperature);
  if (j.contains("max_tokens")) j.at("max_tokens").get_to(c.max_tokens);
  if (j.contains("timeout_seconds")) j.at("timeout_seconds").get_to(c.timeout_seconds);
}

}  // namespace llm

namespace library {

void to_json(json& j, const ComponentRecord& r) {
  j = {{"id", r.id},     {"name", r.name}, {"description", r.description},
       {"dsl", r.dsl},   {"tags", r.tags}, {"created_at", r.created_at}};
}

}  // namespace library

namespace klm {

void to_json(json& j, const KlmEstimate& e) {
  json counts = json::object();
  for (Operator op : kOperators) counts[std::string(1, to_char(op))] = e.count(op);
  j = {{"keystrokes", e.keystrokes}, {"counts", std::move(counts)}, {"total_seconds", e.total_seconds()}};
}

void to_json(json& j, const ComparisonReport& r) {
  j = {{"keystrokes_before", r.keystrokes_before},
       {"keystrokes_after", r.keystrokes_after},
       {"seconds_before", static_cast<double>(r.time_before.count()) / 1e6},
       {"seconds_after", static_cast<double>(r.time_after.count()) / 1e6},
       {"keystroke_reduction_percent", r.keystroke_reduction_percent},
       {"time_reduction_percent", r.time_reduction_percent},
       {"keystroke_change", format_change(r.keystroke_reduction_percent)},
       {"time_change", format_change(r.time_reduction_percent)}};
}

}  // namespace klm

}  // namespace tutorgen
