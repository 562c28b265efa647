#include "tutorgen/prompt.hpp"

#include <algorithm>
#include <cstdlib>

#include "text_util.hpp"

#ifndef TUTORGEN_DEFAULT_ASSET_DIR
#define TUTORGEN_DEFAULT_ASSET_DIR "assets"
#endif

namespace tutorgen::prompt {

namespace fs = std::filesystem;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Interface: return "interface";
    case Mode::Component: return "component";
    case Mode::Repair: return "repair";
  }
  return "?";
}

std::string_view to_string(PromptErrorCode code) {
  switch (code) {
    case PromptErrorCode::EmptyDescription: return "EmptyDescription";
    case PromptErrorCode::NoErrorsToRepair: return "NoErrorsToRepair";
    case PromptErrorCode::InvalidExample: return "InvalidExample";
    case PromptErrorCode::MissingAsset: return "MissingAsset";
    case PromptErrorCode::BadMode: return "BadMode";
  }
  return "?";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

fs::path default_asset_dir() {
  if (const char* env = std::getenv("TUTORGEN_ASSETS"); env != nullptr && *env != '\0') return env;
  return TUTORGEN_DEFAULT_ASSET_DIR;
}

namespace {

std::string read_asset(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw PromptError(PromptErrorCode::MissingAsset, "missing prompt asset " + path.string());
  }
  std::string text = util::read_file(path.string());
  // Asset files end with a newline; section text does not.
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

Sections load_sections(const fs::path& dir) {
  return {read_asset(dir / "system_description.txt"), read_asset(dir / "format_explanation.txt"),
          read_asset(dir / "design_instructions.txt"), read_asset(dir / "task_instruction.txt")};
}

// examples/<name>.tut paired with examples/<name>.txt, ordered by name.
std::vector<Example> load_examples(const fs::path& dir) {
  std::vector<fs::path> sources;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".tut") sources.push_back(entry.path());
    }
  }
  std::sort(sources.begin(), sources.end());
  std::vector<Example> out;
  for (const auto& tut : sources) {
    fs::path desc = tut;
    desc.replace_extension(".txt");
    out.push_back({read_asset(desc), read_asset(tut)});
  }
  return out;
}

void require_description(std::string_view description) {
  if (util::trim(description).empty()) {
    throw PromptError(PromptErrorCode::EmptyDescription, "description must not be empty");
  }
}

void replace_all(std::string& text, std::string_view slot, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(slot, pos)) != std::string::npos) {
    text.replace(pos, slot.size(), value);
    pos += value.size();
  }
}

PromptBundle make_bundle(const Sections& s, Mode mode, Mode target, std::string_view description,
                         const std::vector<Example>& examples) {
  PromptBundle b;
  b.system_description = s.system_description;
  b.format_explanation = s.format_explanation;
  b.design_instructions = s.design_instructions;
  b.task_instruction = s.task_instruction;
  b.examples = examples;
  b.mode = mode;
  b.target = target;
  b.description = std::string(util::trim(description));
  return b;
}

}  // namespace

PromptAssets PromptAssets::load(const fs::path& prompt_dir) {
  PromptAssets assets;
  assets.interface = load_sections(prompt_dir / "interface");
  assets.component = load_sections(prompt_dir / "component");
  assets.repair_task_instruction = read_asset(prompt_dir / "repair" / "task_instruction.txt");
  assets.interface_examples = load_examples(prompt_dir / "interface" / "examples");
  assets.component_examples = load_examples(prompt_dir / "component" / "examples");
  validate_examples(Mode::Interface, assets.interface_examples);
  validate_examples(Mode::Component, assets.component_examples);
  return assets;
}

const Sections& PromptAssets::sections(Mode target) const {
  if (target == Mode::Repair) throw PromptError(PromptErrorCode::BadMode, "repair is not a target grammar");
  return target == Mode::Interface ? interface : component;
}

const std::vector<Example>& PromptAssets::examples(Mode target) const {
  if (target == Mode::Repair) throw PromptError(PromptErrorCode::BadMode, "repair is not a target grammar");
  return target == Mode::Interface ? interface_examples : component_examples;
}

void validate_examples(Mode target, const std::vector<Example>& examples) {
  if (examples.empty()) {
    throw PromptError(PromptErrorCode::InvalidExample,
                      "at least one " + std::string(to_string(target)) + " example is required");
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto where = std::string(to_string(target)) + " example " + std::to_string(i + 1);
    if (util::trim(examples[i].description).empty()) {
      throw PromptError(PromptErrorCode::InvalidExample, where + " has no description");
    }
    lint::LintReport report;
    try {
      if (target == Mode::Interface) {
        report = lint::lint_document(dsl::parse_document(examples[i].dsl));
      } else {
        report = lint::lint_fragment(dsl::parse_fragment(examples[i].dsl));
      }
    } catch (const dsl::ParseError& e) {
      throw PromptError(PromptErrorCode::InvalidExample, where + " does not parse: " + e.what());
    }
    if (!report.clean) {
      throw PromptError(PromptErrorCode::InvalidExample,
                        where + " violates " + std::string(lint::to_string(report.errors().front().rule)));
    }
  }
}

std::string describe_issue(const Issue& issue, std::string_view source) {
  if (const auto* pe = std::get_if<dsl::ParseError>(&issue)) {
    const auto lc = dsl::line_column(source, pe->span().start);
    return std::string(dsl::to_string(pe->code())) + " at bytes " + std::to_string(pe->span().start) + "-" +
           std::to_string(pe->span().end) + " (line " + std::to_string(lc.line) + ", column " +
           std::to_string(lc.column) + "): " + pe->message();
  }
  const auto& f = std::get<lint::Finding>(issue);
  std::string out = std::string(lint::to_string(f.rule)) + " (" + std::string(lint::to_string(f.severity)) + ")";
  if (f.element_id) out += " on " + *f.element_id;
  return out + ": " + f.message;
}

PromptBundle build_interface_prompt(const PromptAssets& assets, std::string_view description,
                                    const std::vector<Example>& examples) {
  require_description(description);
  validate_examples(Mode::Interface, examples);
  return make_bundle(assets.interface, Mode::Interface, Mode::Interface, description, examples);
}

PromptBundle build_component_prompt(const PromptAssets& assets, std::string_view description,
                                    const std::vector<Example>& examples) {
  require_description(description);
  validate_examples(Mode::Component, examples);
  return make_bundle(assets.component, Mode::Component, Mode::Component, description, examples);
}

PromptBundle build_repair_prompt(const PromptAssets& assets, Mode target, std::string_view description,
                                 std::string_view previous_output, const std::vector<Issue>& errors) {
  if (errors.empty()) {
    throw PromptError(PromptErrorCode::NoErrorsToRepair, "repair needs at least one error");
  }
  require_description(description);
  PromptBundle b = make_bundle(assets.sections(target), Mode::Repair, target, description,
                               assets.examples(target));

  std::string error_lines;
  for (const Issue& issue : errors) error_lines += "- " + describe_issue(issue, previous_output) + "\n";
  if (!error_lines.empty()) error_lines.pop_back();

  std::string task = assets.repair_task_instruction;
  replace_all(task, "{{target}}",
              target == Mode::Interface ? "one complete tutor document starting with title[...]"
                                        : "a titleless component made of rows and columns");
  replace_all(task, "{{previous_output}}", previous_output);
  replace_all(task, "{{errors}}", error_lines);
  b.task_instruction = std::move(task);
  return b;
}

MessageList serialize(const PromptBundle& bundle) {
  std::string system;
  system += "## System Description\n" + bundle.system_description + "\n\n";
  system += "## Format Explanation\n" + bundle.format_explanation + "\n\n";
  system += "## Design Instructions\n" + bundle.design_instructions;

  std::string user = "## Examples\n";
  for (std::size_t i = 0; i < bundle.examples.size(); ++i) {
    const auto& ex = bundle.examples[i];
    user += "\n### Example " + std::to_string(i + 1) + "\n";
    user += "Description: " + ex.description + "\n";
    user += "```\n" + ex.dsl + "\n```\n";
  }
  user += "\n## Task Instruction\n" + bundle.task_instruction + "\n\n";
  user += bundle.target == Mode::Component ? "## Component Description\n" : "## Tutor Description\n";
  user += bundle.description;

  return {{Role::System, std::move(system)}, {Role::User, std::move(user)}};
}

std::string to_transcript(const MessageList& messages) {
  std::string out;
  for (const auto& m : messages) {
    out += "<<<" + std::string(to_string(m.role)) + ">>>\n" + m.content + "\n";
  }
  return out;
}

}  // namespace tutorgen::prompt
