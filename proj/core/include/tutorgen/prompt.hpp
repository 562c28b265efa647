#pragma once

// Five-section generation prompts (system description, format explanation,
// design instructions, task instruction, examples) and their chat-message
// serialization. Section wording lives in asset files under
// prompt/<mode>/<section>.txt so it can change without a rebuild.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tutorgen/dsl.hpp"
#include "tutorgen/lint.hpp"

namespace tutorgen::prompt {

enum class Mode { Interface, Component, Repair };

std::string_view to_string(Mode mode);

struct Example {
  std::string description;
  std::string dsl;

  bool operator==(const Example&) const = default;
};

struct Sections {
  std::string system_description;
  std::string format_explanation;
  std::string design_instructions;
  std::string task_instruction;
};

enum class PromptErrorCode { EmptyDescription, NoErrorsToRepair, InvalidExample, MissingAsset, BadMode };

std::string_view to_string(PromptErrorCode code);

class PromptError : public std::runtime_error {
 public:
  PromptError(PromptErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  PromptErrorCode code() const noexcept { return code_; }

 private:
  PromptErrorCode code_;
};

/// Section texts and few-shot sets for both generation modes. Loading
/// validates every example, so a loaded asset set is always usable.
struct PromptAssets {
  Sections interface;
  Sections component;
  // Template with {{target}}, {{previous_output}} and {{errors}} slots.
  std::string repair_task_instruction;
  std::vector<Example> interface_examples;
  std::vector<Example> component_examples;

  static PromptAssets load(const std::filesystem::path& prompt_dir);

  const Sections& sections(Mode target) const;
  const std::vector<Example>& examples(Mode target) const;
};

/// Directory holding prompt/, traces/ and replay/. Resolution order:
/// $TUTORGEN_ASSETS, then the compiled-in default.
std::filesystem::path default_asset_dir();

struct PromptBundle {
  std::string system_description;
  std::string format_explanation;
  std::string design_instructions;
  std::string task_instruction;
  std::vector<Example> examples;
  Mode mode = Mode::Interface;
  // Grammar the answer must follow; equals `mode` except for repairs.
  Mode target = Mode::Interface;
  std::string description;

  bool operator==(const PromptBundle&) const = default;
};

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct Message {
  Role role = Role::User;
  std::string content;

  bool operator==(const Message&) const = default;
};

using MessageList = std::vector<Message>;

/// Something the model got wrong in a previous attempt.
using Issue = std::variant<dsl::ParseError, lint::Finding>;

/// One line of repair feedback; parse errors carry line/column into `source`.
std::string describe_issue(const Issue& issue, std::string_view source);

/// Throws PromptError(InvalidExample) if an example fails to parse as the
/// mode's grammar or has Error-severity lint findings.
void validate_examples(Mode target, const std::vector<Example>& examples);

PromptBundle build_interface_prompt(const PromptAssets& assets, std::string_view description,
                                    const std::vector<Example>& examples);

PromptBundle build_component_prompt(const PromptAssets& assets, std::string_view description,
                                    const std::vector<Example>& examples);

PromptBundle build_repair_prompt(const PromptAssets& assets, Mode target, std::string_view description,
                                 std::string_view previous_output, const std::vector<Issue>& errors);

/// [System: description, format, design] + [User: examples, task, request].
MessageList serialize(const PromptBundle& bundle);

/// Single-string form of a message list, used for hashing and golden files.
std::string to_transcript(const MessageList& messages);

}  // namespace tutorgen::prompt
