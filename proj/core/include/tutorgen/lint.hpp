#pragma once

// Machine-checkable layout design rules.
//
//   L1 error    two Input siblings next to each other with no Label between
//   L2 error    Label or Input at top level, outside any row or column
//   L3 error    document has no Input at all
//   L4 warning  title is blank
//   L5 warning  Input with neither a placeholder nor a Label sibling
//
// Fragments are checked against L1, L2 and L5 only.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tutorgen/dsl.hpp"

namespace tutorgen::lint {

enum class Rule { L1, L2, L3, L4, L5 };
enum class Severity { Error, Warning };

std::string_view to_string(Rule rule);
std::string_view to_string(Severity severity);

struct Finding {
  Rule rule = Rule::L1;
  Severity severity = Severity::Error;
  std::string message;
  std::optional<std::string> element_id;

  bool operator==(const Finding&) const = default;
};

struct LintReport {
  std::vector<Finding> findings;
  bool clean = true;

  bool has(Rule rule) const;
  std::vector<Finding> errors() const;

  bool operator==(const LintReport&) const = default;
};

Severity severity_of(Rule rule);

LintReport lint_document(const dsl::TutorLayout& layout);
LintReport lint_fragment(const dsl::Fragment& fragment);

}  // namespace tutorgen::lint
