#pragma once

// Fixed HTML template for tutor layouts. Output is byte-deterministic.

#include <map>
#include <string>
#include <string_view>

#include "tutorgen/dsl.hpp"

namespace tutorgen::html {

enum class TagKind { Title, Row, Column, Label, Input };

std::string_view to_string(TagKind kind);

struct HtmlText {
  std::string text;
  // element id -> kind of tag emitted for it
  std::map<std::string, TagKind> element_index;

  bool operator==(const HtmlText&) const = default;
};

/// Escapes `&`, `<`, `>` and `"`.
std::string escape_html(std::string_view value);

HtmlText render_document(const dsl::TutorLayout& layout);

/// Same template without the root div and title; ids are fragment-local.
HtmlText render_fragment(const dsl::Fragment& fragment);

}  // namespace tutorgen::html
