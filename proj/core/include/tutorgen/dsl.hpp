#pragma once

// Tutor layout DSL: lexer, recursive-descent parser, canonical printer and
// element id assignment.
//
//   document := title element*
//   fragment := element+
//   title    := "title" "[" VALUE "]"
//   element  := row | column | label | input
//   row      := "row" "{" element* "}"
//   column   := "column" "{" element* "}"
//   label    := "label" "[" VALUE "]"
//   input    := "input" ( "[" VALUE "]" )?
//
// VALUE is any run of characters up to the next unescaped `]` on the same
// line; `\]` and `\\` are the only escapes.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tutorgen::dsl {

inline constexpr int kMaxNestingDepth = 8;

/// Half-open byte range into the source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

enum class TokenKind {
  KeywordTitle,
  KeywordRow,
  KeywordColumn,
  KeywordLabel,
  KeywordInput,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Text,
  // A bare word outside the keyword set (e.g. "button"). Kept as a token so
  // the parser can report E_UNKNOWN_ELEMENT with the word's span.
  Word,
  EndOfInput,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::EndOfInput;
  Span span;
  // Decoded value for Text tokens, raw slice for Word tokens.
  std::string text;

  bool operator==(const Token&) const = default;
};

enum class ErrorCode {
  UnknownElement,
  UnexpectedToken,
  UnterminatedValue,
  MissingTitle,
  DuplicateTitle,
  EmptyDocument,
  DepthExceeded,
};

/// "E_UNKNOWN_ELEMENT" and friends; these strings are part of the wire format.
std::string_view to_string(ErrorCode code);

class ParseError : public std::runtime_error {
 public:
  ParseError(ErrorCode code, std::string message, Span span);

  ErrorCode code() const noexcept { return code_; }
  const Span& span() const noexcept { return span_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  Span span_;
};

// ---------------------------------------------------------------------------
// AST

struct Element;

struct Row {
  std::vector<Element> children;
  bool operator==(const Row&) const;
};

struct Column {
  std::vector<Element> children;
  bool operator==(const Column&) const;
};

struct Label {
  std::string value;
  bool operator==(const Label&) const = default;
};

struct Input {
  std::optional<std::string> placeholder;
  bool operator==(const Input&) const = default;
};

struct Element {
  std::variant<Row, Column, Label, Input> node;

  Element(Row r) : node(std::move(r)) {}
  Element(Column c) : node(std::move(c)) {}
  Element(Label l) : node(std::move(l)) {}
  Element(Input i) : node(std::move(i)) {}

  bool is_container() const noexcept {
    return std::holds_alternative<Row>(node) || std::holds_alternative<Column>(node);
  }
  /// Children of a Row or Column; empty for leaves.
  const std::vector<Element>& children() const noexcept;

  bool operator==(const Element&) const = default;
};

inline bool Row::operator==(const Row& o) const { return children == o.children; }
inline bool Column::operator==(const Column& o) const { return children == o.children; }

// Convenience constructors, mostly for tests and programmatic builders.
inline Element make_row(std::vector<Element> children) { return Row{std::move(children)}; }
inline Element make_column(std::vector<Element> children) { return Column{std::move(children)}; }
inline Element make_label(std::string value) { return Label{std::move(value)}; }
inline Element make_input(std::optional<std::string> placeholder = std::nullopt) {
  return Input{std::move(placeholder)};
}

/// Index path from the top-level element list down to a node.
using ElementPath = std::vector<std::size_t>;

/// path -> "in-k" / "lbl-k" / "row-k" / "col-k", dense per kind, pre-order.
using IdMap = std::map<ElementPath, std::string>;

/// id -> source span of the element's keyword through its closing token.
/// Only populated for ASTs produced by the parser.
using SourceMap = std::map<std::string, Span>;

IdMap assign_ids(const std::vector<Element>& elements);

struct TutorLayout {
  std::string title;
  std::vector<Element> body;
  IdMap ids;
  SourceMap spans;

  /// Builds a layout and assigns ids.
  static TutorLayout make(std::string title, std::vector<Element> body);

  const std::string& id_of(const ElementPath& path) const { return ids.at(path); }

  // Source spans are provenance, not structure.
  bool operator==(const TutorLayout& o) const {
    return title == o.title && body == o.body && ids == o.ids;
  }
};

struct Fragment {
  std::vector<Element> elements;
  IdMap ids;
  SourceMap spans;

  static Fragment make(std::vector<Element> elements);

  const std::string& id_of(const ElementPath& path) const { return ids.at(path); }

  bool operator==(const Fragment& o) const { return elements == o.elements && ids == o.ids; }
};

// ---------------------------------------------------------------------------
// Operations

/// Throws ParseError(E_UNTERMINATED_VALUE) when a `[` is not closed on its line.
std::vector<Token> tokenize(std::string_view source);

TutorLayout parse_document(std::string_view source);
Fragment parse_fragment(std::string_view source);

/// Canonical text: one element per line, two-space indent, no trailing newline.
std::string pretty_print(const TutorLayout& layout);
std::string pretty_print(const Fragment& fragment);

/// Re-applies the `\]` / `\\` escapes.
std::string escape_value(std::string_view value);

struct NodeCounts {
  std::size_t inputs = 0;
  std::size_t labels = 0;
  std::size_t rows = 0;
  std::size_t columns = 0;
  // Maximum Row/Column nesting; leaves do not add depth.
  std::size_t depth = 0;

  std::size_t total() const noexcept { return inputs + labels + rows + columns; }
  bool operator==(const NodeCounts&) const = default;
};

NodeCounts count_nodes(const std::vector<Element>& elements);
inline NodeCounts count_nodes(const TutorLayout& layout) { return count_nodes(layout.body); }
inline NodeCounts count_nodes(const Fragment& fragment) { return count_nodes(fragment.elements); }

/// 1-based line and column of a byte offset, for editor-style diagnostics.
struct LineColumn {
  std::size_t line = 1;
  std::size_t column = 1;
};
LineColumn line_column(std::string_view source, std::size_t offset);

}  // namespace tutorgen::dsl
