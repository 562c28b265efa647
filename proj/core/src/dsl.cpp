#include "tutorgen/dsl.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace tutorgen::dsl {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::KeywordTitle: return "'title'";
    case TokenKind::KeywordRow: return "'row'";
    case TokenKind::KeywordColumn: return "'column'";
    case TokenKind::KeywordLabel: return "'label'";
    case TokenKind::KeywordInput: return "'input'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Text: return "value text";
    case TokenKind::Word: return "word";
    case TokenKind::EndOfInput: return "end of input";
  }
  return "?";
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownElement: return "E_UNKNOWN_ELEMENT";
    case ErrorCode::UnexpectedToken: return "E_UNEXPECTED_TOKEN";
    case ErrorCode::UnterminatedValue: return "E_UNTERMINATED_VALUE";
    case ErrorCode::MissingTitle: return "E_MISSING_TITLE";
    case ErrorCode::DuplicateTitle: return "E_DUPLICATE_TITLE";
    case ErrorCode::EmptyDocument: return "E_EMPTY_DOCUMENT";
    case ErrorCode::DepthExceeded: return "E_DEPTH_EXCEEDED";
  }
  return "E_UNKNOWN";
}

ParseError::ParseError(ErrorCode code, std::string message, Span span)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      message_(std::move(message)),
      span_(span) {}

const std::vector<Element>& Element::children() const noexcept {
  static const std::vector<Element> kNone;
  if (const auto* row = std::get_if<Row>(&node)) return row->children;
  if (const auto* col = std::get_if<Column>(&node)) return col->children;
  return kNone;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(char c) {
  return !is_space(c) && c != '[' && c != ']' && c != '{' && c != '}';
}

TokenKind keyword_or_word(std::string_view word) {
  if (word == "title") return TokenKind::KeywordTitle;
  if (word == "row") return TokenKind::KeywordRow;
  if (word == "column") return TokenKind::KeywordColumn;
  if (word == "label") return TokenKind::KeywordLabel;
  if (word == "input") return TokenKind::KeywordInput;
  return TokenKind::Word;
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  const std::size_t n = source.size();

  while (pos < n) {
    const char c = source[pos];
    if (is_space(c)) {
      ++pos;
      continue;
    }
    if (c == '{') {
      tokens.push_back({TokenKind::LBrace, {pos, pos + 1}, {}});
      ++pos;
    } else if (c == '}') {
      tokens.push_back({TokenKind::RBrace, {pos, pos + 1}, {}});
      ++pos;
    } else if (c == ']') {
      tokens.push_back({TokenKind::RBracket, {pos, pos + 1}, {}});
      ++pos;
    } else if (c == '[') {
      const std::size_t open = pos;
      tokens.push_back({TokenKind::LBracket, {pos, pos + 1}, {}});
      ++pos;
      std::string value;
      const std::size_t value_start = pos;
      bool closed = false;
      while (pos < n) {
        const char v = source[pos];
        if (v == '\n') break;
        if (v == '\\' && pos + 1 < n && (source[pos + 1] == ']' || source[pos + 1] == '\\')) {
          value.push_back(source[pos + 1]);
          pos += 2;
          continue;
        }
        if (v == ']') {
          closed = true;
          break;
        }
        value.push_back(v);
        ++pos;
      }
      if (!closed) {
        throw ParseError(ErrorCode::UnterminatedValue, "'[' has no matching ']' on the same line",
                         {open, pos});
      }
      tokens.push_back({TokenKind::Text, {value_start, pos}, std::move(value)});
      tokens.push_back({TokenKind::RBracket, {pos, pos + 1}, {}});
      ++pos;
    } else {
      const std::size_t start = pos;
      while (pos < n && is_word_char(source[pos])) ++pos;
      std::string_view word = source.substr(start, pos - start);
      const TokenKind kind = keyword_or_word(word);
      tokens.push_back({kind, {start, pos}, kind == TokenKind::Word ? std::string(word) : std::string()});
    }
  }
  tokens.push_back({TokenKind::EndOfInput, {n, n}, {}});
  return tokens;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

using PathSpans = std::map<ElementPath, Span>;

class Parser {
 public:
  explicit Parser(std::string_view source) : tokens_(tokenize(source)) {}

  bool at_end() const { return peek().kind == TokenKind::EndOfInput; }
  const Token& peek() const { return tokens_[pos_]; }

  std::string parse_title() {
    expect(TokenKind::KeywordTitle);
    return parse_bracket_value("title");
  }

  /// Parses elements until `stop` (RBrace or EndOfInput).
  std::vector<Element> parse_elements(TokenKind stop, bool in_document, ElementPath& path) {
    std::vector<Element> out;
    while (peek().kind != stop) {
      if (peek().kind == TokenKind::EndOfInput) {
        throw ParseError(ErrorCode::UnexpectedToken, "expected '}' before end of input", peek().span);
      }
      path.push_back(out.size());
      out.push_back(parse_element(in_document, path));
      path.pop_back();
    }
    return out;
  }

  PathSpans take_spans() { return std::move(spans_); }

 private:
  Element parse_element(bool in_document, ElementPath& path) {
    const Token& tok = peek();
    const std::size_t start = tok.span.start;
    switch (tok.kind) {
      case TokenKind::KeywordRow:
      case TokenKind::KeywordColumn: {
        const bool is_row = tok.kind == TokenKind::KeywordRow;
        if (depth_ + 1 > kMaxNestingDepth) {
          throw ParseError(ErrorCode::DepthExceeded,
                           "rows and columns may nest at most " + std::to_string(kMaxNestingDepth) +
                               " levels deep",
                           tok.span);
        }
        advance();
        expect(TokenKind::LBrace);
        ++depth_;
        auto children = parse_elements(TokenKind::RBrace, in_document, path);
        --depth_;
        const Span close = expect(TokenKind::RBrace);
        spans_[path] = {start, close.end};
        if (is_row) return Row{std::move(children)};
        return Column{std::move(children)};
      }
      case TokenKind::KeywordLabel: {
        advance();
        std::string value = parse_bracket_value("label");
        if (util::trim(value).empty()) {
          throw ParseError(ErrorCode::UnexpectedToken, "label value must not be empty",
                           {start, tokens_[pos_ - 1].span.end});
        }
        spans_[path] = {start, tokens_[pos_ - 1].span.end};
        return Label{std::move(value)};
      }
      case TokenKind::KeywordInput: {
        advance();
        std::optional<std::string> placeholder;
        if (peek().kind == TokenKind::LBracket) placeholder = parse_bracket_value("input");
        spans_[path] = {start, tokens_[pos_ - 1].span.end};
        return Input{std::move(placeholder)};
      }
      case TokenKind::KeywordTitle:
        if (in_document) {
          throw ParseError(ErrorCode::DuplicateTitle, "a document has exactly one title", tok.span);
        }
        throw ParseError(ErrorCode::UnexpectedToken, "components cannot have a title", tok.span);
      case TokenKind::Word:
        throw ParseError(ErrorCode::UnknownElement,
                         "unknown element '" + tok.text + "'; expected row, column, label or input",
                         tok.span);
      default:
        throw ParseError(ErrorCode::UnexpectedToken,
                         "unexpected " + std::string(to_string(tok.kind)) + "; expected an element",
                         tok.span);
    }
  }

  std::string parse_bracket_value(std::string_view owner) {
    if (peek().kind != TokenKind::LBracket) {
      throw ParseError(ErrorCode::UnexpectedToken,
                       "expected '[' after '" + std::string(owner) + "', found " +
                           std::string(to_string(peek().kind)),
                       peek().span);
    }
    advance();
    // The lexer always emits Text and RBracket after LBracket.
    std::string value = tokens_[pos_].text;
    advance();
    advance();
    return value;
  }

  Span expect(TokenKind kind) {
    const Token& tok = peek();
    if (tok.kind != kind) {
      throw ParseError(ErrorCode::UnexpectedToken,
                       "expected " + std::string(to_string(kind)) + ", found " +
                           std::string(to_string(tok.kind)),
                       tok.span);
    }
    advance();
    return tok.span;
  }

  void advance() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  PathSpans spans_;
};

void assign_ids_into(const std::vector<Element>& elements, ElementPath& path, IdMap& ids,
                     std::size_t (&counters)[4]) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    path.push_back(i);
    const Element& e = elements[i];
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Row>) {
            ids[path] = "row-" + std::to_string(++counters[0]);
          } else if constexpr (std::is_same_v<T, Column>) {
            ids[path] = "col-" + std::to_string(++counters[1]);
          } else if constexpr (std::is_same_v<T, Label>) {
            ids[path] = "lbl-" + std::to_string(++counters[2]);
          } else {
            ids[path] = "in-" + std::to_string(++counters[3]);
          }
        },
        e.node);
    if (e.is_container()) assign_ids_into(e.children(), path, ids, counters);
    path.pop_back();
  }
}

SourceMap to_source_map(const IdMap& ids, const PathSpans& spans) {
  SourceMap out;
  for (const auto& [path, span] : spans) out[ids.at(path)] = span;
  return out;
}

}  // namespace

IdMap assign_ids(const std::vector<Element>& elements) {
  IdMap ids;
  ElementPath path;
  std::size_t counters[4] = {0, 0, 0, 0};
  assign_ids_into(elements, path, ids, counters);
  return ids;
}

TutorLayout TutorLayout::make(std::string title, std::vector<Element> body) {
  TutorLayout layout;
  layout.title = std::move(title);
  layout.body = std::move(body);
  layout.ids = assign_ids(layout.body);
  return layout;
}

Fragment Fragment::make(std::vector<Element> elements) {
  Fragment fragment;
  fragment.elements = std::move(elements);
  fragment.ids = assign_ids(fragment.elements);
  return fragment;
}

TutorLayout parse_document(std::string_view source) {
  Parser parser(source);
  if (parser.at_end()) {
    throw ParseError(ErrorCode::EmptyDocument, "document is empty", {0, source.size()});
  }
  const Token& first = parser.peek();
  if (first.kind == TokenKind::Word) {
    throw ParseError(ErrorCode::UnknownElement,
                     "unknown element '" + first.text + "'; a document must start with title[...]",
                     first.span);
  }
  if (first.kind != TokenKind::KeywordTitle) {
    throw ParseError(ErrorCode::MissingTitle, "a document must start with title[...]", first.span);
  }
  TutorLayout layout;
  layout.title = parser.parse_title();
  ElementPath path;
  layout.body = parser.parse_elements(TokenKind::EndOfInput, true, path);
  layout.ids = assign_ids(layout.body);
  layout.spans = to_source_map(layout.ids, parser.take_spans());
  return layout;
}

Fragment parse_fragment(std::string_view source) {
  Parser parser(source);
  if (parser.at_end()) {
    throw ParseError(ErrorCode::EmptyDocument, "component is empty", {0, source.size()});
  }
  Fragment fragment;
  ElementPath path;
  fragment.elements = parser.parse_elements(TokenKind::EndOfInput, false, path);
  fragment.ids = assign_ids(fragment.elements);
  fragment.spans = to_source_map(fragment.ids, parser.take_spans());
  return fragment;
}

// ---------------------------------------------------------------------------
// Printer

std::string escape_value(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    if (c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

namespace {

void print_elements(const std::vector<Element>& elements, int indent, std::string& out);

void print_element(const Element& e, int indent, std::string& out) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Row> || std::is_same_v<T, Column>) {
          out += std::is_same_v<T, Row> ? "row {" : "column {";
          if (node.children.empty()) {
            out += "}";
            return;
          }
          out += "\n";
          print_elements(node.children, indent + 1, out);
          out += "\n";
          out.append(static_cast<std::size_t>(indent) * 2, ' ');
          out += "}";
        } else if constexpr (std::is_same_v<T, Label>) {
          out += "label[" + escape_value(node.value) + "]";
        } else {
          out += "input";
          if (node.placeholder) out += "[" + escape_value(*node.placeholder) + "]";
        }
      },
      e.node);
}

void print_elements(const std::vector<Element>& elements, int indent, std::string& out) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i > 0) out += "\n";
    print_element(elements[i], indent, out);
  }
}

void count_into(const std::vector<Element>& elements, std::size_t level, NodeCounts& counts) {
  for (const Element& e : elements) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Row>) ++counts.rows;
          else if constexpr (std::is_same_v<T, Column>) ++counts.columns;
          else if constexpr (std::is_same_v<T, Label>) ++counts.labels;
          else ++counts.inputs;
        },
        e.node);
    if (e.is_container()) {
      counts.depth = std::max(counts.depth, level + 1);
      count_into(e.children(), level + 1, counts);
    }
  }
}

}  // namespace

std::string pretty_print(const TutorLayout& layout) {
  std::string out = "title[" + escape_value(layout.title) + "]";
  if (!layout.body.empty()) {
    out += "\n";
    print_elements(layout.body, 0, out);
  }
  return out;
}

std::string pretty_print(const Fragment& fragment) {
  std::string out;
  print_elements(fragment.elements, 0, out);
  return out;
}

NodeCounts count_nodes(const std::vector<Element>& elements) {
  NodeCounts counts;
  count_into(elements, 0, counts);
  return counts;
}

LineColumn line_column(std::string_view source, std::size_t offset) {
  offset = std::min(offset, source.size());
  LineColumn lc;
  for (std::size_t i = 0; i < offset; ++i) {
    if (source[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

}  // namespace tutorgen::dsl
