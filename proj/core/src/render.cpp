#include "tutorgen/render.hpp"

namespace tutorgen::html {

std::string_view to_string(TagKind kind) {
  switch (kind) {
    case TagKind::Title: return "title";
    case TagKind::Row: return "row";
    case TagKind::Column: return "column";
    case TagKind::Label: return "label";
    case TagKind::Input: return "input";
  }
  return "?";
}

std::string escape_html(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace {

class Emitter {
 public:
  explicit Emitter(const dsl::IdMap& ids) : ids_(ids) {}

  void elements(const std::vector<dsl::Element>& elements, int indent) {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      path_.push_back(i);
      element(elements[i], indent);
      path_.pop_back();
    }
  }

  void line(int indent, std::string_view content) {
    if (!out_.text.empty()) out_.text += '\n';
    out_.text.append(static_cast<std::size_t>(indent) * 2, ' ');
    out_.text += content;
  }

  void index(const std::string& id, TagKind kind) { out_.element_index.emplace(id, kind); }

  HtmlText take() { return std::move(out_); }

 private:
  void element(const dsl::Element& e, int indent) {
    const std::string& id = ids_.at(path_);
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, dsl::Row> || std::is_same_v<T, dsl::Column>) {
            constexpr bool is_row = std::is_same_v<T, dsl::Row>;
            index(id, is_row ? TagKind::Row : TagKind::Column);
            std::string open = std::string("<div class=\"") +
                               (is_row ? "tutor-row" : "tutor-column") + "\" id=\"" + id + "\">";
            if (node.children.empty()) {
              line(indent, open + "</div>");
              return;
            }
            line(indent, open);
            elements(node.children, indent + 1);
            line(indent, "</div>");
          } else if constexpr (std::is_same_v<T, dsl::Label>) {
            index(id, TagKind::Label);
            line(indent, "<label class=\"tutor-label\" id=\"" + id + "\">" +
                             escape_html(node.value) + "</label>");
          } else {
            index(id, TagKind::Input);
            line(indent, "<input class=\"tutor-input\" id=\"" + id + "\" placeholder=\"" +
                             escape_html(node.placeholder.value_or("")) + "\">");
          }
        },
        e.node);
  }

  const dsl::IdMap& ids_;
  dsl::ElementPath path_;
  HtmlText out_;
};

}  // namespace

HtmlText render_document(const dsl::TutorLayout& layout) {
  Emitter emit(layout.ids);
  emit.line(0, "<div class=\"tutor\">");
  emit.line(1, "<h2 class=\"tutor-title\" id=\"title\">" + escape_html(layout.title) + "</h2>");
  emit.index("title", TagKind::Title);
  emit.elements(layout.body, 1);
  emit.line(0, "</div>");
  return emit.take();
}

HtmlText render_fragment(const dsl::Fragment& fragment) {
  Emitter emit(fragment.ids);
  emit.elements(fragment.elements, 0);
  return emit.take();
}

}  // namespace tutorgen::html
