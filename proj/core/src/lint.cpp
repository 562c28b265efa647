#include "tutorgen/lint.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace tutorgen::lint {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::L1: return "L1";
    case Rule::L2: return "L2";
    case Rule::L3: return "L3";
    case Rule::L4: return "L4";
    case Rule::L5: return "L5";
  }
  return "?";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

Severity severity_of(Rule rule) {
  return (rule == Rule::L4 || rule == Rule::L5) ? Severity::Warning : Severity::Error;
}

bool LintReport::has(Rule rule) const {
  return std::any_of(findings.begin(), findings.end(),
                     [rule](const Finding& f) { return f.rule == rule; });
}

std::vector<Finding> LintReport::errors() const {
  std::vector<Finding> out;
  std::copy_if(findings.begin(), findings.end(), std::back_inserter(out),
               [](const Finding& f) { return f.severity == Severity::Error; });
  return out;
}

namespace {

bool is_input(const dsl::Element& e) { return std::holds_alternative<dsl::Input>(e.node); }
bool is_label(const dsl::Element& e) { return std::holds_alternative<dsl::Label>(e.node); }

class Checker {
 public:
  explicit Checker(const dsl::IdMap& ids) : ids_(ids) {}

  void add(Rule rule, std::string message, std::optional<std::string> id = std::nullopt) {
    report_.findings.push_back({rule, severity_of(rule), std::move(message), std::move(id)});
  }

  void check_top_level(const std::vector<dsl::Element>& elements) {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (!elements[i].is_container()) {
        path_.push_back(i);
        const std::string& id = ids_.at(path_);
        add(Rule::L2,
            std::string(is_input(elements[i]) ? "input" : "label") + " " + id +
                " is not arranged inside a row or column",
            id);
        path_.pop_back();
      }
    }
  }

  // L1 and L5 over every sibling list, recursively.
  void check_siblings(const std::vector<dsl::Element>& elements) {
    const bool has_label_sibling = std::any_of(elements.begin(), elements.end(), is_label);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      path_.push_back(i);
      const dsl::Element& e = elements[i];
      if (const auto* input = std::get_if<dsl::Input>(&e.node)) {
        const std::string& id = ids_.at(path_);
        if (i > 0 && is_input(elements[i - 1])) {
          path_.back() = i - 1;
          const std::string prev = ids_.at(path_);
          path_.back() = i;
          add(Rule::L1, "input " + id + " directly follows input " + prev + " with no label between them",
              id);
        }
        const bool blank_placeholder = !input->placeholder || util::trim(*input->placeholder).empty();
        if (blank_placeholder && !has_label_sibling) {
          add(Rule::L5, "input " + id + " has no placeholder and no label next to it", id);
        }
      }
      if (e.is_container()) check_siblings(e.children());
      path_.pop_back();
    }
  }

  LintReport finish() {
    // Stable order: by rule, then document order within a rule.
    std::stable_sort(report_.findings.begin(), report_.findings.end(),
                     [](const Finding& a, const Finding& b) { return a.rule < b.rule; });
    report_.clean = std::none_of(report_.findings.begin(), report_.findings.end(),
                                 [](const Finding& f) { return f.severity == Severity::Error; });
    return std::move(report_);
  }

 private:
  const dsl::IdMap& ids_;
  dsl::ElementPath path_;
  LintReport report_;
};

}  // namespace

LintReport lint_document(const dsl::TutorLayout& layout) {
  Checker checker(layout.ids);
  checker.check_siblings(layout.body);
  checker.check_top_level(layout.body);
  if (dsl::count_nodes(layout).inputs == 0) {
    checker.add(Rule::L3, "layout has no input fields, so there is no step-by-step pathway");
  }
  if (util::trim(layout.title).empty()) {
    checker.add(Rule::L4, "title is blank; state the problem clearly", "title");
  }
  return checker.finish();
}

LintReport lint_fragment(const dsl::Fragment& fragment) {
  Checker checker(fragment.ids);
  checker.check_siblings(fragment.elements);
  checker.check_top_level(fragment.elements);
  return checker.finish();
}

}  // namespace tutorgen::lint
