#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "tutorgen/lint.hpp"

using namespace tutorgen;
using lint::Rule;

namespace {

lint::LintReport lint_doc(std::string_view source) { return lint::lint_document(dsl::parse_document(source)); }

std::vector<std::pair<Rule, std::optional<std::string>>> summary(const lint::LintReport& report) {
  std::vector<std::pair<Rule, std::optional<std::string>>> out;
  for (const auto& f : report.findings) out.emplace_back(f.rule, f.element_id);
  return out;
}

// Inserts a label between the first pair of adjacent inputs found inside a
// container. Top-level pairs are skipped: a label there is itself loose.
bool separate_in_children(std::vector<dsl::Element>& children) {
  for (std::size_t i = 0; i + 1 < children.size(); ++i) {
    if (std::holds_alternative<dsl::Input>(children[i].node) &&
        std::holds_alternative<dsl::Input>(children[i + 1].node)) {
      children.insert(children.begin() + static_cast<std::ptrdiff_t>(i) + 1, dsl::make_label("then"));
      return true;
    }
  }
  for (auto& e : children) {
    if (auto* row = std::get_if<dsl::Row>(&e.node)) {
      if (separate_in_children(row->children)) return true;
    } else if (auto* col = std::get_if<dsl::Column>(&e.node)) {
      if (separate_in_children(col->children)) return true;
    }
  }
  return false;
}

bool separate_first_adjacent_pair(std::vector<dsl::Element>& body) {
  for (auto& e : body) {
    if (auto* row = std::get_if<dsl::Row>(&e.node)) {
      if (separate_in_children(row->children)) return true;
    } else if (auto* col = std::get_if<dsl::Column>(&e.node)) {
      if (separate_in_children(col->children)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_SUITE("lint_document") {
  TEST_CASE("simple fixture is clean with no findings") {
    const auto report = lint_doc(test::read_file(test::corpus_dir() / "simple_sequential.tut"));
    CHECK(report.clean);
    CHECK(report.findings.empty());
  }

  TEST_CASE("two adjacent inputs") {
    const auto report = lint_doc("title[T] row { input input }");
    CHECK_FALSE(report.clean);
    REQUIRE(report.has(Rule::L1));
    CHECK(report.findings.front().element_id == "in-2");
  }

  TEST_CASE("a loose label and no inputs") {
    const auto report = lint_doc("title[T] label[only text]");
    CHECK(report.has(Rule::L2));
    CHECK(report.has(Rule::L3));
    CHECK_FALSE(report.clean);
  }

  TEST_CASE("warnings do not break cleanliness") {
    const auto report = lint_doc("title[ ] row { input }");
    CHECK(report.has(Rule::L4));
    CHECK(report.has(Rule::L5));
    CHECK(report.clean);
    CHECK(report.errors().empty());
  }

  TEST_CASE("a label anywhere in the sibling list satisfies L5") {
    CHECK_FALSE(lint_doc("title[T] row { input label[units] }").has(Rule::L5));
    CHECK(lint_doc("title[T] row { input[] }").has(Rule::L5));
    CHECK_FALSE(lint_doc("title[T] row { input[a] }").has(Rule::L5));
  }

  TEST_CASE("each rule fires on exactly its fixture") {
    const auto expected = nlohmann::json::parse(test::read_file(test::fixture_dir() / "lint" / "expected.json"));
    REQUIRE(expected.size() == 5);
    for (const auto& [name, findings] : expected.items()) {
      CAPTURE(name);
      const auto report = lint_doc(test::read_file(test::fixture_dir() / "lint" / (name + ".tut")));
      REQUIRE(report.findings.size() == findings.size());
      for (std::size_t i = 0; i < findings.size(); ++i) {
        CHECK(lint::to_string(report.findings[i].rule) == findings[i]["rule"].get<std::string>());
        CHECK(lint::to_string(report.findings[i].severity) == findings[i]["severity"].get<std::string>());
        const auto& id = findings[i]["element_id"];
        if (id.is_null()) {
          CHECK_FALSE(report.findings[i].element_id.has_value());
        } else {
          CHECK(report.findings[i].element_id == id.get<std::string>());
        }
      }
      CHECK(name.substr(0, 2) == findings[0]["rule"].get<std::string>());
    }
  }

  TEST_CASE("clean corpus has no findings at all") {
    for (const auto& name : test::corpus_names()) {
      CAPTURE(name);
      CHECK(lint_doc(test::read_file(test::corpus_dir() / (name + ".tut"))).findings.empty());
    }
  }

  TEST_CASE("clean iff no error findings, and linting leaves the layout alone") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 300; ++i) {
      const auto layout = test::random_layout(rng);
      const auto before = layout;
      const auto report = lint::lint_document(layout);
      CHECK(report.clean == report.errors().empty());
      CHECK(layout == before);
      CHECK(layout.spans == before.spans);
    }
  }

  TEST_CASE("separating adjacent inputs removes L1 and adds nothing") {
    std::mt19937_64 rng(8);
    int exercised = 0;
    for (int i = 0; i < 400; ++i) {
      const auto layout = test::random_layout(rng);
      const auto before = lint::lint_document(layout);
      if (!before.has(Rule::L1)) continue;
      auto body = layout.body;
      if (!separate_first_adjacent_pair(body)) continue;
      const auto after = lint::lint_document(dsl::TutorLayout::make(layout.title, body));
      const auto l1 = [](const lint::LintReport& r) {
        return std::count_if(r.findings.begin(), r.findings.end(), [](const auto& f) { return f.rule == Rule::L1; });
      };
      CHECK(l1(after) == l1(before) - 1);
      for (const auto rule : {Rule::L2, Rule::L3, Rule::L4, Rule::L5}) {
        const auto count = [rule](const lint::LintReport& r) {
          return std::count_if(r.findings.begin(), r.findings.end(), [rule](const auto& f) { return f.rule == rule; });
        };
        CHECK(count(after) <= count(before));
      }
      ++exercised;
    }
    CHECK(exercised > 20);
  }
}

TEST_SUITE("lint_fragment") {
  TEST_CASE("labelled row is clean") {
    const auto report = lint::lint_fragment(dsl::Fragment::make({dsl::make_row({dsl::make_label("x"), dsl::make_input()})}));
    CHECK(report.clean);
    CHECK(report.findings.empty());
  }

  TEST_CASE("two loose inputs") {
    const auto report = lint::lint_fragment(dsl::Fragment::make({dsl::make_input(), dsl::make_input()}));
    CHECK(report.has(Rule::L1));
    CHECK(report.has(Rule::L2));
    CHECK_FALSE(report.clean);
  }

  TEST_CASE("column with a bare input only warns") {
    const auto report = lint::lint_fragment(dsl::Fragment::make({dsl::make_column({dsl::make_input()})}));
    CHECK(summary(report) == decltype(summary(report)){{Rule::L5, std::string("in-1")}});
    CHECK(report.clean);
  }

  TEST_CASE("document-only rules never fire on fragments") {
    const auto report = lint::lint_fragment(dsl::parse_fragment("row { label[no inputs here] }"));
    CHECK_FALSE(report.has(Rule::L3));
    CHECK_FALSE(report.has(Rule::L4));
  }
}
