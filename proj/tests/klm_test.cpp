#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "tutorgen/klm.hpp"

using namespace tutorgen;
using klm::Operator;

namespace {

klm::ActionTrace trace_of(std::vector<std::pair<Operator, std::uint32_t>> steps) {
  klm::ActionTrace t;
  for (const auto& [op, n] : steps) t.actions.push_back({op, n, std::nullopt});
  return t;
}

klm::KlmEstimate bundled(const std::string& name) {
  return klm::estimate(klm::load_trace((test::asset_dir() / "traces" / (name + ".klm")).string()));
}

klm::KlmErrorCode klm_error_code(std::string_view text) {
  try {
    (void)klm::parse_trace(text);
  } catch (const klm::KlmError& e) {
    return e.code();
  }
  FAIL("expected a KlmError");
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_SUITE("parse_trace") {
  TEST_CASE("operators with repeats") {
    CHECK(klm::parse_trace("K x3\nP\nB").actions ==
          trace_of({{Operator::K, 3}, {Operator::P, 1}, {Operator::B, 1}}).actions);
  }

  TEST_CASE("empty and comment-only traces") {
    CHECK(klm::parse_trace("").actions.empty());
    CHECK(klm::parse_trace("# nothing\n\n   \n").actions.empty());
  }

  TEST_CASE("annotations are kept") {
    const auto t = klm::parse_trace("K x12   # type the title\n");
    REQUIRE(t.actions.size() == 1);
    CHECK(t.actions[0].annotation == "type the title");
  }

  TEST_CASE("bad input") {
    CHECK(klm_error_code("Q x2") == klm::KlmErrorCode::UnknownOperator);
    CHECK(klm_error_code("K x0") == klm::KlmErrorCode::BadRepeat);
    CHECK(klm_error_code("K x") == klm::KlmErrorCode::BadRepeat);
    CHECK(klm_error_code("K 3") == klm::KlmErrorCode::BadRepeat);
    try {
      (void)klm::parse_trace("K\nP\nZ");
    } catch (const klm::KlmError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("format then parse is the identity") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100; ++i) {
      const auto t = test::random_trace(rng, 50);
      CHECK(klm::parse_trace(klm::format_trace(t), t.name) == t);
    }
  }
}

TEST_SUITE("estimate") {
  TEST_CASE("empty trace") {
    const auto e = klm::estimate({});
    CHECK(e.keystrokes == 0);
    CHECK(e.total == klm::Micros(0));
    CHECK(e.total_seconds() == 0.0);
  }

  TEST_CASE("three keystrokes, a point and a click") {
    const auto e = klm::estimate(trace_of({{Operator::K, 3}, {Operator::P, 1}, {Operator::B, 1}}));
    CHECK(e.keystrokes == 3);
    // 3 * 0.28 + 1.1 + 0.1, summed in whole microseconds.
    CHECK(e.total == klm::Micros(3 * 280'000 + 1'100'000 + 100'000));
    CHECK(e.total_seconds() == 2.04);
  }

  TEST_CASE("default durations") {
    const auto d = klm::OperatorTimes::defaults();
    for (std::size_t i = 0; i < 5; ++i) CHECK(d.per_operator[i].count() == test::kDefaultMicros[i]);
  }

  TEST_CASE("configurable durations") {
    auto times = klm::OperatorTimes::defaults();
    times.set_from_string("K=0.2");
    times.set_from_string("M=1");
    CHECK(times[Operator::K] == klm::Micros(200'000));
    CHECK(times[Operator::M] == klm::Micros(1'000'000));
    CHECK_THROWS(times.set_from_string("K"));
    CHECK_THROWS(times.set_from_string("X=1"));
    CHECK_THROWS(times.set_from_string("K=-1"));
    CHECK(klm::estimate(trace_of({{Operator::K, 5}}), times).total == klm::Micros(1'000'000));
  }

  TEST_CASE("agrees with brute-force summation on random traces") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
      const auto t = test::random_trace(rng, 200);
      const auto e = klm::estimate(t);
      const auto oracle = test::brute_force_klm(t, test::kDefaultMicros);
      REQUIRE(e.total.count() == oracle.micros);
      REQUIRE(e.keystrokes == oracle.keystrokes);
      for (std::size_t k = 0; k < 5; ++k) REQUIRE(e.counts[k] == oracle.counts[k]);
    }
  }

  TEST_CASE("concatenation adds") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      const auto a = test::random_trace(rng, 40);
      const auto b = test::random_trace(rng, 40);
      auto ab = a;
      ab.actions.insert(ab.actions.end(), b.actions.begin(), b.actions.end());
      const auto ea = klm::estimate(a), eb = klm::estimate(b), eab = klm::estimate(ab);
      CHECK(eab.total == ea.total + eb.total);
      CHECK(eab.keystrokes == ea.keystrokes + eb.keystrokes);
    }
  }

  TEST_CASE("doubling every repeat doubles everything") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
      const auto t = test::random_trace(rng, 40);
      auto doubled = t;
      for (auto& a : doubled.actions) a.repeat *= 2;
      const auto e = klm::estimate(t), e2 = klm::estimate(doubled);
      CHECK(e2.total == 2 * e.total);
      CHECK(e2.total_seconds() == 2 * e.total_seconds());
      for (std::size_t k = 0; k < 5; ++k) CHECK(e2.counts[k] == 2 * e.counts[k]);
    }
  }
}

TEST_SUITE("compare and report") {
  TEST_CASE("floor reductions") {
    CHECK(klm::floor_reduction_percent(141, 74) == 47);
    CHECK(klm::floor_reduction_percent(184, 126) == 31);
    CHECK(klm::floor_reduction_percent(100, 100) == 0);
    CHECK(klm::floor_reduction_percent(100, 150) == -50);
    CHECK(klm::floor_reduction_percent(3, 2) == 33);
    CHECK(klm::format_change(47) == "-47%");
    CHECK(klm::format_change(0) == "0%");
    CHECK(klm::format_change(-50) == "+50%");
  }

  TEST_CASE("identical estimates") {
    const auto e = klm::estimate(trace_of({{Operator::K, 4}, {Operator::M, 1}}));
    const auto r = klm::compare(e, e);
    CHECK(r.keystroke_reduction_percent == 0);
    CHECK(r.time_reduction_percent == 0);
  }

  TEST_CASE("zero baseline") {
    const auto e = klm::estimate(trace_of({{Operator::K, 4}}));
    CHECK_THROWS_AS((void)klm::compare(klm::estimate({}), e), klm::KlmError);
  }

  TEST_CASE("bundled traces reproduce the reference keystroke columns") {
    CHECK(bundled("classical_simple").keystrokes == 184);
    CHECK(bundled("ai_simple").keystrokes == 126);
    CHECK(bundled("classical_complex").keystrokes == 141);
    CHECK(bundled("ai_complex").keystrokes == 74);
    CHECK(klm::compare(bundled("classical_simple"), bundled("ai_simple")).keystroke_reduction_percent == 31);
    CHECK(klm::compare(bundled("classical_complex"), bundled("ai_complex")).keystroke_reduction_percent == 47);
  }

  TEST_CASE("reference constants") {
    REQUIRE(klm::kReferenceMeasurements.size() == 2);
    const auto& simple = klm::kReferenceMeasurements[0];
    const auto& complex = klm::kReferenceMeasurements[1];
    CHECK(simple.classical_seconds == 187);
    CHECK(simple.ai_seconds == 143);
    CHECK(complex.classical_seconds == 372);
    CHECK(complex.ai_seconds == 116);
    CHECK(klm::floor_reduction_percent(simple.classical_seconds, simple.ai_seconds) == 23);
    CHECK(klm::floor_reduction_percent(complex.classical_seconds, complex.ai_seconds) == 68);
    CHECK(klm::floor_reduction_percent(simple.classical_keystrokes, simple.ai_keystrokes) == 31);
    CHECK(klm::floor_reduction_percent(complex.classical_keystrokes, complex.ai_keystrokes) == 47);
  }

  TEST_CASE("empty report is the header") {
    const auto text = klm::report({});
    CHECK(text.find("keystroke_change") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  }

  TEST_CASE("report over the bundled pairs") {
    const std::vector<klm::ReportRow> rows = {
        {"simple", bundled("classical_simple"), bundled("ai_simple")},
        {"complex", bundled("classical_complex"), bundled("ai_complex")},
    };
    const auto csv = klm::report(rows, klm::ReportFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    // Parse the CSV back rather than trusting column alignment.
    std::vector<std::vector<std::string>> cells;
    std::size_t start = 0;
    while (start < csv.size()) {
      const auto end = csv.find('\n', start);
      std::vector<std::string> row;
      std::string line = csv.substr(start, end - start);
      std::size_t p = 0;
      for (auto q = line.find(','); ; q = line.find(',', p)) {
        row.push_back(line.substr(p, q == std::string::npos ? std::string::npos : q - p));
        if (q == std::string::npos) break;
        p = q + 1;
      }
      cells.push_back(row);
      start = end + 1;
    }
    REQUIRE(cells.size() == 3);
    const auto& header = cells[0];
    const auto col = [&](const std::string& name) {
      return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    CHECK(cells[1][col("classical_keys")] == "184");
    CHECK(cells[1][col("ai_keys")] == "126");
    CHECK(cells[1][col("keystroke_change")] == "-31%");
    CHECK(cells[2][col("classical_keys")] == "141");
    CHECK(cells[2][col("ai_keys")] == "74");
    CHECK(cells[2][col("keystroke_change")] == "-47%");

    const auto text = klm::report(rows);
    CHECK(text.find("-31%") != std::string::npos);
    CHECK(text.find("-47%") != std::string::npos);
  }
}
