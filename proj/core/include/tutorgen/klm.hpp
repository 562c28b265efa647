#pragma once

// Keystroke-Level Model costing of scripted action traces.
//
// Trace files (.klm) hold one action per line:
//
//   <OP> [xN] [# annotation]
//
// where OP is one of K (keystroke), P (point), B (mouse button press),
// H (home hands) and M (mental preparation). Blank lines and lines starting
// with '#' are ignored.
//
// Durations are kept in integer microseconds so sums are exact.

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tutorgen::klm {

enum class Operator { K, P, B, H, M };

inline constexpr std::array<Operator, 5> kOperators = {Operator::K, Operator::P, Operator::B, Operator::H,
                                                       Operator::M};

char to_char(Operator op);
std::optional<Operator> operator_from_char(char c);

struct Action {
  Operator op = Operator::K;
  std::uint32_t repeat = 1;
  std::optional<std::string> annotation;

  bool operator==(const Action&) const = default;
};

struct ActionTrace {
  std::string name;
  std::vector<Action> actions;

  bool operator==(const ActionTrace&) const = default;
};

using Micros = std::chrono::microseconds;

struct OperatorTimes {
  std::array<Micros, 5> per_operator{};

  /// K=0.28 s, P=1.1 s, B=0.1 s, H=0.4 s, M=1.35 s.
  static OperatorTimes defaults();

  Micros& operator[](Operator op) { return per_operator[static_cast<std::size_t>(op)]; }
  Micros operator[](Operator op) const { return per_operator[static_cast<std::size_t>(op)]; }

  /// Applies "K=0.2" style overrides (seconds). Throws std::invalid_argument.
  void set_from_string(std::string_view assignment);
};

struct KlmEstimate {
  std::uint64_t keystrokes = 0;
  std::array<std::uint64_t, 5> counts{};
  Micros total{0};

  double total_seconds() const { return static_cast<double>(total.count()) / 1e6; }
  std::uint64_t count(Operator op) const { return counts[static_cast<std::size_t>(op)]; }

  bool operator==(const KlmEstimate&) const = default;
};

enum class KlmErrorCode { UnknownOperator, BadRepeat, ZeroBaseline };

std::string_view to_string(KlmErrorCode code);

class KlmError : public std::runtime_error {
 public:
  KlmError(KlmErrorCode code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(message), code_(code), line_(line) {}
  KlmErrorCode code() const noexcept { return code_; }
  /// 1-based source line for parse errors, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

 private:
  KlmErrorCode code_;
  std::size_t line_;
};

ActionTrace parse_trace(std::string_view text, std::string name = {});
ActionTrace load_trace(const std::string& path);

/// Inverse of parse_trace, one action per line.
std::string format_trace(const ActionTrace& trace);

KlmEstimate estimate(const ActionTrace& trace, const OperatorTimes& times = OperatorTimes::defaults());

struct ComparisonReport {
  std::uint64_t keystrokes_before = 0;
  std::uint64_t keystrokes_after = 0;
  Micros time_before{0};
  Micros time_after{0};
  // floor((before - after) / before * 100); 47 means a 47% reduction.
  std::int64_t keystroke_reduction_percent = 0;
  std::int64_t time_reduction_percent = 0;

  bool operator==(const ComparisonReport&) const = default;
};

/// Throws KlmError(ZeroBaseline) when the baseline has no keystrokes or no time.
ComparisonReport compare(const KlmEstimate& before, const KlmEstimate& after);

/// "-47%" for a 47% reduction, "+12%" for an increase, "0%" for none.
std::string format_change(std::int64_t reduction_percent);

struct ReportRow {
  std::string name;
  KlmEstimate classical;
  KlmEstimate ai;
};

enum class ReportFormat { Text, Csv };

std::string report(const std::vector<ReportRow>& rows, ReportFormat format = ReportFormat::Text);

/// Human-measured build times and keystroke counts from the original
/// classical vs AI-assisted comparison. The times are measurements of people
/// and cannot be derived from a trace; they ship as reference data only.
struct ReferenceMeasurement {
  std::string_view name;
  int classical_seconds;
  int ai_seconds;
  int classical_keystrokes;
  int ai_keystrokes;
};

inline constexpr std::array<ReferenceMeasurement, 2> kReferenceMeasurements = {{
    {"simple", 187, 143, 184, 126},
    {"complex", 372, 116, 141, 74},
}};

/// floor((before - after) * 100 / before) on integers.
std::int64_t floor_reduction_percent(std::int64_t before, std::int64_t after);

}  // namespace tutorgen::klm
