#include "tutorgen/klm.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "text_util.hpp"

namespace tutorgen::klm {

char to_char(Operator op) {
  switch (op) {
    case Operator::K: return 'K';
    case Operator::P: return 'P';
    case Operator::B: return 'B';
    case Operator::H: return 'H';
    case Operator::M: return 'M';
  }
  return '?';
}

std::optional<Operator> operator_from_char(char c) {
  switch (c) {
    case 'K': return Operator::K;
    case 'P': return Operator::P;
    case 'B': return Operator::B;
    case 'H': return Operator::H;
    case 'M': return Operator::M;
    default: return std::nullopt;
  }
}

std::string_view to_string(KlmErrorCode code) {
  switch (code) {
    case KlmErrorCode::UnknownOperator: return "UnknownOperator";
    case KlmErrorCode::BadRepeat: return "BadRepeat";
    case KlmErrorCode::ZeroBaseline: return "ZeroBaseline";
  }
  return "?";
}

OperatorTimes OperatorTimes::defaults() {
  OperatorTimes t;
  t[Operator::K] = Micros(280'000);
  t[Operator::P] = Micros(1'100'000);
  t[Operator::B] = Micros(100'000);
  t[Operator::H] = Micros(400'000);
  t[Operator::M] = Micros(1'350'000);
  return t;
}

void OperatorTimes::set_from_string(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq != 1) throw std::invalid_argument("expected OP=seconds, got '" + std::string(assignment) + "'");
  const auto op = operator_from_char(assignment[0]);
  if (!op) throw std::invalid_argument("unknown operator '" + std::string(1, assignment[0]) + "'");
  const std::string value(assignment.substr(2));
  std::size_t used = 0;
  double seconds = 0;
  try {
    seconds = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || !(seconds >= 0) || !std::isfinite(seconds)) {
    throw std::invalid_argument("bad duration '" + value + "' for " + std::string(1, assignment[0]));
  }
  (*this)[*op] = Micros(std::llround(seconds * 1e6));
}

ActionTrace parse_trace(std::string_view text, std::string name) {
  ActionTrace trace;
  trace.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    std::optional<std::string> annotation;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      const auto note = util::trim(line.substr(hash + 1));
      if (!note.empty()) annotation = std::string(note);
      line = line.substr(0, hash);
    }
    line = util::trim(line);
    if (line.empty()) continue;

    std::istringstream words{std::string(line)};
    std::string op_word;
    std::string repeat_word;
    std::string extra;
    words >> op_word >> repeat_word >> extra;

    const auto op = op_word.size() == 1 ? operator_from_char(op_word[0]) : std::nullopt;
    if (!op) {
      throw KlmError(KlmErrorCode::UnknownOperator,
                     "line " + std::to_string(line_no) + ": unknown operator '" + op_word + "'", line_no);
    }
    Action action{*op, 1, std::move(annotation)};
    if (!repeat_word.empty()) {
      std::uint32_t n = 0;
      const char* first = repeat_word.data() + 1;
      const char* last = repeat_word.data() + repeat_word.size();
      const auto [ptr, ec] = std::from_chars(first, last, n);
      if (repeat_word[0] != 'x' || repeat_word.size() < 2 || ec != std::errc() || ptr != last || n == 0 ||
          !extra.empty()) {
        throw KlmError(KlmErrorCode::BadRepeat,
                       "line " + std::to_string(line_no) + ": expected 'xN' with N >= 1 after the operator",
                       line_no);
      }
      action.repeat = n;
    }
    trace.actions.push_back(std::move(action));
    if (nl == text.size()) break;
  }
  return trace;
}

ActionTrace load_trace(const std::string& path) {
  return parse_trace(util::read_file(path), std::filesystem::path(path).stem().string());
}

std::string format_trace(const ActionTrace& trace) {
  std::string out;
  for (const auto& a : trace.actions) {
    out += to_char(a.op);
    if (a.repeat != 1) out += " x" + std::to_string(a.repeat);
    if (a.annotation) out += "  # " + *a.annotation;
    out += '\n';
  }
  return out;
}

KlmEstimate estimate(const ActionTrace& trace, const OperatorTimes& times) {
  KlmEstimate e;
  for (const auto& a : trace.actions) e.counts[static_cast<std::size_t>(a.op)] += a.repeat;
  for (Operator op : kOperators) e.total += times[op] * static_cast<Micros::rep>(e.count(op));
  e.keystrokes = e.count(Operator::K);
  return e;
}

std::int64_t floor_reduction_percent(std::int64_t before, std::int64_t after) {
  const std::int64_t num = (before - after) * 100;
  std::int64_t q = num / before;
  if ((num % before != 0) && ((num < 0) != (before < 0))) --q;
  return q;
}

ComparisonReport compare(const KlmEstimate& before, const KlmEstimate& after) {
  if (before.keystrokes == 0) throw KlmError(KlmErrorCode::ZeroBaseline, "baseline has no keystrokes");
  if (before.total.count() == 0) throw KlmError(KlmErrorCode::ZeroBaseline, "baseline takes no time");
  ComparisonReport r;
  r.keystrokes_before = before.keystrokes;
  r.keystrokes_after = after.keystrokes;
  r.time_before = before.total;
  r.time_after = after.total;
  r.keystroke_reduction_percent = floor_reduction_percent(static_cast<std::int64_t>(before.keystrokes),
                                                          static_cast<std::int64_t>(after.keystrokes));
  r.time_reduction_percent = floor_reduction_percent(before.total.count(), after.total.count());
  return r;
}

std::string format_change(std::int64_t reduction_percent) {
  if (reduction_percent == 0) return "0%";
  if (reduction_percent > 0) return "-" + std::to_string(reduction_percent) + "%";
  return "+" + std::to_string(-reduction_percent) + "%";
}

namespace {

std::string seconds_text(Micros t) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << static_cast<double>(t.count()) / 1e6;
  return ss.str();
}

}  // namespace

std::string report(const std::vector<ReportRow>& rows, ReportFormat format) {
  // Time columns are model estimates, not measured completion times.
  const std::vector<std::string> header = {"interface",      "est_classical_s", "est_ai_s",
                                           "est_time_change", "classical_keys", "ai_keys",
                                           "keystroke_change"};
  std::vector<std::vector<std::string>> table = {header};
  for (const auto& row : rows) {
    const auto cmp = compare(row.classical, row.ai);
    table.push_back({row.name, seconds_text(row.classical.total), seconds_text(row.ai.total),
                     format_change(cmp.time_reduction_percent), std::to_string(row.classical.keystrokes),
                     std::to_string(row.ai.keystrokes), format_change(cmp.keystroke_reduction_percent)});
  }

  std::string out;
  if (format == ReportFormat::Csv) {
    for (const auto& cells : table) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
      out += '\n';
    }
    return out;
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& cells : table) {
    for (std::size_t i = 0; i < cells.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  }
  for (const auto& cells : table) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == 0) {
        line += cells[i] + std::string(width[i] - cells[i].size(), ' ');
      } else {
        line += "  " + std::string(width[i] - cells[i].size(), ' ') + cells[i];
      }
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace tutorgen::klm
