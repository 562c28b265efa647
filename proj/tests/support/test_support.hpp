#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, temporary
// directories, random generators and reference oracles written independently
// of the library code they check.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tutorgen/dsl.hpp"
#include "tutorgen/klm.hpp"

namespace tutorgen::test {

std::filesystem::path source_dir();
std::filesystem::path fixture_dir();
std::filesystem::path asset_dir();
std::filesystem::path corpus_dir();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Corpus documents in name order, without extension.
std::vector<std::string> corpus_names();

/// Removes itself on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Random generation -----------------------------------------------------------

struct AstLimits {
  int max_depth = 6;
  int max_nodes = 60;
};

/// Values drawn from an alphabet that includes the DSL's own delimiters,
/// escapes, markup characters and multi-byte UTF-8. Never contains newlines.
std::string random_value(std::mt19937_64& rng, std::size_t max_len);

/// A random body satisfying the parser's constraints: labels are never blank,
/// placeholders may be absent, empty or arbitrary, containers may be empty.
std::vector<dsl::Element> random_body(std::mt19937_64& rng, const AstLimits& limits);
dsl::TutorLayout random_layout(std::mt19937_64& rng, const AstLimits& limits = {});
dsl::Fragment random_fragment(std::mt19937_64& rng, const AstLimits& limits = {});

klm::ActionTrace random_trace(std::mt19937_64& rng, std::size_t max_actions);

// Oracles ----------------------------------------------------------------------

struct WalkCounts {
  std::size_t inputs = 0, labels = 0, rows = 0, columns = 0, depth = 0;
};

/// Plain recursive walk; depth is the deepest container nesting.
WalkCounts walk_counts(const std::vector<dsl::Element>& elements);

/// Ids every node should carry, in document order, computed by a second walk.
std::vector<std::string> walk_ids(const std::vector<dsl::Element>& elements);

struct BruteForceTotals {
  std::uint64_t keystrokes = 0;
  std::uint64_t counts[5] = {0, 0, 0, 0, 0};
  std::int64_t micros = 0;
};

/// Adds one operator duration per repetition, one at a time. Durations are
/// given in whole microseconds in K, P, B, H, M order.
BruteForceTotals brute_force_klm(const klm::ActionTrace& trace, const std::int64_t (&micros)[5]);

inline constexpr std::int64_t kDefaultMicros[5] = {280'000, 1'100'000, 100'000, 400'000, 1'350'000};

}  // namespace tutorgen::test
