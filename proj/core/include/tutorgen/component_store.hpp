#pragma once

// Directory-backed store of reusable components: one JSON file per record,
// <dir>/<id>.json, written with write-temp-then-rename.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tutorgen/dsl.hpp"

namespace tutorgen::library {

struct ComponentRecord {
  std::string id;
  std::string name;
  std::string description;
  // Canonical fragment text.
  std::string dsl;
  std::vector<std::string> tags;
  // RFC 3339 UTC with millisecond precision, e.g. 2026-10-15T09:30:00.125Z.
  std::string created_at;

  bool operator==(const ComponentRecord&) const = default;
};

enum class StoreErrorCode { NotFound, DuplicateName, InvalidFragment, InvalidRecord, Io };

std::string_view to_string(StoreErrorCode code);

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  StoreErrorCode code() const noexcept { return code_; }

 private:
  StoreErrorCode code_;
};

std::string format_rfc3339(std::chrono::system_clock::time_point t);

/// Exact on-disk bytes for a record.
std::string serialize_record(const ComponentRecord& record);
ComponentRecord parse_record(std::string_view text);

/// Single writer, many readers. Mutations are serialized internally; reads
/// are served from an in-memory index loaded when the store is opened.
class ComponentStore {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  /// Creates the directory if needed and loads every <id>.json in it.
  explicit ComponentStore(std::filesystem::path dir, Clock clock = &std::chrono::system_clock::now);

  /// Validates `dsl` as a fragment with no Error lint findings and stores its
  /// canonical form.
  ComponentRecord create(std::string_view name, std::string_view description, std::string_view dsl,
                         std::vector<std::string> tags);

  ComponentRecord get(std::string_view id) const;

  /// Newest first; ties broken by id.
  std::vector<ComponentRecord> list(const std::optional<std::string>& tag = std::nullopt) const;

  void remove(std::string_view id);

  /// Parsed fragment with fragment-local ids; callers re-assign on insertion.
  dsl::Fragment instantiate(std::string_view id) const;

  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  std::filesystem::path path_for(std::string_view id) const;

  std::filesystem::path dir_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, ComponentRecord, std::less<>> records_;
};

}  // namespace tutorgen::library
