#include "tutorgen/component_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <random>

#include <nlohmann/json.hpp>

#include "text_util.hpp"
#include "tutorgen/lint.hpp"

namespace tutorgen::library {

namespace fs = std::filesystem;

std::string_view to_string(StoreErrorCode code) {
  switch (code) {
    case StoreErrorCode::NotFound: return "NotFound";
    case StoreErrorCode::DuplicateName: return "DuplicateName";
    case StoreErrorCode::InvalidFragment: return "InvalidFragment";
    case StoreErrorCode::InvalidRecord: return "InvalidRecord";
    case StoreErrorCode::Io: return "Io";
  }
  return "?";
}

std::string format_rfc3339(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch());
  auto secs = duration_cast<seconds>(ms);
  auto rem = (ms - secs).count();
  if (rem < 0) {
    rem += 1000;
    secs -= seconds(1);
  }
  const std::time_t tt = static_cast<std::time_t>(secs.count());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(rem));
  return buf;
}

std::string serialize_record(const ComponentRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["description"] = r.description;
  j["dsl"] = r.dsl;
  j["tags"] = r.tags;
  j["created_at"] = r.created_at;
  return j.dump(2) + "\n";
}

ComponentRecord parse_record(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ComponentRecord r;
    r.id = j.at("id").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.dsl = j.at("dsl").get<std::string>();
    r.tags = j.at("tags").get<std::vector<std::string>>();
    r.created_at = j.at("created_at").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(StoreErrorCode::InvalidRecord, std::string("malformed component record: ") + e.what());
  }
}

namespace {

std::string fresh_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int word = 0; word < 2; ++word) {
    auto bits = rng();
    for (int i = 0; i < 16; ++i, bits >>= 4) id.push_back(kHex[bits & 0xF]);
  }
  return id;
}

bool valid_id(std::string_view id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

void fsync_path(const fs::path& p, int flags) {
  const int fd = ::open(p.c_str(), flags);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

void write_atomic(const fs::path& target, const std::string& data) {
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (f == nullptr) throw StoreError(StoreErrorCode::Io, "cannot write " + tmp.string());
    const bool ok = std::fwrite(data.data(), 1, data.size(), f) == data.size() && std::fflush(f) == 0 &&
                    ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!ok) {
      fs::remove(tmp);
      throw StoreError(StoreErrorCode::Io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw StoreError(StoreErrorCode::Io, "cannot rename into " + target.string() + ": " + ec.message());
  }
  fsync_path(target.parent_path(), O_RDONLY | O_DIRECTORY);
}

}  // namespace

ComponentStore::ComponentStore(fs::path dir, Clock clock) : dir_(std::move(dir)), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw StoreError(StoreErrorCode::Io, "cannot open store directory " + dir_.string());
  }
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".json" || p.filename().string().front() == '.') continue;
    ComponentRecord r = parse_record(util::read_file(p.string()));
    if (r.id != p.stem().string()) {
      throw StoreError(StoreErrorCode::InvalidRecord, p.string() + " holds a record with id " + r.id);
    }
    records_.emplace(r.id, std::move(r));
  }
}

fs::path ComponentStore::path_for(std::string_view id) const { return dir_ / (std::string(id) + ".json"); }

ComponentRecord ComponentStore::create(std::string_view name, std::string_view description, std::string_view dsl,
                                       std::vector<std::string> tags) {
  const auto clean_name = std::string(util::trim(name));
  if (clean_name.empty()) throw StoreError(StoreErrorCode::InvalidRecord, "component name must not be empty");

  dsl::Fragment fragment;
  try {
    fragment = dsl::parse_fragment(dsl);
  } catch (const dsl::ParseError& e) {
    throw StoreError(StoreErrorCode::InvalidFragment, std::string("component does not parse: ") + e.what());
  }
  const auto report = lint::lint_fragment(fragment);
  if (!report.clean) {
    const auto first = report.errors().front();
    throw StoreError(StoreErrorCode::InvalidFragment,
                     "component violates " + std::string(lint::to_string(first.rule)) + ": " + first.message);
  }

  ComponentRecord record;
  record.name = clean_name;
  record.description = std::string(util::trim(description));
  record.dsl = dsl::pretty_print(fragment);
  for (auto& t : tags) {
    auto trimmed = std::string(util::trim(t));
    if (!trimmed.empty()) record.tags.push_back(std::move(trimmed));
  }

  std::unique_lock lock(mu_);
  const auto key = util::to_lower(clean_name);
  for (const auto& [id, existing] : records_) {
    if (util::to_lower(existing.name) == key) {
      throw StoreError(StoreErrorCode::DuplicateName, "a component named '" + existing.name + "' already exists");
    }
  }
  do {
    record.id = fresh_id();
  } while (records_.count(record.id) != 0);
  record.created_at = format_rfc3339(clock_());

  write_atomic(path_for(record.id), serialize_record(record));
  records_.emplace(record.id, record);
  return record;
}

ComponentRecord ComponentStore::get(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end()) throw StoreError(StoreErrorCode::NotFound, "no component with id " + std::string(id));
  return it->second;
}

std::vector<ComponentRecord> ComponentStore::list(const std::optional<std::string>& tag) const {
  std::vector<ComponentRecord> out;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, r] : records_) {
      if (tag && std::find(r.tags.begin(), r.tags.end(), *tag) == r.tags.end()) continue;
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const ComponentRecord& a, const ComponentRecord& b) {
    if (a.created_at != b.created_at) return a.created_at > b.created_at;
    return a.id < b.id;
  });
  return out;
}

void ComponentStore::remove(std::string_view id) {
  std::unique_lock lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end() || !valid_id(id)) {
    throw StoreError(StoreErrorCode::NotFound, "no component with id " + std::string(id));
  }
  std::error_code ec;
  fs::remove(path_for(id), ec);
  if (ec) throw StoreError(StoreErrorCode::Io, "cannot delete " + path_for(id).string() + ": " + ec.message());
  fsync_path(dir_, O_RDONLY | O_DIRECTORY);
  records_.erase(it);
}

dsl::Fragment ComponentStore::instantiate(std::string_view id) const {
  return dsl::parse_fragment(get(id).dsl);
}

}  // namespace tutorgen::library
