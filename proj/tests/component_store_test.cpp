#include <doctest.h>

#include <atomic>
#include <set>
#include <thread>

#include "test_support.hpp"
#include "tutorgen/component_store.hpp"

using namespace tutorgen;
using library::StoreErrorCode;
namespace fs = std::filesystem;

namespace {

// Each call advances one second from a fixed instant.
library::ComponentStore::Clock ticking_clock() {
  auto now = std::make_shared<std::chrono::system_clock::time_point>(std::chrono::sys_days{std::chrono::year{2024} /
                                                                                         std::chrono::June / 1});
  return [now] {
    *now += std::chrono::seconds(1);
    return *now;
  };
}

template <typename Fn>
StoreErrorCode store_error_code(Fn&& fn) {
  try {
    fn();
  } catch (const library::StoreError& e) {
    return e.code();
  }
  FAIL("expected a StoreError");
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_SUITE("component store") {
  TEST_CASE("create assigns a fresh id and canonical text") {
    test::TempDir dir;
    library::ComponentStore store(dir.path(), ticking_clock());
    const auto r = store.create("equation-row", "x equals something", "row { label[x =] input }", {"algebra"});
    CHECK(r.id.size() == 32);
    CHECK(r.name == "equation-row");
    CHECK(r.dsl == "row {\n  label[x =]\n  input\n}");
    CHECK(r.tags == std::vector<std::string>{"algebra"});
    CHECK(r.created_at == "2024-06-01T00:00:01.000Z");
    CHECK(fs::exists(dir.path() / (r.id + ".json")));
    const auto other = store.create("other", "", "row { input[x] }", {});
    CHECK(other.id != r.id);
  }

  TEST_CASE("names are unique ignoring case and surrounding space") {
    test::TempDir dir;
    library::ComponentStore store(dir.path());
    (void)store.create("Equation Row", "", "row { label[x] input }", {});
    CHECK(store_error_code([&] { (void)store.create("equation row", "", "row { input[y] }", {}); }) ==
          StoreErrorCode::DuplicateName);
    CHECK(store_error_code([&] { (void)store.create("  Equation Row ", "", "row { input[y] }", {}); }) ==
          StoreErrorCode::DuplicateName);
  }

  TEST_CASE("invalid fragments and records are refused") {
    test::TempDir dir;
    library::ComponentStore store(dir.path());
    CHECK(store_error_code([&] { (void)store.create("t", "", "title[T] input", {}); }) ==
          StoreErrorCode::InvalidFragment);
    CHECK(store_error_code([&] { (void)store.create("t", "", "row { input input }", {}); }) ==
          StoreErrorCode::InvalidFragment);
    CHECK(store_error_code([&] { (void)store.create("t", "", "button", {}); }) == StoreErrorCode::InvalidFragment);
    CHECK(store_error_code([&] { (void)store.create("  ", "", "row { input[x] }", {}); }) == StoreErrorCode::InvalidRecord);
    CHECK(store.list().empty());
    CHECK(fs::is_empty(dir.path()));
  }

  TEST_CASE("warnings are allowed") {
    test::TempDir dir;
    library::ComponentStore store(dir.path());
    CHECK_NOTHROW((void)store.create("bare", "", "column { input }", {}));
  }

  TEST_CASE("get, list and delete") {
    test::TempDir dir;
    library::ComponentStore store(dir.path(), ticking_clock());
    CHECK(store.list().empty());
    const auto a = store.create("a", "", "row { input[a] }", {"x"});
    const auto b = store.create("b", "", "row { input[b] }", {"y", "x"});
    const auto c = store.create("c", "", "row { input[c] }", {});
    CHECK(store.get(a.id) == a);

    const auto all = store.list();
    REQUIRE(all.size() == 3);
    CHECK(all[0] == c);  // newest first
    CHECK(all[2] == a);
    const auto tagged = store.list(std::string("x"));
    REQUIRE(tagged.size() == 2);
    CHECK(tagged[0] == b);

    store.remove(b.id);
    CHECK(store_error_code([&] { (void)store.get(b.id); }) == StoreErrorCode::NotFound);
    CHECK(store_error_code([&] { store.remove(b.id); }) == StoreErrorCode::NotFound);
    CHECK(store_error_code([&] { (void)store.get("../../etc/passwd"); }) == StoreErrorCode::NotFound);
    CHECK_FALSE(fs::exists(dir.path() / (b.id + ".json")));
    CHECK(store.list().size() == 2);
  }

  TEST_CASE("instantiate") {
    test::TempDir dir;
    library::ComponentStore store(dir.path());
    const auto r = store.create("x", "", "row { input[x] }", {});
    const auto fragment = store.instantiate(r.id);
    CHECK(fragment == dsl::Fragment::make({dsl::make_row({dsl::make_input(std::string("x"))})}));
    CHECK(store.instantiate(r.id) == fragment);
    store.remove(r.id);
    CHECK(store_error_code([&] { (void)store.instantiate(r.id); }) == StoreErrorCode::NotFound);
  }

  TEST_CASE("records survive reopening byte for byte") {
    test::TempDir dir;
    std::vector<library::ComponentRecord> created;
    std::map<std::string, std::string> bytes;
    {
      library::ComponentStore store(dir.path(), ticking_clock());
      created.push_back(store.create("one", "first \"quoted\" \xC3\xA9", "row { label[a] input }", {"t1"}));
      created.push_back(store.create("two", "", "column { label[b] input[c] }", {}));
      for (const auto& r : created) bytes[r.id] = test::read_file(dir.path() / (r.id + ".json"));
    }
    library::ComponentStore reopened(dir.path());
    for (const auto& r : created) {
      CHECK(reopened.get(r.id) == r);
      CHECK(library::serialize_record(reopened.get(r.id)) == bytes[r.id]);
    }
    CHECK(reopened.list().size() == 2);
  }

  TEST_CASE("temporary files and foreign files are ignored, mismatched ids are not") {
    test::TempDir dir;
    test::write_file(dir.path() / ".partial.json", "{");
    test::write_file(dir.path() / "notes.txt", "hello");
    CHECK_NOTHROW(library::ComponentStore(dir.path()));

    library::ComponentRecord r{"abc", "n", "", "input", {}, "2024-01-01T00:00:00.000Z"};
    test::write_file(dir.path() / "other.json", library::serialize_record(r));
    CHECK(store_error_code([&] { library::ComponentStore s(dir.path()); }) == StoreErrorCode::InvalidRecord);
  }

  TEST_CASE("record serialization round trips") {
    library::ComponentRecord r{"0123", "name", "desc", "row {\n  input\n}", {"a", "b"}, "2024-01-01T00:00:00.000Z"};
    CHECK(library::parse_record(library::serialize_record(r)) == r);
    CHECK(store_error_code([] { (void)library::parse_record("[]"); }) == StoreErrorCode::InvalidRecord);
    CHECK(store_error_code([] { (void)library::parse_record(R"({"id":"x"})"); }) == StoreErrorCode::InvalidRecord);
  }

  TEST_CASE("timestamps") {
    using namespace std::chrono;
    const auto t = sys_days{year{2023} / March / 9} + hours(14) + minutes(5) + seconds(7) + milliseconds(42);
    CHECK(library::format_rfc3339(t) == "2023-03-09T14:05:07.042Z");
  }

  TEST_CASE("concurrent creates with distinct names") {
    test::TempDir dir;
    library::ComponentStore store(dir.path());
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&, i] {
        for (int k = 0; k < 10; ++k) {
          (void)store.create("c-" + std::to_string(i) + "-" + std::to_string(k), "", "row { input[x] }", {});
          ++ok;
        }
      });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 80);
    CHECK(store.list().size() == 80);
    CHECK(library::ComponentStore(dir.path()).list().size() == 80);
  }

  TEST_CASE("racing creates of one name admit exactly one") {
    test::TempDir dir;
    library::ComponentStore store(dir.path());
    std::vector<std::thread> threads;
    std::atomic<int> ok{0}, dup{0};
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&] {
        try {
          (void)store.create("same", "", "row { input[x] }", {});
          ++ok;
        } catch (const library::StoreError& e) {
          if (e.code() == StoreErrorCode::DuplicateName) ++dup;
        }
      });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 1);
    CHECK(dup == 7);
  }
}
