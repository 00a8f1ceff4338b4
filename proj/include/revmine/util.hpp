#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace revmine {

// Recoverable failures (bad input files, malformed records, shape errors).
// The CLI catches this at top level and turns it into a nonzero exit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace util {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
// Split on runs of ASCII whitespace; no empty chunks.
std::vector<std::string> split_ws(std::string_view s);
std::string lower_ascii(std::string_view s);
// Collapse internal whitespace runs to a single space and strip the ends.
std::string normalize_ws(std::string_view s);

// Decode UTF-8 into Unicode scalar values. Malformed bytes decode one byte
// at a time to U+FFFD so the result is total and deterministic.
std::u32string decode_utf8(std::string_view s);

uint64_t fnv1a64(std::string_view bytes);
// splitmix64 finalizer; used wherever a well-mixed 64-bit value is needed.
uint64_t mix64(uint64_t x);

std::string read_file(const std::string& path);
// FNV-1a over file bytes, hex-encoded. Manifest checksums, not security.
std::string file_checksum_hex(const std::string& path);

bool parse_int(std::string_view s, long& out);

// Worker cap for data-parallel stages: REVMINE_THREADS, 0 or unset = auto.
int thread_cap();

}  // namespace util
}  // namespace revmine

#include <exception>
#include <functional>
#include <thread>

namespace revmine {
namespace util {

// Order-preserving parallel map over a pure function; the result is
// identical to the sequential loop regardless of thread count.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn fn, int threads)
    -> std::vector<decltype(fn(items.front()))> {
  using R = decltype(fn(items.front()));
  std::vector<R> results(items.size());
  if (items.empty()) return results;
  size_t workers = std::min<size_t>(
      items.size(), static_cast<size_t>(threads < 1 ? 1 : threads));
  if (workers <= 1) {
    for (size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (size_t i = w; i < items.size(); i += workers)
          results[i] = fn(items[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace util
}  // namespace revmine
