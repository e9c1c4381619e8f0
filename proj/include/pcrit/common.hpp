#pragma once

// Shared plumbing: error types, deterministic seed splitting, and a small
// index-parallel loop capped by the PCRIT_THREADS environment variable.

#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pcrit {

// Base error for anything raised by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (bad JSON, p <= 1, unknown family,
// nonexistent vertex ids, ...).  The CLI maps this to exit code 2.
struct input_error : error {
  using error::error;
};

// A verdict-level refusal: inputs are well-formed but the requested object
// is not certified to exist (e.g. a Green's function when the capacity
// sequence decays to zero).  The CLI maps this to exit code 1.
struct refusal : error {
  using error::error;
};

// ---------------------------------------------------------------------------
// Deterministic randomness.  All randomness flows from one master seed,
// split per (tag, index) so results never depend on evaluation order or on
// how many threads ran.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_tag(const std::string& tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for subtask `tag`/`index` derived from the master seed.
inline std::uint64_t split_seed(std::uint64_t master, const std::string& tag,
                                std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ hash_tag(tag)) + index);
}

inline std::mt19937_64 rng_for(std::uint64_t master, const std::string& tag,
                               std::uint64_t index = 0) {
  return std::mt19937_64(split_seed(master, tag, index));
}

// ---------------------------------------------------------------------------
// Thread cap.  PCRIT_THREADS limits worker threads; unset means hardware
// concurrency.  Loops write per-index results and reduce sequentially, so
// outputs are identical for every thread count.

inline unsigned thread_cap() {
  static const unsigned cap = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("PCRIT_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1) return static_cast<unsigned>(v) < hw ? static_cast<unsigned>(v) : hw;
    }
    return hw;
  }();
  return cap;
}

// Run fn(i) for i in [0, n).  fn must only touch its own slot of any shared
// output.  Falls back to an inline loop when one worker suffices.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t grain = 1) {
  unsigned workers = thread_cap();
  if (workers <= 1 || n <= grain) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pcrit
