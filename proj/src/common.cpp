#include "alphacomb/common.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace alphacomb {

namespace {

Index initial_dense_cap() {
  if (const char* env = std::getenv("ALPHACOMB_DENSE_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 2) return static_cast<Index>(v);
  }
  return 4000;
}

std::atomic<Index> g_dense_cap{initial_dense_cap()};
std::atomic<int> g_threads{0};

}  // namespace

Index dense_cap() { return g_dense_cap.load(); }

void set_dense_cap(Index cap) {
  if (cap < 2) throw ValidationError("dense cap must be >= 2");
  g_dense_cap.store(cap);
}

int num_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_num_threads(int n) {
  if (n < 0) throw ValidationError("thread count must be >= 0");
  g_threads.store(n);
}

void require_dense_cap(Index n, const char* what) {
  if (n > dense_cap()) {
    throw ValidationError(std::string(what) + ": N = " + std::to_string(n) +
                          " exceeds dense-oracle cap " + std::to_string(dense_cap()));
  }
}

}  // namespace alphacomb
