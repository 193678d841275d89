// Serial reference vs OpenMP kernels on the exhaustive searches. Results
// must match bit-for-bit; this target reports the throughput gap.

#include <chrono>
#include <cstdio>

#include "ivr/martingale.hpp"
#include "ivr/search.hpp"

using namespace ivr;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Row {
  const char* name;
  double serial_ms;
  double parallel_ms;
  bool equal;
};

void print(const Row& r) {
  std::printf("%-34s %10.1f ms %10.1f ms   x%.2f   %s\n", r.name, r.serial_ms, r.parallel_ms,
              r.serial_ms / r.parallel_ms, r.equal ? "identical" : "MISMATCH");
}

uint64_t splitmix(uint64_t& s) {
  uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

int main() {
  std::printf("workers: %d (openmp %s)\n\n", search::worker_count(),
              search::openmp_enabled() ? "on" : "off");

  {
    // full-cone scan: no extension of the doubling bettor ever reaches -1
    MartingaleTable adv = make_doubling(1, 1000);
    MartingaleView m(adv, kLimitStage);
    BinaryString base;
    Int bound = -1;
    auto t0 = std::chrono::steady_clock::now();
    auto serial = search::least_value_extension_serial(m, base, 22, bound);
    double s_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto parallel = search::least_value_extension_parallel(m, base, 22, bound);
    double p_ms = ms_since(t0);
    print({"least-extension full scan (2^22)", s_ms, p_ms, serial == parallel});
  }

  {
    uint64_t seed = 7;
    std::vector<BinaryString> forbidden;
    for (int i = 0; i < 48; ++i) {
      BinaryString mu;
      for (int j = 0; j < 22; ++j) mu.push_back(static_cast<int>(splitmix(seed) & 1));
      forbidden.push_back(mu);
    }
    StringSet visited;
    BinaryString base;
    auto t0 = std::chrono::steady_clock::now();
    auto serial = search::maximin_enumerate_serial(forbidden, base, 22, visited, false);
    double s_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto parallel = search::maximin_enumerate_parallel(forbidden, base, 22, visited, false);
    double p_ms = ms_since(t0);
    bool equal = serial.has_value() == parallel.has_value() &&
                 (!serial || (serial->choice == parallel->choice &&
                              serial->min_distance == parallel->min_distance));
    print({"maximin enumeration (2^22, 48 mu)", s_ms, p_ms, equal});
    t0 = std::chrono::steady_clock::now();
    auto pruned = search::maximin_pruned(forbidden, base, 22, visited, false);
    std::printf("%-34s %10.1f ms   (same winner: %s)\n", "  pruned route, for reference",
                ms_since(t0), pruned && serial && pruned->choice == serial->choice ? "yes" : "NO");
  }

  {
    auto t0 = std::chrono::steady_clock::now();
    auto serial = search::move_bound_table_serial(4000000);
    double s_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto parallel = search::move_bound_table_parallel(4000000);
    double p_ms = ms_since(t0);
    print({"move-bound table (k <= 4*10^6)", s_ms, p_ms, serial == parallel});
  }

  return 0;
}
