// Runs every acceptance criterion and prints one line per criterion.

#include <cstdio>

#include "spectra/verification.hpp"

int main() {
  int failed = 0;
  for (const auto& run : spectra::verify::all_criteria()) {
    const auto r = run();
    std::printf("[%s] %2d %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
    for (const auto& n : r.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
