// Serial reference vs OpenMP kernels. Prints wall time for each and checks
// that both paths report the same numbers.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "qtomo/injectivity.hpp"
#include "qtomo/varieties.hpp"

using namespace qtomo;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

struct Row {
  std::string name;
  std::function<double(Execution)> run;  // returns a fingerprint of the result
};

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  const SeededRng rng(2718);
  SeededRng gen = rng.split(0);
  const auto haar6 = UnitaryEnsemble::haar(6, 4, gen);
  const auto ns6 = nullspace_basis(haar6);
  const auto haar4 = UnitaryEnsemble::haar(4, 4, gen);

  const std::vector<Row> rows{
      {"rank-2 multistart (n=6, 64 starts)",
       [&](Execution ex) {
         Rank2SearchParams p;
         p.execution = ex;
         return find_rank2_indefinite(ns6, p, rng).objective_floor;
       }},
      {"direct multistart (n=4, 64 starts)",
       [&](Execution ex) {
         DirectSearchParams p;
         p.execution = ex;
         return collision_search_direct(haar4, p, rng).best_residual;
       }},
      {"variety Jacobian batch (Y, n=10, 400 points)",
       [&](Execution ex) {
         double s = 0.0;
         for (const auto& r : variety_batch(VarietyKind::Y, 10, 400, rng, ex)) s += r.spectral_gap;
         return s;
       }},
  };

  std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);
  std::printf("%-46s %12s %12s %8s %s\n", "kernel", "serial ms", "parallel ms", "speedup", "match");
  int mismatches = 0;
  for (const auto& row : rows) {
    double fs = 0.0, fp = 0.0;
    const double ts = time_ms([&] { fs = row.run(Execution::serial); }, reps);
    const double tp = time_ms([&] { fp = row.run(Execution::parallel); }, reps);
    const bool match = fs == fp;
    mismatches += !match;
    std::printf("%-46s %12.1f %12.1f %8.2f %s\n", row.name.c_str(), ts, tp, ts / tp, match ? "yes" : "NO");
  }
  return mismatches == 0 ? 0 : 1;
}
