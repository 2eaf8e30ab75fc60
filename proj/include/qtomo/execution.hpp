#pragma once

#include <cstddef>

namespace qtomo {

/// Selects the OpenMP kernel or its serial reference. Both must produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Execution { serial, parallel };

/// Runs body(i) for i in [0, count). Iterations must be independent.
template <typename Body>
void for_each_index(std::ptrdiff_t count, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
}

}  // namespace qtomo
