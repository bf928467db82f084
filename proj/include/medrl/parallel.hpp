#pragma once

#include <cstddef>
#include <vector>

namespace medrl {

/// Sum of term(i) for i in [0, n). Terms are grouped into fixed-size chunks
/// that are evaluated in parallel and combined in chunk order, so the result
/// is bit-identical for any thread count.
template <class Term>
double chunked_sum(std::size_t n, Term&& term, std::size_t chunk = 256) {
  if (n == 0) return 0.0;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(chunks, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace medrl
