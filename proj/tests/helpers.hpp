#pragma once

#include <cmath>
#include <vector>

#include "bcfb/info.hpp"
#include "bcfb/rng.hpp"

namespace bcfb::testing {

// random interior-point pmf over the given axes (Dirichlet-ish draw)
inline JointPmf random_pmf(RngStream& rng, std::vector<Alphabet> axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.size);
  std::vector<double> mass(n);
  double total = 0.0;
  for (auto& m : mass) {
    m = -std::log(1.0 - rng.next_double());
    total += m;
  }
  for (auto& m : mass) m /= total;
  return JointPmf(std::move(axes), std::move(mass));
}

// random channel with per-row Dirichlet rows
inline ConditionalPmf random_channel(RngStream& rng,
                                     std::vector<Alphabet> given,
                                     std::vector<Alphabet> out) {
  std::size_t rows = 1, cols = 1;
  for (const auto& a : given) rows *= static_cast<std::size_t>(a.size);
  for (const auto& a : out) cols *= static_cast<std::size_t>(a.size);
  std::vector<double> mass(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      double v = -std::log(1.0 - rng.next_double());
      mass[r * cols + c] = v;
      total += v;
    }
    for (std::size_t c = 0; c < cols; ++c) mass[r * cols + c] /= total;
  }
  return ConditionalPmf(std::move(given), std::move(out), std::move(mass));
}

}  // namespace bcfb::testing
