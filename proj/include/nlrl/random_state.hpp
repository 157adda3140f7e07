#pragma once

#include <cmath>
#include <random>

#include "nlrl/lattice.hpp"

namespace nlrl {

/// Unit-norm state with Gaussian real and imaginary parts on every site.
/// Decay accumulators stay zero.
template <class Rng>
LatticeState random_state(int half_width, Rng& rng) {
  std::normal_distribution<double> gauss;
  LatticeState s(half_width);
  for (auto& x : s.a_data()) x = {gauss(rng), gauss(rng)};
  for (auto& x : s.b_data()) x = {gauss(rng), gauss(rng)};
  const double scale = 1.0 / std::sqrt(s.norm());
  for (auto& x : s.a_data()) x *= scale;
  for (auto& x : s.b_data()) x *= scale;
  return s;
}

}  // namespace nlrl
