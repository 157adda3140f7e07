#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "nlrl/model.hpp"

namespace nlrl {

class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Winding of h(k) = mu + nu e^{ik} around the origin for k in [0, 2 pi),
/// obtained by summing wrapped phase increments over a k-grid.
///
/// The grid is refined with the ratio max(|mu|,|nu|) / ||mu| - |nu||, which
/// bounds the phase change per step well below pi.
inline int winding_number(double mu, double nu) {
  if (!std::isfinite(mu) || !std::isfinite(nu)) throw DomainError("mu, nu", "couplings must be finite");
  const double gap = std::abs(std::abs(mu) - std::abs(nu));
  if (gap == 0.0) throw DegenerateInput("gap closes at |mu| = |nu|; winding number undefined");

  const double scale = std::max(std::abs(mu), std::abs(nu));
  constexpr double kMaxPoints = 1 << 26;
  const double wanted = std::ceil(64.0 * scale / gap);
  const auto points = static_cast<long>(std::clamp(wanted, 256.0, kMaxPoints));

  const double dk = 2.0 * std::numbers::pi / static_cast<double>(points);
  auto h = [&](long j) { return std::complex<double>(mu, 0.0) + nu * std::polar(1.0, dk * static_cast<double>(j)); };

  double total = 0.0;
  std::complex<double> prev = h(0);
  for (long j = 1; j <= points; ++j) {
    const std::complex<double> cur = h(j % points);
    total += std::arg(cur / prev);  // wrapped into (-pi, pi]
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace nlrl
