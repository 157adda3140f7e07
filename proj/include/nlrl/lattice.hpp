#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nlrl {

using complex = std::complex<double>;

enum class Sublattice { A, B };

/// Amplitudes on cells m in [-N, N] of the open chain, plus the per-cell
/// accumulated decay integral  int_0^t 2 gamma_a |a_m|^2 dt'.
///
/// Storage is indexed by slot = m + N; everything outside [-N, N] is zero.
class LatticeState {
 public:
  LatticeState() = default;
  explicit LatticeState(int half_width)
      : half_width_(check_half_width(half_width)),
        a_(cells(), complex{}),
        b_(cells(), complex{}),
        decay_(cells(), 0.0) {}

  int half_width() const noexcept { return half_width_; }
  std::size_t cells() const noexcept { return static_cast<std::size_t>(2 * half_width_ + 1); }
  int first_cell() const noexcept { return -half_width_; }
  int last_cell() const noexcept { return half_width_; }
  bool contains(int m) const noexcept { return m >= -half_width_ && m <= half_width_; }

  complex& a(int m) { return a_[slot(m)]; }
  complex& b(int m) { return b_[slot(m)]; }
  double& decay(int m) { return decay_[slot(m)]; }
  complex a(int m) const { return a_[slot(m)]; }
  complex b(int m) const { return b_[slot(m)]; }
  double decay(int m) const { return decay_[slot(m)]; }

  /// Zero for cells outside the lattice.
  complex a_or_zero(int m) const noexcept { return contains(m) ? a_[unchecked(m)] : complex{}; }
  complex b_or_zero(int m) const noexcept { return contains(m) ? b_[unchecked(m)] : complex{}; }

  std::span<complex> a_data() noexcept { return a_; }
  std::span<complex> b_data() noexcept { return b_; }
  std::span<double> decay_data() noexcept { return decay_; }
  std::span<const complex> a_data() const noexcept { return a_; }
  std::span<const complex> b_data() const noexcept { return b_; }
  std::span<const double> decay_data() const noexcept { return decay_; }

  double t = 0.0;

  /// sum_m |a_m|^2 + |b_m|^2
  double norm() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += std::norm(a_[i]) + std::norm(b_[i]);
    return s;
  }

  double total_decay() const noexcept { return std::accumulate(decay_.begin(), decay_.end(), 0.0); }

  /// |a_m|^2 + |b_m|^2
  double occupancy(int m) const { return std::norm(a(m)) + std::norm(b(m)); }

  bool operator==(const LatticeState&) const = default;

 private:
  static int check_half_width(int n) {
    if (n < 1) throw std::invalid_argument("half_width must be positive, got " + std::to_string(n));
    return n;
  }
  std::size_t unchecked(int m) const noexcept { return static_cast<std::size_t>(m + half_width_); }
  std::size_t slot(int m) const {
    if (!contains(m))
      throw std::out_of_range("cell " + std::to_string(m) + " outside [-" +
                              std::to_string(half_width_) + ", " + std::to_string(half_width_) + "]");
    return unchecked(m);
  }

  int half_width_ = 0;
  std::vector<complex> a_;
  std::vector<complex> b_;
  std::vector<double> decay_;
};

struct SingleSite {
  int m = 0;
  Sublattice sublattice = Sublattice::B;
};

struct SiteAmplitude {
  int m = 0;
  Sublattice sublattice = Sublattice::B;
  complex amplitude{1.0, 0.0};
};

struct CustomState {
  std::vector<SiteAmplitude> sites;
};

/// Defaults to the particle sitting on the neutral site of cell 0.
using InitialStateSpec = std::variant<SingleSite, CustomState>;

/// Builds a unit-norm state. Custom amplitudes are normalised; repeated sites add.
inline LatticeState make_initial_state(int half_width, const InitialStateSpec& spec) {
  LatticeState state(half_width);
  auto site = [&](int m, Sublattice s) -> complex& {
    if (!state.contains(m))
      throw std::out_of_range("initial state references cell " + std::to_string(m) +
                              " outside the lattice of half-width " + std::to_string(half_width));
    return s == Sublattice::A ? state.a(m) : state.b(m);
  };

  if (const auto* single = std::get_if<SingleSite>(&spec)) {
    site(single->m, single->sublattice) = 1.0;
    return state;
  }

  for (const auto& entry : std::get<CustomState>(spec).sites) site(entry.m, entry.sublattice) += entry.amplitude;
  const double n = state.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::invalid_argument("initial state has zero norm and cannot be normalised");
  const double scale = 1.0 / std::sqrt(n);
  for (auto& x : state.a_data()) x *= scale;
  for (auto& x : state.b_data()) x *= scale;
  return state;
}

}  // namespace nlrl
