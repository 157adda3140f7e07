#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlrl/lattice.hpp"
#include "nlrl/model.hpp"

namespace nlrl {

/// Time derivative of a LatticeState, slot-indexed like the state itself.
struct LatticeDerivative {
  std::vector<complex> da;
  std::vector<complex> db;
  std::vector<double> ddecay;

  LatticeDerivative() = default;
  explicit LatticeDerivative(std::size_t cells) : da(cells), db(cells), ddecay(cells) {}
};

namespace detail {

// i * c * z without a full complex multiply.
inline complex i_times(double c, complex z) noexcept { return {-c * z.imag(), c * z.real()}; }

// Shift subtracted from nu on the bond (b_{m-1}, a_m); slot i = m + N, b_{-N-1} = 0.
inline double intercell_shift(const ModelParams& p, std::span<const complex> a, std::span<const complex> b,
                              std::size_t i) noexcept {
  const double b_prev = i > 0 ? std::norm(b[i - 1]) : 0.0;
  switch (p.kind) {
    case ModelKind::A: return p.U * (std::norm(a[i]) + b_prev);
    case ModelKind::C: return p.U * std::norm(a[i]);
    case ModelKind::E: return p.U * b_prev;
    default: return 0.0;
  }
}

// Shift subtracted from mu on the bond (a_m, b_m).
inline double intracell_shift(const ModelParams& p, std::span<const complex> a, std::span<const complex> b,
                              std::size_t i) noexcept {
  switch (p.kind) {
    case ModelKind::B: return p.U * (std::norm(a[i]) + std::norm(b[i]));
    case ModelKind::D: return p.U * std::norm(a[i]);
    default: return 0.0;
  }
}

inline void require_cell(const LatticeState& s, int m) {
  if (!s.contains(m))
    throw std::out_of_range("cell " + std::to_string(m) + " outside lattice of half-width " +
                            std::to_string(s.half_width()));
}

}  // namespace detail

/// The model's own nonlinear term at cell m: xi_m (A), zeta_m (B), chi_m (C, D),
/// eta_m (E) or 0 (Linear). For model E this is U|b_m|^2, i.e. the shift on the
/// bond leaving cell m to the right.
inline double nonlinear_shift(const ModelParams& p, const LatticeState& s, int m) {
  detail::require_cell(s, m);
  const double a2 = std::norm(s.a(m));
  switch (p.kind) {
    case ModelKind::Linear: return 0.0;
    case ModelKind::A: return p.U * (a2 + std::norm(s.b_or_zero(m - 1)));
    case ModelKind::B: return p.U * (a2 + std::norm(s.b(m)));
    case ModelKind::C:
    case ModelKind::D: return p.U * a2;
    case ModelKind::E: return p.U * std::norm(s.b(m));
  }
  return 0.0;
}

/// Writes d/dt of amplitudes and decay accumulators into `out` (resized as needed).
///
///   da_m/dt = -gamma_a a_m + i (mu - s_m) b_m + i (nu - r_m) b_{m-1}
///   db_m/dt =                i (mu - s_m) a_m + i (nu - r_{m+1}) a_{m+1}
///   d decay_m/dt = 2 gamma_a |a_m|^2
///
/// with s_m the intracell and r_m the intercell shift of the model. Every
/// bond enters both of its ends with the same coefficient, so the norm only
/// leaks through the lossy sites.
inline void rhs(const ModelParams& p, const LatticeState& s, LatticeDerivative& out) {
  const auto a = s.a_data();
  const auto b = s.b_data();
  const std::size_t n = a.size();
  if (out.da.size() != n) out = LatticeDerivative(n);

  const double two_gamma = 2.0 * p.gamma_a;
  double nu_in = 0.0;  // coupling of bond (b_{m-1}, a_m); unused at the left edge
  for (std::size_t i = 0; i < n; ++i) {
    const double mu_eff = p.mu - detail::intracell_shift(p, a, b, i);
    complex da = -p.gamma_a * a[i] + detail::i_times(mu_eff, b[i]);
    if (i > 0) da += detail::i_times(nu_in, b[i - 1]);
    complex db = detail::i_times(mu_eff, a[i]);
    if (i + 1 < n) {
      const double nu_out = p.nu - detail::intercell_shift(p, a, b, i + 1);
      db += detail::i_times(nu_out, a[i + 1]);
      nu_in = nu_out;
    }
    out.da[i] = da;
    out.db[i] = db;
    out.ddecay[i] = two_gamma * std::norm(a[i]);
  }
}

inline LatticeDerivative rhs(const ModelParams& p, const LatticeState& s) {
  LatticeDerivative out(s.cells());
  rhs(p, s, out);
  return out;
}

/// Z_m = |nu_eff| - |mu_eff| for the bond entering cell m from the left and
/// the intracell bond of cell m. Models A, C, E shift nu (E uses eta_{m-1});
/// models B, D shift mu; Linear gives |nu| - |mu| everywhere.
inline double effective_contrast(const ModelParams& p, const LatticeState& s, int m) {
  detail::require_cell(s, m);
  const auto i = static_cast<std::size_t>(m + s.half_width());
  const auto a = s.a_data();
  const auto b = s.b_data();
  return std::abs(p.nu - detail::intercell_shift(p, a, b, i)) -
         std::abs(p.mu - detail::intracell_shift(p, a, b, i));
}

}  // namespace nlrl
