#pragma once

#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nlrl {

/// The linear lossy dimer chain and its five nonlinear-hopping variants.
///
///   Linear  no nonlinearity
///   A       intercell bond m-1|m shifted by U(|a_m|^2 + |b_{m-1}|^2)
///   B       intracell bond m shifted by U(|a_m|^2 + |b_m|^2)
///   C       intercell bond m-1|m shifted by U|a_m|^2
///   D       intracell bond m shifted by U|a_m|^2
///   E       intercell bond m-1|m shifted by U|b_{m-1}|^2
enum class ModelKind { Linear, A, B, C, D, E };

inline constexpr ModelKind kAllModels[] = {ModelKind::Linear, ModelKind::A, ModelKind::B,
                                           ModelKind::C,      ModelKind::D, ModelKind::E};

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "Linear";
    case ModelKind::A: return "A";
    case ModelKind::B: return "B";
    case ModelKind::C: return "C";
    case ModelKind::D: return "D";
    case ModelKind::E: return "E";
  }
  return "?";
}

/// Case-insensitive parse of "linear", "a" .. "e".
inline std::optional<ModelKind> parse_model_kind(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "linear") return ModelKind::Linear;
  if (lower.size() == 1 && lower[0] >= 'a' && lower[0] <= 'e')
    return kAllModels[1 + (lower[0] - 'a')];
  return std::nullopt;
}

/// Raised when a physical parameter is outside its admissible range.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string field, const std::string& what)
      : std::domain_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ModelParams {
  ModelKind kind = ModelKind::Linear;
  double delta_g = 0.0;
  double mu = 0.5;  // intracell coupling
  double nu = 0.5;  // intercell coupling
  double gamma_a = 0.0;
  double U = 0.0;
  bool negate_linear = false;
};

/// Couplings follow mu = 0.5 - delta_g, nu = 0.5 + delta_g; `negate_linear`
/// flips the sign of both while leaving U untouched.
inline ModelParams make_params(ModelKind kind, double delta_g, double gamma_a, double U,
                               bool negate_linear = false) {
  if (!std::isfinite(delta_g) || std::abs(delta_g) > 0.5)
    throw DomainError("delta_g", "must satisfy |delta_g| <= 0.5, got " + std::to_string(delta_g));
  if (!std::isfinite(gamma_a) || gamma_a < 0.0)
    throw DomainError("gamma_a", "must be >= 0, got " + std::to_string(gamma_a));
  if (!std::isfinite(U) || U < 0.0)
    throw DomainError("U", "must be >= 0, got " + std::to_string(U));

  const double sign = negate_linear ? -1.0 : 1.0;
  ModelParams p;
  p.kind = kind;
  p.delta_g = delta_g;
  p.mu = sign * (0.5 - delta_g);
  p.nu = sign * (0.5 + delta_g);
  p.gamma_a = gamma_a;
  p.U = U;
  p.negate_linear = negate_linear;
  return p;
}

}  // namespace nlrl
