#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "tsir/timescale.hpp"

namespace tsir {

namespace coeff {

struct Constant {
  double value = 0;
  friend bool operator==(const Constant&, const Constant&) = default;
};

/// a / (t + shift)
struct Reciprocal {
  double a = 1;
  double shift = 1;
  friend bool operator==(const Reciprocal&, const Reciprocal&) = default;
};

/// Standard log-normal density, 0 for t <= 0.
struct LogNormalPdf {
  friend bool operator==(const LogNormalPdf&, const LogNormalPdf&) = default;
};

/// s (1 - exp(-r t - d))
struct VonBertalanffy {
  double s = 0;
  double r = 0;
  double d = 0;
  friend bool operator==(const VonBertalanffy&, const VonBertalanffy&) = default;
};

/// base + amp sin(m t)
struct Sinusoid {
  double base = 0;
  double amp = 0;
  double m = 1;
  friend bool operator==(const Sinusoid&, const Sinusoid&) = default;
};

/// Piecewise-linear interpolation of (t, value) knots; extrapolation is an error.
struct Tabulated {
  std::string source;
  std::vector<std::pair<double, double>> knots;
  friend bool operator==(const Tabulated&, const Tabulated&) = default;
};

}  // namespace coeff

/// Named, parameterized scalar function of time used for the transmission
/// rate b(t) and the removal rate c(t).
class CoefficientFunction {
public:
  using Kind = std::variant<coeff::Constant, coeff::Reciprocal, coeff::LogNormalPdf, coeff::VonBertalanffy,
                            coeff::Sinusoid, coeff::Tabulated>;

  CoefficientFunction() : kind_(coeff::Constant{0.0}) {}
  CoefficientFunction(Kind kind);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires(!std::is_same_v<std::decay_t<T>, Kind> && std::is_constructible_v<Kind, T>)
  CoefficientFunction(T alternative)  // NOLINT(google-explicit-constructor)
      : CoefficientFunction(Kind(std::move(alternative))) {}

  static CoefficientFunction constant(double v) { return CoefficientFunction(coeff::Constant{v}); }
  /// Knots must be strictly increasing in t, at least two of them.
  static CoefficientFunction table(std::vector<std::pair<double, double>> knots, std::string source = "inline");

  double operator()(Time t) const;

  const Kind& kind() const { return kind_; }
  /// Set only for Constant coefficients.
  std::optional<double> constant_value() const;
  /// Literal form, e.g. `sin:base=0.5,amp=0.25,m=1`.
  std::string literal() const;
  const std::string& name() const { return name_; }

  friend bool operator==(const CoefficientFunction& a, const CoefficientFunction& b) { return a.kind_ == b.kind_; }

private:
  Kind kind_;
  std::string name_;
};

/// Parses a coefficient literal. `table:` paths are resolved against `base_dir`.
CoefficientFunction parse_coefficient(std::string_view literal, const std::filesystem::path& base_dir = {});

/// Reads a two-column `t,value` CSV (optional header line).
std::vector<std::pair<double, double>> read_table_csv(const std::filesystem::path& path);

}  // namespace tsir
