#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "lpval/errors.hpp"

namespace lpval {

// The representable generator families. A closed set of shapes keeps configs
// serializable and runs reproducible; piecewise_linear is the escape hatch
// for arbitrary continuous functions on compacts.

/// h(a) = s * sign(a)^e * |a|^q with q > 0 and e in {0, 1}.
struct PowerFamily {
  double s = 1.0;
  double q = 1.0;
  int e = 0;
};

/// h(a) = c0 + c1*a + c2*a^2 + ... (coefficients in ascending degree).
struct PolynomialFamily {
  std::vector<double> coefficients;
};

/// h(a) = s * sin(w * a).
struct SineFamily {
  double s = 1.0;
  double w = 1.0;
};

/// h(a) = c. Only meaningful on finite-measure domains.
struct AffineConstFamily {
  double c = 0.0;
};

/// Continuous piecewise-linear interpolant through the given breakpoints,
/// extended linearly beyond the first and last one.
struct PiecewiseLinearFamily {
  std::vector<std::array<double, 2>> points;  // strictly increasing x
};

using GeneratorFamily = std::variant<PowerFamily, PolynomialFamily, SineFamily,
                                     AffineConstFamily, PiecewiseLinearFamily>;

/// Declared growth envelope |h(a)| <= gamma * |a|^p + delta.
struct Envelope {
  double p = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
};

namespace detail {

inline double eval_family(const PowerFamily& fam, double a) {
  const double m = std::pow(std::abs(a), fam.q);
  if (fam.e == 1) {
    const double sg = (a > 0.0) ? 1.0 : ((a < 0.0) ? -1.0 : 0.0);
    return fam.s * sg * m;
  }
  return fam.s * m;
}

inline double eval_family(const PolynomialFamily& fam, double a) {
  double acc = 0.0;
  for (std::size_t i = fam.coefficients.size(); i-- > 0;) {
    acc = acc * a + fam.coefficients[i];
  }
  return acc;
}

inline double eval_family(const SineFamily& fam, double a) {
  return fam.s * std::sin(fam.w * a);
}

inline double eval_family(const AffineConstFamily& fam, double) { return fam.c; }

inline double eval_family(const PiecewiseLinearFamily& fam, double a) {
  const auto& pts = fam.points;
  // Exact hit on a breakpoint returns its ordinate with no arithmetic.
  auto it = std::lower_bound(pts.begin(), pts.end(), a,
                             [](const std::array<double, 2>& pt, double x) {
                               return pt[0] < x;
                             });
  if (it != pts.end() && (*it)[0] == a) return (*it)[1];
  std::size_t seg;
  if (it == pts.begin()) {
    seg = 0;  // extrapolate with the first segment
  } else if (it == pts.end()) {
    seg = pts.size() - 2;  // extrapolate with the last segment
  } else {
    seg = static_cast<std::size_t>(it - pts.begin()) - 1;
  }
  const double x0 = pts[seg][0], y0 = pts[seg][1];
  const double x1 = pts[seg + 1][0], y1 = pts[seg + 1][1];
  const double slope = (y1 - y0) / (x1 - x0);
  return y0 + (a - x0) * slope;
}

}  // namespace detail

/// A continuous generator h: R -> R from one of the built-in families, with a
/// declared growth envelope and an optional exactness claim at the origin.
class Generator {
 public:
  Generator(GeneratorFamily family, Envelope envelope,
            std::optional<bool> claims_zero_at_zero = std::nullopt)
      : family_(std::move(family)), envelope_(envelope) {
    validate_family();
    if (!(envelope_.p >= 1.0)) {
      throw InvalidExponentError("envelope exponent p must satisfy p >= 1");
    }
    if (envelope_.gamma < 0.0 || envelope_.delta < 0.0) {
      throw InvalidGeneratorError("envelope constants must be nonnegative");
    }
    const bool zero_at_zero = ((*this)(0.0) == 0.0);
    claims_zero_ = claims_zero_at_zero.value_or(zero_at_zero);
    if (claims_zero_ && !zero_at_zero) {
      throw InvalidGeneratorError("generator claims h(0) = 0 but h(0) != 0");
    }
  }

  double operator()(double a) const {
    return std::visit([a](const auto& fam) { return detail::eval_family(fam, a); },
                      family_);
  }

  const GeneratorFamily& family() const noexcept { return family_; }
  const Envelope& envelope() const noexcept { return envelope_; }
  bool claims_zero_at_zero() const noexcept { return claims_zero_; }

  /// The generator a -> h(-a), expressed within the same family set.
  Generator reflected() const {
    GeneratorFamily fam = std::visit(
        [](const auto& f) -> GeneratorFamily { return reflect_family(f); },
        family_);
    return Generator(std::move(fam), envelope_, claims_zero_);
  }

  // Convenience factories.
  static Generator power(double s, double q, int e, Envelope env,
                         std::optional<bool> claims = std::nullopt) {
    return Generator(PowerFamily{s, q, e}, env, claims);
  }
  static Generator polynomial(std::vector<double> coefficients, Envelope env,
                              std::optional<bool> claims = std::nullopt) {
    return Generator(PolynomialFamily{std::move(coefficients)}, env, claims);
  }
  static Generator sine(double s, double w, Envelope env,
                        std::optional<bool> claims = std::nullopt) {
    return Generator(SineFamily{s, w}, env, claims);
  }
  static Generator affine_const(double c, Envelope env) {
    return Generator(AffineConstFamily{c}, env);
  }
  static Generator piecewise_linear(std::vector<std::array<double, 2>> points,
                                    Envelope env,
                                    std::optional<bool> claims = std::nullopt) {
    return Generator(PiecewiseLinearFamily{std::move(points)}, env, claims);
  }
  /// h identically zero with the given L^p exponent.
  static Generator zero(double p) {
    return power(0.0, 1.0, 0, Envelope{p, 0.0, 0.0}, true);
  }

 private:
  static GeneratorFamily reflect_family(const PowerFamily& f) {
    return PowerFamily{f.e == 1 ? -f.s : f.s, f.q, f.e};
  }
  static GeneratorFamily reflect_family(const PolynomialFamily& f) {
    PolynomialFamily out = f;
    for (std::size_t i = 1; i < out.coefficients.size(); i += 2) {
      out.coefficients[i] = -out.coefficients[i];
    }
    return out;
  }
  static GeneratorFamily reflect_family(const SineFamily& f) {
    return SineFamily{-f.s, f.w};
  }
  static GeneratorFamily reflect_family(const AffineConstFamily& f) { return f; }
  static GeneratorFamily reflect_family(const PiecewiseLinearFamily& f) {
    PiecewiseLinearFamily out;
    out.points.reserve(f.points.size());
    for (std::size_t i = f.points.size(); i-- > 0;) {
      out.points.push_back({-f.points[i][0], f.points[i][1]});
    }
    return out;
  }

  void validate_family() const {
    if (const auto* p = std::get_if<PowerFamily>(&family_)) {
      if (!(p->q > 0.0)) throw InvalidGeneratorError("power exponent q must be > 0");
      if (p->e != 0 && p->e != 1) {
        throw InvalidGeneratorError("power sign exponent e must be 0 or 1");
      }
    } else if (const auto* pw = std::get_if<PiecewiseLinearFamily>(&family_)) {
      if (pw->points.size() < 2) {
        throw InvalidGeneratorError("piecewise_linear needs at least two points");
      }
      for (std::size_t i = 1; i < pw->points.size(); ++i) {
        if (!(pw->points[i - 1][0] < pw->points[i][0])) {
          throw InvalidGeneratorError(
              "piecewise_linear breakpoints must be strictly increasing");
        }
      }
    }
  }

  GeneratorFamily family_;
  Envelope envelope_;
  bool claims_zero_ = false;
};

inline bool check_zero(const Generator& h) { return h(0.0) == 0.0; }

/// Sampled envelope check. Sampling falsifies but never proves: a passing
/// report means "consistent with the envelope at the sampled points".
struct EnvelopeReport {
  bool pass = true;
  double worst_excess = 0.0;  // max of |h(a)| - (gamma |a|^p + delta); <= 0 when consistent
  double worst_point = 0.0;
  std::size_t samples = 0;
};

inline EnvelopeReport validate_envelope(const Generator& h,
                                        std::span<const double> sample_points) {
  if (sample_points.empty()) {
    throw InvalidGeneratorError("validate_envelope needs at least one sample");
  }
  const Envelope& env = h.envelope();
  EnvelopeReport report;
  report.samples = sample_points.size();
  bool first = true;
  for (double a : sample_points) {
    const double bound = env.gamma * std::pow(std::abs(a), env.p) + env.delta;
    const double excess = std::abs(h(a)) - bound;
    if (first || excess > report.worst_excess) {
      report.worst_excess = excess;
      report.worst_point = a;
      first = false;
    }
  }
  report.pass = !(report.worst_excess > 0.0);
  return report;
}

/// Symmetric sample grid, endpoints included.
inline std::vector<double> sample_grid(double lo, double hi, std::size_t count) {
  std::vector<double> xs;
  xs.reserve(count);
  if (count == 1) {
    xs.push_back(lo);
    return xs;
  }
  for (std::size_t i = 0; i < count; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return xs;
}

/// The quadruple (h1, h2, h3, h4) composing with Re f and Im f inside the
/// representation integrals. All four must share the same L^p exponent.
class GeneratorQuadruple {
 public:
  GeneratorQuadruple(Generator h1, Generator h2, Generator h3, Generator h4)
      : parts_{std::move(h1), std::move(h2), std::move(h3), std::move(h4)} {
    const double p = parts_[0].envelope().p;
    for (const Generator& h : parts_) {
      if (h.envelope().p != p) {
        throw InvalidGeneratorError("all four generators must share the same p");
      }
    }
  }

  const Generator& h1() const noexcept { return parts_[0]; }
  const Generator& h2() const noexcept { return parts_[1]; }
  const Generator& h3() const noexcept { return parts_[2]; }
  const Generator& h4() const noexcept { return parts_[3]; }
  const Generator& component(std::size_t k) const { return parts_.at(k); }

  double p() const noexcept { return parts_[0].envelope().p; }

  bool all_zero_at_origin() const {
    for (const Generator& h : parts_) {
      if (!check_zero(h)) return false;
    }
    return true;
  }

 private:
  std::array<Generator, 4> parts_;
};

}  // namespace lpval
