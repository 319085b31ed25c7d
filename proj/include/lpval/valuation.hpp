#pragma once

#include <utility>

#include "lpval/complex_value.hpp"
#include "lpval/errors.hpp"
#include "lpval/generator.hpp"
#include "lpval/simple_function.hpp"
#include "lpval/summation.hpp"

namespace lpval {

/// Outcome of evaluating a valuation functional. Divergence is a value, not
/// an error, so necessity scenarios can assert on it.
class EvalResult {
 public:
  static EvalResult finite(Complex v) { return EvalResult(false, v); }
  static EvalResult divergent() { return EvalResult(true, Complex{0.0, 0.0}); }

  bool is_divergent() const noexcept { return divergent_; }

  Complex value() const {
    if (divergent_) throw Error("attempted to read the value of a divergent result");
    return value_;
  }

 private:
  EvalResult(bool divergent, Complex value) : value_(value), divergent_(divergent) {}
  Complex value_;
  bool divergent_ = false;
};

/// The functional
///   Phi(f) = int (h1 o Re f + h3 o Im f) dmu + i * int (h2 o Re f + h4 o Im f) dmu
/// evaluated exactly on simple functions (grid and sphere backends live in
/// euclidean_grid.hpp / sphere.hpp). Phi(0) = 0 whenever all four generators
/// vanish at the origin.
class ValuationFunctional {
 public:
  explicit ValuationFunctional(GeneratorQuadruple quadruple)
      : quad_(std::move(quadruple)) {}

  const GeneratorQuadruple& quadruple() const noexcept { return quad_; }

  /// Values of the integrands at a function value of exactly zero. An
  /// infinite-measure remainder multiplies these by infinity, hence the
  /// divergence rule below.
  Complex origin_term() const {
    return {quad_.h1()(0.0) + quad_.h3()(0.0), quad_.h2()(0.0) + quad_.h4()(0.0)};
  }

  bool diverges_on_infinite_domain() const {
    return !(quad_.h1()(0.0) == 0.0 && quad_.h2()(0.0) == 0.0 &&
             quad_.h3()(0.0) == 0.0 && quad_.h4()(0.0) == 0.0);
  }

 private:
  GeneratorQuadruple quad_;
};

/// Exact integration over the cells of the partition, in fixed cell order
/// with compensated accumulation. On an infinite_total partition any
/// generator with h(0) != 0 integrates h(0) over the infinite remainder, so
/// the result is reported as divergent.
inline EvalResult evaluate(const ValuationFunctional& phi,
                           const ComplexSimpleFunction& f) {
  const GeneratorQuadruple& q = phi.quadruple();
  const auto& partition = *f.partition();
  if (partition.infinite_total() && phi.diverges_on_infinite_domain()) {
    return EvalResult::divergent();
  }
  NeumaierSum re_acc, im_acc;
  for (std::size_t i = 0; i < f.cell_count(); ++i) {
    const double a = f.value(i).real();
    const double b = f.value(i).imag();
    const double mu = partition.measure(i);
    re_acc.add((q.h1()(a) + q.h3()(b)) * mu);
    im_acc.add((q.h2()(a) + q.h4()(b)) * mu);
  }
  return EvalResult::finite({re_acc.value(), im_acc.value()});
}

/// Closed form on c * chi_E:
///   (h1(Re c) + h3(Im c)) mu(E) + i (h2(Re c) + h4(Im c)) mu(E).
inline Complex evaluate_on_characteristic(const ValuationFunctional& phi, Complex c,
                                          double measure_of_set) {
  if (!(measure_of_set >= 0.0)) {
    throw InvalidMeasureError("measure of the carrier set must be nonnegative");
  }
  const GeneratorQuadruple& q = phi.quadruple();
  const double re = (q.h1()(c.real()) + q.h3()(c.imag())) * measure_of_set;
  const double im = (q.h2()(c.real()) + q.h4()(c.imag())) * measure_of_set;
  return {re, im};
}

/// The real and imaginary parts of Phi as functionals in their own right:
///   Phi  = Phi_1 + i * Phi_2,
/// materialized over zeroed quadruples so every harness check applies to them
/// unchanged. Phi_1 integrates h1 o Re f + h3 o Im f; Phi_2 integrates
/// h2 o Re f + h4 o Im f; both have identically zero imaginary part.
inline std::pair<ValuationFunctional, ValuationFunctional> decompose_re_im(
    const ValuationFunctional& phi) {
  const GeneratorQuadruple& q = phi.quadruple();
  const double p = q.p();
  ValuationFunctional phi1(
      GeneratorQuadruple(q.h1(), Generator::zero(p), q.h3(), Generator::zero(p)));
  ValuationFunctional phi2(
      GeneratorQuadruple(q.h2(), Generator::zero(p), q.h4(), Generator::zero(p)));
  return {std::move(phi1), std::move(phi2)};
}

/// Phi' with Phi'(f) = Phi(i f), materialized as a quadruple of its own:
/// since Re(i f) = -Im f and Im(i f) = Re f, the new quadruple is
/// (h3, h4, h1 o neg, h2 o neg). When h1 or h2 does not vanish at the origin
/// the closed form on real functions gains the constant term
/// h1(0) + i h2(0) per unit measure; that term is surfaced in origin_offset
/// rather than hidden (the identity Phi'(f) = Phi(i f) still holds).
struct ImaginaryRotation {
  ValuationFunctional functional;
  Complex origin_offset;  // h1(0) + i h2(0)
};

inline ImaginaryRotation rotate_to_imaginary(const ValuationFunctional& phi) {
  const GeneratorQuadruple& q = phi.quadruple();
  ValuationFunctional rotated(GeneratorQuadruple(
      q.h3(), q.h4(), q.h1().reflected(), q.h2().reflected()));
  return {std::move(rotated), Complex{q.h1()(0.0), q.h2()(0.0)}};
}

}  // namespace lpval
