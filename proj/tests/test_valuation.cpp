#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lpval/rng.hpp"
#include "lpval/valuation.hpp"

using namespace lpval;

namespace {

const Envelope kP2{2.0, 1.0, 0.0};

GeneratorQuadruple hand_quadruple() {
  // h1(a) = a, h2(a) = a^2, h3 = 0, h4(a) = a
  return GeneratorQuadruple(Generator::power(1.0, 1.0, 1, kP2),
                            Generator::power(1.0, 2.0, 0, kP2),
                            Generator::zero(2.0),
                            Generator::power(1.0, 1.0, 1, kP2));
}

GeneratorQuadruple zero_quadruple() {
  auto z = Generator::zero(2.0);
  return GeneratorQuadruple(z, z, z, z);
}

}  // namespace

TEST_CASE("zero quadruple maps everything to zero") {
  ValuationFunctional phi(zero_quadruple());
  auto p = make_partition({0.5, 1.5});
  ComplexSimpleFunction f(p, {{2.0, -3.0}, {1.0, 4.0}});
  auto r = evaluate(phi, f);
  REQUIRE_FALSE(r.is_divergent());
  REQUIRE(r.value() == Complex{0.0, 0.0});
}

TEST_CASE("hand evaluation of the characteristic formula") {
  ValuationFunctional phi(hand_quadruple());

  // f = (2+3i) chi_E with mu(E) = 0.5:
  //   re = (h1(2) + h3(3)) * 0.5 = 1.0
  //   im = (h2(2) + h4(3)) * 0.5 = (4 + 3) * 0.5 = 3.5
  auto p = make_partition({0.5});
  ComplexSimpleFunction f(p, {{2.0, 3.0}});
  auto direct = evaluate(phi, f);
  REQUIRE_FALSE(direct.is_divergent());
  REQUIRE(direct.value().real() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(direct.value().imag() == Catch::Approx(3.5).margin(1e-12));

  auto closed = evaluate_on_characteristic(phi, {2.0, 3.0}, 0.5);
  REQUIRE(closed.real() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(closed.imag() == Catch::Approx(3.5).margin(1e-12));

  REQUIRE(evaluate_on_characteristic(phi, {0.0, 0.0}, 0.7) == Complex{0.0, 0.0});
  REQUIRE(evaluate_on_characteristic(phi, {2.0, 3.0}, 0.0) == Complex{0.0, 0.0});
  REQUIRE_THROWS_AS(evaluate_on_characteristic(phi, {1.0, 0.0}, -1.0),
                    InvalidMeasureError);
}

TEST_CASE("closed form agrees with direct evaluation on random characteristics") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    // random zero-at-origin quadruple of mixed families
    GeneratorQuadruple q(
        Generator::power(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 3.0),
                         rng.coin() ? 1 : 0, kP2),
        Generator::polynomial({0.0, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                              kP2),
        Generator::sine(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0), kP2),
        Generator::zero(2.0));
    ValuationFunctional phi(q);
    const Complex c = rng.complex_in_square(5.0);
    const double mu = rng.uniform(0.01, 2.0);
    auto p = make_partition({mu});
    ComplexSimpleFunction f(p, {c});
    const Complex direct = evaluate(phi, f).value();
    const Complex closed = evaluate_on_characteristic(phi, c, mu);
    const double scale = std::max({1.0, modulus(direct), modulus(closed)});
    REQUIRE(modulus(direct - closed) <= 1e-12 * scale);
  }
}

TEST_CASE("Phi(0) = 0 whenever the quadruple vanishes at the origin") {
  Rng rng(12);
  GeneratorQuadruple q(
      Generator::power(1.5, 2.0, 0, kP2),
      Generator::sine(0.7, 1.3, kP2),
      Generator::polynomial({0.0, -1.0, 0.5}, kP2),
      Generator::piecewise_linear({{-1.0, 1.0}, {0.0, 0.0}, {1.0, -2.0}}, kP2));
  REQUIRE(q.all_zero_at_origin());
  ValuationFunctional phi(q);
  auto p = make_partition({0.3, 0.7, 1.1});
  auto r = evaluate(phi, ComplexSimpleFunction::zero(p));
  REQUIRE(r.value() == Complex{0.0, 0.0});
}

TEST_CASE("divergence on infinite-measure domains") {
  auto infinite = make_partition({1.0}, true);
  auto f = ComplexSimpleFunction::zero(infinite);

  // any h_k with h(0) != 0 integrates a nonzero constant over the remainder
  GeneratorQuadruple bad(Generator::affine_const(1.0, Envelope{2.0, 0.0, 1.0}),
                         Generator::zero(2.0), Generator::zero(2.0),
                         Generator::zero(2.0));
  REQUIRE(evaluate(ValuationFunctional(bad), f).is_divergent());

  GeneratorQuadruple bad4(Generator::zero(2.0), Generator::zero(2.0),
                          Generator::zero(2.0),
                          Generator::piecewise_linear(
                              {{-1.0, 0.0}, {0.0, 0.5}, {1.0, 1.0}},
                              Envelope{2.0, 1.0, 0.5}));
  REQUIRE(evaluate(ValuationFunctional(bad4), f).is_divergent());

  // all h_k(0) = 0: the remainder contributes nothing
  GeneratorQuadruple ok(Generator::power(1.0, 2.0, 0, kP2), Generator::zero(2.0),
                        Generator::zero(2.0), Generator::zero(2.0));
  ComplexSimpleFunction g(infinite, {{3.0, 0.0}});
  auto r = evaluate(ValuationFunctional(ok), g);
  REQUIRE_FALSE(r.is_divergent());
  REQUIRE(r.value().real() == Catch::Approx(9.0).epsilon(1e-14));

  // divergent results refuse to hand out a value
  auto d = evaluate(ValuationFunctional(bad), f);
  REQUIRE_THROWS_AS(d.value(), Error);
}

TEST_CASE("decompose_re_im splits the functional exactly") {
  ValuationFunctional phi(hand_quadruple());
  auto [phi1, phi2] = decompose_re_im(phi);

  auto p = make_partition({1.0});
  ComplexSimpleFunction f(p, {{1.0, 0.0}});
  // h1(a) = a: Phi_1(1 chi_E) = 1, and h2 = a^2: Phi_2 = 1
  REQUIRE(evaluate(phi1, f).value() == Complex{1.0, 0.0});
  REQUIRE(evaluate(phi2, f).value() == Complex{1.0, 0.0});

  // real-valued: imaginary component is identically zero, bitwise
  Rng rng(5);
  auto q = make_partition({0.25, 0.5, 0.25});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Complex> values(q->cell_count());
    for (auto& v : values) v = rng.complex_in_square(5.0);
    ComplexSimpleFunction g(q, values);
    const Complex whole = evaluate(phi, g).value();
    const Complex part1 = evaluate(phi1, g).value();
    const Complex part2 = evaluate(phi2, g).value();
    REQUIRE(part1.imag() == 0.0);
    REQUIRE(part2.imag() == 0.0);
    // Phi = Phi_1 + i Phi_2 holds bitwise: identical arithmetic per component
    REQUIRE(bitwise_equal(whole, Complex{part1.real(), part2.real()}));
  }
}

TEST_CASE("rotate_to_imaginary realizes Phi(i f)") {
  // h3(a) = a, others 0; f = chi_E real, mu(E) = 1 -> Phi'(f) = 1
  GeneratorQuadruple q3(Generator::zero(2.0), Generator::zero(2.0),
                        Generator::power(1.0, 1.0, 1, kP2), Generator::zero(2.0));
  auto rot3 = rotate_to_imaginary(ValuationFunctional(q3));
  REQUIRE(rot3.origin_offset == Complex{0.0, 0.0});
  auto p = make_partition({1.0});
  ComplexSimpleFunction one(p, {{1.0, 0.0}});
  REQUIRE(evaluate(rot3.functional, one).value() == Complex{1.0, 0.0});

  // h4(a) = a^2, others 0; f = 2 chi_E, mu(E) = 0.25 -> 0 + 1.0 i
  GeneratorQuadruple q4(Generator::zero(2.0), Generator::zero(2.0),
                        Generator::zero(2.0), Generator::power(1.0, 2.0, 0, kP2));
  auto rot4 = rotate_to_imaginary(ValuationFunctional(q4));
  auto p4 = make_partition({0.25});
  ComplexSimpleFunction two(p4, {{2.0, 0.0}});
  REQUIRE(evaluate(rot4.functional, two).value() == Complex{0.0, 1.0});

  // Phi'(f) = Phi(i f) for arbitrary complex f
  Rng rng(17);
  GeneratorQuadruple full(
      Generator::polynomial({0.0, 1.0, 0.5}, kP2),
      Generator::power(0.8, 2.0, 0, kP2),
      Generator::sine(1.1, 0.9, kP2),
      Generator::polynomial({0.0, -0.4, 0.0, 0.2}, kP2));
  ValuationFunctional phi(full);
  auto rot = rotate_to_imaginary(phi);
  auto dom = make_partition({0.5, 0.75, 1.25});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Complex> values(dom->cell_count());
    for (auto& v : values) v = rng.complex_in_square(4.0);
    ComplexSimpleFunction f(dom, values);
    const Complex lhs = evaluate(rot.functional, f).value();
    const Complex rhs = evaluate(phi, times_i(f)).value();
    const double scale = std::max({1.0, modulus(lhs), modulus(rhs)});
    REQUIRE(modulus(lhs - rhs) <= 1e-12 * scale);
  }

  // nonzero h1(0)/h2(0) is reported, and the identity still holds
  GeneratorQuadruple offset_quad(
      Generator::affine_const(0.5, Envelope{2.0, 0.0, 0.5}),
      Generator::polynomial({-0.25, 1.0}, Envelope{2.0, 1.0, 0.25}),
      Generator::zero(2.0), Generator::zero(2.0));
  auto rot_off = rotate_to_imaginary(ValuationFunctional(offset_quad));
  REQUIRE(rot_off.origin_offset == Complex{0.5, -0.25});
  ComplexSimpleFunction g(dom, {{1.0, 0.0}, {0.0, -2.0}, {0.5, 0.5}});
  const Complex lhs = evaluate(rot_off.functional, g).value();
  const Complex rhs = evaluate(ValuationFunctional(offset_quad), times_i(g)).value();
  REQUIRE(modulus(lhs - rhs) <= 1e-12 * std::max(1.0, modulus(rhs)));
}

TEST_CASE("real restriction: h3 = h4 = 0 reduces to a real-function integral") {
  // For real f, Phi(f) = int h1 o f dmu + i * int h2 o f dmu.
  GeneratorQuadruple q(Generator::polynomial({0.0, 2.0, 1.0}, kP2),
                       Generator::zero(2.0), Generator::zero(2.0),
                       Generator::zero(2.0));
  ValuationFunctional phi(q);
  auto p = make_partition({0.5, 0.25});
  ComplexSimpleFunction f(p, {{1.0, 0.0}, {-2.0, 0.0}});
  // int h1 o f = 0.5*(2+1) + 0.25*(-4+4) = 1.5
  auto r = evaluate(phi, f);
  REQUIRE(r.value().real() == Catch::Approx(1.5).margin(1e-13));
  REQUIRE(r.value().imag() == 0.0);
}
