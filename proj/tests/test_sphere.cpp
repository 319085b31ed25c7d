#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lpval/rng.hpp"
#include "lpval/sphere.hpp"

using namespace lpval;

namespace {

constexpr double kPi = std::numbers::pi;

// Analytic oracle: integral of x^a y^b z^c over the unit sphere/circle via
// the double-factorial formula; zero when any exponent is odd.
double double_factorial(int n) {
  double out = 1.0;
  for (int k = n; k > 1; k -= 2) out *= static_cast<double>(k);
  return out;
}

double monomial_integral(int dimension, int a, int b, int c) {
  if (a % 2 != 0 || b % 2 != 0 || c % 2 != 0) return 0.0;
  if (dimension == 2) {
    if (c != 0) return 0.0;
    return 2.0 * kPi * double_factorial(a - 1) * double_factorial(b - 1) /
           double_factorial(a + b);
  }
  return 4.0 * kPi * double_factorial(a - 1) * double_factorial(b - 1) *
         double_factorial(c - 1) / double_factorial(a + b + c + 1);
}

double quadrature_monomial(const SphereQuadrature& grid, int a, int b, int c) {
  auto f = sample_on_sphere(grid, [&](const std::array<double, 3>& u) {
    return Complex{std::pow(u[0], a) * std::pow(u[1], b) * std::pow(u[2], c), 0.0};
  });
  return integrate(f).real();
}

const Envelope kP2{2.0, 1.0, 0.0};

GeneratorQuadruple mixed_quadruple() {
  return GeneratorQuadruple(Generator::polynomial({0.0, 1.0, 0.5}, kP2),
                            Generator::power(1.0, 2.0, 0, kP2),
                            Generator::sine(0.8, 1.1, kP2),
                            Generator::polynomial({0.0, -0.7}, kP2));
}

}  // namespace

TEST_CASE("gauss-legendre rule integrates monomials on [-1,1]") {
  for (std::size_t count : {1u, 2u, 5u, 8u, 16u, 33u}) {
    auto rule = gauss_legendre_rule(count);
    // weights sum to 2
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    REQUIRE(wsum == Catch::Approx(2.0).margin(1e-13));
    // exact through degree 2*count - 1
    for (std::size_t deg = 0; deg <= 2 * count - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        s += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(deg));
      }
      const double truth = (deg % 2 == 0) ? 2.0 / static_cast<double>(deg + 1) : 0.0;
      REQUIRE(s == Catch::Approx(truth).margin(1e-12));
    }
  }
}

TEST_CASE("circle grid: order 8 gives 8 nodes of weight pi/4") {
  auto g = make_sphere_grid(2, 8);
  REQUIRE(g.node_count() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(g.weight(i) == Catch::Approx(kPi / 4.0).margin(1e-15));
  }
  double wsum = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) wsum += g.weight(i);
  REQUIRE(wsum == Catch::Approx(2.0 * kPi).margin(1e-13));
}

TEST_CASE("sphere grid invariants: weights, node norms, exactness") {
  auto g = make_sphere_grid(3, 8);
  REQUIRE(g.azimuth_count() % 4 == 0);

  double wsum = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) wsum += g.weight(i);
  REQUIRE(std::abs(wsum - 4.0 * kPi) <= 1e-12);

  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto& u = g.node(i);
    const double norm = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    REQUIRE(std::abs(norm - 1.0) <= 1e-14);
  }

  // int_{S^2} z^2 du = 4 pi / 3
  REQUIRE(std::abs(quadrature_monomial(g, 0, 0, 2) - 4.0 * kPi / 3.0) <= 1e-10);
}

TEST_CASE("monomials integrate exactly up to the declared degree") {
  for (int dim : {2, 3}) {
    for (std::size_t order : {4u, 8u, 11u}) {
      auto g = make_sphere_grid(dim, order);
      const int maxdeg = static_cast<int>(g.exact_degree());
      for (int a = 0; a <= maxdeg; ++a) {
        for (int b = 0; a + b <= maxdeg; ++b) {
          if (dim == 2) {
            const double got = quadrature_monomial(g, a, b, 0);
            REQUIRE(std::abs(got - monomial_integral(2, a, b, 0)) <= 1e-10);
          } else {
            for (int c = 0; a + b + c <= maxdeg; ++c) {
              const double got = quadrature_monomial(g, a, b, c);
              REQUIRE(std::abs(got - monomial_integral(3, a, b, c)) <= 1e-10);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("rotate rejects non-orthogonal matrices") {
  auto g = make_sphere_grid(3, 4);
  Mat3 skew = identity_matrix();
  skew[0][1] = 0.1;
  REQUIRE_THROWS_AS(rotate(g, skew), InvalidRotationError);
}

TEST_CASE("identity and symmetry-group rotations permute nodes exactly") {
  Rng rng(77);
  auto g = make_sphere_grid(3, 6);
  std::vector<Complex> samples(g.node_count());
  for (auto& s : samples) s = rng.complex_in_square(2.0);
  auto f = g.with_samples(samples);

  auto same = rotate(f, identity_matrix());
  REQUIRE(same.exact);
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    REQUIRE(bitwise_equal(same.function.sample(i), f.sample(i)));
  }

  // quarter turn about z: azimuth_count is divisible by 4
  const std::size_t naz = f.azimuth_count();
  auto quarter = rotate(f, rotation_z(kPi / 2.0));
  REQUIRE(quarter.exact);
  const std::size_t m = naz / 4;
  for (std::size_t j = 0; j < f.polar_count(); ++j) {
    for (std::size_t k = 0; k < naz; ++k) {
      REQUIRE(bitwise_equal(quarter.function.sample(f.node_index(j, k)),
                            f.sample(f.node_index(j, (k + naz - m) % naz))));
    }
  }

  // polar flip
  auto flipped = rotate(f, polar_flip());
  REQUIRE(flipped.exact);
  for (std::size_t j = 0; j < f.polar_count(); ++j) {
    for (std::size_t k = 0; k < naz; ++k) {
      REQUIRE(bitwise_equal(
          flipped.function.sample(f.node_index(j, k)),
          f.sample(f.node_index(f.polar_count() - 1 - j, k))));
    }
  }

  // symmetry rotation round trip is the identity
  const double step = 2.0 * kPi / static_cast<double>(naz);
  auto there = rotate(f, rotation_z(3.0 * step));
  auto back = rotate(there.function, rotation_z(-3.0 * step));
  REQUIRE(there.exact);
  REQUIRE(back.exact);
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    REQUIRE(bitwise_equal(back.function.sample(i), f.sample(i)));
  }
}

TEST_CASE("circle rotations and reflections permute nodes exactly") {
  Rng rng(78);
  auto g = make_sphere_grid(2, 12);
  std::vector<Complex> samples(g.node_count());
  for (auto& s : samples) s = rng.complex_in_square(2.0);
  auto f = g.with_samples(samples);

  const double step = 2.0 * kPi / 12.0;
  auto turned = rotate(f, rotation_z(5.0 * step));
  REQUIRE(turned.exact);
  for (std::size_t k = 0; k < 12; ++k) {
    REQUIRE(bitwise_equal(turned.function.sample((k + 5) % 12), f.sample(k)));
  }

  // reflection across the x axis: angle negation
  auto mirrored = rotate(f, azimuth_flip());
  REQUIRE(mirrored.exact);
  for (std::size_t k = 0; k < 12; ++k) {
    REQUIRE(bitwise_equal(mirrored.function.sample((12 - k) % 12), f.sample(k)));
  }
}

TEST_CASE("constants are invariant under arbitrary rotations, exactly") {
  auto g = make_sphere_grid(3, 5);
  auto f = sample_on_sphere(
      g, [](const std::array<double, 3>&) { return Complex{1.25, -0.5}; });
  Rng rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const std::array<double, 3> axis{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                     rng.uniform(-1.0, 1.0)};
    auto rotated = rotate(f, rotation_about_axis(axis, rng.uniform(0.0, 2.0 * kPi)));
    for (std::size_t i = 0; i < f.node_count(); ++i) {
      REQUIRE(bitwise_equal(rotated.function.sample(i), f.sample(i)));
    }
  }
}

TEST_CASE("Phi over the sphere is invariant under exact rotations") {
  ValuationFunctional phi(mixed_quadruple());
  Rng rng(80);
  auto g = make_sphere_grid(3, 10);
  std::vector<Complex> samples(g.node_count());
  for (auto& s : samples) s = rng.complex_in_square(2.0);
  auto f = g.with_samples(samples);
  const Complex base = evaluate(phi, f).value();

  const double step = 2.0 * kPi / static_cast<double>(f.azimuth_count());
  for (const Mat3& theta : {rotation_z(2.0 * step), polar_flip(),
                            multiply(rotation_z(step), polar_flip())}) {
    auto rotated = rotate(f, theta);
    REQUIRE(rotated.exact);
    const Complex moved = evaluate(phi, rotated.function).value();
    REQUIRE(modulus(moved - base) <= 1e-12 * std::max(1.0, modulus(base)));
  }
}

TEST_CASE("resampled rotations stay within the loose tolerance") {
  ValuationFunctional phi(mixed_quadruple());
  auto g = make_sphere_grid(3, 64);
  // smooth band function vanishing at the poles
  auto f = sample_on_sphere(g, [](const std::array<double, 3>& u) {
    const double band = 1.0 - u[2] * u[2];
    return Complex{band * (0.8 + 0.5 * u[0]), band * (0.3 * u[1] - 0.2 * u[2])};
  });
  const Complex base = evaluate(phi, f).value();
  Rng rng(81);
  for (int trial = 0; trial < 5; ++trial) {
    const std::array<double, 3> axis{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                     rng.uniform(-1.0, 1.0)};
    auto rotated = rotate(f, rotation_about_axis(axis, rng.uniform(0.1, 3.0)));
    REQUIRE_FALSE(rotated.exact);
    const Complex moved = evaluate(phi, rotated.function).value();
    REQUIRE(modulus(moved - base) <= 1e-3 * std::max(1.0, modulus(base)));
  }
}

TEST_CASE("sphere csv dump has the fixed column layout") {
  auto g = make_sphere_grid(2, 4);
  auto f = g.with_samples({{1.0, 0.0}, {0.0, 2.0}, {-1.0, 0.0}, {0.5, -0.5}});
  std::ostringstream os;
  write_sphere_csv(f, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "index,x,y,re,im,weight");
  std::string row0;
  std::getline(is, row0);
  REQUIRE(row0.rfind("0,1,", 0) == 0);  // node (1, 0), sample (1, 0)
}
