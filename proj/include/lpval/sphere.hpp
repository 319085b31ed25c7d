#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "lpval/complex_value.hpp"
#include "lpval/errors.hpp"
#include "lpval/summation.hpp"
#include "lpval/valuation.hpp"

namespace lpval {

struct GaussLegendreRule {
  std::vector<double> nodes;    // ascending in (-1, 1)
  std::vector<double> weights;  // positive, summing to 2
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence. Exact for polynomials of degree <= 2*count - 1.
inline GaussLegendreRule gauss_legendre_rule(std::size_t count) {
  if (count < 1) throw InvalidBoundsError("Gauss-Legendre rule needs >= 1 node");
  GaussLegendreRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  const std::size_t half = (count + 1) / 2;
  for (std::size_t j = 0; j < half; ++j) {
    // Tricomi-style initial guess, then Newton
    double x = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.75) /
                        (static_cast<double>(count) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (count == 1) p1 = x;
      for (std::size_t k = 2; k <= count; ++k) {
        const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 -
                           (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      // p1 = P_count(x), p0 = P_{count-1}(x)
      dp = static_cast<double>(count) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // nodes ascending: the guess above starts from the largest root
    rule.nodes[count - 1 - j] = x;
    rule.weights[count - 1 - j] = w;
    rule.nodes[j] = -x;
    rule.weights[j] = w;
  }
  if (count % 2 == 1) {
    rule.nodes[count / 2] = 0.0;  // middle root is exactly 0 by symmetry
  }
  return rule;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 identity_matrix() {
  return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
}

inline Mat3 rotation_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

/// Reflection z -> -z (the polar flip; determinant -1, still in O(3)).
inline Mat3 polar_flip() {
  return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, -1.0}}};
}

/// Reflection y -> -y (angle negation on the circle).
inline Mat3 azimuth_flip() {
  return {{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 1.0}}};
}

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  }
  return out;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = a[j][i];
  return out;
}

inline std::array<double, 3> apply(const Mat3& a, const std::array<double, 3>& v) {
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
  }
  return out;
}

/// Rotation by `angle` about a unit axis (Rodrigues formula).
inline Mat3 rotation_about_axis(const std::array<double, 3>& axis, double angle) {
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (!(n > 0.0)) throw InvalidRotationError("rotation axis must be nonzero");
  const double ux = axis[0] / n, uy = axis[1] / n, uz = axis[2] / n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {{{c + ux * ux * t, ux * uy * t - uz * s, ux * uz * t + uy * s},
           {uy * ux * t + uz * s, c + uy * uy * t, uy * uz * t - ux * s},
           {uz * ux * t - uy * s, uz * uy * t + ux * s, c + uz * uz * t}}};
}

/// Max-entry norm of theta^T theta - I.
inline double orthogonality_defect(const Mat3& theta) {
  const Mat3 gram = multiply(transpose(theta), theta);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram[i][j] - target));
    }
  }
  return worst;
}

/// Quadrature on the unit circle S^1 (dimension 2) or unit sphere S^2
/// (dimension 3), holding one complex sample per node.
///
/// dimension 2: `order` equally spaced nodes, each of weight 2*pi/order.
/// dimension 3: product rule, `order` Gauss-Legendre nodes in cos(polar)
/// times a uniform azimuthal grid whose node count is divisible by 4, so
/// quarter-turns about the z axis are exact node permutations.
class SphereQuadrature {
 public:
  static constexpr double kTwoPi = 2.0 * std::numbers::pi;

  SphereQuadrature(int dimension, std::size_t order, std::vector<Complex> samples)
      : dim_(dimension), order_(order) {
    if (order_ < 1) throw InvalidBoundsError("quadrature order must be >= 1");
    if (dim_ == 2) {
      azimuth_count_ = order_;
      polar_count_ = 1;
      exact_degree_ = order_ >= 1 ? order_ - 1 : 0;
      nodes_.reserve(order_);
      weights_.assign(order_, kTwoPi / static_cast<double>(order_));
      for (std::size_t k = 0; k < order_; ++k) {
        const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(order_);
        nodes_.push_back({std::cos(phi), std::sin(phi), 0.0});
      }
    } else if (dim_ == 3) {
      polar_count_ = order_;
      azimuth_count_ = ((order_ + 1 + 3) / 4) * 4;  // >= order + 1, divisible by 4
      const GaussLegendreRule gl = gauss_legendre_rule(polar_count_);
      polar_cos_ = gl.nodes;
      exact_degree_ = std::min(2 * polar_count_ - 1, azimuth_count_ - 1);
      nodes_.reserve(polar_count_ * azimuth_count_);
      weights_.reserve(polar_count_ * azimuth_count_);
      const double wphi = kTwoPi / static_cast<double>(azimuth_count_);
      for (std::size_t j = 0; j < polar_count_; ++j) {
        const double z = gl.nodes[j];
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (std::size_t k = 0; k < azimuth_count_; ++k) {
          const double phi = kTwoPi * static_cast<double>(k) /
                             static_cast<double>(azimuth_count_);
          nodes_.push_back({r * std::cos(phi), r * std::sin(phi), z});
          weights_.push_back(gl.weights[j] * wphi);
        }
      }
    } else {
      throw InvalidBoundsError("sphere quadrature supports dimensions 2 and 3");
    }
    if (samples.empty()) {
      samples_.assign(nodes_.size(), Complex{0.0, 0.0});
    } else {
      if (samples.size() != nodes_.size()) {
        throw IncompatibleDomainError("sample count does not match node count");
      }
      samples_ = std::move(samples);
    }
  }

  int dimension() const noexcept { return dim_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t polar_count() const noexcept { return polar_count_; }
  std::size_t azimuth_count() const noexcept { return azimuth_count_; }
  std::size_t exact_degree() const noexcept { return exact_degree_; }

  const std::array<double, 3>& node(std::size_t i) const { return nodes_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }
  Complex sample(std::size_t i) const { return samples_.at(i); }
  const std::vector<Complex>& samples() const noexcept { return samples_; }

  double surface_measure() const noexcept { return dim_ == 2 ? kTwoPi : 2.0 * kTwoPi; }

  std::size_t node_index(std::size_t polar, std::size_t azimuth) const {
    return polar * azimuth_count_ + azimuth;
  }

  bool same_geometry(const SphereQuadrature& other) const {
    return dim_ == other.dim_ && order_ == other.order_;
  }

  SphereQuadrature with_samples(std::vector<Complex> samples) const {
    return SphereQuadrature(dim_, order_, std::move(samples));
  }

  /// Polar angles are implicit through cos(theta); exposed for resampling.
  const std::vector<double>& polar_cosines() const noexcept { return polar_cos_; }

 private:
  int dim_;
  std::size_t order_;
  std::size_t polar_count_ = 1;
  std::size_t azimuth_count_ = 1;
  std::size_t exact_degree_ = 0;
  std::vector<std::array<double, 3>> nodes_;
  std::vector<double> weights_;
  std::vector<double> polar_cos_;  // dimension 3 only, ascending
  std::vector<Complex> samples_;
};

inline SphereQuadrature make_sphere_grid(int dimension, std::size_t order) {
  return SphereQuadrature(dimension, order, {});
}

inline SphereQuadrature sample_on_sphere(
    const SphereQuadrature& grid,
    const std::function<Complex(const std::array<double, 3>&)>& rule) {
  std::vector<Complex> samples(grid.node_count());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = rule(grid.node(i));
  return grid.with_samples(std::move(samples));
}

struct RotationResult {
  SphereQuadrature function;
  bool exact;  // true iff theta was matched to a symmetry of the node set
};

namespace detail {

inline bool matrices_close(const Mat3& a, const Mat3& b, double tol) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (std::abs(a[i][j] - b[i][j]) > tol) return false;
    }
  }
  return true;
}

/// Periodic linear interpolation on the circle samples.
inline Complex circle_interpolate(const SphereQuadrature& f, double phi) {
  const double n = static_cast<double>(f.azimuth_count());
  double s = phi / (SphereQuadrature::kTwoPi / n);
  s -= n * std::floor(s / n);
  const std::size_t k0 = static_cast<std::size_t>(s) % f.azimuth_count();
  const std::size_t k1 = (k0 + 1) % f.azimuth_count();
  const double t = s - std::floor(s);
  const Complex a = f.sample(k0), b = f.sample(k1);
  return a + t * (b - a);
}

/// Bilinear interpolation in (polar angle, azimuth) for sphere samples,
/// clamped to the polar node band near the poles.
inline Complex sphere_interpolate(const SphereQuadrature& f,
                                  const std::array<double, 3>& u) {
  const double z = std::clamp(u[2], -1.0, 1.0);
  double phi = std::atan2(u[1], u[0]);
  if (phi < 0.0) phi += SphereQuadrature::kTwoPi;

  const auto& zs = f.polar_cosines();  // ascending
  std::size_t j0, j1;
  double tz;
  if (z <= zs.front()) {
    j0 = j1 = 0;
    tz = 0.0;
  } else if (z >= zs.back()) {
    j0 = j1 = zs.size() - 1;
    tz = 0.0;
  } else {
    j1 = static_cast<std::size_t>(
        std::lower_bound(zs.begin(), zs.end(), z) - zs.begin());
    j0 = j1 - 1;
    tz = (z - zs[j0]) / (zs[j1] - zs[j0]);
  }

  const double n = static_cast<double>(f.azimuth_count());
  double s = phi / (SphereQuadrature::kTwoPi / n);
  s -= n * std::floor(s / n);
  const std::size_t k0 = static_cast<std::size_t>(s) % f.azimuth_count();
  const std::size_t k1 = (k0 + 1) % f.azimuth_count();
  const double tphi = s - std::floor(s);

  auto lerp = [](Complex a, Complex b, double t) { return a + t * (b - a); };
  const Complex low = lerp(f.sample(f.node_index(j0, k0)),
                           f.sample(f.node_index(j0, k1)), tphi);
  const Complex high = lerp(f.sample(f.node_index(j1, k0)),
                            f.sample(f.node_index(j1, k1)), tphi);
  return lerp(low, high, tz);
}

}  // namespace detail

/// g(u) = f(theta^{-1} u) for theta in O(n). Azimuthal rotations by multiples
/// of 2*pi/azimuth_count (optionally composed with the polar flip for S^2 or
/// the azimuth flip for S^1) permute the nodes exactly; any other orthogonal
/// matrix is resampled with the interpolants above and reported exact=false.
inline RotationResult rotate(const SphereQuadrature& f, const Mat3& theta) {
  if (orthogonality_defect(theta) > 1e-10) {
    throw InvalidRotationError("matrix is not orthogonal within 1e-10");
  }
  const std::size_t naz = f.azimuth_count();
  constexpr double kExactTol = 1e-12;

  // try the symmetry group first: exact node permutation
  for (int flip = 0; flip < 2; ++flip) {
    if (flip == 1 && f.dimension() == 2) break;
    for (std::size_t m = 0; m < naz; ++m) {
      const double angle =
          SphereQuadrature::kTwoPi * static_cast<double>(m) / static_cast<double>(naz);
      Mat3 candidate = rotation_z(angle);
      if (flip == 1) candidate = multiply(candidate, polar_flip());
      if (detail::matrices_close(theta, candidate, kExactTol)) {
        std::vector<Complex> out(f.node_count());
        const std::size_t npol = f.polar_count();
        for (std::size_t j = 0; j < npol; ++j) {
          const std::size_t src_j = (flip == 1) ? (npol - 1 - j) : j;
          for (std::size_t k = 0; k < naz; ++k) {
            // theta^{-1} maps node (j, k) to node (src_j, k - m)
            const std::size_t src_k = (k + naz - m) % naz;
            out[f.node_index(j, k)] = f.sample(f.node_index(src_j, src_k));
          }
        }
        return {f.with_samples(std::move(out)), true};
      }
    }
  }
  if (f.dimension() == 2) {
    // reflections: theta = azimuth_flip * Rz(angle) maps node k to m - k
    for (std::size_t m = 0; m < naz; ++m) {
      const double angle =
          SphereQuadrature::kTwoPi * static_cast<double>(m) / static_cast<double>(naz);
      const Mat3 candidate = multiply(azimuth_flip(), rotation_z(angle));
      if (detail::matrices_close(theta, candidate, kExactTol)) {
        std::vector<Complex> out(f.node_count());
        for (std::size_t k = 0; k < naz; ++k) {
          // theta^{-1} sends angle phi to -phi - angle
          const std::size_t src_k = (naz - (k + m) % naz) % naz;
          out[k] = f.sample(src_k);
        }
        return {f.with_samples(std::move(out)), true};
      }
    }
  }

  // general element of O(n): resample f at theta^{-1} u
  const Mat3 inverse = transpose(theta);
  std::vector<Complex> out(f.node_count());
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    const auto v = apply(inverse, f.node(i));
    out[i] = (f.dimension() == 2)
                 ? detail::circle_interpolate(f, std::atan2(v[1], v[0]))
                 : detail::sphere_interpolate(f, v);
  }
  return {f.with_samples(std::move(out)), false};
}

/// Integral of the samples against the quadrature weights, in node order.
inline Complex integrate(const SphereQuadrature& f) {
  NeumaierSum re, im;
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    re.add(f.sample(i).real() * f.weight(i));
    im.add(f.sample(i).imag() * f.weight(i));
  }
  return {re.value(), im.value()};
}

/// Phi over S^{n-1}: finite surface measure, so no divergence cases.
inline EvalResult evaluate(const ValuationFunctional& phi, const SphereQuadrature& f) {
  const GeneratorQuadruple& q = phi.quadruple();
  NeumaierSum re_acc, im_acc;
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    const double a = f.sample(i).real();
    const double b = f.sample(i).imag();
    const double w = f.weight(i);
    re_acc.add((q.h1()(a) + q.h3()(b)) * w);
    im_acc.add((q.h2()(a) + q.h4()(b)) * w);
  }
  return EvalResult::finite({re_acc.value(), im_acc.value()});
}

/// CSV dump: index, coordinates..., re, im, weight.
inline void write_sphere_csv(const SphereQuadrature& f, std::ostream& os) {
  os << "index,x,y";
  if (f.dimension() == 3) os << ",z";
  os << ",re,im,weight\n";
  os.precision(17);
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    os << i << ',' << f.node(i)[0] << ',' << f.node(i)[1];
    if (f.dimension() == 3) os << ',' << f.node(i)[2];
    os << ',' << f.sample(i).real() << ',' << f.sample(i).imag() << ','
       << f.weight(i) << '\n';
  }
}

}  // namespace lpval
