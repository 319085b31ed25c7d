#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "lpval/complex_value.hpp"
#include "lpval/errors.hpp"
#include "lpval/summation.hpp"
#include "lpval/valuation.hpp"

namespace lpval {

/// A uniform box grid in R^n (n = 1..3) holding one complex sample per cell,
/// evaluated at cell centers. Outside the box the function is identically 0,
/// so the underlying measure space is all of R^n with Lebesgue measure
/// (infinite total measure). A boundary layer of support_margin cells is kept
/// at exactly 0 so that cell-aligned translation stays representable.
class EuclideanGrid {
 public:
  EuclideanGrid(int dimension, std::array<std::array<double, 2>, 3> bounds,
                std::array<std::size_t, 3> resolution, std::size_t support_margin,
                std::vector<Complex> samples)
      : dim_(dimension),
        bounds_(bounds),
        res_(resolution),
        margin_(support_margin) {
    if (dim_ < 1 || dim_ > 3) throw InvalidBoundsError("dimension must be 1, 2 or 3");
    for (int ax = 0; ax < dim_; ++ax) {
      if (!(bounds_[ax][0] < bounds_[ax][1])) {
        throw InvalidBoundsError("axis bounds must satisfy lo < hi");
      }
      if (res_[ax] < 2) throw InvalidBoundsError("axis resolution must be >= 2");
      if (res_[ax] <= 2 * margin_) {
        throw InvalidBoundsError("support margin leaves no interior cells");
      }
    }
    for (int ax = dim_; ax < 3; ++ax) {
      bounds_[ax] = {0.0, 1.0};
      res_[ax] = 1;
    }
    if (samples.empty()) {
      samples_.assign(cell_count(), Complex{0.0, 0.0});
    } else {
      if (samples.size() != cell_count()) {
        throw IncompatibleDomainError("sample count does not match grid size");
      }
      samples_ = std::move(samples);
    }
  }

  int dimension() const noexcept { return dim_; }
  const std::array<std::array<double, 2>, 3>& bounds() const noexcept { return bounds_; }
  const std::array<std::size_t, 3>& resolution() const noexcept { return res_; }
  std::size_t support_margin() const noexcept { return margin_; }

  std::size_t cell_count() const noexcept { return res_[0] * res_[1] * res_[2]; }

  double cell_width(int axis) const {
    return (bounds_[axis][1] - bounds_[axis][0]) / static_cast<double>(res_[axis]);
  }

  double cell_volume() const {
    double v = 1.0;
    for (int ax = 0; ax < dim_; ++ax) v *= cell_width(ax);
    return v;
  }

  std::size_t flat_index(const std::array<std::size_t, 3>& ijk) const {
    return (ijk[0] * res_[1] + ijk[1]) * res_[2] + ijk[2];
  }

  std::array<std::size_t, 3> coords(std::size_t flat) const {
    std::array<std::size_t, 3> ijk{};
    ijk[2] = flat % res_[2];
    flat /= res_[2];
    ijk[1] = flat % res_[1];
    ijk[0] = flat / res_[1];
    return ijk;
  }

  std::array<double, 3> center(const std::array<std::size_t, 3>& ijk) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int ax = 0; ax < dim_; ++ax) {
      x[ax] = bounds_[ax][0] +
              (static_cast<double>(ijk[ax]) + 0.5) * cell_width(ax);
    }
    return x;
  }

  Complex sample(std::size_t flat) const { return samples_.at(flat); }
  const std::vector<Complex>& samples() const noexcept { return samples_; }

  bool in_margin(const std::array<std::size_t, 3>& ijk) const {
    for (int ax = 0; ax < dim_; ++ax) {
      if (ijk[ax] < margin_ || ijk[ax] >= res_[ax] - margin_) return true;
    }
    return false;
  }

  bool same_geometry(const EuclideanGrid& other) const {
    return dim_ == other.dim_ && bounds_ == other.bounds_ && res_ == other.res_ &&
           margin_ == other.margin_;
  }

  EuclideanGrid with_samples(std::vector<Complex> samples) const {
    return EuclideanGrid(dim_, bounds_, res_, margin_, std::move(samples));
  }

 private:
  int dim_;
  std::array<std::array<double, 2>, 3> bounds_;
  std::array<std::size_t, 3> res_;
  std::size_t margin_;
  std::vector<Complex> samples_;
};

inline EuclideanGrid make_box_grid(int dimension,
                                   const std::vector<std::array<double, 2>>& bounds,
                                   const std::vector<std::size_t>& resolution,
                                   std::size_t support_margin = 1) {
  if (dimension < 1 || dimension > 3) {
    throw InvalidBoundsError("dimension must be 1, 2 or 3");
  }
  if (bounds.size() != static_cast<std::size_t>(dimension) ||
      resolution.size() != static_cast<std::size_t>(dimension)) {
    throw InvalidBoundsError("bounds/resolution lists must match the dimension");
  }
  std::array<std::array<double, 2>, 3> b{{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}};
  std::array<std::size_t, 3> r{1, 1, 1};
  for (int ax = 0; ax < dimension; ++ax) {
    b[ax] = bounds[static_cast<std::size_t>(ax)];
    r[ax] = resolution[static_cast<std::size_t>(ax)];
  }
  return EuclideanGrid(dimension, b, r, support_margin, {});
}

/// Evaluate a pointwise rule at every cell center. Cells in the boundary
/// layer are forced to exactly 0 regardless of the rule.
inline EuclideanGrid sample_on_grid(
    const EuclideanGrid& grid,
    const std::function<Complex(const std::array<double, 3>&)>& rule) {
  std::vector<Complex> samples(grid.cell_count());
  for (std::size_t flat = 0; flat < samples.size(); ++flat) {
    const auto ijk = grid.coords(flat);
    samples[flat] = grid.in_margin(ijk) ? Complex{0.0, 0.0} : rule(grid.center(ijk));
  }
  return grid.with_samples(std::move(samples));
}

/// Multilinear interpolation of the cell-center samples; 0 outside the box.
/// Written in lerp form a + t*(b - a) so that regions of equal samples are
/// reproduced exactly.
inline Complex interpolate(const EuclideanGrid& grid, const std::array<double, 3>& x) {
  std::array<std::ptrdiff_t, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int ax = 0; ax < grid.dimension(); ++ax) {
    const double s =
        (x[ax] - grid.bounds()[ax][0]) / grid.cell_width(ax) - 0.5;
    const double fl = std::floor(s);
    base[ax] = static_cast<std::ptrdiff_t>(fl);
    frac[ax] = s - fl;
  }
  auto fetch = [&grid](std::array<std::ptrdiff_t, 3> ijk) -> Complex {
    for (int ax = 0; ax < grid.dimension(); ++ax) {
      if (ijk[ax] < 0 ||
          ijk[ax] >= static_cast<std::ptrdiff_t>(grid.resolution()[ax])) {
        return {0.0, 0.0};
      }
    }
    std::array<std::size_t, 3> u{static_cast<std::size_t>(ijk[0]),
                                 static_cast<std::size_t>(ijk[1]),
                                 static_cast<std::size_t>(ijk[2])};
    for (int ax = grid.dimension(); ax < 3; ++ax) u[ax] = 0;
    return grid.sample(grid.flat_index(u));
  };
  auto lerp = [](Complex a, Complex b, double t) { return a + t * (b - a); };

  const int n = grid.dimension();
  if (n == 1) {
    return lerp(fetch({base[0], 0, 0}), fetch({base[0] + 1, 0, 0}), frac[0]);
  }
  if (n == 2) {
    const Complex c0 = lerp(fetch({base[0], base[1], 0}),
                            fetch({base[0], base[1] + 1, 0}), frac[1]);
    const Complex c1 = lerp(fetch({base[0] + 1, base[1], 0}),
                            fetch({base[0] + 1, base[1] + 1, 0}), frac[1]);
    return lerp(c0, c1, frac[0]);
  }
  const auto plane = [&](std::ptrdiff_t i) {
    const Complex c0 = lerp(fetch({i, base[1], base[2]}),
                            fetch({i, base[1], base[2] + 1}), frac[2]);
    const Complex c1 = lerp(fetch({i, base[1] + 1, base[2]}),
                            fetch({i, base[1] + 1, base[2] + 1}), frac[2]);
    return lerp(c0, c1, frac[1]);
  };
  return lerp(plane(base[0]), plane(base[0] + 1), frac[0]);
}

struct TranslationResult {
  EuclideanGrid function;
  bool exact;  // true iff the shift was a whole number of cells per axis
};

/// g(x) = f(x - t). Cell-aligned shifts move samples by index, exactly; other
/// shifts resample by multilinear interpolation and report exact = false.
/// Support that would leave the interior (non-margin) region is an error.
inline TranslationResult translate(const EuclideanGrid& f,
                                   const std::array<double, 3>& t) {
  const int n = f.dimension();
  std::array<std::ptrdiff_t, 3> shift{0, 0, 0};
  bool aligned = true;
  for (int ax = 0; ax < n; ++ax) {
    const double w = f.cell_width(ax);
    const double cells = t[ax] / w;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) <= 1e-9) {
      shift[ax] = static_cast<std::ptrdiff_t>(rounded);
    } else {
      aligned = false;
    }
  }

  std::vector<Complex> out(f.cell_count(), Complex{0.0, 0.0});
  if (aligned) {
    for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
      const Complex v = f.sample(flat);
      if (v == Complex{0.0, 0.0}) continue;
      const auto ijk = f.coords(flat);
      std::array<std::size_t, 3> dst = ijk;
      bool inside = true;
      for (int ax = 0; ax < n; ++ax) {
        const std::ptrdiff_t moved =
            static_cast<std::ptrdiff_t>(ijk[ax]) + shift[ax];
        if (moved < 0 || moved >= static_cast<std::ptrdiff_t>(f.resolution()[ax])) {
          inside = false;
          break;
        }
        dst[ax] = static_cast<std::size_t>(moved);
      }
      if (!inside || f.in_margin(dst)) {
        throw SupportOverflowError("translated support leaves the box interior");
      }
      out[f.flat_index(dst)] = v;
    }
    return {f.with_samples(std::move(out)), true};
  }

  for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
    const auto ijk = f.coords(flat);
    const auto c = f.center(ijk);
    std::array<double, 3> src{0.0, 0.0, 0.0};
    for (int ax = 0; ax < n; ++ax) src[ax] = c[ax] - t[ax];
    const Complex v = interpolate(f, src);
    if (f.in_margin(ijk)) {
      if (v != Complex{0.0, 0.0}) {
        throw SupportOverflowError("translated support reaches the boundary layer");
      }
      continue;
    }
    out[flat] = v;
  }
  return {f.with_samples(std::move(out)), false};
}

/// Integral of the samples against Lebesgue measure (cell volume weights),
/// accumulated per component in flat cell order.
inline Complex integrate(const EuclideanGrid& f) {
  const double vol = f.cell_volume();
  NeumaierSum re, im;
  for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
    re.add(f.sample(flat).real() * vol);
    im.add(f.sample(flat).imag() * vol);
  }
  return {re.value(), im.value()};
}

/// Phi over R^n: the complement of the box carries the value 0 on an infinite
/// measure, so any generator with h(0) != 0 diverges.
inline EvalResult evaluate(const ValuationFunctional& phi, const EuclideanGrid& f) {
  if (phi.diverges_on_infinite_domain()) return EvalResult::divergent();
  const GeneratorQuadruple& q = phi.quadruple();
  const double vol = f.cell_volume();
  NeumaierSum re_acc, im_acc;
  for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
    const double a = f.sample(flat).real();
    const double b = f.sample(flat).imag();
    re_acc.add((q.h1()(a) + q.h3()(b)) * vol);
    im_acc.add((q.h2()(a) + q.h4()(b)) * vol);
  }
  return EvalResult::finite({re_acc.value(), im_acc.value()});
}

/// CSV dump: index, coordinates..., re, im, weight.
inline void write_grid_csv(const EuclideanGrid& f, std::ostream& os) {
  static constexpr const char* kAxis[3] = {"x", "y", "z"};
  os << "index";
  for (int ax = 0; ax < f.dimension(); ++ax) os << ',' << kAxis[ax];
  os << ",re,im,weight\n";
  const double vol = f.cell_volume();
  os.precision(17);
  for (std::size_t flat = 0; flat < f.cell_count(); ++flat) {
    const auto c = f.center(f.coords(flat));
    os << flat;
    for (int ax = 0; ax < f.dimension(); ++ax) os << ',' << c[ax];
    os << ',' << f.sample(flat).real() << ',' << f.sample(flat).imag() << ','
       << vol << '\n';
  }
}

}  // namespace lpval
