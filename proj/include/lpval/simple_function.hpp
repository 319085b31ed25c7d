#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "lpval/complex_value.hpp"
#include "lpval/errors.hpp"
#include "lpval/partition.hpp"
#include "lpval/summation.hpp"

namespace lpval {

/// A complex simple function: one complex value per cell of a measured
/// partition. On a partition with infinite_total, the implicit remainder cell
/// carries the value 0 exactly, so every L^p norm is finite.
class ComplexSimpleFunction {
 public:
  ComplexSimpleFunction(PartitionPtr partition, std::vector<Complex> values)
      : partition_(std::move(partition)), values_(std::move(values)) {
    if (!partition_) throw IncompatibleDomainError("null partition");
    if (values_.size() != partition_->cell_count()) {
      throw IncompatibleDomainError(
          "value count does not match partition cell count");
    }
  }

  static ComplexSimpleFunction constant(PartitionPtr partition, Complex c) {
    if (!partition) throw IncompatibleDomainError("null partition");
    return {partition, std::vector<Complex>(partition->cell_count(), c)};
  }

  static ComplexSimpleFunction zero(PartitionPtr partition) {
    return constant(std::move(partition), Complex{0.0, 0.0});
  }

  /// c * chi_E where E is the union of the listed cells.
  static ComplexSimpleFunction characteristic(PartitionPtr partition, Complex c,
                                              std::span<const std::size_t> cells) {
    if (!partition) throw IncompatibleDomainError("null partition");
    std::vector<Complex> values(partition->cell_count(), Complex{0.0, 0.0});
    for (std::size_t i : cells) {
      if (i >= values.size()) throw IncompatibleDomainError("cell index out of range");
      values[i] = c;
    }
    return {std::move(partition), std::move(values)};
  }

  const PartitionPtr& partition() const noexcept { return partition_; }
  std::size_t cell_count() const noexcept { return values_.size(); }
  Complex value(std::size_t i) const { return values_.at(i); }
  const std::vector<Complex>& values() const noexcept { return values_; }

  ComplexSimpleFunction with_value(std::size_t i, Complex v) const {
    std::vector<Complex> values = values_;
    values.at(i) = v;
    return {partition_, std::move(values)};
  }

 private:
  PartitionPtr partition_;
  std::vector<Complex> values_;
};

inline void require_same_partition(const ComplexSimpleFunction& f,
                                   const ComplexSimpleFunction& g) {
  if (f.partition() != g.partition()) {
    throw IncompatibleDomainError("functions live on different partitions");
  }
}

/// Pointwise maximum taken componentwise on real and imaginary parts.
inline ComplexSimpleFunction join(const ComplexSimpleFunction& f,
                                  const ComplexSimpleFunction& g) {
  require_same_partition(f, g);
  std::vector<Complex> values(f.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex a = f.value(i), b = g.value(i);
    values[i] = {std::max(a.real(), b.real()), std::max(a.imag(), b.imag())};
  }
  return {f.partition(), std::move(values)};
}

/// Pointwise minimum taken componentwise on real and imaginary parts.
inline ComplexSimpleFunction meet(const ComplexSimpleFunction& f,
                                  const ComplexSimpleFunction& g) {
  require_same_partition(f, g);
  std::vector<Complex> values(f.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex a = f.value(i), b = g.value(i);
    values[i] = {std::min(a.real(), b.real()), std::min(a.imag(), b.imag())};
  }
  return {f.partition(), std::move(values)};
}

inline ComplexSimpleFunction re_part(const ComplexSimpleFunction& f) {
  std::vector<Complex> values(f.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = {f.value(i).real(), 0.0};
  }
  return {f.partition(), std::move(values)};
}

inline ComplexSimpleFunction im_part(const ComplexSimpleFunction& f) {
  std::vector<Complex> values(f.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = {f.value(i).imag(), 0.0};
  }
  return {f.partition(), std::move(values)};
}

inline ComplexSimpleFunction times_i(const ComplexSimpleFunction& f) {
  std::vector<Complex> values(f.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = times_i(f.value(i));
  return {f.partition(), std::move(values)};
}

inline ComplexSimpleFunction add(const ComplexSimpleFunction& f,
                                 const ComplexSimpleFunction& g) {
  require_same_partition(f, g);
  std::vector<Complex> values(f.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f.value(i) + g.value(i);
  return {f.partition(), std::move(values)};
}

/// Sum of |f|^p over the cells, weighted by measure. The remainder cell of an
/// infinite_total partition contributes |0|^p * inf = 0.
inline double lp_power_sum(const ComplexSimpleFunction& f, double p) {
  if (!(p >= 1.0)) throw InvalidExponentError("p must satisfy p >= 1");
  NeumaierSum acc;
  for (std::size_t i = 0; i < f.cell_count(); ++i) {
    acc.add(std::pow(modulus(f.value(i)), p) * f.partition()->measure(i));
  }
  return acc.value();
}

inline double lp_norm(const ComplexSimpleFunction& f, double p) {
  return std::pow(lp_power_sum(f, p), 1.0 / p);
}

/// Labels of the four-set decomposition of the domain induced by an ordered
/// pair (f, g); ties go to the non-strict branch.
///   E: Re f <= Re g and Im f <= Im g      F: Re f <= Re g and Im f >  Im g
///   G: Re f >  Re g and Im f <= Im g      H: Re f >  Re g and Im f >  Im g
enum class FourSetLabel : char { E = 'E', F = 'F', G = 'G', H = 'H' };

inline std::vector<FourSetLabel> four_set_partition(const ComplexSimpleFunction& f,
                                                    const ComplexSimpleFunction& g) {
  require_same_partition(f, g);
  std::vector<FourSetLabel> labels(f.cell_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool re_leq = f.value(i).real() <= g.value(i).real();
    const bool im_leq = f.value(i).imag() <= g.value(i).imag();
    labels[i] = re_leq ? (im_leq ? FourSetLabel::E : FourSetLabel::F)
                       : (im_leq ? FourSetLabel::G : FourSetLabel::H);
  }
  return labels;
}

/// Carry a simple function across a refinement of its partition: each subcell
/// inherits the value of its parent cell.
inline ComplexSimpleFunction lift(const ComplexSimpleFunction& f,
                                  const Refinement& refinement) {
  if (f.partition() != refinement.base) {
    throw IncompatibleDomainError("function does not live on the refined base");
  }
  std::vector<Complex> values(refinement.refined->cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = f.value(refinement.parent.at(i));
  }
  return {refinement.refined, std::move(values)};
}

}  // namespace lpval
