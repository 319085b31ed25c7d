#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "lpval/errors.hpp"
#include "lpval/rng.hpp"
#include "lpval/summation.hpp"

namespace lpval {

class MeasuredPartition;
using PartitionPtr = std::shared_ptr<const MeasuredPartition>;

/// A finite family of disjoint cells with strictly positive measures.
///
/// When infinite_total is set, the domain additionally carries an implicit,
/// unlisted remainder cell of infinite measure on which every function is
/// identically zero. Non-atomicity of the underlying space is modeled
/// operationally: any cell may be split without changing integrals of
/// functions that are constant on it (see split_cell / refine_random).
class MeasuredPartition {
 public:
  MeasuredPartition(std::vector<double> measures, bool infinite_total)
      : measures_(std::move(measures)), infinite_(infinite_total) {
    if (measures_.empty()) {
      throw InvalidMeasureError("partition needs at least one cell");
    }
    for (double m : measures_) {
      if (!(m > 0.0)) {
        throw InvalidMeasureError("cell measures must be strictly positive");
      }
    }
    ids_.reserve(measures_.size());
    for (std::size_t i = 0; i < measures_.size(); ++i) ids_.push_back(fresh_id());
    total_ = compensated_total(measures_);
  }

  std::size_t cell_count() const noexcept { return measures_.size(); }
  double measure(std::size_t i) const { return measures_.at(i); }
  std::uint64_t cell_id(std::size_t i) const { return ids_.at(i); }
  bool infinite_total() const noexcept { return infinite_; }

  /// Total measure of the listed (finite) cells.
  double total_measure() const noexcept { return total_; }

  const std::vector<double>& measures() const noexcept { return measures_; }

 private:
  static std::uint64_t fresh_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
  }

  std::vector<double> measures_;
  std::vector<std::uint64_t> ids_;
  double total_ = 0.0;
  bool infinite_ = false;
};

inline PartitionPtr make_partition(std::vector<double> measures,
                                   bool infinite_total = false) {
  return std::make_shared<const MeasuredPartition>(std::move(measures),
                                                   infinite_total);
}

/// Result of refining a partition: the new partition plus, for every refined
/// cell, the index of the cell it came from. Functions constant per cell are
/// carried across with lift() (see simple_function.hpp).
struct Refinement {
  PartitionPtr base;
  PartitionPtr refined;
  std::vector<std::size_t> parent;  // refined cell index -> base cell index
};

/// Split one cell into measures (m*t, m*(1-t)), 0 < t < 1.
inline Refinement split_cell(const PartitionPtr& partition, std::size_t index,
                             double t) {
  if (!partition) throw IncompatibleDomainError("null partition");
  if (index >= partition->cell_count()) {
    throw InvalidMeasureError("split index out of range");
  }
  if (!(t > 0.0 && t < 1.0)) {
    throw InvalidMeasureError("split fraction must lie strictly in (0, 1)");
  }
  std::vector<double> measures;
  std::vector<std::size_t> parent;
  measures.reserve(partition->cell_count() + 1);
  for (std::size_t i = 0; i < partition->cell_count(); ++i) {
    const double m = partition->measure(i);
    if (i == index) {
      measures.push_back(m * t);
      parent.push_back(i);
      measures.push_back(m * (1.0 - t));
      parent.push_back(i);
    } else {
      measures.push_back(m);
      parent.push_back(i);
    }
  }
  return Refinement{partition,
                    make_partition(std::move(measures), partition->infinite_total()),
                    std::move(parent)};
}

/// Split every cell into min_parts..max_parts subcells with random positive
/// fractions. Draws are fully determined by the Rng state.
inline Refinement refine_random(const PartitionPtr& partition, Rng& rng,
                                int min_parts = 2, int max_parts = 4) {
  if (!partition) throw IncompatibleDomainError("null partition");
  if (min_parts < 1 || max_parts < min_parts) {
    throw InvalidMeasureError("invalid refinement part counts");
  }
  std::vector<double> measures;
  std::vector<std::size_t> parent;
  for (std::size_t i = 0; i < partition->cell_count(); ++i) {
    const double m = partition->measure(i);
    const int parts = rng.range(min_parts, max_parts);
    std::vector<double> fractions(static_cast<std::size_t>(parts));
    double total = 0.0;
    for (auto& f : fractions) {
      f = rng.uniform(0.1, 1.0);  // bounded away from zero
      total += f;
    }
    for (double f : fractions) {
      measures.push_back(m * (f / total));
      parent.push_back(i);
    }
  }
  return Refinement{partition,
                    make_partition(std::move(measures), partition->infinite_total()),
                    std::move(parent)};
}

}  // namespace lpval
