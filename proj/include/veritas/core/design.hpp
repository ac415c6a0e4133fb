#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "veritas/core/model.hpp"

namespace veritas {

struct Violation {
  std::string path;     // field path, e.g. "hypotheses[0].alpha"
  std::string message;

  bool operator==(const Violation&) const = default;
};

inline constexpr std::uint64_t kDefaultTrialCap = 1'000'000;

// Every violated well-formedness rule; empty means valid.
std::vector<Violation> validate_design(const ExperimentDesign& design);

// Grid points in canonical order: Cartesian product over independent
// variables in declaration order, first variable slowest. A grid subsample
// keeps a seeded subset and preserves canonical order.
std::vector<std::map<std::string, Value>> grid_points(const ExperimentDesign& design);

// (number of grid points) x S x max(K,1) x R; saturates at UINT64_MAX.
std::uint64_t trial_count(const ExperimentDesign& design);

// Canonical order: grid point outermost, then seed, fold, replication.
std::vector<Trial> enumerate_trials(const ExperimentDesign& design,
                                    std::uint64_t cap = kDefaultTrialCap);

TrialCoords coords_of(const ExperimentDesign& design, std::uint64_t index);
std::uint64_t index_of(const ExperimentDesign& design, const TrialCoords& coords);

// Number of data items for a dataset level, or 0 if unknown.
std::size_t data_items_for(const ExperimentDesign& design, const Trial& trial);

}  // namespace veritas
