#pragma once

#include <cstdint>
#include <vector>

#include "landdiv/geometry.hpp"

namespace landdiv {

// Piecewise-constant density on a coordinate grid. cells[i][j] is the total
// mass of the cell between x_coords[i..i+1] and y_coords[j..j+1]; the value
// of a rectangle is the area-proportional share of every cell it meets, so
// the valuation is additive and atomless and every query below is exact.
struct GridValuation {
    std::vector<Coord> x_coords;  // strictly increasing, >= 2 entries
    std::vector<Coord> y_coords;
    std::vector<std::vector<Rat>> cells;  // cells[x_cell][y_cell], nonnegative

    GridValuation() = default;
    GridValuation(std::vector<Coord> xs, std::vector<Coord> ys,
                  std::vector<std::vector<Rat>> masses);

    Rect domain() const;
    Rat total() const;

    // Uniform density of the given total mass.
    static GridValuation uniform(const Rect& land, const Rat& mass);

    // Identical valuation on a finer grid. extra_x/extra_y are clamped to the
    // domain; masses split area-proportionally.
    GridValuation refined(const std::vector<Coord>& extra_x,
                          const std::vector<Coord>& extra_y) const;

    GridValuation scaled(const Rat& factor) const;
    GridValuation transposed() const;
};

// Exact value of region under v; the region is clipped to the domain.
Rat value_of(const GridValuation& v, const Rect& region);

// Eval / Cut query counters for one agent. Monotone over a run.
struct QueryLog {
    std::uint64_t evals = 0;
    std::uint64_t cuts = 0;
};

// Value of the prefix of `region` up to coordinate c along `dir`
// (Vertical = a sweep in x, Horizontal = a sweep in y). c must lie within
// the region's extent on the queried axis.
Rat eval_query(const GridValuation& v, Axis dir, const Rect& region,
               const Coord& c, QueryLog* log = nullptr);

// Smallest coordinate c with eval_query(v, dir, region, c) == delta;
// returns the region's far edge when the region is worth less than delta.
Coord cut_query(const GridValuation& v, Axis dir, const Rect& region,
                const Rat& delta, QueryLog* log = nullptr);

// New valuation supported only on the union of `parts` (which must be
// pairwise disjoint and each of positive value), with each part scaled to
// value exactly 1. The grid is refined along part boundaries.
GridValuation normalize_to_partition(const GridValuation& v,
                                     const std::vector<Rect>& parts);

}  // namespace landdiv
