#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "landdiv/valuation.hpp"

namespace landdiv {

// A set of rectangles inside a region with pairwise zero-area intersections.
struct Partition {
    std::vector<Rect> parts;
    Rect region;

    void validate() const;
};

// Certificate that a partition can be produced by recursive edge-to-edge
// width-s strip cuts. A split node removes the open strip (cut_lo, cut_hi)
// (cut_hi = cut_lo + s) across the whole region; leaves carry the parts.
struct GuillotineTree {
    Rect part;  // meaningful at leaves
    Axis axis = Axis::Vertical;
    Coord cut_lo, cut_hi;
    std::unique_ptr<GuillotineTree> left, right;

    bool is_leaf() const { return left == nullptr; }
    std::vector<Rect> leaves() const;

    static GuillotineTree make_leaf(Rect part);
    static GuillotineTree make_split(Axis axis, Coord cut_lo, Coord cut_hi,
                                     GuillotineTree l, GuillotineTree r);
};

enum class MmsMethod { Dp, BruteForce };

struct MmsResult {
    Rat value;  // min part value under the agent's valuation
    Partition partition;
    std::optional<GuillotineTree> tree;  // present iff guillotine-certified
    MmsMethod method = MmsMethod::BruteForce;
    int k = 0;
    Rat s;
    std::optional<Rat> eps;
};

// True iff all pairs of parts are at l-inf distance >= s.
bool check_s_separated(const Partition& p, const Coord& s);

// Searches for a recursive s-strip decomposition; candidate cut lines are
// induced by part edges. Absence of a tree is the "not guillotine" answer.
std::optional<GuillotineTree> certify_guillotine(const Partition& p,
                                                 const Coord& s);

// Near-optimal s-separated guillotine partition of `region` into k parts,
// via dynamic programming over a cut grid of strips worth eps/4 each.
// Requires the agent's value for the region to be exactly 1 (callers
// rescale). The returned min-part value is within eps of the best value
// achievable by any k-part s-separated guillotine partition.
MmsResult guillotine_mms_dp(const GridValuation& v, const Rect& region,
                            const Coord& s, int k, const Rat& eps,
                            QueryLog* log = nullptr);

enum class ShapeKind { Square, Fat, AnyRect };

struct ShapeRegime {
    ShapeKind kind = ShapeKind::AnyRect;
    Rat r = 1;  // fatness bound, used when kind == Fat

    static ShapeRegime square() { return {ShapeKind::Square, 1}; }
    static ShapeRegime fat(Rat bound) { return {ShapeKind::Fat, std::move(bound)}; }
    static ShapeRegime any_rect() { return {ShapeKind::AnyRect, 1}; }

    bool admits(const Rect& q) const;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

// Exhaustive maximin oracle over rectangles with corners on the given grid:
// maximizes the minimum part value over all k-subsets of grid rectangles
// that are pairwise s-separated, satisfy the shape regime, and (when
// guillotine_only) admit a guillotine certificate. Throws BudgetError with a
// count estimate when the search would exceed `budget` elementary steps, and
// InputError when no k-subset is pairwise s-separated at all.
MmsResult brute_force_mms(const GridValuation& v, const std::vector<Coord>& grid_x,
                          const std::vector<Coord>& grid_y, const Coord& s, int k,
                          const ShapeRegime& shape, bool guillotine_only,
                          std::uint64_t budget = kDefaultOracleBudget);

// Given 4^l pairwise s-separated rectangles in `region`, cuts the region by
// l rounds of balanced rectangle cuts (vertical when possible, horizontal
// through the stack gap otherwise) into 2^l pairwise s-separated regions,
// each containing at least one input rectangle whole.
std::vector<Rect> guillotine_refine(const std::vector<Rect>& mms_parts,
                                    const Rect& region, const Coord& s);

}  // namespace landdiv
