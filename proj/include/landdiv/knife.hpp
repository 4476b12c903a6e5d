#pragma once

#include <variant>
#include <vector>

#include "landdiv/valuation.hpp"

namespace landdiv {

// A width-s strip with enough whole rectangles (or enough value) on both
// sides. `low_amount`/`high_amount` are whole-rectangle counts for the
// rectangle finder and values for the value finder.
struct KnifeCut {
    Rect strip;       // spans the region along the knife axis; may poke out
    Axis axis;        // Vertical: low side is left; Horizontal: below
    Rat low_amount;
    Rat high_amount;
};

// Value->=1 rectangles ordered along the sweep axis with gaps >= s between
// consecutive members (bottom-to-top for a vertical knife).
struct KnifeStack {
    std::vector<Rect> rects;
    Axis axis;
};

using CutOrStack = std::variant<KnifeCut, KnifeStack>;

// Sweeps a width-s knife across `region` from the low side and stops at the
// first position with at least p whole members of `parts` strictly on the
// low side (the knife may exit the region). Returns a cut if at least q
// whole members lie on the high side; otherwise returns the stack of
// >= |parts|-p-q+2 members intersecting the slightly-backed-off knife.
// Requires 1 <= p,q <= k and p+q <= k+1, and `parts` pairwise s-separated.
CutOrStack find_rectangle_cut_or_stack(const std::vector<Rect>& parts,
                                       const Rect& region, Axis axis, int p,
                                       int q, const Coord& s);

// Value variant: stops where the low-side value reaches p exactly. Returns a
// cut if the high side is worth at least q; otherwise groups the knife
// strip's value chunks, low to high, into rectangles worth >= 1 each and
// returns the stack of >= ceil((floor(V)-p-q)/2) such rectangles, where V is
// the agent's value for the region. The valuation must be normalized so that
// all mass sits in value-1 maximin rectangles.
CutOrStack find_value_cut_or_stack(const GridValuation& v, const Rect& region,
                                   Axis axis, int p, int q, const Coord& s,
                                   QueryLog* log = nullptr);

}  // namespace landdiv
