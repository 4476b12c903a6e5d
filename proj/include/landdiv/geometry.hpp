#pragma once

#include <optional>
#include <string>

#include "landdiv/rational.hpp"

namespace landdiv {

using Coord = Rat;

enum class Axis { Vertical, Horizontal };

inline Axis other_axis(Axis a) {
    return a == Axis::Vertical ? Axis::Horizontal : Axis::Vertical;
}

// Closed axis-aligned rectangle. Degenerate (zero-width or zero-height)
// rectangles are permitted as knife artifacts but are never allocated.
struct Rect {
    Coord x_lo, x_hi, y_lo, y_hi;

    Rect() = default;
    Rect(Coord xl, Coord xh, Coord yl, Coord yh);

    Coord width() const { return x_hi - x_lo; }
    Coord height() const { return y_hi - y_lo; }
    Coord long_side() const { return width() > height() ? width() : height(); }
    Coord short_side() const { return width() < height() ? width() : height(); }
    Rat area() const { return width() * height(); }
    bool degenerate() const { return x_lo == x_hi || y_lo == y_hi; }

    bool contains(const Rect& inner) const;
    // Swaps the two axes; used to run vertical-knife procedures horizontally.
    Rect transposed() const { return Rect(y_lo, y_hi, x_lo, x_hi); }

    bool operator==(const Rect& o) const = default;
    std::string str() const;
};

// Intersection as a closed box; empty result means zero-area (or void)
// intersection.
std::optional<Rect> intersect(const Rect& a, const Rect& b);

// inf over point pairs of max{|x-x'|, |y-y'|}; equals the larger of the two
// clamped projection gaps.
Coord linf_distance(const Rect& a, const Rect& b);

// True iff the intersection has positive area. Edge-touching rectangles do
// not overlap (they are "disjoint"), but they are not s-separated for s > 0.
bool overlaps(const Rect& a, const Rect& b);

// linf_distance(a, b) >= s. Rejects s < 0. For s = 0 this is non-overlap.
bool is_s_separated(const Rect& a, const Rect& b, const Coord& s);

// The rectangle with the same center and both side lengths grown by s.
// Two rectangles are s-separated iff their wraps do not overlap, and
// wrapping preserves r-fatness.
Rect wrap(const Rect& q, const Coord& s);

// long/short side ratio. Rejects degenerate rectangles.
Coord fatness(const Rect& q);

bool is_r_fat(const Rect& q, const Coord& r);

}  // namespace landdiv
