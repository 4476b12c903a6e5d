#include "landdiv/geometry.hpp"

namespace landdiv {

Rect::Rect(Coord xl, Coord xh, Coord yl, Coord yh)
    : x_lo(std::move(xl)), x_hi(std::move(xh)), y_lo(std::move(yl)), y_hi(std::move(yh)) {
    if (x_lo > x_hi || y_lo > y_hi)
        throw InputError("rectangle with inverted sides: " + str());
}

bool Rect::contains(const Rect& inner) const {
    return x_lo <= inner.x_lo && inner.x_hi <= x_hi && y_lo <= inner.y_lo &&
           inner.y_hi <= y_hi;
}

std::string Rect::str() const {
    return "[" + rat_str(x_lo) + "," + rat_str(x_hi) + "]x[" + rat_str(y_lo) +
           "," + rat_str(y_hi) + "]";
}

std::optional<Rect> intersect(const Rect& a, const Rect& b) {
    Coord xl = std::max(a.x_lo, b.x_lo);
    Coord xh = std::min(a.x_hi, b.x_hi);
    Coord yl = std::max(a.y_lo, b.y_lo);
    Coord yh = std::min(a.y_hi, b.y_hi);
    if (xl > xh || yl > yh) return std::nullopt;
    return Rect(xl, xh, yl, yh);
}

namespace {
Coord projection_gap(const Coord& a_lo, const Coord& a_hi, const Coord& b_lo,
                     const Coord& b_hi) {
    Coord gap = std::max(Coord(b_lo - a_hi), Coord(a_lo - b_hi));
    return gap > 0 ? gap : Coord(0);
}
}  // namespace

Coord linf_distance(const Rect& a, const Rect& b) {
    Coord gx = projection_gap(a.x_lo, a.x_hi, b.x_lo, b.x_hi);
    Coord gy = projection_gap(a.y_lo, a.y_hi, b.y_lo, b.y_hi);
    return std::max(gx, gy);
}

bool overlaps(const Rect& a, const Rect& b) {
    return std::max(a.x_lo, b.x_lo) < std::min(a.x_hi, b.x_hi) &&
           std::max(a.y_lo, b.y_lo) < std::min(a.y_hi, b.y_hi);
}

bool is_s_separated(const Rect& a, const Rect& b, const Coord& s) {
    if (s < 0) throw InputError("negative separation parameter");
    if (s == 0) return !overlaps(a, b);  // separation degrades to non-overlap
    return linf_distance(a, b) >= s;
}

Rect wrap(const Rect& q, const Coord& s) {
    if (s < 0) throw InputError("negative separation parameter");
    Coord half = s / 2;
    return Rect(q.x_lo - half, q.x_hi + half, q.y_lo - half, q.y_hi + half);
}

Coord fatness(const Rect& q) {
    if (q.degenerate())
        throw InputError("fatness of degenerate rectangle " + q.str());
    return q.long_side() / q.short_side();
}

bool is_r_fat(const Rect& q, const Coord& r) {
    return fatness(q) <= r;
}

}  // namespace landdiv
