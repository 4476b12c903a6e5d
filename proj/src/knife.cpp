#include "landdiv/knife.hpp"

#include <algorithm>

namespace landdiv {

namespace {

std::vector<Rect> transposed_all(const std::vector<Rect>& rects) {
    std::vector<Rect> out;
    out.reserve(rects.size());
    for (const Rect& r : rects) out.push_back(r.transposed());
    return out;
}

CutOrStack transposed(CutOrStack cs) {
    if (auto* cut = std::get_if<KnifeCut>(&cs)) {
        cut->strip = cut->strip.transposed();
        cut->axis = other_axis(cut->axis);
    } else {
        auto& stack = std::get<KnifeStack>(cs);
        for (Rect& r : stack.rects) r = r.transposed();
        stack.axis = other_axis(stack.axis);
    }
    return cs;
}

// Half the smallest positive gap between the knife edges {pos, pos+s} and
// any part edge. Backing the knife off by this amount changes no whole-part
// classification except at the stop position itself.
Coord backoff(const std::vector<Rect>& parts, const Coord& pos, const Coord& s) {
    Coord best = -1;
    auto consider = [&](const Coord& a, const Coord& b) {
        Coord gap = rat_abs(a - b);
        if (gap > 0 && (best < 0 || gap < best)) best = gap;
    };
    for (const Rect& r : parts) {
        consider(r.x_lo, pos);
        consider(r.x_hi, pos);
        consider(r.x_lo, pos + s);
        consider(r.x_hi, pos + s);
    }
    if (best < 0) {
        // All edges coincide with the knife edges; any positive backoff that
        // stays within a part width works.
        for (const Rect& r : parts) consider(r.x_lo, r.x_hi);
    }
    if (best < 0) throw InvariantError("knife backoff: no positive gap");
    return best / 2;
}

void check_pairwise_separated(const std::vector<Rect>& parts, const Coord& s) {
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (!is_s_separated(parts[i], parts[j], s))
                throw InputError("parts are not pairwise s-separated");
}

std::vector<Rect> sorted_by_low_y(std::vector<Rect> rects) {
    std::sort(rects.begin(), rects.end(), [](const Rect& a, const Rect& b) {
        if (a.y_lo != b.y_lo) return a.y_lo < b.y_lo;
        if (a.x_lo != b.x_lo) return a.x_lo < b.x_lo;
        if (a.y_hi != b.y_hi) return a.y_hi < b.y_hi;
        return a.x_hi < b.x_hi;
    });
    return rects;
}

void check_stack_gaps(const std::vector<Rect>& sorted, const Coord& s,
                      const char* what) {
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i].y_hi + s > sorted[i + 1].y_lo)
            throw InvariantError(std::string(what) +
                                 ": stack members not separated vertically");
}

}  // namespace

CutOrStack find_rectangle_cut_or_stack(const std::vector<Rect>& parts,
                                       const Rect& region, Axis axis, int p,
                                       int q, const Coord& s) {
    if (axis == Axis::Horizontal)
        return transposed(find_rectangle_cut_or_stack(
            transposed_all(parts), region.transposed(), Axis::Vertical, p, q, s));

    const int k = static_cast<int>(parts.size());
    if (p < 1 || q < 1 || p > k || q > k || p + q > k + 1)
        throw InputError("rectangle cut: need 1 <= p,q <= k and p+q <= k+1");
    if (s < 0) throw InputError("negative separation parameter");
    check_pairwise_separated(parts, s);
    for (const Rect& r : parts)
        if (!region.contains(r))
            throw InputError("rectangle cut: part outside region");

    // Stop at the p-th smallest right edge: the first knife position with at
    // least p whole parts on the left.
    std::vector<Coord> right_edges;
    right_edges.reserve(parts.size());
    for (const Rect& r : parts) right_edges.push_back(r.x_hi);
    std::sort(right_edges.begin(), right_edges.end());
    Coord pos = right_edges[p - 1];

    int whole_right = 0;
    for (const Rect& r : parts)
        if (r.x_lo >= pos + s) ++whole_right;
    if (whole_right >= q) {
        int whole_left = 0;
        for (const Rect& r : parts)
            if (r.x_hi <= pos) ++whole_left;
        return KnifeCut{Rect(pos, pos + s, region.y_lo, region.y_hi),
                        Axis::Vertical, whole_left, whole_right};
    }

    // Backed off slightly, the knife has at most p-1 whole parts on the left
    // and at most q-1 on the right, so at least k-p-q+2 parts cross it. They
    // all meet one width-s strip, hence lie in vertical order with gaps >= s.
    Coord eta = backoff(parts, pos, s);
    Coord lo = pos - eta;
    std::vector<Rect> members;
    for (const Rect& r : parts)
        if (r.x_lo < lo + s && r.x_hi > lo) members.push_back(r);
    if (static_cast<int>(members.size()) < k - p - q + 2)
        throw InvariantError("rectangle stack shorter than guaranteed");
    members = sorted_by_low_y(std::move(members));
    check_stack_gaps(members, s, "rectangle stack");
    return KnifeStack{std::move(members), Axis::Vertical};
}

CutOrStack find_value_cut_or_stack(const GridValuation& v, const Rect& region,
                                   Axis axis, int p, int q, const Coord& s,
                                   QueryLog* log) {
    if (axis == Axis::Horizontal)
        return transposed(find_value_cut_or_stack(
            v.transposed(), region.transposed(), Axis::Vertical, p, q, s, log));

    if (p < 1 || q < 1) throw InputError("value cut: need p,q >= 1");
    if (s < 0) throw InputError("negative separation parameter");
    Rat total = value_of(v, region);
    if (p + q > total)
        throw InputError("value cut: p+q exceeds the region's value");

    Coord pos = cut_query(v, Axis::Vertical, region, p, log);
    Rat high = pos + s >= region.x_hi
                   ? Rat(0)
                   : eval_query(v, Axis::Vertical, region, region.x_hi, log) -
                         eval_query(v, Axis::Vertical, region, std::min(Coord(pos + s), region.x_hi), log);
    if (high >= q) {
        return KnifeCut{Rect(pos, pos + s, region.y_lo, region.y_hi),
                        Axis::Vertical, p, high};
    }

    if (s == 0)
        throw InvariantError(
            "value cut: a zero-width knife cannot cover positive value");

    // The knife strip covers more than total-p-q of the value. That value
    // sits in chunks (pieces of value-1 rectangles), each worth at most 1,
    // in vertical order with gaps >= s. Group chunks bottom-to-top into
    // rectangles worth >= 1 each.
    Rect slab(pos, std::min(Coord(pos + s), region.x_hi), region.y_lo, region.y_hi);
    struct Chunk {
        Coord y_lo, y_hi;
        Rat value;
    };
    std::vector<Chunk> chunks;
    {
        std::vector<Coord> bps;
        bps.push_back(region.y_lo);
        for (const Coord& y : v.y_coords)
            if (region.y_lo < y && y < region.y_hi) bps.push_back(y);
        bps.push_back(region.y_hi);
        for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
            Rat m = value_of(v, Rect(slab.x_lo, slab.x_hi, bps[j], bps[j + 1]));
            if (m == 0) continue;
            if (!chunks.empty() && chunks.back().y_hi == bps[j]) {
                chunks.back().y_hi = bps[j + 1];
                chunks.back().value += m;
            } else {
                chunks.push_back({bps[j], bps[j + 1], m});
            }
        }
    }
    for (std::size_t i = 0; i + 1 < chunks.size(); ++i)
        if (chunks[i].y_hi + s > chunks[i + 1].y_lo)
            throw InvariantError("value stack: chunks closer than s");
    for (const Chunk& c : chunks)
        if (c.value > 1)
            throw InvariantError(
                "value stack: chunk worth more than 1; valuation not normalized");

    std::vector<Rect> members;
    std::size_t begin = 0;
    Rat acc = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        acc += chunks[i].value;
        if (acc >= 1) {
            members.emplace_back(slab.x_lo, slab.x_hi, chunks[begin].y_lo,
                                 chunks[i].y_hi);
            begin = i + 1;
            acc = 0;
        }
    }

    long need = rat_ceil_long(Rat(rat_floor(total) - p - q) / 2);
    if (static_cast<long>(members.size()) < need)
        throw InvariantError("value stack shorter than guaranteed");
    check_stack_gaps(members, s, "value stack");
    return KnifeStack{std::move(members), Axis::Vertical};
}

}  // namespace landdiv
