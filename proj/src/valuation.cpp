#include "landdiv/valuation.hpp"

#include <algorithm>

namespace landdiv {

namespace {

void check_axis(const std::vector<Coord>& coords, const char* name) {
    if (coords.size() < 2)
        throw InputError(std::string(name) + ": need at least two coordinates");
    for (std::size_t i = 0; i + 1 < coords.size(); ++i)
        if (!(coords[i] < coords[i + 1]))
            throw InputError(std::string(name) + ": coordinates not strictly increasing");
}

}  // namespace

GridValuation::GridValuation(std::vector<Coord> xs, std::vector<Coord> ys,
                             std::vector<std::vector<Rat>> masses)
    : x_coords(std::move(xs)), y_coords(std::move(ys)), cells(std::move(masses)) {
    check_axis(x_coords, "x_coords");
    check_axis(y_coords, "y_coords");
    if (cells.size() != x_coords.size() - 1)
        throw InputError("cells: wrong number of columns");
    for (const auto& col : cells) {
        if (col.size() != y_coords.size() - 1)
            throw InputError("cells: wrong column height");
        for (const auto& m : col)
            if (m < 0) throw InputError("cells: negative mass");
    }
}

Rect GridValuation::domain() const {
    return Rect(x_coords.front(), x_coords.back(), y_coords.front(), y_coords.back());
}

Rat GridValuation::total() const {
    Rat t = 0;
    for (const auto& col : cells)
        for (const auto& m : col) t += m;
    return t;
}

GridValuation GridValuation::uniform(const Rect& land, const Rat& mass) {
    if (land.degenerate()) throw InputError("uniform valuation on degenerate land");
    return GridValuation({land.x_lo, land.x_hi}, {land.y_lo, land.y_hi}, {{mass}});
}

GridValuation GridValuation::refined(const std::vector<Coord>& extra_x,
                                     const std::vector<Coord>& extra_y) const {
    Rect dom = domain();
    auto merge = [](const std::vector<Coord>& base, const std::vector<Coord>& extra,
                    const Coord& lo, const Coord& hi) {
        std::vector<Coord> out = base;
        for (const Coord& c : extra)
            if (lo < c && c < hi) out.push_back(c);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };
    std::vector<Coord> xs = merge(x_coords, extra_x, dom.x_lo, dom.x_hi);
    std::vector<Coord> ys = merge(y_coords, extra_y, dom.y_lo, dom.y_hi);

    // Index of the base cell containing each refined cell.
    auto owners = [](const std::vector<Coord>& fine, const std::vector<Coord>& coarse) {
        std::vector<std::size_t> own(fine.size() - 1);
        std::size_t c = 0;
        for (std::size_t i = 0; i + 1 < fine.size(); ++i) {
            while (coarse[c + 1] <= fine[i]) ++c;
            own[i] = c;
        }
        return own;
    };
    auto ox = owners(xs, x_coords);
    auto oy = owners(ys, y_coords);

    std::vector<std::vector<Rat>> masses(xs.size() - 1,
                                         std::vector<Rat>(ys.size() - 1));
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rat fx = (xs[i + 1] - xs[i]) / (x_coords[ox[i] + 1] - x_coords[ox[i]]);
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            Rat fy = (ys[j + 1] - ys[j]) / (y_coords[oy[j] + 1] - y_coords[oy[j]]);
            masses[i][j] = cells[ox[i]][oy[j]] * fx * fy;
        }
    }
    return GridValuation(std::move(xs), std::move(ys), std::move(masses));
}

GridValuation GridValuation::scaled(const Rat& factor) const {
    if (factor < 0) throw InputError("negative scale factor");
    GridValuation out = *this;
    for (auto& col : out.cells)
        for (auto& m : col) m *= factor;
    return out;
}

GridValuation GridValuation::transposed() const {
    std::vector<std::vector<Rat>> masses(y_coords.size() - 1,
                                         std::vector<Rat>(x_coords.size() - 1));
    for (std::size_t i = 0; i + 1 < x_coords.size(); ++i)
        for (std::size_t j = 0; j + 1 < y_coords.size(); ++j)
            masses[j][i] = cells[i][j];
    return GridValuation(y_coords, x_coords, std::move(masses));
}

Rat value_of(const GridValuation& v, const Rect& region) {
    auto clipped = intersect(v.domain(), region);
    if (!clipped || clipped->degenerate()) return 0;
    const Rect& r = *clipped;

    Rat total = 0;
    for (std::size_t i = 0; i + 1 < v.x_coords.size(); ++i) {
        Coord xl = std::max(v.x_coords[i], r.x_lo);
        Coord xh = std::min(v.x_coords[i + 1], r.x_hi);
        if (xl >= xh) continue;
        Rat fx = (xh - xl) / (v.x_coords[i + 1] - v.x_coords[i]);
        for (std::size_t j = 0; j + 1 < v.y_coords.size(); ++j) {
            Coord yl = std::max(v.y_coords[j], r.y_lo);
            Coord yh = std::min(v.y_coords[j + 1], r.y_hi);
            if (yl >= yh) continue;
            if (v.cells[i][j] == 0) continue;
            Rat fy = (yh - yl) / (v.y_coords[j + 1] - v.y_coords[j]);
            total += v.cells[i][j] * fx * fy;
        }
    }
    return total;
}

Rat eval_query(const GridValuation& v, Axis dir, const Rect& region,
               const Coord& c, QueryLog* log) {
    if (log) ++log->evals;
    if (dir == Axis::Vertical) {
        if (c < region.x_lo || c > region.x_hi)
            throw InputError("eval coordinate outside region");
        return value_of(v, Rect(region.x_lo, c, region.y_lo, region.y_hi));
    }
    if (c < region.y_lo || c > region.y_hi)
        throw InputError("eval coordinate outside region");
    return value_of(v, Rect(region.x_lo, region.x_hi, region.y_lo, c));
}

Coord cut_query(const GridValuation& v, Axis dir, const Rect& region,
                const Rat& delta, QueryLog* log) {
    if (delta < 0) throw InputError("cut target must be nonnegative");
    if (log) ++log->cuts;
    if (dir == Axis::Horizontal) {
        return cut_query(v.transposed(), Axis::Vertical, region.transposed(), delta);
    }

    // Column breakpoints: grid lines inside the region plus the region edges.
    std::vector<Coord> bps;
    bps.push_back(region.x_lo);
    for (const Coord& x : v.x_coords)
        if (region.x_lo < x && x < region.x_hi) bps.push_back(x);
    if (region.x_hi > region.x_lo) bps.push_back(region.x_hi);

    // Mass accumulates linearly across each column (density is constant in x
    // there), so the inverse of the prefix function is exact. Stopping at the
    // first column that reaches delta yields the smallest such coordinate.
    Rat cum = 0;
    for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
        if (cum == delta) return bps[j];
        Rat col = value_of(v, Rect(bps[j], bps[j + 1], region.y_lo, region.y_hi));
        if (cum + col >= delta) {
            return bps[j] + (delta - cum) / col * (bps[j + 1] - bps[j]);
        }
        cum += col;
    }
    if (cum == delta) return bps.back();
    return region.x_hi;  // region worth less than delta: saturate at far edge
}

GridValuation normalize_to_partition(const GridValuation& v,
                                     const std::vector<Rect>& parts) {
    if (parts.empty()) throw InputError("normalize: empty partition");
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (overlaps(parts[i], parts[j]))
                throw InputError("normalize: parts overlap");

    std::vector<Rat> part_values;
    part_values.reserve(parts.size());
    for (const Rect& p : parts) {
        Rat val = value_of(v, p);
        if (val == 0)
            throw InputError("normalize: part " + p.str() + " has zero value");
        part_values.push_back(val);
    }

    std::vector<Coord> xs, ys;
    for (const Rect& p : parts) {
        xs.push_back(p.x_lo);
        xs.push_back(p.x_hi);
        ys.push_back(p.y_lo);
        ys.push_back(p.y_hi);
    }
    GridValuation fine = v.refined(xs, ys);

    // Each refined cell lies entirely inside at most one part; scale it by
    // that part's factor, zero it otherwise.
    for (std::size_t i = 0; i + 1 < fine.x_coords.size(); ++i) {
        for (std::size_t j = 0; j + 1 < fine.y_coords.size(); ++j) {
            Coord cx = (fine.x_coords[i] + fine.x_coords[i + 1]) / 2;
            Coord cy = (fine.y_coords[j] + fine.y_coords[j + 1]) / 2;
            bool inside = false;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                if (parts[p].x_lo <= cx && cx <= parts[p].x_hi &&
                    parts[p].y_lo <= cy && cy <= parts[p].y_hi) {
                    fine.cells[i][j] /= part_values[p];
                    inside = true;
                    break;
                }
            }
            if (!inside) fine.cells[i][j] = 0;
        }
    }
    return fine;
}

}  // namespace landdiv
