#include "landdiv/partition.hpp"

#include <algorithm>
#include <unordered_map>

#include "landdiv/knife.hpp"

namespace landdiv {

void Partition::validate() const {
    for (const Rect& p : parts) {
        if (p.degenerate())
            throw InputError("partition part is degenerate: " + p.str());
        if (!region.contains(p))
            throw InputError("partition part outside region: " + p.str());
    }
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (overlaps(parts[i], parts[j]))
                throw InputError("partition parts overlap");
}

GuillotineTree GuillotineTree::make_leaf(Rect part) {
    GuillotineTree t;
    t.part = std::move(part);
    return t;
}

GuillotineTree GuillotineTree::make_split(Axis axis, Coord cut_lo, Coord cut_hi,
                                          GuillotineTree l, GuillotineTree r) {
    GuillotineTree t;
    t.axis = axis;
    t.cut_lo = std::move(cut_lo);
    t.cut_hi = std::move(cut_hi);
    t.left = std::make_unique<GuillotineTree>(std::move(l));
    t.right = std::make_unique<GuillotineTree>(std::move(r));
    return t;
}

std::vector<Rect> GuillotineTree::leaves() const {
    std::vector<Rect> out;
    auto walk = [&](auto&& self, const GuillotineTree& node) -> void {
        if (node.is_leaf()) {
            out.push_back(node.part);
            return;
        }
        self(self, *node.left);
        self(self, *node.right);
    };
    walk(walk, *this);
    return out;
}

bool check_s_separated(const Partition& p, const Coord& s) {
    for (std::size_t i = 0; i < p.parts.size(); ++i)
        for (std::size_t j = i + 1; j < p.parts.size(); ++j)
            if (!is_s_separated(p.parts[i], p.parts[j], s)) return false;
    return true;
}

namespace {

std::optional<GuillotineTree> certify_rec(const std::vector<Rect>& parts,
                                          const std::vector<int>& idxs,
                                          const Rect& region, const Coord& s) {
    if (idxs.size() == 1) {
        const Rect& part = parts[idxs[0]];
        if (!region.contains(part)) return std::nullopt;
        return GuillotineTree::make_leaf(part);
    }

    // Candidate cut lines are induced by part edges: a strip starting right
    // after a part, or ending right at a part's near edge.
    auto try_axis = [&](Axis axis) -> std::optional<GuillotineTree> {
        std::vector<Coord> cands;
        for (int i : idxs) {
            const Rect& r = parts[i];
            Coord hi_edge = axis == Axis::Vertical ? r.x_hi : r.y_hi;
            Coord lo_edge = axis == Axis::Vertical ? r.x_lo : r.y_lo;
            cands.push_back(hi_edge);
            cands.push_back(lo_edge - s);
        }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        Coord reg_lo = axis == Axis::Vertical ? region.x_lo : region.y_lo;
        Coord reg_hi = axis == Axis::Vertical ? region.x_hi : region.y_hi;

        for (const Coord& a : cands) {
            if (!(reg_lo < a) || !(a + s < reg_hi)) continue;
            std::vector<int> low, high;
            bool clean = true;
            for (int i : idxs) {
                const Rect& r = parts[i];
                Coord lo_edge = axis == Axis::Vertical ? r.x_lo : r.y_lo;
                Coord hi_edge = axis == Axis::Vertical ? r.x_hi : r.y_hi;
                if (hi_edge <= a)
                    low.push_back(i);
                else if (lo_edge >= a + s)
                    high.push_back(i);
                else {
                    clean = false;  // part crosses the open strip (a, a+s)
                    break;
                }
            }
            if (!clean || low.empty() || high.empty()) continue;

            Rect low_reg = axis == Axis::Vertical
                               ? Rect(region.x_lo, a, region.y_lo, region.y_hi)
                               : Rect(region.x_lo, region.x_hi, region.y_lo, a);
            Rect high_reg = axis == Axis::Vertical
                                ? Rect(a + s, region.x_hi, region.y_lo, region.y_hi)
                                : Rect(region.x_lo, region.x_hi, a + s, region.y_hi);
            auto lt = certify_rec(parts, low, low_reg, s);
            if (!lt) continue;
            auto rt = certify_rec(parts, high, high_reg, s);
            if (!rt) continue;
            return GuillotineTree::make_split(axis, a, a + s, std::move(*lt),
                                              std::move(*rt));
        }
        return std::nullopt;
    };

    if (auto v = try_axis(Axis::Vertical)) return v;
    return try_axis(Axis::Horizontal);
}

}  // namespace

std::optional<GuillotineTree> certify_guillotine(const Partition& p,
                                                 const Coord& s) {
    if (p.parts.empty()) throw InputError("certify: empty partition");
    if (s < 0) throw InputError("negative separation parameter");
    p.validate();
    std::vector<int> idxs(p.parts.size());
    for (std::size_t i = 0; i < idxs.size(); ++i) idxs[i] = static_cast<int>(i);
    return certify_rec(p.parts, idxs, p.region, s);
}

// ---------------------------------------------------------------------------
// Integer view of a valuation on a fixed grid: masses scaled by a common
// denominator so that sub-rectangle values compare as integers.

namespace {

struct ScaledGrid {
    std::vector<Coord> xs, ys;
    Int denom = 1;
    std::vector<std::vector<Int>> prefix;  // corner sums, xs.size() x ys.size()

    Int rect_mass(std::size_t i, std::size_t i2, std::size_t j,
                  std::size_t j2) const {
        return prefix[i2][j2] - prefix[i][j2] - prefix[i2][j] + prefix[i][j];
    }
    Rat to_rat(const Int& m) const {
        Rat r(m, denom);
        r.canonicalize();
        return r;
    }
};

ScaledGrid build_scaled_grid(const GridValuation& v, std::vector<Coord> xs,
                             std::vector<Coord> ys) {
    GridValuation fine = v.refined(xs, ys);
    const std::size_t nx = xs.size() - 1, ny = ys.size() - 1;

    // Bucket every fine cell into the query cell containing it; fine cells
    // outside the query span carry mass the grid should not see.
    std::vector<std::vector<Rat>> bucket(nx, std::vector<Rat>(ny, Rat(0)));
    std::size_t qi = 0;
    for (std::size_t i = 0; i + 1 < fine.x_coords.size(); ++i) {
        if (fine.x_coords[i] < xs.front() || fine.x_coords[i + 1] > xs.back())
            continue;
        while (xs[qi + 1] <= fine.x_coords[i]) ++qi;
        std::size_t qj = 0;
        for (std::size_t j = 0; j + 1 < fine.y_coords.size(); ++j) {
            if (fine.y_coords[j] < ys.front() || fine.y_coords[j + 1] > ys.back())
                continue;
            while (ys[qj + 1] <= fine.y_coords[j]) ++qj;
            bucket[qi][qj] += fine.cells[i][j];
        }
    }

    ScaledGrid g;
    g.xs = std::move(xs);
    g.ys = std::move(ys);
    for (const auto& col : bucket)
        for (const Rat& m : col)
            mpz_lcm(g.denom.get_mpz_t(), g.denom.get_mpz_t(), m.get_den_mpz_t());
    g.prefix.assign(nx + 1, std::vector<Int>(ny + 1, Int(0)));
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            Int scaled = bucket[i][j].get_num() * (g.denom / bucket[i][j].get_den());
            g.prefix[i + 1][j + 1] = scaled + g.prefix[i][j + 1] +
                                     g.prefix[i + 1][j] - g.prefix[i][j];
        }
    }
    return g;
}

// Smallest index w with coords[w] >= coords[r] + s, or -1.
std::vector<int> next_at_least(const std::vector<Coord>& coords, const Coord& s) {
    std::vector<int> next(coords.size(), -1);
    std::size_t w = 0;
    for (std::size_t r = 0; r < coords.size(); ++r) {
        if (w < r) w = r;
        while (w < coords.size() && coords[w] - coords[r] < s) ++w;
        next[r] = w == coords.size() ? -1 : static_cast<int>(w);
    }
    return next;
}

// Max-min dynamic program over sub-rectangles of the cut grid, memoized with
// value bounds. solve() returns r with the contract: r <= exact, and
// exact <= max(alpha, r); hence r > alpha implies r == exact.
struct GuillotineDp {
    const ScaledGrid& g;
    std::vector<int> next_x, next_y;
    struct Bounds {
        Int lo, hi;
    };
    std::unordered_map<std::uint64_t, Bounds> memo;

    GuillotineDp(const ScaledGrid& grid, const Coord& s)
        : g(grid), next_x(next_at_least(grid.xs, s)), next_y(next_at_least(grid.ys, s)) {}

    static std::uint64_t key(int i, int i2, int j, int j2, int t) {
        return (static_cast<std::uint64_t>(i) << 52) |
               (static_cast<std::uint64_t>(i2) << 40) |
               (static_cast<std::uint64_t>(j) << 28) |
               (static_cast<std::uint64_t>(j2) << 16) |
               static_cast<std::uint64_t>(t);
    }

    Int solve(int i, int i2, int j, int j2, int t, const Int& alpha) {
        Int mass = g.rect_mass(i, i2, j, j2);
        if (t == 1) return mass;
        if (mass == 0) return Int(0);
        Int ub0 = mass / t;
        if (ub0 <= alpha) return ub0;

        std::uint64_t kk = key(i, i2, j, j2, t);
        auto [it, inserted] = memo.try_emplace(kk, Bounds{Int(0), mass});
        if (!inserted) {
            if (it->second.lo == it->second.hi) return it->second.lo;
            if (it->second.hi <= alpha) return it->second.hi;
        }

        Int best = 0;
        search_axis(true, i, i2, j, j2, t, mass, alpha, best);
        search_axis(false, i, i2, j, j2, t, mass, alpha, best);

        // Entries can be invalidated by rehashing during recursion.
        Bounds& e = memo[kk];
        if (best > alpha) {
            e.lo = best;
            e.hi = best;
        } else {
            if (alpha < e.hi) e.hi = alpha;
            if (best > e.lo) e.lo = best;
        }
        return best;
    }

private:
    // Scans cut positions outward from the value-balanced point; on each
    // frontier the unreached candidates' upper bound is monotone, so the
    // scan stops as soon as that bound cannot beat the current best.
    void search_axis(bool vertical, int i, int i2, int j, int j2, int t,
                     const Int& mass, const Int& alpha, Int& best) {
        const std::vector<int>& next = vertical ? next_x : next_y;
        int lo = vertical ? i : j, hi = vertical ? i2 : j2;
        if (hi - lo < 2) return;

        auto low_mass = [&](int r) {
            return vertical ? g.rect_mass(i, r, j, j2) : g.rect_mass(i, i2, j, r);
        };
        auto high_mass = [&](int r2) {
            return vertical ? g.rect_mass(r2, i2, j, j2) : g.rect_mass(i, i2, r2, j2);
        };
        auto child = [&](bool low_side, int r, int t2, const Int& a) {
            if (vertical)
                return low_side ? solve(i, r, j, j2, t2, a)
                                : solve(r, i2, j, j2, t2, a);
            return low_side ? solve(i, i2, j, r, t2, a)
                            : solve(i, i2, r, j2, t2, a);
        };

        for (int tl = 1; tl < t; ++tl) {
            const int th = t - tl;
            // Smallest r with low_mass(r) * t >= mass * tl.
            int bal = lo + 1, e = hi - 1;
            Int target = mass * tl;
            while (bal < e) {
                int mid = (bal + e) / 2;
                if (low_mass(mid) * t >= target)
                    e = mid;
                else
                    bal = mid + 1;
            }
            for (int dir = 0; dir < 2; ++dir) {
                for (int r = dir == 0 ? bal : bal - 1; lo < r && r < hi;
                     dir == 0 ? ++r : --r) {
                    Int thr = std::max(alpha, best);
                    Int lm = low_mass(r);
                    if (lm <= thr * tl) {
                        if (dir == 1) break;  // shrinks further down
                        continue;
                    }
                    int r2 = next[r];
                    if (r2 < 0 || r2 >= hi) {
                        if (dir == 0) break;  // grows further up
                        continue;
                    }
                    Int hm = high_mass(r2);
                    if (hm <= thr * th) {
                        if (dir == 0) break;  // shrinks further up
                        continue;
                    }
                    Int L = child(true, r, tl, thr);
                    if (L <= thr) continue;
                    Int R = child(false, r2, th, thr);
                    if (R <= thr) continue;
                    best = std::min(L, R);
                }
            }
        }
    }
};

}  // namespace

MmsResult guillotine_mms_dp(const GridValuation& v, const Rect& region,
                            const Coord& s, int k, const Rat& eps,
                            QueryLog* log) {
    if (k < 1) throw InputError("dp: k must be at least 1");
    if (eps <= 0) throw InputError("dp: eps must be positive");
    if (s < 0) throw InputError("negative separation parameter");
    if (value_of(v, region) != 1)
        throw InputError("dp: the region must be worth exactly 1 (rescale first)");

    Rat delta = eps / 4;
    auto build_cuts = [&](Axis axis) {
        std::vector<Coord> coords;
        coords.push_back(axis == Axis::Vertical ? region.x_lo : region.y_lo);
        for (Rat target = delta; target < 1; target += delta)
            coords.push_back(cut_query(v, axis, region, target, log));
        coords.push_back(axis == Axis::Vertical ? region.x_hi : region.y_hi);
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        return coords;
    };
    std::vector<Coord> xs = build_cuts(Axis::Vertical);
    std::vector<Coord> ys = build_cuts(Axis::Horizontal);
    if (xs.size() > 4000 || ys.size() > 4000)
        throw InputError("dp: eps below supported grid resolution");

    ScaledGrid grid = build_scaled_grid(v, xs, ys);
    GuillotineDp dp(grid, s);
    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;
    Int z = dp.solve(0, nx, 0, ny, k, Int(-1));

    // Reconstruction follows a fixed preference order (vertical split, then
    // smaller cut index, then smaller low-side part count) so results are
    // reproducible. For z > 0 the first acceptable split always completes.
    std::vector<Rect> parts;
    auto recon = [&](auto&& self, int i, int i2, int j, int j2, int t)
        -> std::optional<GuillotineTree> {
        if (t == 1) {
            Rect part(grid.xs[i], grid.xs[i2], grid.ys[j], grid.ys[j2]);
            parts.push_back(part);
            return GuillotineTree::make_leaf(std::move(part));
        }
        Int gate = z - 1;
        for (int axis_pass = 0; axis_pass < 2; ++axis_pass) {
            bool vertical = axis_pass == 0;
            int lo = vertical ? i : j, hi = vertical ? i2 : j2;
            const std::vector<int>& next = vertical ? dp.next_x : dp.next_y;
            for (int r = lo + 1; r < hi; ++r) {
                int r2 = next[r];
                if (r2 < 0 || r2 >= hi) continue;
                for (int tl = 1; tl < t; ++tl) {
                    Int L = vertical ? dp.solve(i, r, j, j2, tl, gate)
                                     : dp.solve(i, i2, j, r, tl, gate);
                    if (L < z) continue;
                    Int R = vertical ? dp.solve(r2, i2, j, j2, t - tl, gate)
                                     : dp.solve(i, i2, r2, j2, t - tl, gate);
                    if (R < z) continue;
                    std::size_t mark = parts.size();
                    auto lt = vertical ? self(self, i, r, j, j2, tl)
                                       : self(self, i, i2, j, r, tl);
                    if (!lt) {
                        parts.resize(mark);
                        continue;
                    }
                    auto rt = vertical ? self(self, r2, i2, j, j2, t - tl)
                                       : self(self, i, i2, r2, j2, t - tl);
                    if (!rt) {
                        parts.resize(mark);
                        continue;
                    }
                    Coord a = vertical ? grid.xs[r] : grid.ys[r];
                    return GuillotineTree::make_split(
                        vertical ? Axis::Vertical : Axis::Horizontal, a, a + s,
                        std::move(*lt), std::move(*rt));
                }
            }
        }
        return std::nullopt;
    };

    auto tree = recon(recon, 0, nx, 0, ny, k);
    if (!tree)
        throw InputError(
            "dp: no s-separated guillotine split structure for the requested k");

    MmsResult res;
    res.value = grid.to_rat(z);
    res.partition = Partition{std::move(parts), region};
    res.tree = std::move(*tree);
    res.method = MmsMethod::Dp;
    res.k = k;
    res.s = s;
    res.eps = eps;
    return res;
}

// ---------------------------------------------------------------------------
// Brute-force maximin oracle.

bool ShapeRegime::admits(const Rect& q) const {
    switch (kind) {
        case ShapeKind::Square:
            return q.width() == q.height();
        case ShapeKind::Fat:
            return is_r_fat(q, r);
        case ShapeKind::AnyRect:
            return true;
    }
    return false;
}

namespace {

struct OracleCand {
    int i, i2, j, j2;
    Int val;
};

class BitMatrix {
public:
    BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}
    void set(std::size_t a, std::size_t b) {
        bits_[a * words_ + b / 64] |= 1ull << (b % 64);
    }
    bool get(std::size_t a, std::size_t b) const {
        return bits_[a * words_ + b / 64] >> (b % 64) & 1;
    }
    const std::uint64_t* row(std::size_t a) const { return &bits_[a * words_]; }
    std::size_t words() const { return words_; }

private:
    std::size_t n_, words_;
    std::vector<std::uint64_t> bits_;
};

struct OracleSearch {
    const ScaledGrid& g;
    const Coord& s;
    int k;
    bool guillotine_only;
    const Rect& span;
    std::uint64_t budget;
    std::uint64_t work = 0;
    std::vector<std::vector<bool>> sep_x, sep_y;  // coordinate-pair gaps >= s

    OracleSearch(const ScaledGrid& grid, const Coord& sep, int kk, bool gonly,
                 const Rect& sp, std::uint64_t b)
        : g(grid), s(sep), k(kk), guillotine_only(gonly), span(sp), budget(b) {
        auto gaps = [&](const std::vector<Coord>& cs) {
            std::vector<std::vector<bool>> m(cs.size(),
                                             std::vector<bool>(cs.size(), false));
            for (std::size_t a = 0; a < cs.size(); ++a)
                for (std::size_t b2 = a; b2 < cs.size(); ++b2)
                    m[a][b2] = cs[b2] - cs[a] >= s;
            return m;
        };
        sep_x = gaps(g.xs);
        sep_y = gaps(g.ys);
    }

    void charge(std::uint64_t w, const char* phase) {
        work += w;
        if (work > budget)
            throw BudgetError(std::string("oracle budget exceeded during ") +
                              phase + " after " + std::to_string(work) +
                              " steps (budget " + std::to_string(budget) + ")");
    }

    bool separated(const OracleCand& a, const OracleCand& b) const {
        return sep_x[a.i2][b.i] || sep_x[b.i2][a.i] || sep_y[a.j2][b.j] ||
               sep_y[b.j2][a.j];
    }

    Rect rect_of(const OracleCand& c) const {
        return Rect(g.xs[c.i], g.xs[c.i2], g.ys[c.j], g.ys[c.j2]);
    }

    // Depth-first k-clique search over the eligible list in index order.
    bool find_clique(const std::vector<OracleCand>& elig,
                     std::vector<int>& out) {
        const std::size_t m = elig.size();
        if (m < static_cast<std::size_t>(k)) return false;
        charge(m * m / 128 + m, "pair separation");
        BitMatrix adj(m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (separated(elig[a], elig[b])) {
                    adj.set(a, b);
                    adj.set(b, a);
                }

        std::vector<std::uint64_t> full(adj.words(), ~0ull);
        if (m % 64) full.back() = (1ull << (m % 64)) - 1;
        std::vector<int> chosen;
        auto dfs = [&](auto&& self, const std::vector<std::uint64_t>& allowed,
                       std::size_t from) -> bool {
            if (chosen.size() == static_cast<std::size_t>(k)) {
                if (!guillotine_only) return true;
                Partition p;
                for (int c : chosen) p.parts.push_back(rect_of(elig[c]));
                p.region = span;
                charge(64, "guillotine certification");
                return certify_guillotine(p, s).has_value();
            }
            std::size_t need = k - chosen.size();
            std::size_t avail = 0;
            for (std::size_t w = from / 64; w < allowed.size(); ++w) {
                std::uint64_t word = allowed[w];
                if (w == from / 64) word &= ~0ull << (from % 64);
                avail += static_cast<std::size_t>(__builtin_popcountll(word));
            }
            if (avail < need) return false;
            for (std::size_t c = from; c < m; ++c) {
                if (!(allowed[c / 64] >> (c % 64) & 1)) continue;
                charge(1, "clique search");
                std::vector<std::uint64_t> narrowed(allowed.size());
                for (std::size_t w = 0; w < allowed.size(); ++w)
                    narrowed[w] = allowed[w] & adj.row(c)[w];
                chosen.push_back(static_cast<int>(c));
                if (self(self, narrowed, c + 1)) return true;
                chosen.pop_back();
            }
            return false;
        };
        if (!dfs(dfs, full, 0)) return false;
        out = chosen;
        return true;
    }

    // Feasibility of min-part value >= z. For the unconstrained-shape regime
    // the search space shrinks to inclusion-minimal rectangles (shrinking a
    // part keeps separation and the certificate), and for z == 0 to single
    // cells.
    bool feasible(const Int& z, ShapeKind kind, const std::vector<OracleCand>& cands,
                  std::vector<OracleCand>* witness) {
        std::vector<OracleCand> elig;
        if (kind == ShapeKind::AnyRect && z == 0) {
            for (int i = 0; i + 1 < static_cast<int>(g.xs.size()); ++i)
                for (int j = 0; j + 1 < static_cast<int>(g.ys.size()); ++j)
                    elig.push_back({i, i + 1, j, j + 1,
                                    g.rect_mass(i, i + 1, j, j + 1)});
        } else if (kind == ShapeKind::AnyRect) {
            charge(cands.size(), "minimal-rectangle filter");
            for (const OracleCand& c : cands) {
                if (c.val < z) continue;
                bool minimal =
                    (c.i + 1 == c.i2 || g.rect_mass(c.i + 1, c.i2, c.j, c.j2) < z) &&
                    (c.i2 - 1 == c.i || g.rect_mass(c.i, c.i2 - 1, c.j, c.j2) < z) &&
                    (c.j + 1 == c.j2 || g.rect_mass(c.i, c.i2, c.j + 1, c.j2) < z) &&
                    (c.j2 - 1 == c.j || g.rect_mass(c.i, c.i2, c.j, c.j2 - 1) < z);
                if (minimal) elig.push_back(c);
            }
        } else {
            charge(cands.size(), "value filter");
            for (const OracleCand& c : cands)
                if (c.val >= z) elig.push_back(c);
        }
        std::vector<int> found;
        if (!find_clique(elig, found)) return false;
        if (witness) {
            witness->clear();
            for (int c : found) witness->push_back(elig[c]);
        }
        return true;
    }
};

}  // namespace

MmsResult brute_force_mms(const GridValuation& v, const std::vector<Coord>& grid_x,
                          const std::vector<Coord>& grid_y, const Coord& s, int k,
                          const ShapeRegime& shape, bool guillotine_only,
                          std::uint64_t budget) {
    if (k < 1) throw InputError("oracle: k must be at least 1");
    if (s < 0) throw InputError("negative separation parameter");
    for (const auto* cs : {&grid_x, &grid_y}) {
        if (cs->size() < 2) throw InputError("oracle: grid needs two coordinates");
        for (std::size_t i = 0; i + 1 < cs->size(); ++i)
            if (!((*cs)[i] < (*cs)[i + 1]))
                throw InputError("oracle: grid not strictly increasing");
    }

    ScaledGrid grid = build_scaled_grid(v, grid_x, grid_y);
    const int nx = static_cast<int>(grid.xs.size()) - 1;
    const int ny = static_cast<int>(grid.ys.size()) - 1;
    Rect span(grid.xs.front(), grid.xs.back(), grid.ys.front(), grid.ys.back());

    const std::uint64_t rect_count =
        static_cast<std::uint64_t>(nx) * (nx + 1) / 2 * ny * (ny + 1) / 2;
    if (rect_count > budget)
        throw BudgetError("oracle: " + std::to_string(rect_count) +
                          " candidate rectangles exceed the budget of " +
                          std::to_string(budget));

    OracleSearch search(grid, s, k, guillotine_only, span, budget);
    search.charge(rect_count, "candidate enumeration");

    std::vector<OracleCand> cands;
    for (int i = 0; i < nx; ++i)
        for (int i2 = i + 1; i2 <= nx; ++i2)
            for (int j = 0; j < ny; ++j)
                for (int j2 = j + 1; j2 <= ny; ++j2) {
                    Rect r(grid.xs[i], grid.xs[i2], grid.ys[j], grid.ys[j2]);
                    if (!shape.admits(r)) continue;
                    cands.push_back({i, i2, j, j2, grid.rect_mass(i, i2, j, j2)});
                }
    if (cands.empty())
        throw InputError("oracle: no candidate rectangles under the shape regime");

    std::vector<Int> values;
    values.reserve(cands.size());
    for (const OracleCand& c : cands) values.push_back(c.val);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    if (!search.feasible(values.front(), shape.kind, cands, nullptr))
        throw InputError("oracle: no feasible partition (no " + std::to_string(k) +
                         " pairwise s-separated rectangles" +
                         (guillotine_only ? " with a guillotine structure)" : ")"));

    std::size_t lo = 0, hi = values.size() - 1;  // largest feasible index
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (search.feasible(values[mid], shape.kind, cands, nullptr))
            lo = mid;
        else
            hi = mid - 1;
    }

    std::vector<OracleCand> witness;
    if (!search.feasible(values[lo], shape.kind, cands, &witness))
        throw InvariantError("oracle: witness extraction failed");

    MmsResult res;
    res.value = grid.to_rat(values[lo]);
    res.method = MmsMethod::BruteForce;
    res.k = k;
    res.s = s;
    Partition p;
    for (const OracleCand& c : witness) p.parts.push_back(search.rect_of(c));
    p.region = span;
    res.partition = std::move(p);
    if (guillotine_only) {
        auto tree = certify_guillotine(res.partition, s);
        if (!tree) throw InvariantError("oracle: witness lost its certificate");
        res.tree = std::move(*tree);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Guillotine refinement of a 4^l-part separated layout.

namespace {

std::vector<Rect> refine_rounds(const std::vector<Rect>& parts, const Rect& region,
                                const Coord& s, int rounds) {
    if (rounds == 0) {
        if (parts.empty())
            throw InvariantError("refine: region left without a whole part");
        return {region};
    }
    const long quota = 1L << (2 * (rounds - 1));  // 4^(rounds-1)

    auto cut_with = [&](Axis axis) {
        return find_rectangle_cut_or_stack(parts, region, axis,
                                           static_cast<int>(quota),
                                           static_cast<int>(quota), s);
    };
    CutOrStack found = cut_with(Axis::Vertical);
    if (std::holds_alternative<KnifeStack>(found)) {
        // A long vertical stack always admits a horizontal cut through one of
        // its gaps, and the horizontal sweep stops no later than that gap.
        found = cut_with(Axis::Horizontal);
        if (std::holds_alternative<KnifeStack>(found))
            throw InvariantError("refine: no balanced cut on either axis");
    }
    const KnifeCut& cut = std::get<KnifeCut>(found);

    Rect low_reg = cut.axis == Axis::Vertical
                       ? Rect(region.x_lo, cut.strip.x_lo, region.y_lo, region.y_hi)
                       : Rect(region.x_lo, region.x_hi, region.y_lo, cut.strip.y_lo);
    Rect high_reg = cut.axis == Axis::Vertical
                        ? Rect(cut.strip.x_hi, region.x_hi, region.y_lo, region.y_hi)
                        : Rect(region.x_lo, region.x_hi, cut.strip.y_hi, region.y_hi);

    std::vector<Rect> low_parts, high_parts;
    for (const Rect& r : parts) {
        if (low_reg.contains(r))
            low_parts.push_back(r);
        else if (high_reg.contains(r))
            high_parts.push_back(r);
    }
    if (static_cast<long>(low_parts.size()) < quota ||
        static_cast<long>(high_parts.size()) < quota)
        throw InvariantError("refine: cut left a side short of whole parts");

    std::vector<Rect> out = refine_rounds(low_parts, low_reg, s, rounds - 1);
    std::vector<Rect> high = refine_rounds(high_parts, high_reg, s, rounds - 1);
    out.insert(out.end(), high.begin(), high.end());
    return out;
}

}  // namespace

std::vector<Rect> guillotine_refine(const std::vector<Rect>& mms_parts,
                                    const Rect& region, const Coord& s) {
    if (s < 0) throw InputError("negative separation parameter");
    int l = 0;
    std::size_t pow = 1;
    while (pow < mms_parts.size()) {
        pow *= 4;
        ++l;
    }
    if (pow != mms_parts.size())
        throw InputError("refine: number of parts must be a power of 4");
    for (const Rect& r : mms_parts)
        if (!region.contains(r)) throw InputError("refine: part outside region");
    for (std::size_t i = 0; i < mms_parts.size(); ++i)
        for (std::size_t j = i + 1; j < mms_parts.size(); ++j)
            if (!is_s_separated(mms_parts[i], mms_parts[j], s))
                throw InputError("refine: parts not pairwise s-separated");

    std::vector<Rect> regions = refine_rounds(mms_parts, region, s, l);
    for (std::size_t i = 0; i < regions.size(); ++i)
        for (std::size_t j = i + 1; j < regions.size(); ++j)
            if (!is_s_separated(regions[i], regions[j], s))
                throw InvariantError("refine: output regions not s-separated");
    return regions;
}

}  // namespace landdiv
