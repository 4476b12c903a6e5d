#include "landdiv/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace landdiv {

using ordered_json = nlohmann::ordered_json;

void Instance::validate() const {
    if (s < 0) throw InputError("instance: negative separation parameter");
    if (shape.kind == ShapeKind::Fat && shape.r < 1)
        throw InputError("instance: fatness bound must be at least 1");
    if (land.degenerate()) throw InputError("instance: degenerate land");
    for (const Agent& a : agents)
        if (!(a.valuation.domain() == land))
            throw InputError("instance: agent '" + a.name +
                             "' valuation domain differs from the land");
}

namespace {

std::string agent_name(int i) {
    if (i < 26) return std::string(1, static_cast<char>('A' + i));
    return "G" + std::to_string(i + 1);
}

}  // namespace

Instance gen_uniform(const Rect& land, int n, const Coord& s) {
    if (n < 1) throw InputError("gen: need at least one agent");
    Instance inst;
    inst.land = land;
    inst.s = s;
    inst.shape = ShapeRegime::any_rect();
    for (int i = 0; i < n; ++i)
        inst.agents.push_back({agent_name(i), GridValuation::uniform(land, 1)});
    inst.validate();
    return inst;
}

Instance gen_random(std::uint64_t seed, const Rect& land, int n, const Coord& s,
                    int grid_x, int grid_y) {
    if (n < 1) throw InputError("gen: need at least one agent");
    if (grid_x < 1 || grid_y < 1) throw InputError("gen: grid dims must be >= 1");

    std::vector<Coord> xs, ys;
    for (int i = 0; i <= grid_x; ++i)
        xs.push_back(land.x_lo + Rat(i) * land.width() / grid_x);
    for (int j = 0; j <= grid_y; ++j)
        ys.push_back(land.y_lo + Rat(j) * land.height() / grid_y);

    std::mt19937_64 rng(seed);
    Instance inst;
    inst.land = land;
    inst.s = s;
    inst.shape = ShapeRegime::any_rect();
    for (int a = 0; a < n; ++a) {
        std::vector<std::vector<Rat>> cells;
        long total = 0;
        do {
            cells.assign(grid_x, std::vector<Rat>(grid_y));
            total = 0;
            for (int i = 0; i < grid_x; ++i)
                for (int j = 0; j < grid_y; ++j) {
                    // Plain modulus keeps the stream identical across
                    // platforms, unlike the standard distributions.
                    long draw = static_cast<long>(rng() % 100);
                    cells[i][j] = draw;
                    total += draw;
                }
        } while (total == 0);
        for (auto& col : cells)
            for (auto& m : col) m /= total;
        inst.agents.push_back(
            {agent_name(a), GridValuation(xs, ys, std::move(cells))});
    }
    inst.validate();
    return inst;
}

std::pair<std::vector<Rect>, std::vector<Rect>> gen_crossing_fixture(
    const Rat& r, const Rat& eps) {
    if (r < 1) throw InputError("crossing fixture: r must be at least 1");
    if (eps <= 0) throw InputError("crossing fixture: eps must be positive");
    Rat ceil_r(rat_ceil(r));
    if (ceil_r + 2 * eps - 1 > r)
        throw InputError("crossing fixture: eps too large for the r-fat side ratio");

    long count = rat_ceil_long(r) + 1;
    std::vector<Rect> vertical, horizontal;
    for (long i = 0; i < count; ++i) {
        vertical.emplace_back(Rat(i), Rat(i + 1), 1 - eps, ceil_r + eps);
        horizontal.emplace_back(1 - eps, ceil_r + eps, Rat(i), Rat(i + 1));
    }
    return {std::move(vertical), std::move(horizontal)};
}

namespace {

using Point = std::pair<Coord, Coord>;

Coord point_dist(const Point& a, const Point& b) {
    return std::max(rat_abs(a.first - b.first), rat_abs(a.second - b.second));
}

Rat round_to_grid(double x, int prec) {
    double scaled = std::round(std::ldexp(x, prec));
    Int num;
    mpz_set_d(num.get_mpz_t(), scaled);
    Rat r(num, Int(1) << prec);
    r.canonicalize();
    return r;
}

// Max over full selections (one point per set) of the minimum pairwise
// distance among the selected points.
Rat selection_min_dist_max(const std::vector<std::vector<Point>>& sets) {
    const int n = static_cast<int>(sets.size());
    std::vector<int> pick(n, 0);
    Rat best = -1;
    while (true) {
        Rat worst = -1;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                Rat d = point_dist(sets[a][pick[a]], sets[b][pick[b]]);
                if (worst < 0 || d < worst) worst = d;
            }
        if (worst > best) best = worst;
        int pos = n - 1;
        while (pos >= 0 && pick[pos] + 1 == static_cast<int>(sets[pos].size())) {
            pick[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++pick[pos];
    }
    return best;
}

}  // namespace

PolygonFixture gen_polygon_fixture(int n, const Coord& s) {
    if (n < 2) throw InputError("polygon fixture: need n >= 2");
    if (n > 6)
        throw InputError(
            "polygon fixture: selection enumeration supported up to n = 6");
    if (s <= 0) throw InputError("polygon fixture: need s > 0");

    const double pi = std::acos(-1.0);
    const double circumradius = 1.0 / (2.0 * std::sin(pi / (2 * n)));
    // For n = 2 the square stands on a vertex (adjacent vertices aligned
    // vertically); larger polygons get a small tilt so no edge is
    // axis-parallel. The margin is certified exactly after rationalizing.
    const double tilt = n == 2 ? 0.0 : 0.1;

    for (int prec : {40, 48}) {
        std::vector<Point> odd, even;
        for (int j = 0; j < 2 * n; ++j) {
            double angle = tilt + pi * j / n;
            Point p{round_to_grid(circumradius * std::cos(angle), prec),
                    round_to_grid(circumradius * std::sin(angle), prec)};
            (j % 2 == 0 ? odd : even).push_back(p);
        }

        Rat within = -1;
        for (const auto* set : {&odd, &even})
            for (std::size_t a = 0; a < set->size(); ++a)
                for (std::size_t b = a + 1; b < set->size(); ++b) {
                    Rat d = point_dist((*set)[a], (*set)[b]);
                    if (within < 0 || d < within) within = d;
                }

        std::vector<std::vector<Point>> sets(n - 1, odd);
        sets.push_back(even);
        Rat crossing = selection_min_dist_max(sets);
        if (!(crossing > 0) || !(within > crossing)) continue;

        Rat margin = within / crossing - 1;
        Rat eps = s * margin / (2 * (6 + 4 * margin));
        // Any scale strictly between these keeps every selection's closest
        // pair below s - 4*eps while within-set distances clear s + 2*eps.
        Rat scale_lo = (s + 2 * eps) / within;
        Rat scale_hi = (s - 4 * eps) / crossing;
        if (!(scale_lo < scale_hi)) continue;
        Rat scale = (scale_lo + scale_hi) / 2;

        Coord min_x, min_y;
        bool first = true;
        for (const auto& set : sets)
            for (const Point& p : set) {
                Coord x = p.first * scale, y = p.second * scale;
                if (first || x < min_x) min_x = x;
                if (first || y < min_y) min_y = y;
                first = false;
            }
        Coord pad = eps + s;
        Coord shift_x = pad - min_x, shift_y = pad - min_y;

        PolygonFixture fx;
        fx.pool_eps = eps;
        fx.scale = scale;
        fx.margin = margin;
        for (const auto& set : sets) {
            std::vector<Point> scaled;
            for (const Point& p : set)
                scaled.emplace_back(p.first * scale + shift_x,
                                    p.second * scale + shift_y);
            fx.point_sets.push_back(std::move(scaled));
        }

        Coord side = 0;
        for (const auto& set : fx.point_sets)
            for (const Point& p : set) {
                side = std::max(side, Coord(p.first + pad));
                side = std::max(side, Coord(p.second + pad));
            }
        Rect land(0, side, 0, side);

        Instance inst;
        inst.land = land;
        inst.s = s;
        inst.shape = ShapeRegime::square();
        Rat half = eps / 2;
        for (int a = 0; a < n; ++a) {
            std::vector<Rect> pools;
            for (const Point& p : fx.point_sets[a])
                pools.emplace_back(p.first - half, p.first + half,
                                   p.second - half, p.second + half);
            std::vector<Coord> xs{land.x_lo, land.x_hi};
            std::vector<Coord> ys{land.y_lo, land.y_hi};
            for (const Rect& pool : pools) {
                xs.push_back(pool.x_lo);
                xs.push_back(pool.x_hi);
                ys.push_back(pool.y_lo);
                ys.push_back(pool.y_hi);
            }
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            std::sort(ys.begin(), ys.end());
            ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

            std::vector<std::vector<Rat>> cells(xs.size() - 1,
                                                std::vector<Rat>(ys.size() - 1, Rat(0)));
            for (std::size_t i = 0; i + 1 < xs.size(); ++i)
                for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
                    Coord cx = (xs[i] + xs[i + 1]) / 2;
                    Coord cy = (ys[j] + ys[j + 1]) / 2;
                    for (const Rect& pool : pools)
                        if (pool.x_lo <= cx && cx <= pool.x_hi && pool.y_lo <= cy &&
                            cy <= pool.y_hi) {
                            Rat cell_area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
                            cells[i][j] = cell_area / pool.area();
                            break;
                        }
                }
            inst.agents.push_back(
                {agent_name(a), GridValuation(xs, ys, std::move(cells))});
        }
        inst.validate();
        fx.instance = std::move(inst);

        // Exact post-checks; a failure means the rounding margin was too
        // tight, so retry at higher precision.
        bool ok = true;
        for (const auto& set : fx.point_sets)
            for (std::size_t a = 0; a < set.size() && ok; ++a)
                for (std::size_t b = a + 1; b < set.size() && ok; ++b)
                    if (!(point_dist(set[a], set[b]) > s + 2 * eps)) ok = false;
        if (ok && !(selection_min_dist_max(fx.point_sets) < s - 4 * eps)) ok = false;
        if (!ok) continue;
        return fx;
    }
    throw InputError("polygon fixture: could not certify margins after rounding");
}

// ---------------------------------------------------------------------------
// Instance file format.

namespace {

const ordered_json& field(const ordered_json& obj, const char* key,
                          const std::string& path) {
    if (!obj.is_object()) throw InputError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(path + "." + key + ": missing field");
    return *it;
}

Rat rat_field(const ordered_json& v, const std::string& path) {
    if (v.is_string()) {
        try {
            return rat_parse(v.get<std::string>());
        } catch (const InputError& e) {
            throw InputError(path + ": " + e.what());
        }
    }
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
    throw InputError(path + ": expected a rational string");
}

std::vector<Coord> coord_list(const ordered_json& v, const std::string& path) {
    if (!v.is_array()) throw InputError(path + ": expected an array");
    std::vector<Coord> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(rat_field(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Rect rect_field(const ordered_json& v, const std::string& path) {
    auto xs = coord_list(field(v, "x", path), path + ".x");
    auto ys = coord_list(field(v, "y", path), path + ".y");
    if (xs.size() != 2 || ys.size() != 2)
        throw InputError(path + ": rectangle needs two x and two y coordinates");
    return Rect(xs[0], xs[1], ys[0], ys[1]);
}

ordered_json rect_json(const Rect& r) {
    return ordered_json{{"x", {rat_str(r.x_lo), rat_str(r.x_hi)}},
                        {"y", {rat_str(r.y_lo), rat_str(r.y_hi)}}};
}

}  // namespace

Instance instance_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("instance: invalid JSON: ") + e.what());
    }

    Instance inst;
    inst.land = rect_field(field(doc, "land", "instance"), "instance.land");
    inst.s = rat_field(field(doc, "s", "instance"), "instance.s");

    const ordered_json& shape = field(doc, "shape", "instance");
    if (shape.is_string()) {
        std::string kind = shape.get<std::string>();
        if (kind == "square")
            inst.shape = ShapeRegime::square();
        else if (kind == "rectangle")
            inst.shape = ShapeRegime::any_rect();
        else
            throw InputError("instance.shape: unknown shape '" + kind + "'");
    } else if (shape.is_object()) {
        inst.shape =
            ShapeRegime::fat(rat_field(field(shape, "fat", "instance.shape"),
                                       "instance.shape.fat"));
    } else {
        throw InputError("instance.shape: expected a string or {\"fat\": ...}");
    }

    const ordered_json& agents = field(doc, "agents", "instance");
    if (!agents.is_array()) throw InputError("instance.agents: expected an array");
    for (std::size_t a = 0; a < agents.size(); ++a) {
        std::string path = "instance.agents[" + std::to_string(a) + "]";
        const ordered_json& aj = agents[a];
        const ordered_json& name = field(aj, "name", path);
        if (!name.is_string()) throw InputError(path + ".name: expected a string");
        auto xs = coord_list(field(aj, "x_coords", path), path + ".x_coords");
        auto ys = coord_list(field(aj, "y_coords", path), path + ".y_coords");
        const ordered_json& cells = field(aj, "cells", path);
        if (!cells.is_array()) throw InputError(path + ".cells: expected an array");
        std::vector<std::vector<Rat>> masses;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::string cpath = path + ".cells[" + std::to_string(i) + "]";
            if (!cells[i].is_array()) throw InputError(cpath + ": expected an array");
            std::vector<Rat> col;
            for (std::size_t j = 0; j < cells[i].size(); ++j)
                col.push_back(rat_field(cells[i][j],
                                        cpath + "[" + std::to_string(j) + "]"));
            masses.push_back(std::move(col));
        }
        try {
            inst.agents.push_back({name.get<std::string>(),
                                   GridValuation(xs, ys, std::move(masses))});
        } catch (const InputError& e) {
            throw InputError(path + ": " + e.what());
        }
    }
    inst.validate();
    return inst;
}

std::string instance_to_json(const Instance& inst) {
    ordered_json doc;
    doc["land"] = rect_json(inst.land);
    doc["s"] = rat_str(inst.s);
    switch (inst.shape.kind) {
        case ShapeKind::Square:
            doc["shape"] = "square";
            break;
        case ShapeKind::AnyRect:
            doc["shape"] = "rectangle";
            break;
        case ShapeKind::Fat:
            doc["shape"] = ordered_json{{"fat", rat_str(inst.shape.r)}};
            break;
    }
    doc["agents"] = ordered_json::array();
    for (const Agent& a : inst.agents) {
        ordered_json aj;
        aj["name"] = a.name;
        aj["x_coords"] = ordered_json::array();
        for (const Coord& c : a.valuation.x_coords) aj["x_coords"].push_back(rat_str(c));
        aj["y_coords"] = ordered_json::array();
        for (const Coord& c : a.valuation.y_coords) aj["y_coords"].push_back(rat_str(c));
        aj["cells"] = ordered_json::array();
        for (const auto& col : a.valuation.cells) {
            ordered_json cj = ordered_json::array();
            for (const Rat& m : col) cj.push_back(rat_str(m));
            aj["cells"].push_back(std::move(cj));
        }
        doc["agents"].push_back(std::move(aj));
    }
    return doc.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read instance file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write instance file: " + path);
    out << instance_to_json(inst);
}

}  // namespace landdiv
