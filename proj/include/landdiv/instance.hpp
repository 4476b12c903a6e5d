#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "landdiv/partition.hpp"
#include "landdiv/valuation.hpp"

namespace landdiv {

struct Agent {
    std::string name;
    GridValuation valuation;
};

// A division problem: the land, the separation parameter, the agents, and
// the family of usable piece shapes.
struct Instance {
    Rect land;
    Coord s;
    ShapeRegime shape;
    std::vector<Agent> agents;

    void validate() const;
};

// n identical uniform agents of total value 1 each.
Instance gen_uniform(const Rect& land, int n, const Coord& s);

// Deterministic-in-seed random cell masses on a uniform grid, normalized to
// total value 1 per agent.
Instance gen_random(std::uint64_t seed, const Rect& land, int n, const Coord& s,
                    int grid_x, int grid_y);

// Two sets of ceil(r)+1 pairwise-disjoint rectangles such that every
// rectangle of one set overlaps every rectangle of the other. Rejects eps
// for which the stated side ratio ceil(r)+2*eps-1 would exceed r.
std::pair<std::vector<Rect>, std::vector<Rect>> gen_crossing_fixture(
    const Rat& r, const Rat& eps);

// Point sets and pool instance witnessing that no allocation can give every
// agent a positive fraction of her maximin share once s > 0.
struct PolygonFixture {
    std::vector<std::vector<std::pair<Coord, Coord>>> point_sets;  // n sets of n
    Rat pool_eps;      // pool side length (= l-inf pool diameter)
    Rat scale;         // applied to the unit-edge polygon coordinates
    Rat margin;        // within/cross distance ratio minus 1
    Instance instance; // square pools of value 1 per point, one agent per set
};

// Builds rotated regular 2n-gon vertex sets (the first n-1 agents share the
// odd vertices, the last takes the even ones), rationalizes the coordinates,
// certifies the within-set vs representative-set distance margin exactly,
// and scales so that each agent's pools are an s-separated partition of
// value 1 each while every full selection of pools contains a pair closer
// than s. Requires n >= 2 and s > 0.
PolygonFixture gen_polygon_fixture(int n, const Coord& s);

// Instance file round trip. Schema violations are reported with the path of
// the offending field.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

}  // namespace landdiv
