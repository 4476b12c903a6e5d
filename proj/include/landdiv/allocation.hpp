#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "landdiv/instance.hpp"
#include "landdiv/knife.hpp"
#include "landdiv/partition.hpp"

namespace landdiv {

// No way to pick one representative per set with all picks pairwise
// disjoint.
struct NoSelectionError : Error {
    using Error::Error;
};

struct Allocation {
    std::vector<std::pair<std::string, Rect>> assignments;  // input agent order
    Rect region;
    Coord s;

    const Rect& piece_of(const std::string& name) const;
    // Pairwise s-separation, containment, non-degeneracy.
    void validate() const;
};

// Names of the decision branches taken, for replay tests and reports.
using AllocTrace = std::vector<std::string>;

// One agent inside an allocation procedure: her normalized valuation, the
// fixed maximin rectangles when the procedure counts whole parts (empty in
// value-cut modes), and an optional query log.
struct AgentView {
    std::string name;
    const GridValuation* v = nullptr;
    std::vector<Rect> parts;
    QueryLog* log = nullptr;
};

// One pairwise-disjoint representative from each set of pairwise-disjoint
// r-fat rectangles. Greedy minimum-width elimination with an exhaustive
// product-space fallback; throws NoSelectionError when the fallback proves
// no selection exists.
std::vector<Rect> select_disjoint_representatives(
    const std::vector<std::vector<Rect>>& sets, const Rat& r);

// Wraps every rectangle of every agent's s-separated r-fat maximin
// partition by s, selects pairwise-disjoint representatives, and unwraps:
// each agent receives one of her own parts and the result is s-separated.
Allocation allocate_fat(const Instance& inst, const Rat& r,
                        const std::vector<std::vector<Rect>>& partitions);

enum class TwoMode {
    WholeLandK3,  // both agents bring 3 maximin rectangles of the region
    SubsetV7      // both agents value the region at least 7 (normalized)
};

Allocation allocate_two(const AgentView& a, const AgentView& b,
                        const Rect& region, const Coord& s, TwoMode mode,
                        AllocTrace* trace = nullptr);

// Smallest region value that guarantees each of n agents a value-1
// rectangle: 1, 7, 17, then max{2*prev, prev + 2n + 4}.
Rat v_req(int n);

enum class ThreeMode {
    WholeLandK14,  // 14 maximin rectangles per agent
    SubsetV17      // each agent values the region at least 17
};

Allocation allocate_three(const std::vector<AgentView>& agents,
                          const Rect& region, const Coord& s, ThreeMode mode,
                          AllocTrace* trace = nullptr);

// Four agents with 24 maximin rectangles each on the whole region.
Allocation allocate_four(const std::vector<AgentView>& agents,
                         const Rect& region, const Coord& s,
                         AllocTrace* trace = nullptr);

// Any n >= 1; every agent must value the region at least v_req(n). Each
// agent's piece is worth at least 1 under her normalized valuation.
Allocation allocate_recursive(const std::vector<AgentView>& agents,
                              const Rect& region, const Coord& s,
                              AllocTrace* trace = nullptr);

struct AgentReport {
    std::string name;
    Rat achieved;     // value of the piece under the original valuation
    Rat bound;        // guaranteed value, original units
    Rat dp_value;     // per-part guarantee of the DP partition (total scaled to 1)
    std::string bound_kind;
    std::uint64_t evals = 0;
    std::uint64_t cuts = 0;
    std::optional<Rat> oracle_bound;  // exhaustive bound, when budget allows
};

struct PipelineResult {
    Allocation allocation;
    std::vector<AgentReport> reports;
    int k_hat = 0;          // parts per agent requested from the DP
    Int mms_k_equivalent;   // 4 * k_hat^2
    std::string note;
};

// End-to-end solver for the rectangle regime: per agent, compute a k-part
// s-separated guillotine partition within eps of optimal, normalize to it,
// and run the n-agent allocator. Each agent's piece is worth at least her
// guillotine maximin value minus eps (times her total).
PipelineResult allocate_pipeline(const Instance& inst, const Rat& eps,
                                 std::uint64_t oracle_budget = 0,
                                 AllocTrace* trace = nullptr);

}  // namespace landdiv
