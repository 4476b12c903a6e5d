#pragma once

#include <string>
#include <vector>

#include "landdiv/allocation.hpp"
#include "landdiv/partition.hpp"

namespace landdiv {

// Exit codes: 0 success, 2 verification failure, 3 input error, 4 oracle
// budget exceeded. Human summaries go to stderr; files are machine-readable.
int run_cli(int argc, const char* const* argv);

// File formats shared by the subcommands.
std::string mms_result_to_json(const MmsResult& res);
std::string allocation_to_json(const Allocation& alloc,
                               const std::vector<AgentReport>& reports,
                               const std::string& note = "", int k_hat = 0);
Allocation allocation_from_json(const std::string& text);
std::vector<std::pair<std::string, std::vector<Rect>>> partitions_from_json(
    const std::string& text);

}  // namespace landdiv
