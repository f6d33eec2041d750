#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "moranipd/strategy.hpp"

namespace moranipd {

// Strategy text format, one directive per line (';' also separates
// directives; '#' starts a comment):
//   memone <init 0|1> <p_cc> <p_cd> <p_dc> <p_dd>
//   fsm <n>; start <state> <C|D>; <state> <C|D> -> <state> <C|D> ...
//   lookup <first_k> <depth> <opening e.g. CCD> <2^(first_k+2*depth) probs>
//   scripted <name> [param]
// parse(serialize(s)) reproduces s exactly. Errors carry the 1-based line
// number of the offending directive.
StrategySpec parse_strategy(std::string_view text, std::string name = "");
std::string serialize_strategy(const StrategySpec& spec);

// Roster file: one strategy per line, '"<display name>" = <strategy text>'.
// Multi-directive strategies use ';' separators so each entry stays on one
// line. Duplicate display names are rejected.
std::vector<StrategySpec> parse_roster(std::string_view text);
std::string serialize_roster(const std::vector<StrategySpec>& roster);

std::vector<StrategySpec> load_roster_file(const std::string& path);
void save_roster_file(const std::vector<StrategySpec>& roster, const std::string& path);

// Fingerprint of a roster (order-sensitive), stamped into cache metadata so
// a cache can refuse to serve a different roster.
std::uint64_t roster_hash(const std::vector<StrategySpec>& roster);

}  // namespace moranipd
