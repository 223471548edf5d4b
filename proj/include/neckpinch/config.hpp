#pragma once

#include <string>

#include "neckpinch/profile.hpp"

namespace neckpinch {

// Parses the key = value run configuration ('#' comments, blank lines ok).
// Unknown keys and malformed lines are rejected with the line number; class
// constraints (d >= 2, varsigma0 in [1/2,2], ...) are enforced on the result.
SimConfig parse_config(const std::string& text);
SimConfig load_config_file(const std::string& path);

// Canonical echo of every key (defaults included); reparsing the echo yields
// the same config, and the echo is what the manifest records.
std::string config_echo(const SimConfig& cfg);

// FNV-1a of the canonical echo; stable run identifier.
std::string config_run_id(const SimConfig& cfg);

}  // namespace neckpinch
