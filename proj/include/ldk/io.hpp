// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: flag and config-file parsing, dispatch to the
// computation modules, and serialization of every report as CSV or JSON.
// One command per process; artifacts are written atomically and embed the
// resolved configuration and toolkit version, so identical configurations
// produce byte-identical files.

#pragma once

#include <string>
#include <vector>

#include "ldk/capacity.hpp"
#include "ldk/profiles.hpp"

namespace ldk {

extern const char kToolkitVersion[];

// Name of the environment variable supplying the default precision when
// --bits is absent; the built-in fallback is 256.
extern const char kPrecisionEnvVar[];

// Common resolved settings shared by every command; command-specific flags
// stay with their command and are echoed into the artifact verbatim.
struct ExperimentConfig {
  std::string command;
  unsigned bits = 256;
  unsigned long long seed = 1;
  std::string out_path;  // empty writes the artifact to stdout
};

// {kind, ...params} with kinds disk, segment, polygon, annulus, unite,
// difference; children nest recursively.  Throws ConfigError on malformed
// input.
Region parse_region_json(const std::string& text);

// Radial profile: {"kind":"disk","r":R,"value":c}, {"kind":"annuli",
// "annuli":[{"r_lo":..,"r_hi":..,"value":..},...]}, or {"kind":"zero"}.
Profile parse_profile_json(const std::string& text);

// {"v1":{...},"v2":{...},"w":null}.  Only a null anti-diagonal part is
// accepted from the command line.
PotentialSpec parse_potential_json(const std::string& text);

// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
// 4 hypothesis-check failure.  Failures still try to leave a diagnostic
// JSON artifact at the output path.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace ldk
