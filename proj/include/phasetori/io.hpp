#pragma once

#include <map>
#include <string>

#include "phasetori/continuation.hpp"
#include "phasetori/fold.hpp"

namespace phasetori {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value file; '#' comments, blank lines ignored.
using Config = std::map<std::string, std::string>;

Config parse_config(const std::string& path);
double cfg_double(const Config& c, const std::string& key, double fallback);
int cfg_int(const Config& c, const std::string& key, int fallback);
std::string cfg_str(const Config& c, const std::string& key, const std::string& fallback);

std::string format_g17(double x);

// All writers go through a temp file and an atomic rename.
void write_branch_csv(const std::string& path, const Branch& branch);
void write_fold_csv(const std::string& path, const FoldCurve& curve);
void write_orbit_csv(const std::string& path, const CollocationScheme& scheme,
                     const OrbitSegment& orbit);
void write_events_json(const std::string& path, const Branch& branch);
void write_text_atomic(const std::string& path, const std::string& body);

// Orbit snapshots along a branch (every stride-th accepted point).
void write_orbits_json(const std::string& path, const Branch& branch, int stride);
OrbitSegment read_orbit_json(const std::string& path, int id);
// First event of the given code ("SN", "TR", ...) or the index-th event.
OrbitSegment read_event_orbit(const std::string& path, const std::string& code, int index);

}  // namespace phasetori
