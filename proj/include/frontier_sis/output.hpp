#pragma once

#include <cstdint>
#include <string>

#include "frontier_sis/dynamics.hpp"

namespace frontier_sis {

/// Columns t, g, h, max_I, total_I, S_probe_1..P; 17 significant digits.
std::string series_csv(const Trajectory& trajectory);
/// Columns x, S, I.
std::string snapshot_csv(const Snapshot& snapshot);
std::string snapshot_filename(const Snapshot& snapshot);
/// Outcome, spectral audit and run metadata as a JSON object.
std::string outcome_json(const SimResult& result, std::size_t n_nodes, std::uint64_t config_hash);

}  // namespace frontier_sis
