#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ersatz/config.hpp"
#include "ersatz/estimates.hpp"

namespace ersatz {

/// CSV with one row per (stored slice, node): t, x1..xd, value, branch flag.
std::string slice_csv(const Grid& grid, const Trajectory& traj);

/// CSV with one row per refinement level pair: h, sup_diff, order.
std::string convergence_csv(const ConvergenceTable& table);

/// CSV with one row per K: K, sup_diff_prev, max_pos_increment,
/// active_set_fraction.
std::string sweep_csv(const std::vector<KSweepEntry>& entries);

struct RunManifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::string tool_version;
    std::uint64_t seed = 0;
    double h = 0.0;
    double big_k = 0.0;
    double wall_seconds = 0.0;

    std::string to_text() const;
};

/// Named files produced by one driver run; written atomically per file.
struct OutputBundle {
    std::map<std::string, std::string> files;

    void add(const std::string& name, std::string content);
    /// Writes every file under `dir`, creating it if needed.
    void write_all(const std::string& dir) const;
};

}  // namespace ersatz
