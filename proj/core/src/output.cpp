#include "ersatz/output.hpp"

#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace ersatz {

namespace {

std::string fmt(double v) { return ::fmt::format("{:.17g}", v); }

}  // namespace

std::string slice_csv(const Grid& grid, const Trajectory& traj) {
    std::ostringstream os;
    os << "t";
    for (int k = 1; k <= grid.dim(); ++k) os << ",x" << k;
    os << ",value,branch\r\n";
    for (size_t s = 0; s < traj.slices.size(); ++s) {
        const auto& v = traj.slices[s];
        const auto& bp = traj.branch_p[s];
        for (int i = 0; i < grid.node_count(); ++i) {
            os << fmt(traj.times[s]);
            auto x = grid.coord(i);
            for (int k = 0; k < grid.dim(); ++k) os << "," << fmt(x[k]);
            os << "," << fmt(v[i]) << "," << int(bp[i]) << "\r\n";
        }
    }
    return os.str();
}

std::string convergence_csv(const ConvergenceTable& table) {
    std::ostringstream os;
    os << "h,sup_diff,order\r\n";
    for (size_t i = 0; i < table.h.size(); ++i) {
        os << fmt(table.h[i]) << ",";
        if (i > 0) os << fmt(table.sup_diff[i - 1]);
        os << ",";
        if (i > 1) os << fmt(table.order[i - 2]);
        os << "\r\n";
    }
    return os.str();
}

std::string sweep_csv(const std::vector<KSweepEntry>& entries) {
    std::ostringstream os;
    os << "K,sup_diff_prev,max_pos_increment,active_set_fraction\r\n";
    for (const auto& e : entries)
        os << fmt(e.k) << "," << fmt(e.sup_diff_prev) << ","
           << fmt(e.max_pos_increment) << ","
           << fmt(e.traj.active_set_fraction()) << "\r\n";
    return os.str();
}

std::string RunManifest::to_text() const {
    std::ostringstream os;
    os << "command " << command << "\n";
    os << "config_hash " << fmt::format("{:016x}", config_hash) << "\n";
    os << "tool_version " << tool_version << "\n";
    os << "seed " << seed << "\n";
    os << "h " << fmt(h) << "\n";
    os << "K " << fmt(big_k) << "\n";
    os << "wall_seconds " << fmt(wall_seconds) << "\n";
    return os.str();
}

void OutputBundle::add(const std::string& name, std::string content) {
    files[name] = std::move(content);
}

void OutputBundle::write_all(const std::string& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(errc::io_error,
                    fmt::format("cannot create output directory '{}'", dir));
    for (const auto& [name, content] : files) {
        fs::path target = fs::path(dir) / name;
        fs::path tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out)
                throw Error(errc::io_error,
                            fmt::format("cannot write '{}'", tmp.string()));
            out << content;
            if (!out)
                throw Error(errc::io_error,
                            fmt::format("write failed for '{}'", tmp.string()));
        }
        fs::rename(tmp, target, ec);
        if (ec)
            throw Error(errc::io_error,
                        fmt::format("cannot move '{}' into place", tmp.string()));
    }
}

}  // namespace ersatz
