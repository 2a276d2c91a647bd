#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ersatz {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by every driver: 0 success, 2 validation failure,
/// 3 numerical failure (divergence detected).
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct DriverOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;  // 0 = ERSATZ_THREADS env, else 1
    std::optional<std::uint64_t> seed;
};

/// Thread count from the flag, then the ERSATZ_THREADS env var, then 1.
int resolve_threads(int flag_value);

int cmd_solve(const DriverOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep_k(const DriverOptions& opt, std::ostream& out, std::ostream& err);
int cmd_refine_h(const DriverOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const DriverOptions& opt, std::ostream& out, std::ostream& err);

/// Decomposes a row-major symmetric matrix and prints the weights and the
/// reconstruction residual.
int cmd_decompose(const std::vector<double>& entries, double delta,
                  double hat_delta, std::ostream& out, std::ostream& err);

}  // namespace ersatz
