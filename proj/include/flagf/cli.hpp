#pragma once

// Command-line front end: verify, classify and sweep subcommands.

#include "flagf/classify.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace flagf::cli {

enum class Format { Json, Csv, Text };

struct RunConfig {
    int n = 5;
    int m_blocks = 1;
    int k = 4;
    std::string structure;  ///< --f
    std::optional<double> s, t;
    GridSpec grid;
    Format format = Format::Text;
    std::string out;  ///< file (verify/classify) or directory (sweep)
    std::uint64_t seed = 1;
    std::optional<double> kappa;
    int threads = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Full verification suite. 0 when every check passes, 1 otherwise, 2 on an
/// invalid configuration.
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Residuals and memberships of one structure at (s, t).
int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Sweeps every structure (or just --f) over the grid; with json/csv writes
/// one file per structure into the --out directory.
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (program name first) and dispatches. FLAGF_THREADS caps the
/// sweep thread count.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Thread count from FLAGF_THREADS (>= 1), defaulting to the hardware count.
int threads_from_env();

/// File-system safe form of a structure id ("-f1" -> "neg_f1").
std::string file_stem(const std::string& id);

}  // namespace flagf::cli
