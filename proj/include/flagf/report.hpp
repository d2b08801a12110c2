#pragma once

// Deterministic JSON / CSV emitters for sweep reports. Floats are written
// with 17 significant digits so that reports round-trip exactly.

#include "flagf/classify.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace flagf {

/// Minimal streaming JSON writer with stable formatting (2-space indent,
/// keys in insertion order).
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view v);
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& null();

    template <class T>
    JsonWriter& field(std::string_view k, const T& v)
    {
        key(k);
        return value(v);
    }

    const std::string& str() const { return out_; }

private:
    void before_value();
    void newline();

    std::string out_;
    struct Level {
        bool array;
        int count;
    };
    std::vector<Level> stack_;
    bool after_key_ = false;
};

/// "%.17g"-style formatting; "null" for non-finite values.
std::string format_double(double v);

std::string json_escape(std::string_view s);

struct SpaceSummary {
    int n = 0;
    int m_blocks = 1;
    int k = 0;
    int dim_g = 0, dim_h = 0, dim_m = 0;
    int dim_m1 = 0, dim_m2 = 0, dim_m3 = 0;
};

struct StructureSummary {
    std::string id;
    std::string kind;
    std::vector<int> signature;
    std::vector<double> polynomial;
    StructureCheck checks;
    double metric_compat = 0.0;
};

struct SweepSummary {
    std::string kill, nk, g1;
    int chain_violations = 0;

    /// "KILL: ...; NK: ...; G1: ..."
    std::string line() const;
};

struct ReportConfig {
    int n = 0;
    int m_blocks = 1;
    int k = 0;
    GridSpec grid;
    std::uint64_t seed = 0;
    double kappa = 0.0;
};

std::string sweep_json(const ReportConfig& cfg, const SpaceSummary& space,
                       const std::vector<StructureSummary>& structures,
                       const std::vector<ClassReport>& reports, const SweepSummary& summary);

/// Header "s,t,kill_residual,nk_residual,g1_residual,kill,nk,g1", one row per
/// report, then the summary as '#' comment lines.
std::string sweep_csv(const std::vector<ClassReport>& reports, const SweepSummary& summary);

/// Writes to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace flagf
