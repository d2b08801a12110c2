#include "flagf/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace flagf {

std::string format_double(double v)
{
    if (!std::isfinite(v))
        return "null";
    return fmt::format("{:.17g}", v);
}

std::string json_escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20)
                out += fmt::format("\\u{:04x}", static_cast<int>(c));
            else
                out += c;
        }
    }
    return out;
}

void JsonWriter::newline()
{
    out_ += '\n';
    out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::before_value()
{
    if (after_key_) {
        after_key_ = false;
        return;
    }
    if (!stack_.empty()) {
        if (!stack_.back().array)
            throw std::logic_error("JsonWriter: value inside object needs a key");
        if (stack_.back().count++ > 0)
            out_ += ',';
        newline();
    }
}

JsonWriter& JsonWriter::begin_object()
{
    before_value();
    out_ += '{';
    stack_.push_back({false, 0});
    return *this;
}

JsonWriter& JsonWriter::end_object()
{
    const bool empty = stack_.back().count == 0;
    stack_.pop_back();
    if (!empty)
        newline();
    out_ += '}';
    if (stack_.empty())
        out_ += '\n';
    return *this;
}

JsonWriter& JsonWriter::begin_array()
{
    before_value();
    out_ += '[';
    stack_.push_back({true, 0});
    return *this;
}

JsonWriter& JsonWriter::end_array()
{
    const bool empty = stack_.back().count == 0;
    stack_.pop_back();
    if (!empty)
        newline();
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k)
{
    if (stack_.empty() || stack_.back().array)
        throw std::logic_error("JsonWriter: key outside object");
    if (stack_.back().count++ > 0)
        out_ += ',';
    newline();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\": ";
    after_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v)
{
    before_value();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v)
{
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v)
{
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v)
{
    before_value();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view v)
{
    before_value();
    out_ += '"';
    out_ += json_escape(v);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::null()
{
    before_value();
    out_ += "null";
    return *this;
}

std::string SweepSummary::line() const
{
    return "KILL: " + kill + "; NK: " + nk + "; G1: " + g1;
}

std::string sweep_json(const ReportConfig& cfg, const SpaceSummary& space,
                       const std::vector<StructureSummary>& structures,
                       const std::vector<ClassReport>& reports, const SweepSummary& summary)
{
    JsonWriter w;
    w.begin_object();

    w.key("config").begin_object();
    w.field("n", cfg.n).field("m_blocks", cfg.m_blocks).field("k", cfg.k);
    w.key("grid").begin_object();
    w.field("min", cfg.grid.min).field("max", cfg.grid.max).field("step", cfg.grid.step);
    w.key("extra").begin_array();
    for (const auto& [s, t] : cfg.grid.extra)
        w.begin_array().value(s).value(t).end_array();
    w.end_array();
    w.end_object();
    w.field("seed", cfg.seed);
    w.field("kappa", cfg.kappa);
    w.end_object();

    w.key("space").begin_object();
    w.field("n", space.n).field("k", space.k).field("m_blocks", space.m_blocks);
    w.key("dims").begin_object();
    w.field("g", space.dim_g).field("h", space.dim_h).field("m", space.dim_m);
    w.field("m1", space.dim_m1).field("m2", space.dim_m2).field("m3", space.dim_m3);
    w.end_object();
    w.end_object();

    w.key("structures").begin_array();
    for (const auto& st : structures) {
        w.begin_object();
        w.field("id", st.id).field("kind", st.kind);
        w.key("signature").begin_array();
        for (int v : st.signature)
            w.value(v);
        w.end_array();
        w.key("polynomial").begin_array();
        for (double v : st.polynomial)
            w.value(v);
        w.end_array();
        w.key("checks").begin_object();
        w.field("identity", st.checks.identity_residual);
        w.field("equivariance", st.checks.equivariance_residual);
        w.field("commutator", st.checks.commutator_residual);
        w.field("theta_commutator", st.checks.theta_commutator);
        w.field("polynomial", st.checks.polynomial_residual);
        w.field("metric_compat", st.metric_compat);
        w.end_object();
        w.end_object();
    }
    w.end_array();

    w.key("sweep").begin_array();
    for (const auto& r : reports) {
        w.begin_object();
        w.field("structure", r.structure_id).field("s", r.s).field("t", r.t);
        w.key("residuals").begin_object();
        for (ClassName c : kAllClasses)
            w.field(to_string(c), r[c].residual);
        w.end_object();
        w.key("memberships").begin_object();
        for (ClassName c : kAllClasses)
            w.field(to_string(c), r[c].member);
        w.end_object();
        w.key("witness").begin_object();
        for (ClassName c : kAllClasses)
            w.key(to_string(c)).begin_array().value(r[c].witness.first).value(r[c].witness.second).end_array();
        w.end_object();
        w.end_object();
    }
    w.end_array();

    w.key("summary").begin_object();
    w.field("KILL", summary.kill).field("NK", summary.nk).field("G1", summary.g1);
    w.field("chain_violations", summary.chain_violations);
    w.field("text", summary.line());
    w.end_object();

    w.end_object();
    return w.str();
}

std::string sweep_csv(const std::vector<ClassReport>& reports, const SweepSummary& summary)
{
    std::string out = "s,t,kill_residual,nk_residual,g1_residual,kill,nk,g1\n";
    for (const auto& r : reports) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", format_double(r.s), format_double(r.t),
                           format_double(r[ClassName::Kill].residual),
                           format_double(r[ClassName::NK].residual),
                           format_double(r[ClassName::G1].residual), r[ClassName::Kill].member ? 1 : 0,
                           r[ClassName::NK].member ? 1 : 0, r[ClassName::G1].member ? 1 : 0);
    }
    out += "# KILL: " + summary.kill + "\n";
    out += "# NK: " + summary.nk + "\n";
    out += "# G1: " + summary.g1 + "\n";
    out += fmt::format("# chain_violations: {}\n", summary.chain_violations);
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot rename onto " + path.string());
    }
}

}  // namespace flagf
