#include "flagf/cli.hpp"

#include "flagf/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace flagf::cli {

namespace {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

std::string space_name(int n, int m_blocks)
{
    std::string s = fmt::format("SO({})/", n);
    for (int i = 0; i < m_blocks; ++i)
        s += "SO(2)x";
    return s + fmt::format("SO({})", n - 2 * m_blocks - 1);
}

PhiSpace build_space(const RunConfig& cfg)
{
    return build_phi_space(build_automorphism(cfg.n, cfg.m_blocks, cfg.k));
}

double kappa_for(const RunConfig& cfg)
{
    return cfg.kappa ? *cfg.kappa : static_cast<double>(cfg.n - 1);
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out)
{
    if (cfg.out.empty())
        out << content;
    else
        write_atomic(cfg.out, content);
}

LieElement random_in(const Subspace& m, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Eigen::VectorXd c(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        c(i) = coef(rng);
    return m.element(c);
}

std::vector<Check> run_checks(const RunConfig& cfg, const PhiSpace& ps)
{
    std::vector<Check> checks;
    auto add = [&](std::string name, bool pass, double value, std::string detail = {}) {
        checks.push_back({std::move(name), pass, value, std::move(detail)});
    };

    const RegularityReport reg = check_regularity(ps);
    add("regularity", reg.all() && reg.consistent(), reg.min_singular_restricted,
        fmt::format("direct_sum={} restricted_nonsingular={} kernel_stable={} theta_no_unit_eigenvalue={}",
                    reg.direct_sum, reg.restricted_nonsingular, reg.kernel_stable,
                    reg.theta_no_unit_eigenvalue));

    const int big_n = ps.g->dim();
    add("dimensions", ps.h->dim() + ps.m->dim() == big_n &&
                          (cfg.m_blocks != 1 || ps.m->dim() == 3 * cfg.n - 7),
        ps.m->dim(), fmt::format("dim g={} dim h={} dim m={}", big_n, ps.h->dim(), ps.m->dim()));
    if (cfg.k > 2 * cfg.m_blocks)
        add("isotropy_dimension", ps.h->dim() == expected_isotropy_dim(cfg.n, cfg.m_blocks), ps.h->dim(),
            fmt::format("expected {}", expected_isotropy_dim(cfg.n, cfg.m_blocks)));

    {
        double hom = 0.0, iso = 0.0;
        const auto& b = ps.g->basis();
        for (const auto& x : b)
            for (const auto& y : b) {
                hom = std::max(hom, (ps.phi.apply(bracket(x, y)) - bracket(ps.phi.apply(x), ps.phi.apply(y))).max_abs());
                iso = std::max(iso, std::abs(trace_form(ps.phi.apply(x), ps.phi.apply(y)) - trace_form(x, y)));
            }
        add("automorphism", hom < tol::num && iso < tol::num, std::max(hom, iso),
            fmt::format("bracket={:.3g} isometry={:.3g}", hom, iso));
        const double thk = ps.theta.dim() == 0
                               ? 0.0
                               : (ps.theta.pow(cfg.k).matrix() - Eigen::MatrixXd::Identity(ps.theta.dim(), ps.theta.dim()))
                                     .cwiseAbs()
                                     .maxCoeff();
        add("theta_order", thk < tol::num, thk, fmt::format("||theta^{} - id||", cfg.k));
    }

    const auto fs = generate_f_structures(ps);
    const auto ps_list = generate_product_structures(ps);
    std::vector<CanonicalStructure> all = fs;
    all.insert(all.end(), ps_list.begin(), ps_list.end());
    {
        double worst = 0.0;
        bool ok = true;
        for (const auto& cs : all) {
            const StructureCheck c = verify_structure(cs, ps, all);
            ok = ok && c.ok(1e-10);
            worst = std::max({worst, c.identity_residual, c.equivariance_residual, c.commutator_residual,
                              c.theta_commutator, c.polynomial_residual});
        }
        const int fcount = count_up_to_sign(fs);
        std::string detail = fmt::format("{} up to sign ({} total); {} product structures", fcount, fs.size(),
                                         ps_list.size());
        bool count_ok = true;
        if (cfg.k == 4)
            count_ok = fcount == 1;
        else if (cfg.k == 6 && cfg.m_blocks == 1)
            count_ok = fcount == 4 && ps_list.size() == 8;
        add("structures", ok && count_ok, worst, detail);
    }

    if (cfg.m_blocks == 1 && (cfg.k == 4 || cfg.k == 6)) {
        const GoldenReport g = golden_action_check(ps);
        std::string detail = fmt::format("{} structures, {} inputs", g.structures_checked, g.inputs_checked);
        if (!g.mismatches.empty()) {
            const auto& mm = g.mismatches.front();
            detail += fmt::format("; first mismatch {} on {} at ({},{}): expected {} got {}", mm.structure,
                                  mm.input, mm.row, mm.col, mm.expected, mm.actual);
        }
        add("golden_actions", g.passed(), g.max_deviation, detail);
    }

    if (cfg.m_blocks != 1)
        return checks;

    const TripleSplit split = build_split(ps);
    {
        const SplitChecks c = check_split(split, ps);
        const double worst = std::max({c.orthogonality, c.adh_invariance, c.bracket_relations});
        add("splitting", c.spans_m && worst < 1e-10 && c.dims[0] == 2 && c.dims[1] == 2 * (cfg.n - 3) &&
                             c.dims[2] == cfg.n - 3,
            worst,
            fmt::format("dims=({}, {}, {}) orthogonality={:.3g} ad(h)={:.3g} brackets={:.3g}", c.dims[0],
                        c.dims[1], c.dims[2], c.orthogonality, c.adh_invariance, c.bracket_relations));
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> param(0.1, 5.0);
    const double kappa = kappa_for(cfg);
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto p = MetricParams::make(param(rng), param(rng), kappa);
            const LieElement x = random_in(*split.adapted, rng);
            const LieElement y = random_in(*split.adapted, rng);
            worst = std::max(worst, (u_tensor_closed(split, p, x, y) - u_tensor_solved(split, p, x, y)).max_abs());
        }
        add("u_oracle", worst < 1e-9, worst, "closed form vs linear solve, 100 random pairs");
        double at_one = 0.0;
        const auto p1 = MetricParams::make(1.0, 1.0, kappa);
        for (const auto& x : split.adapted->basis())
            for (const auto& y : split.adapted->basis())
                at_one = std::max(at_one, u_tensor_solved(split, p1, x, y).max_abs());
        add("u_vanishes_at_1_1", at_one < 1e-12, at_one);
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto p = MetricParams::make(param(rng), param(rng), kappa);
            for (const auto& f : fs)
                worst = std::max(worst, check_metric_compat(f, split, p).residual);
        }
        add("metric_compatibility", worst < 1e-10, worst, "all f-structures, 20 random (s,t)");
    }
    {
        const auto nr = check_naturally_reductive(split, MetricParams::make(1.0, 1.0, kappa));
        add("naturally_reductive_1_1", nr.holds, nr.residual);
    }
    return checks;
}

std::string checks_text(const std::vector<Check>& checks, const std::string& header)
{
    std::string s = header + "\n";
    for (const auto& c : checks)
        s += fmt::format("[{}] {:<24} {:<12.3g} {}\n", c.pass ? "PASS" : "FAIL", c.name, c.value, c.detail);
    return s;
}

std::string checks_json(const RunConfig& cfg, const PhiSpace& ps, const std::vector<Check>& checks, bool passed)
{
    JsonWriter w;
    w.begin_object();
    w.key("config").begin_object();
    w.field("n", cfg.n).field("m_blocks", cfg.m_blocks).field("k", cfg.k).field("seed", cfg.seed);
    w.field("kappa", kappa_for(cfg));
    w.end_object();
    w.key("space").begin_object();
    w.field("n", cfg.n).field("k", cfg.k);
    w.key("dims").begin_object();
    w.field("g", ps.g->dim()).field("h", ps.h->dim()).field("m", ps.m->dim());
    w.end_object();
    w.end_object();
    w.key("checks").begin_array();
    for (const auto& c : checks) {
        w.begin_object();
        w.field("name", c.name).field("pass", c.pass).field("value", c.value).field("detail", c.detail);
        w.end_object();
    }
    w.end_array();
    w.field("passed", passed);
    w.end_object();
    return w.str();
}

}  // namespace

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::optional<PhiSpace> ps_opt;
    try {
        ps_opt.emplace(build_space(cfg));
        if (cfg.kappa && !(*cfg.kappa > 0.0))
            throw std::invalid_argument("--kappa must be positive");
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const PhiSpace& ps = *ps_opt;
    try {
        const auto checks = run_checks(cfg, ps);
        const bool passed = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
        const std::string header = fmt::format("verify {} as a {}-symmetric space: {}",
                                               space_name(cfg.n, cfg.m_blocks), cfg.k, passed ? "pass" : "FAIL");
        emit(cfg, cfg.format == Format::Json ? checks_json(cfg, ps, checks, passed) : checks_text(checks, header), out);
        return passed ? kExitOk : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::optional<PhiSpace> ps_opt;
    std::optional<MetricParams> params;
    try {
        if (cfg.m_blocks != 1)
            throw std::invalid_argument("classify needs --m-blocks 1");
        if (!cfg.s || !cfg.t)
            throw std::invalid_argument("classify needs --s and --t");
        ps_opt.emplace(build_space(cfg));
        params = MetricParams::make(*cfg.s, *cfg.t, kappa_for(cfg));
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const PhiSpace& ps = *ps_opt;

    const auto fs = generate_f_structures(ps);
    const CanonicalStructure* f = find_structure(fs, cfg.structure);
    if (!f) {
        std::string known;
        for (const auto& s : up_to_sign(fs))
            known += (known.empty() ? "" : ", ") + s.id;
        err << "error: unknown structure '" << cfg.structure << "' (known: " << known << ")\n";
        return kExitUsage;
    }

    const TripleSplit split = build_split(ps);
    const Compatibility compat = check_metric_compat(*f, split, *params);
    std::array<Membership, 3> res;
    for (ClassName c : kAllClasses)
        res[static_cast<int>(c)] = membership(*f, split, *params, c);

    auto verdict = [](const Membership& m) {
        return m.member ? "member" : (m.indeterminate ? "indeterminate" : "non-member");
    };

    std::string text;
    if (cfg.format == Format::Json) {
        JsonWriter w;
        w.begin_object();
        w.field("structure", f->id).field("n", cfg.n).field("k", cfg.k);
        w.field("s", params->s).field("t", params->t).field("kappa", params->kappa);
        w.field("metric_compat", compat.residual);
        w.key("residuals").begin_object();
        for (ClassName c : kAllClasses)
            w.field(to_string(c), res[static_cast<int>(c)].residual);
        w.end_object();
        w.key("memberships").begin_object();
        for (ClassName c : kAllClasses)
            w.field(to_string(c), res[static_cast<int>(c)].member);
        w.end_object();
        w.end_object();
        text = w.str();
    } else if (cfg.format == Format::Csv) {
        text = "structure,s,t,kill_residual,nk_residual,g1_residual,kill,nk,g1\n";
        text += fmt::format("{},{},{},{},{},{},{},{},{}\n", f->id, format_double(params->s),
                            format_double(params->t), format_double(res[0].residual),
                            format_double(res[1].residual), format_double(res[2].residual), res[0].member ? 1 : 0,
                            res[1].member ? 1 : 0, res[2].member ? 1 : 0);
    } else {
        text = fmt::format("{} on {} (k={}) at (s,t)=({}, {})\n", f->id, space_name(cfg.n, 1), cfg.k,
                           params->s, params->t);
        text += fmt::format("metric-compatible: {} (residual {:.3g})\n", compat.holds ? "yes" : "no", compat.residual);
        for (ClassName c : kAllClasses) {
            const Membership& m = res[static_cast<int>(c)];
            text += fmt::format("{}: {} (residual {:.6g})\n", to_string(c), verdict(m), m.residual);
        }
    }
    try {
        emit(cfg, text, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

std::string file_stem(const std::string& id)
{
    std::string s;
    for (char c : id) {
        if (c == '-' && s.empty())
            s += "neg_";
        else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            s += c;
        else if (c == '-')
            s += 'm';
        else if (c == ',')
            s += '_';
    }
    return s;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::optional<PhiSpace> ps_opt;
    std::vector<std::pair<double, double>> grid;
    try {
        if (cfg.m_blocks != 1)
            throw std::invalid_argument("sweep needs --m-blocks 1");
        ps_opt.emplace(build_space(cfg));
        grid = make_grid(cfg.grid);
        if (cfg.kappa && !(*cfg.kappa > 0.0))
            throw std::invalid_argument("--kappa must be positive");
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const PhiSpace& ps = *ps_opt;

    const auto fs = generate_f_structures(ps);
    std::vector<CanonicalStructure> targets;
    if (cfg.structure.empty()) {
        targets = up_to_sign(fs);
    } else if (const auto* f = find_structure(fs, cfg.structure)) {
        targets.push_back(*f);
    } else {
        err << "error: unknown structure '" << cfg.structure << "'\n";
        return kExitUsage;
    }

    try {
        const TripleSplit split = build_split(ps);
        const auto product = generate_product_structures(ps);
        std::vector<CanonicalStructure> all = fs;
        all.insert(all.end(), product.begin(), product.end());
        const double kappa = kappa_for(cfg);

        SpaceSummary space{cfg.n, cfg.m_blocks, cfg.k, ps.g->dim(), ps.h->dim(), ps.m->dim(),
                           split.m1->dim(), split.m2->dim(), split.m3->dim()};
        ReportConfig rc{cfg.n, cfg.m_blocks, cfg.k, cfg.grid, cfg.seed, kappa};

        std::filesystem::path dir = cfg.out.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.out);
        if (cfg.format != Format::Text)
            std::filesystem::create_directories(dir);

        for (const auto& f : targets) {
            const auto reports = sweep(f, split, grid, cfg.threads);
            SweepSummary summary;
            summary.kill = characteristic_set(f, split, ClassName::Kill, cfg.grid).describe();
            summary.nk = characteristic_set(f, split, ClassName::NK, cfg.grid).describe();
            summary.g1 = characteristic_set(f, split, ClassName::G1, cfg.grid).describe();
            for (const auto& r : reports)
                summary.chain_violations += r.chain_ok() ? 0 : 1;

            out << f.id << ": " << summary.line() << "\n";
            if (cfg.format == Format::Text)
                continue;

            StructureSummary st{f.id, std::string(to_string(f.kind)), f.signature, f.theta_polynomial,
                                verify_structure(f, ps, all),
                                check_metric_compat(f, split, MetricParams::make(1.0, 1.0, kappa)).residual};
            const std::string stem = file_stem(f.id);
            if (cfg.format == Format::Json)
                write_atomic(dir / (stem + ".json"), sweep_json(rc, space, {st}, reports, summary));
            else
                write_atomic(dir / (stem + ".csv"), sweep_csv(reports, summary));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int threads_from_env()
{
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1)
        hw = 1;
    if (const char* env = std::getenv("FLAGF_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            return static_cast<int>(std::min<long>(v, hw));
    }
    return hw;
}

namespace {

std::vector<std::pair<double, double>> parse_points(const std::string& text)
{
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--extra-points expects s:t pairs separated by commas");
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    }
    return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Canonical f-structures on the flag manifolds SO(n)/SO(2)xSO(n-3)"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.threads = threads_from_env();
    std::string format = "text";
    std::string extra;
    std::optional<double> kappa;
    double s = 0.0, t = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "matrix dimension of SO(n)");
        sub->add_option("--m-blocks", cfg.m_blocks, "number of SO(2) factors");
        sub->add_option("--k", cfg.k, "order of the generating automorphism");
        sub->add_option("--format", format, "json, csv or text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--out", cfg.out, "output file (verify/classify) or directory (sweep)");
        sub->add_option("--seed", cfg.seed, "seed for randomized checks");
        sub->add_option("--kappa", kappa, "trace-form normalization (default n-1)");
        sub->add_option("--f", cfg.structure, "structure id, e.g. f0 or f1..f4");
        sub->add_option("--grid-min", cfg.grid.min);
        sub->add_option("--grid-max", cfg.grid.max);
        sub->add_option("--grid-step", cfg.grid.step);
        sub->add_option("--extra-points", extra, "extra grid points as s:t,s:t");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    common(verify);
    CLI::App* classify = app.add_subcommand("classify", "class memberships of one structure at (s,t)");
    common(classify);
    classify->add_option("--s", s)->required();
    classify->add_option("--t", t)->required();
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep the (s,t) grid and locate characteristic sets");
    common(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!extra.empty())
            cfg.grid.extra = parse_points(extra);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    cfg.kappa = kappa;
    cfg.format = format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text;

    if (verify->parsed())
        return cmd_verify(cfg, out, err);
    if (classify->parsed()) {
        cfg.s = s;
        cfg.t = t;
        return cmd_classify(cfg, out, err);
    }
    return cmd_sweep(cfg, out, err);
}

}  // namespace flagf::cli
