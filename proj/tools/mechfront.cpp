#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mechfront/findopt.hpp"
#include "mechfront/frontier.hpp"
#include "mechfront/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mechfront;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConsistency = 3;
constexpr int kExitDomain = 4;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidSettingError("cannot read file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidSettingError("cannot write file: " + path.string());
    out << text;
}

/// Everything a command needs, resolved from the config file plus CLI
/// overrides. The space lives here so mechanisms can reference it.
struct Run {
    json cfg;
    fs::path cfg_dir;
    std::unique_ptr<ProfileSpace> space;
    std::optional<ProblemSpec> problem;
    fs::path out_dir;

    fs::path resolve(const std::string& rel) const {
        fs::path p(rel);
        return p.is_absolute() ? p : cfg_dir / p;
    }
};

AxiomSet parse_axioms(const std::vector<std::string>& tokens) {
    AxiomSet ax;
    for (const auto& t : tokens) {
        if (t == "anon")
            ax.anonymity = true;
        else if (t == "neut")
            ax.neutrality = true;
        else if (t == "unan")
            ax.unanimity = true;
        else if (t == "pareto")
            ax.pareto = true;
        else if (t == "condorcet")
            ax.condorcet = true;
        else
            throw InvalidSettingError("unknown axiom: " + t);
    }
    return ax;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(tok);
    return out;
}

DesideratumFn build_desideratum(const Run& run, const ProfileSpace& space) {
    const json& d = run.cfg.at("desideratum");
    if (d.is_string()) {
        const std::string name = d.get<std::string>();
        if (name == "plurality") return build_plurality(space);
        if (name == "veto") return build_veto(space);
        if (name == "condorcet") return build_condorcet(space);
        if (name == "borda") return build_positional(space, ScoringFunction::borda(space.setting().m));
        throw InvalidSettingError("unknown desideratum name: " + name);
    }
    if (d.is_object() && d.contains("csv"))
        return import_desideratum_csv(read_file(run.resolve(d.at("csv").get<std::string>())), space);
    throw InvalidSettingError("desideratum must be a name or {\"csv\": path}");
}

ProfileDistribution build_distribution(const Run& run, const ProfileSpace& space) {
    if (!run.cfg.contains("distribution") || run.cfg.at("distribution") == "uniform")
        return ProfileDistribution::uniform(space.size());
    const std::string path = run.cfg.at("distribution").get<std::string>();
    // CSV columns: profile_index, numerator, denominator
    std::istringstream in(read_file(run.resolve(path)));
    std::vector<Rat> weights(space.size(), Rat(0));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (!std::isdigit(static_cast<unsigned char>(line[0]))) continue;
        std::istringstream cells(line);
        std::string c0, c1, c2;
        if (!std::getline(cells, c0, ',') || !std::getline(cells, c1, ',') ||
            !std::getline(cells, c2))
            throw InvalidSettingError("distribution CSV row needs 3 columns");
        while (!c2.empty() && (c2.back() == '\r' || c2.back() == ' ')) c2.pop_back();
        const int p = std::stoi(c0);
        if (p < 0 || p >= space.size())
            throw InvalidSettingError("distribution CSV profile index out of range");
        weights[p] = parse_rat(c1 + "/" + c2);
    }
    ProfileDistribution dist{std::move(weights)};
    dist.validate(space.size());
    return dist;
}

struct Overrides {
    std::string eps, beta, axioms, deficit;
    int jobs = 1;
    int sample_grid = 100;
};

Run load_run(const std::string& config_path, const Overrides& ov, bool need_problem) {
    Run run;
    fs::path cfg(config_path);
    run.cfg = json::parse(read_file(cfg));
    run.cfg_dir = cfg.has_parent_path() ? cfg.parent_path() : fs::path(".");

    const json& st = run.cfg.at("setting");
    Setting setting(st.at("n").get<int>(), st.at("m").get<int>());
    const std::string orders = run.cfg.value("orders", "strict");
    OrderKind kind;
    if (orders == "strict")
        kind = OrderKind::Strict;
    else if (orders == "weak")
        kind = OrderKind::Weak;
    else
        throw InvalidSettingError("orders must be strict or weak");
    run.space = std::make_unique<ProfileSpace>(setting, kind);

    run.out_dir = run.resolve(run.cfg.value("output_dir", "out"));

    if (need_problem) {
        DesideratumFn d = build_desideratum(run, *run.space);

        std::string deficit = run.cfg.value("deficit", "worst");
        if (!ov.deficit.empty()) deficit = ov.deficit;
        DeficitKind dk;
        if (deficit == "worst")
            dk = DeficitKind::WorstCase;
        else if (deficit == "exante")
            dk = DeficitKind::ExAnte;
        else
            throw InvalidSettingError("deficit must be worst or exante");

        std::vector<std::string> ax_tokens;
        if (run.cfg.contains("axioms"))
            for (const auto& a : run.cfg.at("axioms")) ax_tokens.push_back(a.get<std::string>());
        if (!ov.axioms.empty()) ax_tokens = split_commas(ov.axioms);
        AxiomSet axioms = parse_axioms(ax_tokens);

        std::optional<ProfileDistribution> dist;
        if (dk == DeficitKind::ExAnte) dist = build_distribution(run, *run.space);
        run.problem.emplace(*run.space, std::move(d), dk, std::move(dist), axioms);
    }
    return run;
}

Rat require_rat(const json& cfg, const std::string& key, const std::string& override_str) {
    if (!override_str.empty()) return parse_rat(override_str);
    if (cfg.contains(key)) return parse_rat(cfg.at(key).get<std::string>());
    throw InvalidSettingError("missing required rational: " + key);
}

Mechanism load_mechanism(const Run& run, const std::string& spec_str) {
    const std::string builtin_prefix = "builtin:";
    if (spec_str.rfind(builtin_prefix, 0) == 0)
        return builtin(spec_str.substr(builtin_prefix.size()), *run.space);
    const fs::path path = run.resolve(spec_str);
    const std::string text = read_file(path);
    if (path.extension() == ".csv") return import_mechanism_csv(text, *run.space);
    return import_mechanism_json(text, *run.space);
}

void print_signature(const std::string& label, const Signature& sig) {
    std::cout << label << ": eps = " << rat_str(sig.eps) << ", deficit = " << rat_str(sig.def)
              << "\n";
}

/// Midpoint validation solves split across jobs; each worker owns a session.
ValidationReport run_validation(const ParetoFrontier& frontier, const ProblemSpec& problem,
                                int jobs) {
    if (jobs <= 1 || frontier.points.size() < 3) return validate(frontier, problem);
    ValidationReport rep;
    const auto& pts = frontier.points;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (!(pts[i].eps < pts[i + 1].eps) || !(pts[i].deficit > pts[i + 1].deficit))
            rep.issues.push_back({pts[i].eps, "monotonicity violated"});
    const int segments = static_cast<int>(pts.size()) - 1;
    std::vector<std::optional<Rat>> got(segments);
    std::vector<std::thread> workers;
    const int nw = std::min(jobs, segments);
    for (int w = 0; w < nw; ++w)
        workers.emplace_back([&, w] {
            FindOptSession session(problem);
            for (int i = w; i < segments; i += nw)
                got[i] = session.solve((pts[i].eps + pts[i + 1].eps) / 2).deficit;
        });
    for (auto& t : workers) t.join();
    for (int i = 0; i < segments; ++i) {
        rep.midpoint_solves += 1;
        const Rat expected = (pts[i].deficit + pts[i + 1].deficit) / 2;
        if (*got[i] != expected)
            rep.issues.push_back({(pts[i].eps + pts[i + 1].eps) / 2, "midpoint deficit mismatch"});
    }
    return rep;
}

int cmd_frontier(const std::string& config, const Overrides& ov, bool do_validate) {
    Run run = load_run(config, ov, /*need_problem=*/true);
    ParetoFrontier frontier = compute_frontier(*run.problem);
    if (frontier.points.size() == 1 && frontier.points[0].deficit == 0)
        std::cout << "warning: delta(0) = 0; the frontier is the single point (0, 0)\n";
    std::cout << "bounds (" << frontier.points.size() << "), lp_calls = " << frontier.lp_calls
              << ":\n";
    for (const auto& pt : frontier.points)
        std::cout << "  eps = " << rat_str(pt.eps) << "  deficit = " << rat_str(pt.deficit) << "\n";
    write_file(run.out_dir / "frontier.json", export_frontier_json(frontier));
    write_file(run.out_dir / "frontier.csv", export_frontier_csv(frontier));
    if (frontier.points.back().eps > 0)
        write_file(run.out_dir / "frontier_samples.csv",
                   export_frontier_samples_csv(frontier, ov.sample_grid));
    for (size_t i = 0; i < frontier.points.size(); ++i)
        write_file(run.out_dir / ("mech_" + std::to_string(i) + ".json"),
                   export_mechanism_json(frontier.points[i].representative));
    if (do_validate) {
        ValidationReport rep = run_validation(frontier, *run.problem, ov.jobs);
        std::cout << "validation: " << rep.midpoint_solves << " midpoint solves, "
                  << rep.issues.size() << " issues\n";
        for (const auto& issue : rep.issues)
            std::cout << "  issue at eps = " << rat_str(issue.eps) << ": " << issue.what << "\n";
        if (!rep.ok()) return kExitConsistency;
    }
    return kExitOk;
}

int cmd_optimize(const std::string& config, const Overrides& ov) {
    Run run = load_run(config, ov, /*need_problem=*/true);
    const Rat eps = require_rat(run.cfg, "eps", ov.eps);
    FindOptResult res = find_opt(*run.problem, eps);
    std::cout << "eps = " << rat_str(eps) << "  deficit = " << rat_str(res.deficit)
              << "  lp constraints = " << res.lp_stats.constraints
              << "  pivots = " << res.lp_stats.pivots << "\n";
    write_file(run.out_dir / "mechanism.json", export_mechanism_json(res.mechanism));
    return kExitOk;
}

int cmd_analyze(const std::string& config, const Overrides& ov) {
    Run run = load_run(config, ov, /*need_problem=*/true);
    if (!run.cfg.contains("mechanism"))
        throw InvalidSettingError("analyze needs a mechanism path or builtin name");
    Mechanism mech = load_mechanism(run, run.cfg.at("mechanism").get<std::string>());
    ManipulabilityWitness manip = manipulability_witness(mech);
    print_signature("signature", {manip.value, deficit_of(mech, *run.problem)});
    if (manip.agent >= 0) {
        const Profile& p = run.space->profile(manip.profile_idx);
        std::cout << "manipulation witness: agent " << manip.agent << ", profile "
                  << manip.profile_idx << ", misreport order " << manip.misreport_order_id
                  << ", contour level " << manip.k_level << "\n";
        (void)p;
    } else {
        std::cout << "manipulation witness: none (strategyproof)\n";
    }
    if (run.problem->deficit_kind == DeficitKind::WorstCase) {
        DeficitWitness worst = deficit_worst_witness(mech, run.problem->d);
        std::cout << "worst profile: " << worst.profile_idx
                  << "  deficit there = " << rat_str(worst.value) << "\n";
    }
    return kExitOk;
}

int cmd_hybrid(const std::string& config, const Overrides& ov) {
    Run run = load_run(config, ov, /*need_problem=*/true);
    if (!run.cfg.contains("mechanisms") || run.cfg.at("mechanisms").size() != 2)
        throw InvalidSettingError("hybrid needs exactly two mechanism entries");
    const Rat beta = require_rat(run.cfg, "beta", ov.beta);
    Mechanism phi = load_mechanism(run, run.cfg.at("mechanisms")[0].get<std::string>());
    Mechanism psi = load_mechanism(run, run.cfg.at("mechanisms")[1].get<std::string>());
    Mechanism hyb = make_hybrid(phi, psi, beta);
    const Signature s_phi = signature(phi, *run.problem);
    const Signature s_psi = signature(psi, *run.problem);
    const Signature s_hyb = signature(hyb, *run.problem);
    print_signature("phi", s_phi);
    print_signature("psi", s_psi);
    print_signature("hybrid", s_hyb);
    // Thm 2: the hybrid is dominated by the coordinatewise convex combination
    const Rat one_m_b = Rat(1) - beta;
    print_signature("convex bound",
                    {one_m_b * s_phi.eps + beta * s_psi.eps, one_m_b * s_phi.def + beta * s_psi.def});
    write_file(run.out_dir / "hybrid.json", export_mechanism_json(hyb));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pareto frontiers between approximate strategyproofness and desideratum deficit"};
    app.require_subcommand(1);

    std::string config;
    Overrides ov;
    bool do_validate = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON run configuration")->required();
        sub->add_option("--eps", ov.eps, "manipulability bound a/b (overrides config)");
        sub->add_option("--beta", ov.beta, "hybrid weight a/b (overrides config)");
        sub->add_option("--axioms", ov.axioms, "comma list: anon,neut,unan,pareto,condorcet");
        sub->add_option("--deficit", ov.deficit, "worst | exante (overrides config)");
        sub->add_option("--jobs", ov.jobs, "parallel validation solves");
        sub->add_option("--sample-grid", ov.sample_grid, "frontier sample count");
    };

    CLI::App* c_frontier = app.add_subcommand("frontier", "compute the Pareto frontier");
    add_common(c_frontier);
    c_frontier->add_flag("--validate", do_validate, "independent midpoint validation");
    CLI::App* c_optimize = app.add_subcommand("optimize", "solve FindOpt at one eps");
    add_common(c_optimize);
    CLI::App* c_analyze = app.add_subcommand("analyze", "signature of a given mechanism");
    add_common(c_analyze);
    CLI::App* c_hybrid = app.add_subcommand("hybrid", "mix two mechanisms");
    add_common(c_hybrid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (app.got_subcommand(c_frontier)) return cmd_frontier(config, ov, do_validate);
        if (app.got_subcommand(c_optimize)) return cmd_optimize(config, ov);
        if (app.got_subcommand(c_analyze)) return cmd_analyze(config, ov);
        return cmd_hybrid(config, ov);
    } catch (const DomainTooLargeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const InternalConsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConsistency;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}
