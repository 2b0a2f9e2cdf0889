// rholder: first Dirichlet eigenpairs on 1-D model spaces, symmetrization,
// reverse-Hoelder comparison and stability diagnostics.
//
// Exit codes: 0 success, 1 usage error, 2 solver failure, 3 comparison
// violation. Reports embed the resolved run configuration; identical
// configuration gives byte-identical output.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rholder/pipeline.hpp"
#include "rholder/serialize.hpp"
#include "rholder/stability.hpp"

namespace {

using namespace rholder;

struct CliArgs {
    RunConfig cfg;
    bool has_cap = false;
    std::vector<double> interval;  // two entries when given
    std::string q_spec;
    bool samples = false;
    int sweep_rows = 0;  // > 0 selects the family sweep
    std::string sweep_family;
};

std::vector<double> parse_q_list(const std::string& spec) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string tok = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) {
            if (tok == "inf" || tok == "Inf" || tok == "INF")
                out.push_back(std::numeric_limits<double>::infinity());
            else
                out.push_back(std::stod(tok));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::domain_error("empty exponent list");
    return out;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);  // binary keeps LF endings as-is
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

// Resolves defaults and validates everything the modules would reject, so
// bad flags fail as usage errors (exit 1) before any solve starts.
ModelParams resolve(CliArgs& args) {
    RunConfig& cfg = args.cfg;
    if (cfg.K == 0.0) cfg.K = cfg.N - 1.0;
    ModelParams mp = make_model(cfg.K, cfg.N);  // throws domain_error on bad K, N
    if (args.has_cap == !args.interval.empty())
        throw std::domain_error("exactly one of --cap and --interval is required");
    if (args.has_cap) {
        cfg.domain_kind = "cap";
        if (!(cfg.v > 0.0 && cfg.v < 1.0))
            throw std::domain_error("--cap mass must lie in (0, 1)");
    } else {
        cfg.domain_kind = "interval";
        cfg.a = args.interval[0];
        cfg.b = args.interval[1];
        if (!(cfg.a >= 0.0 && cfg.a < cfg.b && cfg.b <= mp.L))
            throw std::domain_error("--interval endpoints must satisfy 0 <= a < b <= L");
    }
    if (const char* env = std::getenv("CHITI_GRID_N")) {
        cfg.grid_n = std::atoi(env);
        if (cfg.grid_n < 16) throw std::domain_error("CHITI_GRID_N too small");
    }
    return mp;
}

Domain domain_of(const RunConfig& cfg) {
    if (cfg.domain_kind == "cap") return Cap{cfg.v};
    return Interval{cfg.a, cfg.b};
}

PipelineOptions pipeline_options(const RunConfig& cfg) {
    PipelineOptions opt;
    opt.solve.grid_n = cfg.grid_n;
    opt.tol = cfg.tol;
    return opt;
}

int cmd_eigen(CliArgs& args) {
    ModelParams mp = resolve(args);
    const RunConfig& cfg = args.cfg;
    SolveOptions sopt;
    sopt.grid_n = cfg.grid_n;
    EigenPair ep = cfg.domain_kind == "cap" ? first_eigen_cap(mp, cfg.v, sopt)
                                            : first_eigen_interval(mp, cfg.a, cfg.b, sopt);
    std::printf("lambda = %.6f\n", ep.lambda);
    if (!cfg.out_path.empty()) {
        if (cfg.format == "csv") {
            std::string text = "t,value\n";
            char buf[80];
            for (std::size_t i = 0; i < ep.values.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ep.grid.nodes[i],
                              ep.values[i]);
                text += buf;
            }
            write_output(cfg.out_path, text);
        } else {
            ordered_json j;
            j["config"] = to_json(cfg);
            j["result"] = to_json(ep, args.samples);
            write_output(cfg.out_path, j.dump(2) + "\n");
        }
    }
    return 0;
}

int cmd_chiti(CliArgs& args) {
    ModelParams mp = resolve(args);
    RunConfig& cfg = args.cfg;
    if (args.q_spec.empty()) {
        cfg.q_grid = {cfg.p, 2 * cfg.p, 4 * cfg.p, 8 * cfg.p,
                      std::numeric_limits<double>::infinity()};
    } else {
        cfg.q_grid = parse_q_list(args.q_spec);
    }
    for (double q : cfg.q_grid)
        if (!(q >= cfg.p)) throw std::domain_error("every q must satisfy q >= p");
    if (!(cfg.p > 0.0)) throw std::domain_error("--p must be positive");

    PipelineRun run = run_pipeline(mp, domain_of(cfg), pipeline_options(cfg));
    ChitiReport rep = chiti_for(run, cfg.p, cfg.q_grid, cfg.tol);

    if (cfg.format == "csv") {
        write_output(cfg.out_path, csv_slack(rep));
    } else {
        ordered_json j;
        j["config"] = to_json(cfg);
        j["report"] = to_json(rep);
        write_output(cfg.out_path, j.dump(2) + "\n");
    }
    return rep.violation ? 3 : 0;
}

int cmd_stability(CliArgs& args) {
    RunConfig& cfg = args.cfg;
    StabilityOptions sopt;
    if (!args.q_spec.empty()) sopt.q_grid = parse_q_list(args.q_spec);
    cfg.q_grid = sopt.q_grid;

    if (args.sweep_rows > 0) {
        if (args.sweep_family != "caps-to-interval")
            throw std::domain_error("unknown sweep family: " + args.sweep_family);
        // The sweep interpolates from the cap toward a target interval;
        // default target is the centered (L/4, 3L/4).
        if (cfg.K == 0.0) cfg.K = cfg.N - 1.0;
        ModelParams mp = make_model(cfg.K, cfg.N);
        double a = args.interval.empty() ? 0.25 * mp.L : args.interval[0];
        double b = args.interval.empty() ? 0.75 * mp.L : args.interval[1];
        cfg.domain_kind = "interval";
        cfg.a = a;
        cfg.b = b;
        if (const char* env = std::getenv("CHITI_GRID_N")) cfg.grid_n = std::atoi(env);
        std::vector<Interval> family = caps_to_interval_family(mp, a, b, args.sweep_rows);
        std::vector<StabilityReport> rows =
            run_stability_sweep(mp, family, pipeline_options(cfg), sopt);
        // Emit farthest-from-cap first so the ratio column reads as a
        // decrease toward 1.
        std::reverse(family.begin(), family.end());
        std::reverse(rows.begin(), rows.end());
        if (cfg.format == "csv") {
            write_output(cfg.out_path, csv_sweep(family, rows));
        } else {
            ordered_json j;
            j["config"] = to_json(cfg);
            j["family"] = ordered_json::array();
            for (const Interval& iv : family) j["family"].push_back(to_json(Domain{iv}));
            j["reports"] = ordered_json::array();
            for (const StabilityReport& r : rows) j["reports"].push_back(to_json(r));
            write_output(cfg.out_path, j.dump(2) + "\n");
        }
        return 0;
    }

    ModelParams mp = resolve(args);
    PipelineRun run = run_pipeline(mp, domain_of(cfg), pipeline_options(cfg));
    StabilityReport rep = stability_report(run, sopt);
    if (cfg.format == "csv") {
        write_output(cfg.out_path, csv_gaps(rep));
    } else {
        ordered_json j;
        j["config"] = to_json(cfg);
        j["report"] = to_json(rep);
        write_output(cfg.out_path, j.dump(2) + "\n");
    }
    return 0;
}

void add_common_flags(CLI::App* sub, CliArgs& args, bool with_p) {
    sub->add_option("--N", args.cfg.N, "dimension parameter, must be > 1")->required();
    sub->add_option("--K", args.cfg.K, "curvature bound (default N-1)");
    sub->add_option("--cap", args.cfg.v, "cap domain by mass in (0, 1)")
        ->each([&args](const std::string&) { args.has_cap = true; });
    sub->add_option("--interval", args.interval, "interval domain endpoints a b")
        ->expected(2);
    sub->add_option("--grid-n", args.cfg.grid_n,
                    "solver grid resolution (env CHITI_GRID_N overrides)");
    sub->add_option("--out", args.cfg.out_path, "output file (default stdout)");
    sub->add_option("--format", args.cfg.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    if (with_p) {
        sub->add_option("--p", args.cfg.p, "base exponent of the comparison");
        sub->add_option("--q", args.q_spec,
                        "comma-separated exponent list, inf allowed "
                        "(default p,2p,4p,8p,inf)");
    }
    sub->add_option("--tol-num", args.cfg.tol.tol_num, "inequality slack tolerance");
    sub->add_option("--tol-eq", args.cfg.tol.tol_eq, "equality detection tolerance");
    sub->add_option("--tol-band", args.cfg.tol.band_rel, "crossing dead-band, relative");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-eigenpair comparison tool for 1-D model spaces"};
    app.require_subcommand(1);

    CliArgs args;
    args.cfg.K = 0.0;  // resolved to N-1 unless --K given

    CLI::App* eigen = app.add_subcommand("eigen", "first Dirichlet eigenpair of a domain");
    add_common_flags(eigen, args, false);
    eigen->add_flag("--samples", args.samples, "include eigenfunction samples in JSON");

    CLI::App* chiti =
        app.add_subcommand("chiti", "reverse-Hoelder comparison against the matched cap");
    add_common_flags(chiti, args, true);

    CLI::App* stab = app.add_subcommand("stability", "norm-gap stability diagnostics");
    add_common_flags(stab, args, true);
    stab->add_option("--sweep", [&args](const std::vector<std::string>& vals) {
            args.sweep_family = vals[0];
            args.sweep_rows = std::atoi(vals[1].c_str());
            return args.sweep_rows > 1;
        },
        "family sweep: --sweep caps-to-interval <rows>")
        ->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);  // prints help or the parse diagnostic
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*eigen) return cmd_eigen(args);
        if (*chiti) return cmd_chiti(args);
        return cmd_stability(args);
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible request: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
