#include "rholder/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rholder {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json json_numbers(const std::vector<double>& xs) {
    ordered_json arr = ordered_json::array();
    for (double x : xs) arr.push_back(json_number(x));
    return arr;
}

ordered_json json_opt(const std::optional<double>& x) {
    if (!x) return nullptr;
    return json_number(*x);
}

}  // namespace

ordered_json json_number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

ordered_json to_json(const Domain& dom) {
    ordered_json j;
    if (const Cap* cap = std::get_if<Cap>(&dom)) {
        j["kind"] = "cap";
        j["v"] = cap->v;
    } else {
        const Interval& iv = std::get<Interval>(dom);
        j["kind"] = "interval";
        j["a"] = iv.a;
        j["b"] = iv.b;
    }
    return j;
}

ordered_json to_json(const RunConfig& cfg) {
    ordered_json j;
    j["N"] = cfg.N;
    j["K"] = cfg.K;
    if (cfg.domain_kind == "cap")
        j["domain"] = to_json(Domain{Cap{cfg.v}});
    else
        j["domain"] = to_json(Domain{Interval{cfg.a, cfg.b}});
    j["p"] = cfg.p;
    j["q_grid"] = json_numbers(cfg.q_grid);
    j["grid_n"] = cfg.grid_n;
    j["tolerances"] = {{"tol_num", cfg.tol.tol_num},
                       {"tol_eq", cfg.tol.tol_eq},
                       {"tol_band", cfg.tol.band_rel}};
    j["output"] = {{"path", cfg.out_path}, {"format", cfg.format}};
    return j;
}

ordered_json to_json(const StepProfile& prof) {
    ordered_json j;
    j["breakpoints"] = prof.breakpoints;
    j["levels"] = prof.levels;
    return j;
}

ordered_json to_json(const ChitiReport& rep) {
    ordered_json j;
    j["p"] = rep.p;
    j["q_grid"] = json_numbers(rep.q_grid);
    j["slack"] = json_numbers(rep.slack);
    j["r1"] = json_opt(rep.r1);
    j["sign_changes"] = rep.sign_changes;
    j["cumulative_margin"] = rep.cumulative_margin;
    j["equality_case"] = rep.equality_case;
    j["alpha"] = rep.alpha;
    j["v"] = rep.v;
    j["violation"] = rep.violation;
    j["notes"] = rep.notes;
    return j;
}

ordered_json to_json(const StabilityReport& rep) {
    ordered_json j;
    j["q_grid"] = json_numbers(rep.q_grid);
    j["gaps"] = json_numbers(rep.gaps);
    j["delta"] = rep.delta;
    j["sup_gap"] = rep.sup_gap;
    j["alpha"] = rep.alpha;
    j["v"] = rep.v;
    j["delta_tilde"] = rep.delta_tilde;
    j["in_regime"] = rep.in_regime;
    j["rigid"] = rep.rigid;
    j["window_overflow"] = rep.window_overflow;
    j["y"] = json_opt(rep.y);
    j["u_at_y"] = json_opt(rep.u_at_y);
    j["t0"] = json_opt(rep.t0);
    j["perimeter_ratio"] = json_opt(rep.perimeter_ratio);
    j["ratio_slope"] = json_opt(rep.ratio_slope);
    j["diam_bound_exponent"] = rep.diam_bound_exponent;
    j["status"] = rep.status;
    return j;
}

ordered_json to_json(const EigenPair& ep, bool with_samples) {
    ordered_json j;
    j["lambda"] = ep.lambda;
    j["domain"] = to_json(ep.domain);
    if (with_samples) {
        j["nodes"] = ep.grid.nodes;
        j["values"] = ep.values;
    }
    return j;
}

std::string csv_profile(const StepProfile& prof) {
    std::string out = "s_break,level\n";
    for (std::size_t i = 0; i < prof.levels.size(); ++i)
        out += fmt(prof.breakpoints[i]) + "," + fmt(prof.levels[i]) + "\n";
    out += fmt(prof.breakpoints.back()) + ",0\n";
    return out;
}

std::string csv_slack(const ChitiReport& rep) {
    std::string out = "q,slack\n";
    for (std::size_t i = 0; i < rep.q_grid.size(); ++i)
        out += fmt(rep.q_grid[i]) + "," + fmt(rep.slack[i]) + "\n";
    return out;
}

std::string csv_gaps(const StabilityReport& rep) {
    std::string out = "q,gap\n";
    for (std::size_t i = 0; i < rep.q_grid.size(); ++i)
        out += fmt(rep.q_grid[i]) + "," + fmt(rep.gaps[i]) + "\n";
    return out;
}

std::string csv_sweep(const std::vector<Interval>& family,
                      const std::vector<StabilityReport>& rows) {
    if (family.size() != rows.size())
        throw std::invalid_argument("csv_sweep: family and report counts differ");
    std::string out =
        "a,b,v,alpha,delta,delta_tilde,sup_gap,u_at_y,perimeter_ratio,ratio_slope,status\n";
    auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string(); };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const StabilityReport& r = rows[i];
        out += fmt(family[i].a) + "," + fmt(family[i].b) + "," + fmt(r.v) + "," +
               fmt(r.alpha) + "," + fmt(r.delta) + "," + fmt(r.delta_tilde) + "," +
               fmt(r.sup_gap) + "," + opt(r.u_at_y) + "," + opt(r.perimeter_ratio) + "," +
               opt(r.ratio_slope) + "," + r.status + "\n";
    }
    return out;
}

}  // namespace rholder
