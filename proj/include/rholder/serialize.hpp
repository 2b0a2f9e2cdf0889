#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rholder/pipeline.hpp"
#include "rholder/stability.hpp"

namespace rholder {

using ordered_json = nlohmann::ordered_json;

// The resolved command-line surface of one run, embedded verbatim in every
// report so the output alone reproduces the run. K is stored after applying
// the default (N - 1), never as a sentinel.
struct RunConfig {
    double N = 2.0;
    double K = 1.0;
    std::string domain_kind;  // "cap" | "interval"
    double v = 0.0;           // cap mass, when domain_kind == "cap"
    double a = 0.0;           // interval endpoints otherwise
    double b = 0.0;
    double p = 1.0;
    std::vector<double> q_grid;
    int grid_n = 20000;
    Tolerances tol;
    std::string out_path;  // empty means stdout
    std::string format = "json";
};

// JSON has no infinity literal; non-finite values (the q = inf grid entry)
// serialize as the strings "inf" / "-inf".
ordered_json json_number(double x);

ordered_json to_json(const Domain& dom);
ordered_json to_json(const RunConfig& cfg);
ordered_json to_json(const StepProfile& prof);
ordered_json to_json(const ChitiReport& rep);
ordered_json to_json(const StabilityReport& rep);
// with_samples controls whether the node/value arrays are included next to
// lambda (they are grid_n-sized).
ordered_json to_json(const EigenPair& ep, bool with_samples);

// CSV emitters, LF line endings, %.17g round-trip formatting. Headers:
//   profile: s_break,level   (left edge of each piece, closing zero row)
//   slack:   q,slack
//   gaps:    q,gap
//   sweep:   a,b,v,alpha,delta,delta_tilde,sup_gap,u_at_y,
//            perimeter_ratio,ratio_slope,status  (one row per family member)
std::string csv_profile(const StepProfile& prof);
std::string csv_slack(const ChitiReport& rep);
std::string csv_gaps(const StabilityReport& rep);
std::string csv_sweep(const std::vector<Interval>& family,
                      const std::vector<StabilityReport>& rows);

}  // namespace rholder
