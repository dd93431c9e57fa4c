// mvlab: command-line front end for the shrinking-ball mean-value laboratory.
//
// Exit codes: 0 = pass/converged, 1 = a mathematical verdict failed (the
// inputs were valid but the math said no), 2 = usage or input errors.
// Reports are written atomically (temp file + rename).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "mvlab/counterexample.hpp"
#include "mvlab/json_io.hpp"
#include "mvlab/meanvalue.hpp"
#include "mvlab/scenarios.hpp"

namespace {

using namespace mvlab;

// Thrown during input loading/validation: maps to exit 2. Everything thrown
// later, during the computation itself, is a violated hypothesis: exit 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Point parse_point(const std::string& text) {
    Point p;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            p.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse coordinate '" + tok + "' in point '" + text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (p.empty()) throw ConfigError("empty point '" + text + "'");
    return p;
}

std::vector<Point> parse_points(const std::string& text) {
    std::vector<Point> pts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t semi = text.find(';', pos);
        const std::string tok = text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        if (!tok.empty()) pts.push_back(parse_point(tok));
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    if (pts.empty()) throw ConfigError("empty point list '" + text + "'");
    return pts;
}

std::vector<double> parse_reals(const std::string& text) {
    const Point p = parse_point(text);
    return std::vector<double>(p.begin(), p.end());
}

// Accepts a file path or inline JSON (anything starting with '{').
nlohmann::json load_json_argument(const std::string& arg, const char* what) {
    try {
        if (!arg.empty() && arg.front() == '{') return nlohmann::json::parse(arg);
        return nlohmann::json::parse(read_file(arg));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string(what) + ": malformed JSON: " + e.what());
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

/// A pointwise-evaluable function: a Riesz-form document or the
/// counterexample's clamped series ({"kind": "counterexample", "N", "clamp"}).
struct FunctionSpec {
    std::function<double(const Point&)> eval;
    int dim = 0;
    std::optional<RieszFunction> riesz;
};

FunctionSpec load_function(const std::string& arg, const char* what) {
    const nlohmann::json j = load_json_argument(arg, what);
    FunctionSpec spec;
    try {
        if (j.is_object() && j.contains("kind") && j.at("kind") == "counterexample") {
            CounterexampleConfig cfg;
            if (j.contains("N")) cfg.N = j.at("N").get<int>();
            if (j.contains("clamp")) cfg.clamp = parse_double(j.at("clamp"), "clamp");
            cfg.validate();
            spec.dim = 3;
            spec.eval = [cfg](const Point& x) { return clamped_series(cfg, x); };
            return spec;
        }
        spec.riesz = riesz_from_json(j);
        spec.dim = spec.riesz->dim().n();
        const RieszFunction rf = *spec.riesz;
        spec.eval = [rf](const Point& x) { return eval_riesz(rf, x); };
        return spec;
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

DiscreteMeasure load_measure(const std::string& arg) {
    const nlohmann::json j = load_json_argument(arg, "measure");
    try {
        return measure_from_json(j);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("measure: ") + e.what());
    }
}

GaugeFunction load_gauge(const std::string& arg) {
    const nlohmann::json j = load_json_argument(arg, "gauge");
    try {
        return gauge_from_json(j);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("gauge: ") + e.what());
    }
}

std::string infer_format(const std::string& out, const std::string& requested) {
    if (!requested.empty()) return requested;
    if (out.size() >= 4 && out.substr(out.size() - 4) == ".csv") return "csv";
    return "json";
}

struct ScheduleFlags {
    double start = 0.0;
    double factor = 0.5;
    int steps = 8;

    EpsSchedule schedule() const {
        try {
            EpsSchedule s{start, factor, steps};
            (void)s.values();
            return s;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("eps schedule: ") + e.what());
        }
    }
};

void add_schedule_flags(CLI::App* cmd, ScheduleFlags& f, bool required = true) {
    auto* s = cmd->add_option("--eps-start", f.start, "largest ball radius");
    if (required) s->required();
    cmd->add_option("--eps-factor", f.factor, "radius shrink factor in (0,1)");
    cmd->add_option("--eps-steps", f.steps, "number of schedule steps");
}

int run_mean_value(const std::string& function_arg, const std::string& measure_arg, const std::string& x0_arg,
                   const ScheduleFlags& sched_flags, double tol, const std::string& target_arg,
                   const std::string& thresholds_arg, const std::string& out, const std::string& format_arg) {
    const FunctionSpec f = load_function(function_arg, "function");
    const DiscreteMeasure mu = load_measure(measure_arg);
    const Point x0 = parse_point(x0_arg);
    if (static_cast<int>(x0.size()) != mu.dim().n() || f.dim != mu.dim().n())
        throw ConfigError("dimension mismatch between function, measure and x0");
    const EpsSchedule sched = sched_flags.schedule();
    const std::string format = infer_format(out, format_arg);

    double target;
    if (target_arg == "auto")
        target = f.eval(x0);
    else if (target_arg == "-inf")
        target = neg_infinity();
    else
        target = std::stod(target_arg);
    std::vector<double> thresholds;
    if (!thresholds_arg.empty()) thresholds = parse_reals(thresholds_arg);

    const ConvergenceReport rep = convergence_study(f.eval, mu, x0, sched, target, tol, thresholds);
    write_file_atomic(out, format == "csv" ? convergence_report_to_csv(rep) : convergence_report_to_json(rep));
    return rep.converged ? 0 : 1;
}

int run_compare(const std::string& u_arg, const std::string& v_arg, const std::string& measure_arg,
                const std::string& check_arg, const std::string& null_arg, double null_radius,
                const ScheduleFlags& sched_flags, double tol, const std::string& out) {
    const FunctionSpec u = load_function(u_arg, "function-u");
    const FunctionSpec v = load_function(v_arg, "function-v");
    const DiscreteMeasure mu = load_measure(measure_arg);
    const std::vector<Point> check_points = parse_points(check_arg);
    std::vector<Point> null_points;
    if (!null_arg.empty()) null_points = parse_points(null_arg);
    const EpsSchedule sched = sched_flags.schedule();
    const auto null_set = [null_points, null_radius](const Point& p) {
        for (const Point& q : null_points)
            if (distance(p, q) <= null_radius) return true;
        return false;
    };

    const ComparisonReport rep = comparison_check(u.eval, v.eval, mu, null_set, check_points, sched, tol);
    write_file_atomic(out, comparison_to_json(rep));
    return rep.pass ? 0 : 1;
}

int run_admissible(const std::string& gauge_arg, int dim_n, double c, const ScheduleFlags& sched_flags,
                   const std::string& out) {
    const GaugeFunction gauge = load_gauge(gauge_arg);
    if (dim_n < 2) throw ConfigError("dim must be >= 2");
    if (!(c > 4.0)) throw ConfigError("the admissibility hypothesis requires c > 4");
    const std::vector<double> grid = sched_flags.schedule().values();
    if (grid.size() < 8) throw ConfigError("the eps grid needs at least 8 points");

    const StarReport rep = check_star(gauge, Dimension(dim_n), c, grid);
    write_file_atomic(out, star_report_to_json(rep));
    const bool ok = rep.verdicts_agree && rep.admissible.verdict == Verdict::pass;
    return ok ? 0 : 1;
}

int run_ad_check(const std::string& measure_arg, double k, std::size_t samples, const std::string& radii_arg,
                 double slope_tol, const std::string& out) {
    const DiscreteMeasure mu = load_measure(measure_arg);
    const std::vector<double> radii = parse_reals(radii_arg);
    const AdReport rep = ad_regularity_check(mu, k, samples, radii, slope_tol);
    write_file_atomic(out, ad_report_to_json(rep));
    return rep.pass ? 0 : 1;
}

int run_density(const std::string& function_arg, const std::string& measure_arg, double s,
                const std::string& x0_arg, const std::string& radii_arg, const ScheduleFlags& sched_flags,
                bool with_followup, double tol, const std::string& out) {
    const FunctionSpec f = load_function(function_arg, "function");
    if (!f.riesz) throw ConfigError("density requires a Riesz-form function document");
    const DiscreteMeasure mu = load_measure(measure_arg);
    const Point x0 = parse_point(x0_arg);
    const std::vector<double> radii = parse_reals(radii_arg);

    const DensityConditionResult res = density_condition(*f.riesz, mu, s, x0, radii);
    std::optional<ConvergenceReport> followup;
    if (with_followup && res.finite) {
        const double target = eval_riesz(*f.riesz, x0);
        followup = convergence_study(f.eval, mu, x0, sched_flags.schedule(), target, tol);
    }
    write_file_atomic(out, density_condition_to_json(res, followup ? &*followup : nullptr));
    const bool ok = res.finite && (!followup || followup->converged);
    return ok ? 0 : 1;
}

int run_layer_cake(const std::string& function_arg, const std::string& measure_arg, double rel_tol,
                   const std::string& out) {
    const FunctionSpec f = load_function(function_arg, "function");
    const DiscreteMeasure mu = load_measure(measure_arg);
    const LayerCakeResult res = verify_layer_cake(f.eval, mu);
    write_file_atomic(out, layer_cake_to_json(res));
    return res.gap <= rel_tol * std::max(1.0, std::abs(res.lhs)) ? 0 : 1;
}

int run_proof_bounds(const std::string& measure_arg, const std::string& x0_arg, double p, double gamma,
                     double A, double B, double M, double eps1, const std::string& gauge_arg,
                     const std::string& w_arg, const std::string& eps_arg, double tol,
                     const std::string& out) {
    const DiscreteMeasure mu = load_measure(measure_arg);
    const Point x0 = parse_point(x0_arg);
    const GaugeFunction gauge = load_gauge(gauge_arg);
    const std::vector<Point> ws = parse_points(w_arg);
    const std::vector<double> eps = parse_reals(eps_arg);
    ProofBoundConfig cfg;
    cfg.p = p;
    cfg.gamma = gamma;
    cfg.A = A;
    cfg.B = B;
    cfg.M = M;
    cfg.eps1 = eps1;
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    const ProofBoundsReport rep = proof_bounds_check(mu, x0, cfg, gauge, ws, eps, tol);
    write_file_atomic(out, proof_bounds_to_json(rep));
    return rep.pass ? 0 : 1;
}

int run_counterexample(int N, double eps, int resolution, double clamp, const std::string& out,
                       const std::string& format_arg) {
    CounterexampleConfig cfg;
    cfg.N = N;
    cfg.clamp = clamp;
    try {
        cfg.validate();
        if (!(eps > 1.0 / cfg.N)) throw std::invalid_argument("eps must exceed 1/N");
        if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const std::string format = infer_format(out, format_arg);
    const CounterexampleReport rep = counterexample_demo(cfg, eps, resolution);
    write_file_atomic(out, format == "csv" ? counterexample_to_csv(rep) : counterexample_to_json(rep));
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mvlab: shrinking-ball mean values over discrete measures"};
    app.require_subcommand(1);

    // mean-value
    auto* mv = app.add_subcommand("mean-value", "shrinking-ball convergence study");
    std::string mv_function, mv_measure, mv_x0, mv_target = "auto", mv_thresholds, mv_out, mv_format;
    int mv_dim = 0;
    double mv_tol = 1e-3;
    ScheduleFlags mv_sched;
    mv->add_option("--dim", mv_dim, "ambient dimension (checked against the measure)");
    mv->add_option("--function", mv_function, "function JSON (path or inline)")->required();
    mv->add_option("--measure", mv_measure, "measure JSON path")->required();
    mv->add_option("--x0", mv_x0, "center, e.g. 0,0")->required();
    add_schedule_flags(mv, mv_sched);
    mv->add_option("--tol", mv_tol, "convergence tolerance");
    mv->add_option("--target", mv_target, "limit target: auto | -inf | a number");
    mv->add_option("--thresholds", mv_thresholds, "comma list of thresholds for -inf targets");
    mv->add_option("--out", mv_out, "report path")->required();
    mv->add_option("--format", mv_format, "csv | json (default from extension)");

    // compare
    auto* cp = app.add_subcommand("compare", "comparison of two functions along shrinking balls");
    std::string cp_u, cp_v, cp_measure, cp_check, cp_null, cp_out;
    double cp_null_radius = 1e-12, cp_tol = 1e-9;
    ScheduleFlags cp_sched;
    cp->add_option("--function-u", cp_u, "upper comparand JSON")->required();
    cp->add_option("--function-v", cp_v, "subharmonic comparand JSON")->required();
    cp->add_option("--measure", cp_measure, "measure JSON path")->required();
    cp->add_option("--check-points", cp_check, "semicolon list of points")->required();
    cp->add_option("--null-points", cp_null, "semicolon list of null-set points");
    cp->add_option("--null-radius", cp_null_radius, "matching radius for null-set points");
    add_schedule_flags(cp, cp_sched);
    cp->add_option("--tol", cp_tol, "comparison tolerance");
    cp->add_option("--out", cp_out, "report path")->required();

    // admissible
    auto* ad = app.add_subcommand("admissible", "gauge membership check for the admissible family");
    std::string ad_gauge, ad_out;
    int ad_dim = 0;
    double ad_c = 0.0;
    ScheduleFlags ad_sched{0.1, 0.65, 12};
    ad->add_option("--gauge", ad_gauge, "gauge JSON (path or inline)")->required();
    ad->add_option("--dim", ad_dim, "ambient dimension")->required();
    ad->add_option("--c", ad_c, "hypothesis constant, must be > 4")->required();
    add_schedule_flags(ad, ad_sched, false);
    ad->add_option("--out", ad_out, "report path")->required();

    // ad-check
    auto* adr = app.add_subcommand("ad-check", "two-sided ball-mass regularity certificate");
    std::string adr_measure, adr_radii, adr_out;
    double adr_k = 0.0, adr_slope_tol = 0.2;
    std::size_t adr_samples = 64;
    adr->add_option("--measure", adr_measure, "measure JSON path")->required();
    adr->add_option("--k", adr_k, "regularity dimension")->required();
    adr->add_option("--samples", adr_samples, "number of sampled support atoms");
    adr->add_option("--radii", adr_radii, "comma list of radii, decreasing")->required();
    adr->add_option("--slope-tol", adr_slope_tol, "allowed |log-log slope| of the ratio trend");
    adr->add_option("--out", adr_out, "report path")->required();

    // density
    auto* dn = app.add_subcommand("density", "density-form finiteness condition");
    std::string dn_function, dn_measure, dn_x0, dn_radii, dn_out;
    double dn_s = 0.0, dn_tol = 1e-2;
    ScheduleFlags dn_sched;
    dn->add_option("--function", dn_function, "Riesz-form function JSON")->required();
    dn->add_option("--measure", dn_measure, "measure JSON path")->required();
    dn->add_option("--s", dn_s, "density exponent, must exceed n-2")->required();
    dn->add_option("--x0", dn_x0, "center")->required();
    dn->add_option("--radii", dn_radii, "comma list of radii for the density estimates")->required();
    add_schedule_flags(dn, dn_sched, false);
    dn->add_option("--tol", dn_tol, "tolerance of the follow-up convergence study");
    dn->add_option("--out", dn_out, "report path")->required();

    // layer-cake
    auto* lc = app.add_subcommand("layer-cake", "distribution-function identity check");
    std::string lc_function, lc_measure, lc_out;
    double lc_tol = 1e-12;
    lc->add_option("--function", lc_function, "nonnegative function JSON")->required();
    lc->add_option("--measure", lc_measure, "measure JSON path")->required();
    lc->add_option("--rel-tol", lc_tol, "relative gap tolerance");
    lc->add_option("--out", lc_out, "report path")->required();

    // proof-bounds
    auto* pb = app.add_subcommand("proof-bounds", "two-case domination bound margins");
    std::string pb_measure, pb_x0, pb_gauge, pb_w, pb_eps, pb_out;
    double pb_p = 2.0, pb_gamma = 1.5, pb_A = 1.0, pb_B = 1.0, pb_M = 1.0, pb_eps1 = 0.1, pb_tol = 1e-9;
    pb->add_option("--measure", pb_measure, "measure JSON path")->required();
    pb->add_option("--x0", pb_x0, "center")->required();
    pb->add_option("--p", pb_p, "case split constant, > 1");
    pb->add_option("--gamma", pb_gamma, "covering constant, > 1");
    pb->add_option("--A", pb_A, "lower mass constant");
    pb->add_option("--B", pb_B, "upper mass constant");
    pb->add_option("--M", pb_M, "gauge constant");
    pb->add_option("--eps1", pb_eps1, "largest admissible radius");
    pb->add_option("--gauge", pb_gauge, "gauge JSON")->required();
    pb->add_option("--w-points", pb_w, "semicolon list of w samples")->required();
    pb->add_option("--eps-samples", pb_eps, "comma list of radii")->required();
    pb->add_option("--tol", pb_tol, "margin tolerance");
    pb->add_option("--out", pb_out, "report path")->required();

    // counterexample
    auto* ce = app.add_subcommand("counterexample", "co-dimension-2 gap demonstration");
    std::string ce_out, ce_format;
    int ce_N = 1000, ce_resolution = 100000;
    double ce_eps = 0.0, ce_clamp = -2.0;
    ce->add_option("--N", ce_N, "series truncation");
    ce->add_option("--eps", ce_eps, "line segment half-length")->required();
    ce->add_option("--resolution", ce_resolution, "atoms on the line");
    ce->add_option("--clamp", ce_clamp, "clamp level, < -1");
    ce->add_option("--out", ce_out, "report path")->required();
    ce->add_option("--format", ce_format, "csv | json (default from extension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help exits 0, every parse failure is a usage error
    }

    try {
        if (app.got_subcommand(mv))
            return run_mean_value(mv_function, mv_measure, mv_x0, mv_sched, mv_tol, mv_target, mv_thresholds,
                                  mv_out, mv_format);
        if (app.got_subcommand(cp))
            return run_compare(cp_u, cp_v, cp_measure, cp_check, cp_null, cp_null_radius, cp_sched, cp_tol,
                               cp_out);
        if (app.got_subcommand(ad)) return run_admissible(ad_gauge, ad_dim, ad_c, ad_sched, ad_out);
        if (app.got_subcommand(adr))
            return run_ad_check(adr_measure, adr_k, adr_samples, adr_radii, adr_slope_tol, adr_out);
        if (app.got_subcommand(dn))
            return run_density(dn_function, dn_measure, dn_s, dn_x0, dn_radii, dn_sched,
                               dn_sched.start > 0.0, dn_tol, dn_out);
        if (app.got_subcommand(lc)) return run_layer_cake(lc_function, lc_measure, lc_tol, lc_out);
        if (app.got_subcommand(pb))
            return run_proof_bounds(pb_measure, pb_x0, pb_p, pb_gamma, pb_A, pb_B, pb_M, pb_eps1, pb_gauge,
                                    pb_w, pb_eps, pb_tol, pb_out);
        if (app.got_subcommand(ce))
            return run_counterexample(ce_N, ce_eps, ce_resolution, ce_clamp, ce_out, ce_format);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        // A hypothesis of the requested check failed on valid inputs.
        std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
        return 1;
    }
    return 2;
}
