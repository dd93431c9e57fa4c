#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvlab/admissible.hpp"
#include "mvlab/core.hpp"
#include "mvlab/counterexample.hpp"
#include "mvlab/measure.hpp"
#include "mvlab/meanvalue.hpp"
#include "mvlab/potential.hpp"

namespace mvlab {

// ---------------------------------------------------------------------------
// Deterministic serialization primitives
// ---------------------------------------------------------------------------

/// 17 significant digits: enough for a bit-exact double round trip, and a
/// fixed formatting so identical runs produce identical bytes. Non-finite
/// values become the strings "inf" / "-inf" / "nan" (JSON has no number for
/// them).
inline std::string format_double(double x) {
    if (std::isnan(x)) return "\"nan\"";
    if (is_pos_infinity(x)) return "\"inf\"";
    if (is_neg_infinity(x)) return "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(const nlohmann::json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return pos_infinity();
        if (s == "-inf") return neg_infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument(std::string(what) + ": expected a number");
}

inline std::string escape_json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

/// Minimal ordered JSON emitter. Keys appear exactly in the order they are
/// written, numbers go through format_double, so output bytes are a pure
/// function of the data.
class JsonWriter {
public:
    JsonWriter& begin_object() { return token("{"); }
    JsonWriter& end_object() { close("}"); return *this; }
    JsonWriter& begin_array() { return token("["); }
    JsonWriter& end_array() { close("]"); return *this; }

    JsonWriter& key(const std::string& k) {
        separator();
        out_ += escape_json_string(k);
        out_ += ": ";
        just_keyed_ = true;
        return *this;
    }
    JsonWriter& value(double v) { return raw(format_double(v)); }
    JsonWriter& value(int v) { return raw(std::to_string(v)); }
    JsonWriter& value(std::size_t v) { return raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(const std::string& v) { return raw(escape_json_string(v)); }
    JsonWriter& value(const char* v) { return raw(escape_json_string(v)); }

    JsonWriter& value(const std::vector<double>& v) {  // also covers Point
        begin_array();
        for (double c : v) value(c);
        return end_array();
    }
    JsonWriter& value(const std::vector<std::size_t>& v) {
        begin_array();
        for (std::size_t c : v) value(c);
        return end_array();
    }

    std::string str() const { return out_ + "\n"; }

private:
    JsonWriter& token(const char* open) {
        separator();
        out_ += open;
        depth_++;
        fresh_ = true;
        just_keyed_ = false;
        return *this;
    }
    void close(const char* closer) {
        depth_--;
        out_ += '\n';
        indent();
        out_ += closer;
        fresh_ = false;
    }
    JsonWriter& raw(const std::string& text) {
        separator();
        out_ += text;
        just_keyed_ = false;
        return *this;
    }
    void separator() {
        if (just_keyed_) return;
        if (!fresh_ && depth_ > 0) out_ += ',';
        if (depth_ > 0) {
            out_ += '\n';
            indent();
        }
        fresh_ = false;
    }
    void indent() {
        for (int i = 0; i < depth_; ++i) out_ += "  ";
    }

    std::string out_;
    int depth_ = 0;
    bool fresh_ = true;
    bool just_keyed_ = false;
};

/// Writes through a temp file and renames, so a report is either complete
/// or absent, never truncated.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f << content;
        if (!f.good()) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic rename to " + path + " failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

namespace detail {

/// Nearest-neighbor spacing estimate for imported clouds that do not declare
/// a resolution radius: median nearest-neighbor distance over a strided
/// sample of atoms, times the safety factor.
inline double estimate_resolution_radius(const std::vector<Atom>& atoms) {
    if (atoms.size() < 2) return 0.0;
    const std::size_t samples = std::min<std::size_t>(atoms.size(), 64);
    const std::size_t stride = atoms.size() / samples;
    std::vector<double> nn;
    nn.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = s * stride;
        double best = pos_infinity();
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            if (j == i) continue;
            best = std::min(best, squared_distance(atoms[i].p, atoms[j].p));
        }
        nn.push_back(std::sqrt(best));
    }
    std::sort(nn.begin(), nn.end());
    return DiscreteMeasure::kResolutionSafetyFactor * nn[nn.size() / 2];
}

}  // namespace detail

inline DiscreteMeasure measure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("atoms"))
        throw std::invalid_argument("measure JSON: expected {\"dim\", \"label\", \"atoms\"}");
    const Dimension dim(j.at("dim").get<int>());
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        Atom atom;
        for (const auto& c : a.at("p")) atom.p.push_back(parse_double(c, "atom coordinate"));
        atom.w = parse_double(a.at("w"), "atom weight");
        atoms.push_back(std::move(atom));
    }
    const std::string label = j.contains("label") ? j.at("label").get<std::string>() : "";
    double res_radius;
    if (j.contains("resolution_radius"))
        res_radius = parse_double(j.at("resolution_radius"), "resolution_radius");
    else
        res_radius = detail::estimate_resolution_radius(atoms);
    return DiscreteMeasure(dim, std::move(atoms), label, res_radius);
}

inline DiscreteMeasure measure_from_json_text(const std::string& text) {
    return measure_from_json(nlohmann::json::parse(text));
}

inline std::string measure_to_json(const DiscreteMeasure& mu) {
    JsonWriter w;
    w.begin_object();
    w.key("dim").value(mu.dim().n());
    w.key("label").value(mu.label());
    w.key("resolution_radius").value(mu.resolution_radius());
    w.key("atoms").begin_array();
    for (const Atom& a : mu.atoms()) {
        w.begin_object();
        w.key("p").value(a.p);
        w.key("w").value(a.w);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

// ---------------------------------------------------------------------------
// Harmonic specs and Riesz functions
// ---------------------------------------------------------------------------

inline HarmonicSpec harmonic_from_json(const nlohmann::json& j);

namespace detail {

inline HarmonicTerm harmonic_term_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return HarmonicConstant{parse_double(j.at("value"), "constant value")};
    if (kind == "linear") {
        std::vector<double> coeffs;
        for (const auto& c : j.at("coeffs")) coeffs.push_back(parse_double(c, "linear coefficient"));
        return HarmonicLinear{std::move(coeffs)};
    }
    if (kind == "planar-power") {
        const std::string part = j.at("part").get<std::string>();
        if (part != "re" && part != "im")
            throw std::invalid_argument("harmonic JSON: planar-power part must be \"re\" or \"im\"");
        return HarmonicPlanarPower{j.at("m").get<int>(), part == "re" ? HarmonicPlanarPower::Part::re
                                                                      : HarmonicPlanarPower::Part::im};
    }
    throw std::invalid_argument("harmonic JSON: unknown kind \"" + kind + "\"");
}

}  // namespace detail

inline HarmonicSpec harmonic_from_json(const nlohmann::json& j) {
    HarmonicSpec spec;
    if (j.is_null()) return spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return spec;
    if (kind == "sum") {
        for (const auto& t : j.at("terms")) spec.terms.push_back(detail::harmonic_term_from_json(t));
        return spec;
    }
    spec.terms.push_back(detail::harmonic_term_from_json(j));
    return spec;
}

namespace detail {

inline void harmonic_term_to_json(JsonWriter& w, const HarmonicTerm& term) {
    w.begin_object();
    if (const auto* c = std::get_if<HarmonicConstant>(&term)) {
        w.key("kind").value("constant");
        w.key("value").value(c->value);
    } else if (const auto* l = std::get_if<HarmonicLinear>(&term)) {
        w.key("kind").value("linear");
        w.key("coeffs").value(l->coeffs);
    } else {
        const auto& pp = std::get<HarmonicPlanarPower>(term);
        w.key("kind").value("planar-power");
        w.key("m").value(pp.m);
        w.key("part").value(pp.part == HarmonicPlanarPower::Part::re ? "re" : "im");
    }
    w.end_object();
}

inline void harmonic_to_json(JsonWriter& w, const HarmonicSpec& h) {
    if (h.terms.empty()) {
        w.begin_object();
        w.key("kind").value("zero");
        w.end_object();
    } else if (h.terms.size() == 1) {
        harmonic_term_to_json(w, h.terms[0]);
    } else {
        w.begin_object();
        w.key("kind").value("sum");
        w.key("terms").begin_array();
        for (const auto& t : h.terms) harmonic_term_to_json(w, t);
        w.end_array();
        w.end_object();
    }
}

}  // namespace detail

inline RieszFunction riesz_from_json(const nlohmann::json& j) {
    const Dimension dim(j.at("dim").get<int>());
    const double R = parse_double(j.at("domain_radius"), "domain_radius");
    std::vector<NuAtom> nu;
    if (j.contains("nu"))
        for (const auto& a : j.at("nu")) {
            NuAtom atom;
            for (const auto& c : a.at("p")) atom.p.push_back(parse_double(c, "nu atom coordinate"));
            atom.mass = parse_double(a.at("m"), "nu atom mass");
            nu.push_back(std::move(atom));
        }
    HarmonicSpec h = j.contains("harmonic") ? harmonic_from_json(j.at("harmonic")) : HarmonicSpec::zero();
    return RieszFunction(dim, std::move(nu), std::move(h), R);
}

inline RieszFunction riesz_from_json_text(const std::string& text) {
    return riesz_from_json(nlohmann::json::parse(text));
}

inline std::string riesz_to_json(const RieszFunction& rf) {
    JsonWriter w;
    w.begin_object();
    w.key("dim").value(rf.dim().n());
    w.key("domain_radius").value(rf.domain_radius());
    w.key("nu").begin_array();
    for (const NuAtom& a : rf.nu_atoms()) {
        w.begin_object();
        w.key("p").value(a.p);
        w.key("m").value(a.mass);
        w.end_object();
    }
    w.end_array();
    w.key("harmonic");
    detail::harmonic_to_json(w, rf.harmonic());
    w.end_object();
    return w.str();
}

// ---------------------------------------------------------------------------
// Gauges
// ---------------------------------------------------------------------------

inline GaugeFunction gauge_from_json(const nlohmann::json& j) {
    const std::string form = j.at("form").get<std::string>();
    if (form == "power") return GaugeFunction::power(parse_double(j.at("k"), "gauge k"));
    if (form == "power-log") return GaugeFunction::power_log(parse_double(j.at("k"), "gauge k"));
    if (form == "scaled")
        return GaugeFunction::scaled(parse_double(j.at("a"), "gauge scale"), gauge_from_json(j.at("inner")));
    if (form == "sum") {
        const auto& terms = j.at("terms");
        if (!terms.is_array() || terms.size() < 2)
            throw std::invalid_argument("gauge JSON: sum needs at least two terms");
        GaugeFunction g = gauge_from_json(terms[0]);
        for (std::size_t i = 1; i < terms.size(); ++i)
            g = GaugeFunction::sum(std::move(g), gauge_from_json(terms[i]));
        return g;
    }
    if (form == "table") {
        std::vector<double> r, h;
        for (const auto& c : j.at("r")) r.push_back(parse_double(c, "table r"));
        for (const auto& c : j.at("h")) h.push_back(parse_double(c, "table h"));
        return GaugeFunction::table(std::move(r), std::move(h));
    }
    throw std::invalid_argument("gauge JSON: unknown form \"" + form + "\"");
}

inline GaugeFunction gauge_from_json_text(const std::string& text) {
    return gauge_from_json(nlohmann::json::parse(text));
}

namespace detail {

inline void gauge_to_json_impl(JsonWriter& w, const GaugeFunction& g) {
    w.begin_object();
    if (const auto* p = std::get_if<GaugeFunction::Power>(&g.form())) {
        w.key("form").value("power");
        w.key("k").value(p->k);
    } else if (const auto* pl = std::get_if<GaugeFunction::PowerLog>(&g.form())) {
        w.key("form").value("power-log");
        w.key("k").value(pl->k);
    } else if (const auto* sc = std::get_if<GaugeFunction::Scaled>(&g.form())) {
        w.key("form").value("scaled");
        w.key("a").value(sc->a);
        w.key("inner");
        gauge_to_json_impl(w, *sc->inner);
    } else if (const auto* su = std::get_if<GaugeFunction::Sum>(&g.form())) {
        w.key("form").value("sum");
        w.key("terms").begin_array();
        gauge_to_json_impl(w, *su->lhs);
        gauge_to_json_impl(w, *su->rhs);
        w.end_array();
    } else {
        const auto& t = std::get<GaugeFunction::Table>(g.form());
        w.key("form").value("table");
        w.key("r").value(t.r);
        w.key("h").value(t.h);
    }
    w.end_object();
}

}  // namespace detail

inline std::string gauge_to_json(const GaugeFunction& g) {
    JsonWriter w;
    detail::gauge_to_json_impl(w, g);
    return w.str();
}

// ---------------------------------------------------------------------------
// Report serialization (schema mvlab/1)
// ---------------------------------------------------------------------------

inline std::string convergence_report_to_json(const ConvergenceReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("mean-value");
    w.key("x0").value(rep.x0);
    w.key("target").value(rep.target);
    w.key("tolerance").value(rep.tolerance);
    w.key("eps").value(rep.eps_values);
    w.key("means").value(rep.means);
    w.key("errors").value(rep.errors);
    w.key("atoms_in_ball").value(rep.ball_counts);
    w.key("limit_estimate").value(rep.limit_estimate);
    w.key("converged").value(rep.converged);
    w.end_object();
    return w.str();
}

inline std::string convergence_report_to_csv(const ConvergenceReport& rep) {
    std::string out = "eps,mean,target,error,atoms_in_ball\n";
    auto cell = [](double v) {
        if (std::isnan(v)) return std::string("nan");
        if (is_pos_infinity(v)) return std::string("inf");
        if (is_neg_infinity(v)) return std::string("-inf");
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t j = 0; j < rep.eps_values.size(); ++j) {
        out += cell(rep.eps_values[j]) + "," + cell(rep.means[j]) + "," + cell(rep.target) + "," +
               cell(rep.errors[j]) + "," + std::to_string(rep.ball_counts[j]) + "\n";
    }
    return out;
}

inline void admissibility_to_json(JsonWriter& w, const AdmissibilityReport& rep) {
    w.begin_object();
    w.key("c").value(rep.c);
    w.key("eps_grid").value(rep.eps_grid);
    w.key("ratios").value(rep.ratios);
    w.key("m_estimate").value(rep.m_estimate);
    w.key("verdict").value(to_string(rep.verdict));
    w.key("divergent").value(rep.divergent);
    w.end_object();
}

inline std::string star_report_to_json(const StarReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("admissible");
    w.key("admissible");
    admissibility_to_json(w, rep.admissible);
    w.key("star");
    admissibility_to_json(w, rep.star);
    w.key("verdicts_agree").value(rep.verdicts_agree);
    w.end_object();
    return w.str();
}

inline std::string ad_report_to_json(const AdReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("ad-check");
    w.key("k").value(rep.k);
    w.key("c0_lower").value(rep.c0_lower);
    w.key("c0_upper").value(rep.c0_upper);
    w.key("pass").value(rep.pass);
    w.key("sampled_points").value(rep.sampled_points);
    w.key("diameter").value(rep.diameter);
    w.key("sample_clamped").value(rep.sample_clamped);
    w.key("loglog_slope").value(rep.loglog_slope);
    w.key("radii").value(rep.radii);
    w.key("mean_ratios").value(rep.mean_ratios);
    w.end_object();
    return w.str();
}

inline std::string layer_cake_to_json(const LayerCakeResult& res) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("layer-cake");
    w.key("lhs").value(res.lhs);
    w.key("rhs").value(res.rhs);
    w.key("gap").value(res.gap);
    w.end_object();
    return w.str();
}

inline std::string proof_bounds_to_json(const ProofBoundsReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("proof-bounds");
    w.key("mass_condition_ok").value(rep.mass_condition_ok);
    w.key("mass_diagnostic").value(rep.mass_diagnostic);
    w.key("worst_margin").value(rep.worst_margin);
    w.key("case1_count").value(rep.case1_count);
    w.key("case2_count").value(rep.case2_count);
    w.key("tolerance").value(rep.tolerance);
    w.key("pass").value(rep.pass);
    w.key("margins").begin_array();
    for (const CaseMargin& m : rep.margins) {
        w.begin_object();
        w.key("w").value(m.w);
        w.key("eps").value(m.eps);
        w.key("case").value(m.case_id);
        w.key("f_eps").value(m.f_value);
        w.key("bound").value(m.bound);
        w.key("margin").value(m.margin);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

inline std::string comparison_to_json(const ComparisonReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("compare");
    w.key("null_set_weight").value(rep.null_set_weight);
    w.key("audit_ok").value(rep.audit_ok);
    w.key("audit_violations").value(rep.audit_violations);
    w.key("tolerance").value(rep.tolerance);
    w.key("pass").value(rep.pass);
    w.key("points").begin_array();
    for (const ComparisonPointResult& p : rep.points) {
        w.begin_object();
        w.key("x0").value(p.x0);
        w.key("u_means").value(p.u_means);
        w.key("v_means").value(p.v_means);
        w.key("u_value").value(p.u_value);
        w.key("v_value").value(p.v_value);
        w.key("means_ok").value(p.means_ok);
        w.key("conclusion_ok").value(p.conclusion_ok);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

inline std::string density_condition_to_json(const DensityConditionResult& res,
                                             const ConvergenceReport* followup) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("density");
    w.key("value").value(res.value);
    w.key("finite").value(res.finite);
    w.key("singular_atoms").value(res.singular_atoms);
    w.key("lower_density_at_x0").value(res.lower_density_at_x0);
    if (followup) {
        w.key("convergence");
        w.begin_object();
        w.key("eps").value(followup->eps_values);
        w.key("means").value(followup->means);
        w.key("errors").value(followup->errors);
        w.key("target").value(followup->target);
        w.key("limit_estimate").value(followup->limit_estimate);
        w.key("converged").value(followup->converged);
        w.end_object();
    }
    w.end_object();
    return w.str();
}

inline std::string counterexample_to_json(const CounterexampleReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("schema").value("mvlab/1");
    w.key("report").value("counterexample");
    w.key("N").value(rep.N);
    w.key("eps").value(rep.eps);
    w.key("resolution").value(rep.resolution);
    w.key("clamp").value(rep.clamp);
    w.key("line_mean").value(rep.line_mean);
    w.key("value_at_0").value(rep.value_at_0);
    w.key("gap").value(rep.gap);
    w.key("unclamped_fraction").value(rep.unclamped_fraction);
    w.key("delta").value(rep.delta);
    w.key("origin_tail_bound").value(rep.origin_tail_bound);
    w.key("pass").value(rep.pass);
    w.end_object();
    return w.str();
}

inline std::string counterexample_to_csv(const CounterexampleReport& rep) {
    std::string out = "N,eps,resolution,line_mean,value_at_0,gap\n";
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g,%.17g,%.17g\n", rep.N, rep.eps, rep.resolution,
                  rep.line_mean, rep.value_at_0, rep.gap);
    out += buf;
    return out;
}

}  // namespace mvlab
