#pragma once

// Deterministic report serialization.  Reports are flat JSON records with a
// fixed key order and every numeric field printed at 15 significant digits,
// so identical runs produce byte-identical files.  Timestamps and host info
// go to a separate metadata file, never into reports.

#include <ostream>
#include <sstream>
#include <string>

#include "zetalab/meanvalue.hpp"

namespace zetalab {

inline std::string fmt15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) { os_ << "{"; }
    ~JsonWriter() { os_ << "\n}\n"; }

    void field(const std::string& key, double v) { raw(key, fmt15(v)); }
    void field(const std::string& key, const std::string& v) {
        raw(key, "\"" + json_escape(v) + "\"");
    }
    void field(const std::string& key, bool v) { raw(key, v ? "true" : "false"); }
    void raw(const std::string& key, const std::string& value) {
        os_ << (first_ ? "\n" : ",\n") << "  \"" << json_escape(key) << "\": " << value;
        first_ = false;
    }

private:
    std::ostream& os_;
    bool first_ = true;
};

inline void write_params_json(JsonWriter& w, const GridParams& p) {
    w.field("T", p.T);
    w.field("epsilon", p.epsilon);
    w.field("H", p.H);
    w.field("delta", p.delta);
    w.field("sigma", p.sigma);
    w.field("k", static_cast<double>(p.k));
    w.field("x", p.x);
    w.field("eta", p.eta);
    w.field("lambda1", p.lambda1());
    w.field("constraint_chain_ok", p.constraint_chain_ok());
    w.field("poly_cutoff", static_cast<double>(p.poly_cutoff()));
}

inline void write_report_json(std::ostream& os, const MeanValueReport& rep,
                              double band_lo, double band_hi, bool pass) {
    JsonWriter w(os);
    w.field("claim_id", rep.claim_id);
    w.field("computed", rep.computed);
    w.field("main_term", rep.main_term);
    w.field("ratio", rep.ratio);
    w.field("error_observed", rep.error_observed);
    w.field("error_scale_predicted", rep.error_scale_predicted);
    w.field("tau", rep.tau);
    w.field("band_lo", band_lo);
    w.field("band_hi", band_hi);
    w.field("pass", pass);
    for (const auto& [k, v] : rep.extra) w.field(k, v);
    write_params_json(w, rep.params);
}

}  // namespace zetalab
