#pragma once
// key=value run configuration with '#' comments. Unknown keys, duplicates and malformed values
// are rejected with the offending key and line. Canonical text (sorted keys, shortest
// round-trip numbers) is what gets hashed.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wlns/axisym.hpp"
#include "wlns/errors.hpp"
#include "wlns/solver2d.hpp"

namespace wlns::config {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<Entry> split_lines(std::string_view text) {
    std::vector<Entry> out;
    int line = 0;
    while (!text.empty()) {
        ++line;
        const auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        const auto eq = raw.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key=value", std::string(raw), line);
        Entry e{std::string(trim(raw.substr(0, eq))), std::string(trim(raw.substr(eq + 1))), line};
        if (e.key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key", "", line);
        for (const auto& prev : out)
            if (prev.key == e.key)
                throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + e.key + "'", e.key, line);
        out.push_back(std::move(e));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Value codecs

inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct BadValue {
    std::string expected;
};

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw BadValue{"a finite real number"};
    return v;
}

inline long long parse_int(const std::string& s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw BadValue{"an integer"};
    return v;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw BadValue{"true or false"};
}

inline weights::Form parse_form(const std::string& s) {
    if (s == "abs") return weights::Form::one_plus_abs;
    if (s == "sq") return weights::Form::one_plus_sq_half;
    throw BadValue{"abs or sq"};
}
inline std::string form_name(weights::Form f) { return f == weights::Form::one_plus_abs ? "abs" : "sq"; }

inline spectral::Shape parse_shape(const std::string& s) {
    if (s == "compact_bump") return spectral::Shape::compact_bump;
    if (s == "gaussian_surrogate") return spectral::Shape::gaussian_surrogate;
    throw BadValue{"compact_bump or gaussian_surrogate"};
}

// ---------------------------------------------------------------------------
// Schemas

template <class Cfg>
struct Key {
    std::string name;
    std::string doc;
    std::function<void(Cfg&, const std::string&)> set;
    std::function<std::string(const Cfg&)> get;
};

template <class Cfg>
using Schema = std::vector<Key<Cfg>>;

#define WLNS_REAL(field, doc)                                                                 \
    Key<Cfg> {                                                                                \
        #field, doc, [](Cfg& c, const std::string& v) { c.field = parse_double(v); },         \
            [](const Cfg& c) { return format_double(c.field); }                               \
    }
#define WLNS_INT(field, doc)                                                                   \
    Key<Cfg> {                                                                                 \
        #field, doc, [](Cfg& c, const std::string& v) { c.field = static_cast<int>(parse_int(v)); }, \
            [](const Cfg& c) { return std::to_string(c.field); }                               \
    }

inline const Schema<solver2d::RunConfig>& schema_2d() {
    using Cfg = solver2d::RunConfig;
    static const Schema<Cfg> s = {
        WLNS_INT(n, "grid points per side"),
        WLNS_REAL(L, "box side length"),
        WLNS_REAL(dt, "time step"),
        WLNS_REAL(t_end, "final time"),
        WLNS_REAL(epsilon, "mollifier width; 0 disables mollification"),
        {"shape", "mollifier kernel: compact_bump | gaussian_surrogate",
         [](Cfg& c, const std::string& v) { c.shape = parse_shape(v); },
         [](const Cfg& c) { return spectral::to_string(c.shape); }},
        {"weight", "ledger weight family: constant | radial",
         [](Cfg& c, const std::string& v) {
             if (v == "constant") c.weight = weights::WeightSpec::constant(2);
             else if (v == "radial") c.weight = weights::WeightSpec::radial(c.weight.gamma, 2, c.weight.form);
             else throw BadValue{"constant or radial"};
         },
         [](const Cfg& c) { return c.weight.family == weights::Family::constant ? "constant" : "radial"; }},
        {"weight_gamma", "decay exponent of the radial weight",
         [](Cfg& c, const std::string& v) { c.weight.gamma = parse_double(v); },
         [](const Cfg& c) { return format_double(c.weight.gamma); }},
        {"weight_form", "abs: (1+|x|)^-g, sq: (1+|x|^2)^-g/2",
         [](Cfg& c, const std::string& v) { c.weight.form = parse_form(v); },
         [](const Cfg& c) { return form_name(c.weight.form); }},
        {"init", "initial data: taylor_green | random_divfree | file",
         [](Cfg& c, const std::string& v) {
             try {
                 c.init.kind = solver2d::parse_init_kind(v);
             } catch (const std::exception&) {
                 throw BadValue{"taylor_green, random_divfree or file"};
             }
         },
         [](const Cfg& c) { return std::string(solver2d::to_string(c.init.kind)); }},
        WLNS_REAL(init.amplitude, "max |u| of random data"),
        WLNS_REAL(init.slope, "stream-function spectral slope of random data"),
        WLNS_REAL(init.envelope, "Gaussian envelope width; 0 picks L/14"),
        WLNS_REAL(init.centre_x, "envelope centre x"),
        WLNS_REAL(init.centre_y, "envelope centre y"),
        WLNS_REAL(init.cutoff_radius, "radial cutoff before projection; 0 disables"),
        {"init.path", "velocity text file for init=file",
         [](Cfg& c, const std::string& v) { c.init.path = v; }, [](const Cfg& c) { return c.init.path; }},
        WLNS_INT(cadence, "ledger row every this many steps"),
        WLNS_INT(dense_rows, "also record each of the first steps"),
        WLNS_INT(checkpoint_every, "steps between checkpoints; 0 disables"),
        {"seed", "random seed",
         [](Cfg& c, const std::string& v) {
             const auto x = parse_int(v);
             if (x < 0) throw BadValue{"a non-negative integer"};
             c.seed = static_cast<std::uint64_t>(x);
         },
         [](const Cfg& c) { return std::to_string(c.seed); }},
    };
    return s;
}

inline const Schema<axisym::AxiRunConfig>& schema_axi() {
    using Cfg = axisym::AxiRunConfig;
    static const Schema<Cfg> s = {
        WLNS_INT(grid.n_r, "radial cells"),
        WLNS_INT(grid.n_z, "axial cells (periodic)"),
        WLNS_REAL(grid.R, "outer radius"),
        WLNS_REAL(grid.Z, "axial period"),
        WLNS_REAL(dt, "time step"),
        WLNS_REAL(t_end, "final time"),
        WLNS_REAL(ring.r0, "ring radius"),
        WLNS_REAL(ring.z0, "ring height"),
        WLNS_REAL(ring.a, "Gaussian core radius"),
        WLNS_REAL(ring.amplitude, "peak eta"),
        {"ring.mirrored", "add the opposite ring at -z0",
         [](Cfg& c, const std::string& v) { c.ring.mirrored = parse_bool(v); },
         [](const Cfg& c) { return std::string(c.ring.mirrored ? "true" : "false"); }},
        WLNS_REAL(phi.gamma, "energy weight exponent (cylindrical)"),
        {"phi.form", "abs | sq", [](Cfg& c, const std::string& v) { c.phi.form = parse_form(v); },
         [](const Cfg& c) { return form_name(c.phi.form); }},
        WLNS_REAL(psi.gamma, "vorticity weight exponent (cylindrical)"),
        {"psi.form", "abs | sq", [](Cfg& c, const std::string& v) { c.psi.form = parse_form(v); },
         [](const Cfg& c) { return form_name(c.psi.form); }},
        WLNS_INT(cadence, "ledger row every this many steps"),
        WLNS_INT(checkpoint_every, "steps between checkpoints; 0 disables"),
    };
    return s;
}

#undef WLNS_REAL
#undef WLNS_INT

template <class Cfg>
Cfg parse(std::string_view text, const Schema<Cfg>& schema, Cfg cfg = {}) {
    for (const auto& e : split_lines(text)) {
        const auto it = std::find_if(schema.begin(), schema.end(), [&](const auto& k) { return k.name == e.key; });
        if (it == schema.end())
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'", e.key, e.line);
        try {
            it->set(cfg, e.value);
        } catch (const BadValue& b) {
            throw ConfigError("line " + std::to_string(e.line) + ": key '" + e.key + "' expects " + b.expected +
                                  ", got '" + e.value + "'",
                              e.key, e.line);
        }
    }
    return cfg;
}

inline solver2d::RunConfig parse_config(std::string_view text) { return parse(text, schema_2d()); }
inline axisym::AxiRunConfig parse_axi_config(std::string_view text) { return parse(text, schema_axi()); }

template <class Cfg>
std::string canonical(const Cfg& cfg, const Schema<Cfg>& schema) {
    std::vector<std::string> lines;
    for (const auto& k : schema) lines.push_back(k.name + "=" + k.get(cfg));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

/// Documented defaults, one "key = value  # doc" line per key.
template <class Cfg>
std::string describe(const Schema<Cfg>& schema, const Cfg& defaults = {}) {
    std::ostringstream os;
    for (const auto& k : schema) os << k.name << " = " << k.get(defaults) << "  # " << k.doc << "\n";
    return os.str();
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[v & 0xf];
        v >>= 4;
    }
    buf[16] = 0;
    return buf;
}

}  // namespace wlns::config
