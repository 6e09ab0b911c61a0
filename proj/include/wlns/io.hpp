#pragma once
// Ledger CSV files and binary checkpoints.
//
// Checkpoints are little-endian:
//   2D:     32-byte header "WL2D" u32 n, f64 L, f64 t, f64 epsilon; then u32 shape and the raw
//           half-complex velocity coefficients (2 components x n x (n/2+1) complex doubles)
//   axisym: 36-byte header "WLAX" u32 n_r, u32 n_z, f64 R, f64 Z, f64 t; then eta (n_r x n_z doubles)

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wlns/axisym.hpp"
#include "wlns/config.hpp"
#include "wlns/errors.hpp"
#include "wlns/solver2d.hpp"

namespace wlns::io {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

// ---------------------------------------------------------------------------
// CSV

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) {
                std::vector<double> out;
                for (const auto& r : rows) out.push_back(r[c]);
                return out;
            }
        throw IoError("ledger has no column '" + name + "'");
    }
};

inline std::string to_csv(const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::string out = header + "\n";
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out += ',';
            out += config::format_double(r[c]);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const solver2d::Ledger& l) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : l.rows)
        rows.push_back({r.t, r.e_phi_u, r.e_phi_grad_u, r.e_phi_omega, r.e_phi_grad_omega, r.diss_cum, r.e_u_l2,
                        r.u_l4_phi});
    return to_csv(solver2d::kLedgerHeader, rows);
}

inline std::string to_csv(const axisym::AxiLedger& l) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : l.rows) rows.push_back({r.t, r.lady_q, r.e_phi_u, r.e_psi_omega, r.e_psi_grad_omega});
    return to_csv(axisym::kAxiLedgerHeader, rows);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(path.string() + ": cannot open for writing");
    f << text;
    if (!f) throw IoError(path.string() + ": write failed");
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Table parse_csv(const std::string& text, const std::string& where = "csv") {
    Table t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) out.push_back(std::string(config::trim(cell)));
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (config::trim(line).empty()) continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw IoError(where + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                          " columns, found " + std::to_string(cells.size()));
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                row.push_back(config::parse_double(c));
            } catch (const config::BadValue&) {
                throw IoError(where + ":" + std::to_string(lineno) + ": not a number: '" + c + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw IoError(where + ": empty ledger");
    return t;
}

inline Table read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path), path.string()); }

// ---------------------------------------------------------------------------
// Binary checkpoints

namespace detail {

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;
    std::string where;

    template <class T>
    T get() {
        if (pos + sizeof(T) > data.size()) throw IoError(where + ": truncated checkpoint");
        T v;
        std::memcpy(&v, data.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    void magic(const char* m) {
        if (data.size() < 4 || data.compare(0, 4, m) != 0) throw IoError(where + ": not a " + m + " checkpoint");
        pos = 4;
    }
    void finish() const {
        if (pos != data.size()) throw IoError(where + ": trailing bytes in checkpoint");
    }
};

}  // namespace detail

inline std::string encode(const solver2d::State& s) {
    std::string out = "WL2D";
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.n));
    detail::put(out, s.grid.L);
    detail::put(out, s.t);
    detail::put(out, s.epsilon);
    detail::put<std::uint32_t>(out, s.shape == spectral::Shape::compact_bump ? 0u : 1u);
    for (const auto& comp : s.u)
        for (const auto& c : comp.c) {
            detail::put(out, c.real());
            detail::put(out, c.imag());
        }
    return out;
}

inline solver2d::State decode_2d(const std::string& data, const std::string& where = "checkpoint") {
    detail::Reader r{data, 0, where};
    r.magic("WL2D");
    solver2d::State s;
    const auto n = r.get<std::uint32_t>();
    s.grid = {static_cast<int>(n), r.get<double>()};
    s.t = r.get<double>();
    s.epsilon = r.get<double>();
    const auto shape = r.get<std::uint32_t>();
    if (shape > 1) throw IoError(where + ": unknown mollifier shape tag");
    s.shape = shape == 0 ? spectral::Shape::compact_bump : spectral::Shape::gaussian_surrogate;
    try {
        s.grid.validate();
    } catch (const ContractError& e) {
        throw IoError(where + ": bad grid in header: " + e.what());
    }
    for (auto& comp : s.u) {
        comp = spectral::Spectrum(s.grid);
        for (auto& c : comp.c) {
            const double re = r.get<double>(), im = r.get<double>();
            c = {re, im};
        }
    }
    r.finish();
    return s;
}

inline std::string encode(const axisym::AxiState& s) {
    std::string out = "WLAX";
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.n_r));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.n_z));
    detail::put(out, s.grid.R);
    detail::put(out, s.grid.Z);
    detail::put(out, s.t);
    for (double v : s.eta.v) detail::put(out, v);
    return out;
}

inline axisym::AxiState decode_axi(const std::string& data, const std::string& where = "checkpoint") {
    detail::Reader r{data, 0, where};
    r.magic("WLAX");
    axisym::CylGrid g;
    g.n_r = static_cast<int>(r.get<std::uint32_t>());
    g.n_z = static_cast<int>(r.get<std::uint32_t>());
    g.R = r.get<double>();
    g.Z = r.get<double>();
    const double t = r.get<double>();
    try {
        g.validate();
    } catch (const ContractError& e) {
        throw IoError(where + ": bad grid in header: " + e.what());
    }
    axisym::Array2 eta(g.n_r, g.n_z);
    for (auto& v : eta.v) v = r.get<double>();
    r.finish();
    return axisym::make_state(g, std::move(eta), t);
}

inline void save(const std::filesystem::path& p, const solver2d::State& s) { write_text(p, encode(s)); }
inline void save(const std::filesystem::path& p, const axisym::AxiState& s) { write_text(p, encode(s)); }
inline solver2d::State load_2d(const std::filesystem::path& p) { return decode_2d(read_text(p), p.string()); }
inline axisym::AxiState load_axi(const std::filesystem::path& p) { return decode_axi(read_text(p), p.string()); }

}  // namespace wlns::io
