/*
 * field_io.hpp — CSV and JSON (de)serialization of grids and fields.
 *
 * CSV layout:  WaveField → "x,re,im" rows;  RealField → "x,value" rows.
 * JSON layout: envelope {grid: {n,x0,length,hbar,mass}, time, values}
 *              with complex values as [re, im] pairs.
 *
 * Doubles are written in shortest round-trip form (std::to_chars), so a
 * write→read cycle preserves every value bit-exactly — comfortably inside
 * the 1e−15 relative round-trip contract.  CSV carries no ℏ/m metadata;
 * readers accept them as arguments (defaults ℏ = m = 1).
 */
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace qwb {

using json = nlohmann::json;

// Shortest round-trip decimal form of a double.
inline std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ── JSON envelopes ────────────────────────────────────────────────────────────

inline json to_json(const Grid &g) {
    return json{{"n", g.n},
                {"x0", g.x0},
                {"length", g.length},
                {"hbar", g.hbar},
                {"mass", g.mass}};
}

inline Grid grid_from_json(const json &j) {
    return Grid(j.at("n").get<std::size_t>(), j.at("x0").get<double>(),
                j.at("length").get<double>(), j.value("hbar", 1.0),
                j.value("mass", 1.0));
}

inline json to_json(const WaveField &f) {
    json vals = json::array();
    for (const cplx &v : f.values) vals.push_back({v.real(), v.imag()});
    return json{{"grid", to_json(f.grid)}, {"time", f.time}, {"values", vals}};
}

inline json to_json(const RealField &f) {
    return json{
        {"grid", to_json(f.grid)}, {"time", f.time}, {"values", f.values}};
}

inline WaveField wave_from_json(const json &j) {
    Grid g = grid_from_json(j.at("grid"));
    const auto &vals = j.at("values");
    std::vector<cplx> v;
    v.reserve(vals.size());
    for (const auto &p : vals)
        v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return WaveField(g, std::move(v), j.value("time", 0.0));
}

inline RealField real_from_json(const json &j) {
    Grid g = grid_from_json(j.at("grid"));
    return RealField(g, j.at("values").get<std::vector<double>>(),
                     j.value("time", 0.0));
}

inline void save_json(const json &j, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error("save_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

inline json load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error("load_json: cannot open " + path);
    return json::parse(in);
}

// ── CSV ───────────────────────────────────────────────────────────────────────

inline void write_csv(const WaveField &f, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error("write_csv: cannot open " + path);
    out << "x,re,im\n";
    for (std::size_t j = 0; j < f.size(); ++j)
        out << fmt_double(f.grid.x(j)) << ',' << fmt_double(f[j].real()) << ','
            << fmt_double(f[j].imag()) << '\n';
}

inline void write_csv(const RealField &f, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw Error("write_csv: cannot open " + path);
    out << "x,value\n";
    for (std::size_t j = 0; j < f.size(); ++j)
        out << fmt_double(f.grid.x(j)) << ',' << fmt_double(f[j]) << '\n';
}

namespace detail {

inline std::vector<std::vector<double>> read_csv_rows(const std::string &path,
                                                      std::size_t cols) {
    std::ifstream in(path);
    if (!in) throw Error("read_csv: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != cols)
            throw Error("read_csv: bad column count in " + path);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Grid grid_from_x_column(const std::vector<std::vector<double>> &rows,
                               double hbar, double mass) {
    const std::size_t n = rows.size();
    if (n < 2) throw Error("read_csv: too few rows to infer a grid");
    const double x0 = rows.front()[0];
    const double dx = (rows.back()[0] - x0) / static_cast<double>(n - 1);
    return Grid(n, x0, dx * static_cast<double>(n), hbar, mass);
}

} // namespace detail

inline WaveField read_wave_csv(const std::string &path, double hbar = 1.0,
                               double mass = 1.0, double time = 0.0) {
    auto rows = detail::read_csv_rows(path, 3);
    Grid g = detail::grid_from_x_column(rows, hbar, mass);
    std::vector<cplx> v;
    v.reserve(rows.size());
    for (const auto &r : rows) v.emplace_back(r[1], r[2]);
    return WaveField(g, std::move(v), time);
}

inline RealField read_real_csv(const std::string &path, double hbar = 1.0,
                               double mass = 1.0, double time = 0.0) {
    auto rows = detail::read_csv_rows(path, 2);
    Grid g = detail::grid_from_x_column(rows, hbar, mass);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto &r : rows) v.push_back(r[1]);
    return RealField(g, std::move(v), time);
}

} // namespace qwb
