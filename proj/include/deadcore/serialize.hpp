#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "deadcore/diagnostics.hpp"
#include "deadcore/dp_solver.hpp"
#include "deadcore/errors.hpp"
#include "deadcore/lattice.hpp"
#include "deadcore/radial.hpp"

namespace deadcore {

using json = nlohmann::ordered_json;

// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path.string());
    out << text;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Profile CSV: header "r,h", one row per node, LF endings.
inline std::string profile_to_csv(const RadialProfile& prof) {
    std::string out = "r,h\n";
    for (int i = 0; i < prof.nodes(); ++i)
        out += fmt17(prof.grid.radii[i]) + "," + fmt17(prof.values[i]) + "\n";
    return out;
}

template <class Oracle>
std::string oracle_to_csv(const Oracle& o, double R, int samples) {
    std::string out = "r,h\n";
    for (int i = 0; i <= samples; ++i) {
        const double r = R * double(i) / samples;
        out += fmt17(r) + "," + fmt17(o.eval(r)) + "\n";
    }
    return out;
}

// Field CSV: "i,j,u1,...,um" in 2d, "i,u1,...,um" in 1d; Outside nodes are
// skipped.
inline std::string field_to_csv(const GridField& f) {
    std::string out = f.dom.n == 2 ? "i,j" : "i";
    for (int c = 1; c <= f.m; ++c) out += ",u" + std::to_string(c);
    out += "\n";
    for (int j = 0; j < f.dom.shape[1]; ++j) {
        for (int i = 0; i < f.dom.shape[0]; ++i) {
            const int node = f.dom.idx(i, j);
            if (f.dom.mask[node] == NodeMask::Outside) continue;
            out += std::to_string(i);
            if (f.dom.n == 2) out += "," + std::to_string(j);
            for (int c = 0; c < f.m; ++c) out += "," + fmt17(f.at(node)[c]);
            out += "\n";
        }
    }
    return out;
}

inline json field_metadata(const GridField& f) {
    json meta;
    meta["n"] = f.dom.n;
    meta["shape"] = {f.dom.shape[0], f.dom.shape[1]};
    meta["h"] = f.dom.h;
    meta["q"] = f.q;
    meta["mask_type"] = to_string(f.dom.domain);
    meta["origin"] = {f.dom.origin[0], f.dom.origin[1]};
    if (f.dom.domain == DomainShape::Disk) meta["disk_radius"] = f.dom.disk_radius;
    meta["m"] = f.m;
    return meta;
}

inline json iq_to_json(const IqResult& iq) {
    return iq.infinite ? json("inf") : json(iq.value);
}

inline json dead_core_to_json(const DeadCoreReport& rep, int N, int M,
                              std::pair<double, double> lambda_bracket) {
    json j;
    j["core_radius"] = rep.core_radius;
    j["iq_value"] = iq_to_json(rep.iq);
    j["iq_variant"] = to_string(rep.iq.variant);
    j["iq_value_sqrt2w"] = iq_to_json(rep.iq_sqrt2w);
    j["theorem2_threshold"] =
        rep.iq.infinite ? json("inf") : json(rep.theorem2_threshold);
    j["lemma_pl3_core_bound"] =
        rep.iq_sqrt2w.infinite ? json(nullptr) : json(rep.lemma_core_bound);
    j["has_dead_core"] = rep.has_dead_core;
    j["zero_tolerance"] = rep.zero_tolerance;
    j["n"] = rep.n;
    j["R"] = rep.R;
    j["q"] = rep.q;
    j["N"] = N;
    j["M"] = M;
    j["lambda_bracket"] = {lambda_bracket.first, lambda_bracket.second};
    return j;
}

// Generic numeric CSV reader: header row plus rows of doubles.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        if (first) {
            while (std::getline(ls, cell, ',')) t.header.push_back(cell);
            first = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw config_error("csv: non-numeric cell '" + cell + "'");
            }
        }
        if (!row.empty()) t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace deadcore
