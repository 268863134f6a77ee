#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "deadcore/errors.hpp"
#include "deadcore/potential.hpp"

namespace deadcore {

// Flat INI configuration: [section] headers and key = value lines, with
// '#' comments (';' stays available as a list separator inside values).
// The resolved form (defaults filled in) is embedded verbatim in every
// report, so a run can be reproduced from its output.
class RunConfig {
public:
    static RunConfig parse(const std::string& text) {
        RunConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw config_error("config line " + std::to_string(lineno) +
                                       ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw config_error("config line " + std::to_string(lineno) +
                                       ": empty section name");
                cfg.kv_[section]; // touch
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) +
                                   ": expected key = value");
            if (section.empty())
                throw config_error("config line " + std::to_string(lineno) +
                                   ": key outside any [section]");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error("config line " + std::to_string(lineno) + ": empty key");
            cfg.kv_[section][key] = value;
        }
        return cfg;
    }

    static RunConfig from_json(const nlohmann::ordered_json& j) {
        RunConfig cfg;
        for (auto& [sec, obj] : j.items())
            for (auto& [key, val] : obj.items())
                cfg.kv_[sec][key] = val.get<std::string>();
        return cfg;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        for (auto& [sec, keys] : kv_) {
            nlohmann::ordered_json obj;
            for (auto& [key, val] : keys) obj[key] = val;
            j[sec] = obj;
        }
        return j;
    }

    void set_default(const std::string& sec, const std::string& key, const std::string& value) {
        auto& s = kv_[sec];
        if (!s.count(key)) s[key] = value;
    }
    void set(const std::string& sec, const std::string& key, const std::string& value) {
        kv_[sec][key] = value;
    }

    bool has(const std::string& sec, const std::string& key) const {
        auto it = kv_.find(sec);
        return it != kv_.end() && it->second.count(key);
    }

    std::string str(const std::string& sec, const std::string& key) const {
        auto it = kv_.find(sec);
        if (it == kv_.end() || !it->second.count(key))
            throw config_error("config: missing " + sec + "." + key);
        return it->second.at(key);
    }

    double num(const std::string& sec, const std::string& key) const {
        const std::string v = str(sec, key);
        try {
            size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (...) {
            throw config_error("config: " + sec + "." + key + " is not a number: '" + v + "'");
        }
    }

    int integer(const std::string& sec, const std::string& key) const {
        const double d = num(sec, key);
        const int i = static_cast<int>(d);
        if (double(i) != d)
            throw config_error("config: " + sec + "." + key + " must be an integer");
        return i;
    }

    std::vector<double> num_list(const std::string& sec, const std::string& key) const {
        std::vector<double> out;
        std::istringstream in(str(sec, key));
        std::string cell;
        while (std::getline(in, cell, ',')) {
            cell = trim(cell);
            if (cell.empty()) continue;
            try {
                out.push_back(std::stod(cell));
            } catch (...) {
                throw config_error("config: " + sec + "." + key + " has a non-numeric entry '" +
                                   cell + "'");
            }
        }
        return out;
    }

    // "x,y,R; x,y,R; ..." ball lists
    std::vector<std::array<double, 3>> ball_list(const std::string& sec,
                                                 const std::string& key) const {
        std::vector<std::array<double, 3>> out;
        std::istringstream in(str(sec, key));
        std::string group;
        while (std::getline(in, group, ';')) {
            group = trim(group);
            if (group.empty()) continue;
            std::istringstream gs(group);
            std::string cell;
            std::vector<double> vals;
            while (std::getline(gs, cell, ',')) vals.push_back(std::stod(trim(cell)));
            if (vals.size() != 3)
                throw config_error("config: " + sec + "." + key + " entries need x,y,R");
            out.push_back({vals[0], vals[1], vals[2]});
        }
        return out;
    }

    // Builds the potential from the [potential] section.
    RadialPotential potential() const {
        const std::string kind = str("potential", "kind");
        const double q = num("potential", "q");
        if (kind == "powerlaw") return RadialPotential::power_law(num("potential", "alpha"), q);
        if (kind == "characteristic") return RadialPotential::characteristic(q);
        if (kind == "quadratic") return RadialPotential::quadratic(q);
        if (kind == "zero") return RadialPotential::zero(q);
        if (kind == "tabulated") {
            std::vector<std::pair<double, double>> bps;
            std::istringstream in(str("potential", "breakpoints"));
            std::string cell;
            while (std::getline(in, cell, ',')) {
                cell = trim(cell);
                if (cell.empty()) continue;
                const auto colon = cell.find(':');
                if (colon == std::string::npos)
                    throw config_error("config: breakpoints entries need s:value");
                bps.push_back({std::stod(cell.substr(0, colon)), std::stod(cell.substr(colon + 1))});
            }
            return RadialPotential::tabulated(std::move(bps), q);
        }
        throw config_error("config: unknown potential.kind '" + kind + "'");
    }

    PotentialSpec potential_spec() const {
        const std::string w0 = str("potential", "w0_kind");
        if (w0 != "none" && w0 != "axis")
            throw config_error("config: unknown potential.w0_kind '" + w0 + "'");
        return PotentialSpec{potential(), w0 == "axis" ? W0Kind::Axis : W0Kind::None,
                             integer("potential", "m")};
    }

private:
    static std::string trim(std::string s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> kv_;
};

} // namespace deadcore
