#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "egnn/common.hpp"
#include "egnn/csv.hpp"
#include "egnn/features.hpp"
#include "egnn/network.hpp"

namespace egnn {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("short write to " + path);
}

// -------------------------------------------------------------------------
// Model checkpoints

inline json checkpoint_to_json(const ClassifierState& s) {
    json j;
    j["hyper_params"] = {{"rho0", s.params.rho0},
                         {"hr", s.params.hr},
                         {"eta", s.params.eta},
                         {"aggregation", "product"}};
    j["rho"] = s.rho;
    j["step"] = s.step;
    j["created_in_epoch"] = s.created_in_epoch;
    j["classes_seen"] = s.classes_seen;
    j["class_universe"] = s.class_universe;
    j["rng_state"] = s.rng_state;
    json granules = json::array();
    for (const Granule& g : s.granules) {
        json jg;
        jg["label"] = g.label();
        jg["right"] = g.right_count();
        jg["wrong"] = g.wrong_count();
        jg["last_win_step"] = g.last_win_step();
        jg["created_step"] = g.created_step();
        jg["weights"] = std::vector<double>(g.weights().begin(), g.weights().end());
        json bounds = json::array();
        for (const auto& b : g.bounds())
            bounds.push_back({b.outer_lo, b.inner_lo, b.inner_hi, b.outer_hi});
        jg["bounds"] = std::move(bounds);
        granules.push_back(std::move(jg));
    }
    j["granules"] = std::move(granules);
    return j;
}

inline ClassifierState checkpoint_from_json(const json& j, const std::string& context) {
    try {
        ClassifierState s;
        const json& hp = j.at("hyper_params");
        s.params.rho0 = hp.at("rho0").get<double>();
        s.params.hr = hp.at("hr").get<std::uint64_t>();
        s.params.eta = hp.at("eta").get<double>();
        if (hp.at("aggregation").get<std::string>() != "product")
            throw DataError(context + ": unknown aggregation");
        s.rho = j.at("rho").get<double>();
        s.step = j.at("step").get<std::uint64_t>();
        s.created_in_epoch = j.at("created_in_epoch").get<std::uint64_t>();
        s.classes_seen = j.at("classes_seen").get<std::vector<int>>();
        s.class_universe = j.at("class_universe").get<std::vector<int>>();
        s.rng_state = j.at("rng_state").get<std::string>();
        for (const json& jg : j.at("granules")) {
            std::vector<Granule::AxisBounds> bounds;
            for (const json& jb : jg.at("bounds")) {
                if (!jb.is_array() || jb.size() != 4)
                    throw DataError(context + ": axis bounds must be 4-element arrays");
                bounds.push_back({jb[0].get<double>(), jb[1].get<double>(),
                                  jb[2].get<double>(), jb[3].get<double>()});
            }
            s.granules.push_back(Granule::from_parts(
                std::move(bounds), jg.at("weights").get<std::vector<double>>(),
                jg.at("label").get<int>(), jg.at("right").get<std::uint64_t>(),
                jg.at("wrong").get<std::uint64_t>(), jg.at("last_win_step").get<std::uint64_t>(),
                jg.at("created_step").get<std::uint64_t>()));
        }
        return s;
    } catch (const json::exception& e) {
        throw DataError(context + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(context + ": " + e.what());
    }
}

inline void save_checkpoint(const std::string& path, const ClassifierState& s) {
    save_json_file(path, checkpoint_to_json(s));
}

inline ClassifierState load_checkpoint(const std::string& path) {
    return checkpoint_from_json(load_json_file(path), path);
}

// -------------------------------------------------------------------------
// Dataset manifests

struct ManifestEntry {
    std::string file;  // resolved absolute/relative path
    std::string subject;
    std::string game;
    int label = 0;
};

struct Manifest {
    double sample_rate = 0.0;
    std::vector<ManifestEntry> entries;
};

/// Manifest JSON: {"sample_rate": Hz, "recordings": [{"file", "subject",
/// "game", "label"}, ...]}. Relative file paths resolve against the
/// manifest's own directory.
inline Manifest read_manifest(const std::string& path) {
    const json j = load_json_file(path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    try {
        Manifest m;
        m.sample_rate = j.at("sample_rate").get<double>();
        if (!(m.sample_rate > 0.0)) throw DataError(path + ": sample_rate must be positive");
        for (const json& je : j.at("recordings")) {
            ManifestEntry e;
            std::filesystem::path file = je.at("file").get<std::string>();
            if (file.is_relative()) file = base / file;
            e.file = file.string();
            e.subject = je.at("subject").get<std::string>();
            e.game = je.at("game").get<std::string>();
            e.label = je.at("label").get<int>();
            m.entries.push_back(std::move(e));
        }
        if (m.entries.empty()) throw DataError(path + ": no recordings listed");
        return m;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline Recording load_recording(const ManifestEntry& entry, double sample_rate) {
    auto [names, channels] = read_recording_csv(entry.file);
    Recording rec;
    rec.subject = entry.subject;
    rec.game = entry.game;
    rec.label = entry.label;
    rec.sample_rate = sample_rate;
    rec.channel_names = std::move(names);
    rec.channels = std::move(channels);
    rec.validate();
    return rec;
}

// -------------------------------------------------------------------------
// Rule dumps

inline json rules_to_json(std::span<const Rule> rules, std::span<const std::string> names) {
    json out = json::array();
    for (const Rule& r : rules) {
        json jr;
        jr["class"] = r.label;
        jr["win_share"] = r.win_share;
        jr["right"] = r.right;
        jr["wrong"] = r.wrong;
        json feats = json::array();
        for (std::size_t j = 0; j < r.core.size(); ++j) {
            json jf;
            jf["feature"] = j < names.size() ? names[j] : "x" + std::to_string(j + 1);
            jf["core"] = {r.core[j].lo, r.core[j].hi};
            jf["support"] = {r.support[j].lo, r.support[j].hi};
            jf["weight"] = r.weights[j];
            feats.push_back(std::move(jf));
        }
        jr["features"] = std::move(feats);
        out.push_back(std::move(jr));
    }
    return out;
}

inline std::string rules_to_text(std::span<const Rule> rules, std::span<const std::string> names) {
    std::string out;
    std::size_t id = 0;
    for (const Rule& r : rules) {
        out += "rule " + std::to_string(++id) + ": class " + std::to_string(r.label) +
               "  share " + format_double(r.win_share) + "  right " + std::to_string(r.right) +
               "  wrong " + std::to_string(r.wrong) + "\n";
        for (std::size_t j = 0; j < r.core.size(); ++j) {
            const std::string name = j < names.size() ? names[j] : "x" + std::to_string(j + 1);
            out += "  " + name + ": core [" + format_double(r.core[j].lo) + ", " +
                   format_double(r.core[j].hi) + "]  support [" + format_double(r.support[j].lo) +
                   ", " + format_double(r.support[j].hi) + "]  weight " +
                   format_double(r.weights[j]) + "\n";
        }
    }
    return out;
}

}  // namespace egnn
