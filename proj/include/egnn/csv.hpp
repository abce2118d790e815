#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "egnn/common.hpp"
#include "egnn/features.hpp"
#include "egnn/selection.hpp"

namespace egnn {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            return cells;
        }
        cells.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

/// Strips a trailing carriage return so CRLF files parse like LF files.
inline void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

/// The interchange table between feature extraction and the classifier: one
/// row per window with its provenance and weak label.
struct FeatureTable {
    struct Row {
        std::string subject;
        std::string game;
        std::uint64_t window = 0;
        int label = 0;
        std::vector<double> x;
    };

    std::vector<std::string> feature_names;
    std::vector<Row> rows;

    std::vector<int> labels() const {
        std::vector<int> y;
        y.reserve(rows.size());
        for (const Row& r : rows) y.push_back(r.label);
        return y;
    }

    std::vector<std::vector<double>> matrix() const {
        std::vector<std::vector<double>> X;
        X.reserve(rows.size());
        for (const Row& r : rows) X.push_back(r.x);
        return X;
    }
};

inline void write_feature_csv(const std::string& path, const FeatureTable& table) {
    std::ofstream out = open_output(path);
    out << "subject,game,window,label";
    for (const auto& name : table.feature_names) {
        if (name.find(',') != std::string::npos)
            throw DataError("feature name contains a comma: " + name);
        out << ',' << name;
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.subject.find(',') != std::string::npos ||
            row.game.find(',') != std::string::npos)
            throw DataError("subject/game ids must not contain commas");
        if (row.x.size() != table.feature_names.size())
            throw DataError("feature row width does not match header");
        out << row.subject << ',' << row.game << ',' << row.window << ',' << row.label;
        for (double v : row.x) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw DataError("short write to " + path);
}

inline FeatureTable read_feature_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    chomp(line);
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 5 || header[0] != "subject" || header[1] != "game" ||
        header[2] != "window" || header[3] != "label")
        throw DataError(path + ": expected header subject,game,window,label,<features...>");
    FeatureTable table;
    table.feature_names.assign(header.begin() + 4, header.end());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (cells.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) +
                            " columns, got " + std::to_string(cells.size()));
        FeatureTable::Row row;
        row.subject = cells[0];
        row.game = cells[1];
        row.window = static_cast<std::uint64_t>(parse_int(cells[2], where + " window"));
        row.label = static_cast<int>(parse_int(cells[3], where + " label"));
        row.x.reserve(cells.size() - 4);
        for (std::size_t j = 4; j < cells.size(); ++j)
            row.x.push_back(parse_double(cells[j], where + " " + header[j]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Reads one raw recording: a header row naming the channels, then one
/// sample per row.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_recording_csv(
    const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    chomp(line);
    const std::vector<std::string> names = split_csv_line(line);
    if (names.empty() || names.front().empty())
        throw DataError(path + ": header row must name the channels");
    std::vector<std::vector<double>> channels(names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (cells.size() != names.size())
            throw DataError(where + ": expected " + std::to_string(names.size()) +
                            " samples, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < cells.size(); ++c)
            channels[c].push_back(parse_double(cells[c], where + " " + names[c]));
    }
    if (channels.front().empty()) throw DataError(path + ": no samples");
    return {names, channels};
}

inline void write_ranking_csv(const std::string& path, const FeatureRanking& ranking,
                              std::span<const std::string> names) {
    std::ofstream out = open_output(path);
    out << "rank,feature,channel,band,statistic,score\n";
    std::size_t rank = 0;
    for (const RankedFeature& f : ranking.order) {
        if (f.index >= names.size()) throw DataError("ranking index outside feature names");
        FeatureName parts;
        try {
            parts = parse_feature_name(names[f.index]);
        } catch (const DataError&) {
            // Features not named by the channel.band.stat convention still
            // rank; their decomposition columns stay empty.
        }
        out << ++rank << ',' << names[f.index] << ',' << parts.channel << ',' << parts.band
            << ',' << parts.stat << ',' << format_double(f.score) << '\n';
    }
    if (!out) throw DataError("short write to " + path);
}

/// Feature names of a ranking CSV in rank order.
inline std::vector<std::string> read_ranking_order(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    chomp(line);
    if (split_csv_line(line).size() != 6 || line.rfind("rank,feature,", 0) != 0)
        throw DataError(path + ": unexpected ranking header: " + line);
    std::vector<std::string> order;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != 6)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 6 columns");
        order.push_back(cells[1]);
    }
    if (order.empty()) throw DataError(path + ": no ranked features");
    return order;
}

}  // namespace egnn
