#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "egnn/csv.hpp"
#include "egnn/io.hpp"
#include "egnn/metrics.hpp"
#include "egnn/network.hpp"
#include "egnn/normalize.hpp"

namespace egnn {

struct TraceRow {
    std::uint64_t h = 0;
    double acc = 0.0;
    std::size_t c_now = 0;
    double c_avg = 0.0;
    double rho = 0.0;
    double ii = 0.0;
};

struct RunConfig {
    HyperParams params;
    std::uint64_t seed = 0;
    std::vector<int> class_universe;
    bool normalize = true;  // off when instances are already in the unit cube
};

struct RunResult {
    StreamMetrics metrics;
    std::vector<TraceRow> traces;
    ClassifierState final_state;
    std::vector<Rule> rules;
    double mean_accuracy = 0.0;       // mean of the per-step accuracy curve
    double micros_per_instance = 0.0; // wall clock, learning step only
};

/// Test-then-train over the instance sequence: each instance is scored
/// against the estimate made before its label is revealed, then consumed by
/// one learning step. The interpretability index is traced every step and
/// sampled into the report history every hr steps and at the end of the run.
inline RunResult run_prequential(const std::vector<std::vector<double>>& X,
                                 std::span<const int> y, const RunConfig& cfg) {
    if (X.empty()) throw DataError("empty instance stream");
    if (X.size() != y.size()) throw DataError("instance/label count mismatch");

    OnlineNormalizer norm(X.front().size());
    Classifier model(cfg.params, cfg.seed, cfg.class_universe);
    RunResult res;
    res.traces.reserve(X.size());

    std::chrono::steady_clock::duration learn_time{};
    double acc_sum = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const std::vector<double>& raw = X[i];
        const std::vector<double> xn = cfg.normalize ? norm.normalize(raw) : raw;

        const auto t0 = std::chrono::steady_clock::now();
        const LearnResult step = model.learn(xn, y[i]);
        learn_time += std::chrono::steady_clock::now() - t0;

        res.metrics.record(y[i], step.prediction.predicted_class, model.granule_count());
        const double ii = interpretability(model.granules()).ii;
        const std::uint64_t h = model.step();
        res.traces.push_back({h, res.metrics.accuracy(), model.granule_count(),
                              res.metrics.avg_compactness(), model.rho(), ii});
        acc_sum += res.metrics.accuracy();
        if (h % cfg.params.hr == 0 || i + 1 == X.size()) res.metrics.record_interpretability(ii);
    }

    res.final_state = model.state();
    res.rules = model.extract_rules();
    res.mean_accuracy = acc_sum / static_cast<double>(X.size());
    res.micros_per_instance =
        std::chrono::duration<double, std::micro>(learn_time).count() /
        static_cast<double>(X.size());
    return res;
}

inline std::vector<std::vector<double>> subset_columns(const std::vector<std::vector<double>>& X,
                                                       std::span<const std::size_t> indices) {
    std::vector<std::vector<double>> out;
    out.reserve(X.size());
    for (const auto& row : X) {
        std::vector<double> r;
        r.reserve(indices.size());
        for (std::size_t j : indices) {
            if (j >= row.size()) throw DataError("feature index outside instance width");
            r.push_back(row[j]);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// -------------------------------------------------------------------------
// Trace CSV

inline void write_traces_csv(const std::string& path, std::span<const TraceRow> traces) {
    std::ofstream out = open_output(path);
    out << "h,acc,c_now,c_avg,rho,ii\n";
    for (const TraceRow& t : traces) {
        out << t.h << ',' << format_double(t.acc) << ',' << t.c_now << ','
            << format_double(t.c_avg) << ',' << format_double(t.rho) << ','
            << format_double(t.ii) << '\n';
    }
    if (!out) throw DataError("short write to " + path);
}

inline std::vector<TraceRow> read_traces_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    chomp(line);
    if (line != "h,acc,c_now,c_avg,rho,ii")
        throw DataError(path + ": unexpected trace header: " + line);
    std::vector<TraceRow> traces;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (cells.size() != 6) throw DataError(where + ": expected 6 columns");
        TraceRow t;
        t.h = static_cast<std::uint64_t>(parse_int(cells[0], where + " h"));
        t.acc = parse_double(cells[1], where + " acc");
        t.c_now = static_cast<std::size_t>(parse_int(cells[2], where + " c_now"));
        t.c_avg = parse_double(cells[3], where + " c_avg");
        t.rho = parse_double(cells[4], where + " rho");
        t.ii = parse_double(cells[5], where + " ii");
        traces.push_back(t);
    }
    return traces;
}

// -------------------------------------------------------------------------
// Run reports

inline json confusion_to_json(const ConfusionMatrix& m) {
    json j;
    const std::vector<int> classes = m.classes();
    j["classes"] = classes;
    json counts = json::array();
    for (int t : classes) {
        json row = json::array();
        for (int p : classes) row.push_back(m.count(t, p));
        counts.push_back(std::move(row));
    }
    j["counts"] = std::move(counts);
    return j;
}

/// Canonical run summary. Deliberately timing-free so identical configs and
/// seeds reproduce identical bytes; wall-clock figures go to a sidecar.
inline json report_to_json(const RunResult& res, const json& config_echo) {
    json j;
    j["config"] = config_echo;
    j["instances"] = res.metrics.step();
    j["final_accuracy"] = res.metrics.accuracy();
    j["mean_accuracy"] = res.mean_accuracy;
    j["avg_compactness"] = res.metrics.avg_compactness();
    j["final_granules"] = res.final_state.granules.size();
    j["final_rho"] = res.final_state.rho;
    j["final_ii"] = res.metrics.final_ii();
    j["mean_ii"] = res.metrics.mean_ii();
    j["ii_history"] = res.metrics.ii_history();
    j["classes"] = res.final_state.classes_seen;
    j["confusion"] = confusion_to_json(res.metrics.confusion());
    return j;
}

/// Writes the full artifact set of one run into dir: report.json,
/// traces.csv, model.json, rules.json, rules.txt, timing.json.
inline void write_run_artifacts(const std::string& dir, const RunResult& res,
                                std::span<const std::string> feature_names,
                                const json& config_echo) {
    std::filesystem::create_directories(dir);
    const auto at = [&dir](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };
    save_json_file(at("report.json"), report_to_json(res, config_echo));
    write_traces_csv(at("traces.csv"), res.traces);
    save_checkpoint(at("model.json"), res.final_state);
    save_json_file(at("rules.json"), rules_to_json(res.rules, feature_names));
    std::ofstream rules_txt = open_output(at("rules.txt"));
    rules_txt << rules_to_text(res.rules, feature_names);
    json timing;
    timing["micros_per_instance"] = res.micros_per_instance;
    save_json_file(at("timing.json"), timing);
}

// -------------------------------------------------------------------------
// Sweeps

struct SweepRow {
    std::string tag;  // feature subset description (count or channel name)
    std::size_t n_features = 0;
    HyperParams params;
    double final_accuracy = 0.0;
    double avg_compactness = 0.0;
    double final_ii = 0.0;
};

struct SweepCell {
    std::string tag;
    std::vector<std::size_t> feature_indices;
    HyperParams params;
};

/// Runs every cell (feature subset x hyper-parameter setting) independently:
/// each owns its model and normalizer, so cells execute on a small thread
/// pool and results keep the input order regardless of scheduling.
inline std::vector<SweepRow> run_sweep(const std::vector<std::vector<double>>& X,
                                       std::span<const int> y,
                                       std::span<const SweepCell> cells,
                                       const RunConfig& base) {
    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                const SweepCell& cell = cells[i];
                RunConfig cfg = base;
                cfg.params = cell.params;
                // Columns are taken in source order: the subset is a set, and
                // keeping the matrix order makes the full-size cell reproduce
                // a plain run bit for bit (products are order-sensitive).
                std::vector<std::size_t> cols = cell.feature_indices;
                std::sort(cols.begin(), cols.end());
                const RunResult res = run_prequential(subset_columns(X, cols), y, cfg);
                rows[i] = {cell.tag,
                           cell.feature_indices.size(),
                           cell.params,
                           res.metrics.accuracy(),
                           res.metrics.avg_compactness(),
                           res.metrics.final_ii()};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), cells.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

inline void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows) {
    std::ofstream out = open_output(path);
    out << "subset,n_features,rho0,hr,eta,acc_pct,c_avg,ii\n";
    for (const SweepRow& r : rows) {
        out << r.tag << ',' << r.n_features << ',' << format_double(r.params.rho0) << ','
            << r.params.hr << ',' << format_double(r.params.eta) << ','
            << format_double(100.0 * r.final_accuracy) << ',' << format_double(r.avg_compactness)
            << ',' << format_double(r.final_ii) << '\n';
    }
    if (!out) throw DataError("short write to " + path);
}

}  // namespace egnn
