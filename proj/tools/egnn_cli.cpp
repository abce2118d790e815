// Command-line front end: feature extraction from raw recordings, feature
// ranking, prequential runs, leave-k-out sweeps, plot-data reports, and a
// synthetic benchmark stream generator.
//
// Exit codes: 0 success, 1 usage error, 2 data/runtime error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <egnn/egnn.hpp>
#include <egnn/synth.hpp>

namespace {

using egnn::json;

std::vector<int> parse_class_list(const std::string& csv) {
    std::vector<int> classes;
    for (const std::string& cell : egnn::split_csv_line(csv))
        classes.push_back(static_cast<int>(egnn::parse_int(cell, "--classes")));
    return classes;
}

/// Fills options that were not given on the command line from a JSON config
/// file. Command-line values always win.
class ConfigMerge {
public:
    ConfigMerge(CLI::App* cmd, const std::string& config_path) : cmd_(cmd) {
        if (!config_path.empty()) cfg_ = egnn::load_json_file(config_path);
    }

    template <typename T>
    void merge(const std::string& flag, const std::string& key, T& value) {
        if (cmd_->count(flag) > 0 || !cfg_.contains(key)) return;
        try {
            value = cfg_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw egnn::DataError("config key '" + key + "': " + e.what());
        }
    }

    bool has(const std::string& key) const { return cfg_.contains(key); }

private:
    CLI::App* cmd_;
    json cfg_ = json::object();
};

struct SeedOption {
    std::uint64_t value = 0;
    bool given = false;
};

void add_seed(CLI::App* cmd, SeedOption& seed) {
    cmd->add_option_function<std::uint64_t>(
           "--seed",
           [&seed](std::uint64_t v) {
               seed.value = v;
               seed.given = true;
           },
           "Generator seed (required; controls the first-instance estimate)");
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
    std::string manifest;
    double window_seconds = 0.0;
    std::string output;
};

int cmd_extract(const ExtractArgs& args) {
    const egnn::Manifest manifest = egnn::read_manifest(args.manifest);
    egnn::FeatureTable table;
    const auto& bands = egnn::standard_bands();
    for (const egnn::ManifestEntry& entry : manifest.entries) {
        const egnn::Recording rec = egnn::load_recording(entry, manifest.sample_rate);
        if (table.feature_names.empty()) {
            table.feature_names = egnn::feature_names(rec.channel_names, bands);
        } else {
            const auto names = egnn::feature_names(rec.channel_names, bands);
            if (names != table.feature_names)
                throw egnn::DataError(entry.file + ": channel set differs from first recording");
        }
        const auto slices = egnn::segment(rec, args.window_seconds);
        for (std::size_t w = 0; w < slices.size(); ++w) {
            egnn::FeatureTable::Row row;
            row.subject = rec.subject;
            row.game = rec.game;
            row.window = w + 1;
            row.label = rec.label;
            row.x = egnn::extract_window_features(rec, slices[w], bands);
            table.rows.push_back(std::move(row));
        }
    }
    egnn::write_feature_csv(args.output, table);
    std::cout << "wrote " << table.rows.size() << " instances ("
              << table.feature_names.size() << " features) to " << args.output << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// rank

struct RankArgs {
    std::string features;
    std::string outdir;
    double lambda = 1.0;
};

int cmd_rank(const RankArgs& args) {
    const egnn::FeatureTable table = egnn::read_feature_csv(args.features);
    const auto X = table.matrix();
    const auto y = table.labels();
    const egnn::FeatureRanking ranking = egnn::score_features(X, y, args.lambda);

    std::filesystem::create_directories(args.outdir);
    const auto at = [&args](const char* name) {
        return (std::filesystem::path(args.outdir) / name).string();
    };
    egnn::write_ranking_csv(at("ranking.csv"), ranking, table.feature_names);

    json j;
    j["lambda"] = ranking.lambda;
    json order = json::array();
    std::size_t rank = 0;
    for (const egnn::RankedFeature& f : ranking.order) {
        order.push_back({{"rank", ++rank},
                         {"feature", table.feature_names[f.index]},
                         {"index", f.index},
                         {"score", f.score},
                         {"class_assoc", f.class_assoc},
                         {"redundancy", f.redundancy}});
    }
    j["order"] = std::move(order);
    try {
        const egnn::BandSums sums =
            egnn::band_correlation_sums(X, y, table.feature_names);
        j["band_sums"] = {{"total", sums.total}, {"left", sums.left}, {"right", sums.right}};
        std::cout << "band correlation sums:\n";
        for (const auto& [band, total] : sums.total)
            std::cout << "  " << band << ": " << egnn::format_double(total) << "\n";
    } catch (const std::exception&) {
        // Band decomposition only applies to channel.band.stat feature names.
        j["band_sums"] = nullptr;
    }
    egnn::save_json_file(at("ranking.json"), j);
    std::cout << "wrote " << at("ranking.csv") << " and " << at("ranking.json") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// run

std::vector<std::size_t> indices_for_names(const std::vector<std::string>& all,
                                           const std::vector<std::string>& wanted) {
    std::map<std::string, std::size_t> lookup;
    for (std::size_t j = 0; j < all.size(); ++j) lookup[all[j]] = j;
    std::vector<std::size_t> indices;
    indices.reserve(wanted.size());
    for (const std::string& name : wanted) {
        const auto it = lookup.find(name);
        if (it == lookup.end())
            throw egnn::DataError("ranked feature '" + name + "' not present in feature CSV");
        indices.push_back(it->second);
    }
    return indices;
}

struct RunArgs {
    std::string features;
    std::string outdir;
    std::string ranking;
    std::size_t n_features = 0;  // 0 = all
    double rho0 = 0.5;
    std::uint64_t hr = 100;
    double eta = 2.0;
    std::string classes;
    bool no_normalize = false;
    SeedOption seed;
};

int cmd_run(const RunArgs& args) {
    const egnn::FeatureTable table = egnn::read_feature_csv(args.features);
    std::vector<std::string> names = table.feature_names;
    std::vector<std::vector<double>> X = table.matrix();
    const std::vector<int> y = table.labels();

    if (args.n_features > 0) {
        if (args.ranking.empty())
            throw egnn::DataError("--n-features needs --ranking to define the feature order");
        std::vector<std::string> order = egnn::read_ranking_order(args.ranking);
        if (args.n_features > order.size())
            throw egnn::DataError("--n-features exceeds ranked feature count");
        order.resize(args.n_features);
        const std::vector<std::size_t> indices = indices_for_names(names, order);
        X = egnn::subset_columns(X, indices);
        names = order;
    }

    egnn::RunConfig cfg;
    cfg.params.rho0 = args.rho0;
    cfg.params.hr = args.hr;
    cfg.params.eta = args.eta;
    cfg.seed = args.seed.value;
    cfg.normalize = !args.no_normalize;
    if (!args.classes.empty()) cfg.class_universe = parse_class_list(args.classes);

    const egnn::RunResult res = egnn::run_prequential(X, y, cfg);

    json echo;
    echo["features"] = args.features;
    echo["ranking"] = args.ranking.empty() ? json() : json(args.ranking);
    echo["n_features"] = names.size();
    echo["rho0"] = cfg.params.rho0;
    echo["hr"] = cfg.params.hr;
    echo["eta"] = cfg.params.eta;
    echo["seed"] = cfg.seed;
    echo["normalize"] = cfg.normalize;
    echo["classes"] = cfg.class_universe;
    egnn::write_run_artifacts(args.outdir, res, names, echo);

    std::cout << "instances " << res.metrics.step() << "  acc "
              << egnn::format_double(100.0 * res.metrics.accuracy()) << "%  c_avg "
              << egnn::format_double(res.metrics.avg_compactness()) << "  ii "
              << egnn::format_double(res.metrics.final_ii()) << "\n"
              << "artifacts in " << args.outdir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string features;
    std::string outdir;
    std::string ranking;
    std::size_t k = 5;
    std::size_t min_size = 1;
    std::vector<double> rho0s;
    std::vector<std::uint64_t> hrs;
    double eta = 2.0;
    std::string classes;
    bool per_channel = false;
    bool no_normalize = false;
    SeedOption seed;
};

int cmd_sweep(const SweepArgs& args) {
    const egnn::FeatureTable table = egnn::read_feature_csv(args.features);
    const std::vector<std::vector<double>> X = table.matrix();
    const std::vector<int> y = table.labels();

    std::vector<double> rho0s = args.rho0s.empty() ? std::vector<double>{0.5} : args.rho0s;
    std::vector<std::uint64_t> hrs =
        args.hrs.empty() ? std::vector<std::uint64_t>{100} : args.hrs;
    if (rho0s.size() != hrs.size())
        throw egnn::DataError("--rho0 and --hr must be given the same number of times");

    std::vector<egnn::SweepCell> cells;
    if (args.per_channel) {
        // Group features by channel prefix, keeping first-appearance order.
        std::vector<std::string> channels;
        std::map<std::string, std::vector<std::size_t>> groups;
        for (std::size_t j = 0; j < table.feature_names.size(); ++j) {
            const std::string& name = table.feature_names[j];
            const std::size_t dot = name.find('.');
            const std::string channel = dot == std::string::npos ? name : name.substr(0, dot);
            if (groups.find(channel) == groups.end()) channels.push_back(channel);
            groups[channel].push_back(j);
        }
        for (const std::string& channel : channels) {
            for (std::size_t p = 0; p < rho0s.size(); ++p) {
                egnn::HyperParams params;
                params.rho0 = rho0s[p];
                params.hr = hrs[p];
                params.eta = args.eta;
                cells.push_back({channel, groups[channel], params});
            }
        }
    } else {
        if (args.ranking.empty())
            throw egnn::DataError("sweep needs --ranking (or --per-channel)");
        const std::vector<std::string> order = egnn::read_ranking_order(args.ranking);
        const std::vector<std::size_t> ranked = indices_for_names(table.feature_names, order);
        const auto subsets = egnn::leave_k_out_schedule(
            std::span<const std::size_t>(ranked), args.k, args.min_size);
        for (const auto& subset : subsets) {
            for (std::size_t p = 0; p < rho0s.size(); ++p) {
                egnn::HyperParams params;
                params.rho0 = rho0s[p];
                params.hr = hrs[p];
                params.eta = args.eta;
                cells.push_back({std::to_string(subset.size()), subset, params});
            }
        }
    }

    egnn::RunConfig base;
    base.seed = args.seed.value;
    base.normalize = !args.no_normalize;
    if (!args.classes.empty()) base.class_universe = parse_class_list(args.classes);

    const std::vector<egnn::SweepRow> rows = egnn::run_sweep(X, y, cells, base);
    std::filesystem::create_directories(args.outdir);
    const std::string out = (std::filesystem::path(args.outdir) / "sweep.csv").string();
    egnn::write_sweep_csv(out, rows);
    std::cout << "wrote " << rows.size() << " sweep rows to " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string run_dir;
    std::string outdir;
};

int cmd_report(const ReportArgs& args) {
    const std::filesystem::path run_dir(args.run_dir);
    const std::string outdir = args.outdir.empty() ? args.run_dir : args.outdir;
    std::filesystem::create_directories(outdir);
    const auto at = [&outdir](const char* name) {
        return (std::filesystem::path(outdir) / name).string();
    };

    const auto traces = egnn::read_traces_csv((run_dir / "traces.csv").string());
    {
        std::ofstream acc = egnn::open_output(at("accuracy_vs_h.csv"));
        acc << "h,acc\n";
        for (const egnn::TraceRow& t : traces)
            acc << t.h << ',' << egnn::format_double(t.acc) << '\n';
        std::ofstream gran = egnn::open_output(at("granules_vs_h.csv"));
        gran << "h,c_now\n";
        for (const egnn::TraceRow& t : traces) gran << t.h << ',' << t.c_now << '\n';
    }

    const json report = egnn::load_json_file((run_dir / "report.json").string());
    try {
        const json& confusion = report.at("confusion");
        const auto classes = confusion.at("classes").get<std::vector<int>>();
        const auto& counts = confusion.at("counts");
        std::ofstream out = egnn::open_output(at("confusion.csv"));
        out << "true_class,predicted_class,count\n";
        for (std::size_t i = 0; i < classes.size(); ++i) {
            for (std::size_t j = 0; j < classes.size(); ++j) {
                out << classes[i] << ',' << classes[j] << ','
                    << counts.at(i).at(j).get<std::uint64_t>() << '\n';
            }
        }
    } catch (const json::exception& e) {
        throw egnn::DataError((run_dir / "report.json").string() + ": " + e.what());
    }
    std::cout << "wrote plot data to " << outdir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string output;
    egnn::SynthConfig cfg;
};

int cmd_synth(const SynthArgs& args) {
    egnn::SynthStream stream(args.cfg);
    egnn::FeatureTable table;
    table.feature_names = {"x1", "x2"};
    for (std::uint64_t i = 0; i < args.cfg.instances; ++i) {
        const egnn::SynthInstance inst = stream.next();
        egnn::FeatureTable::Row row;
        row.subject = "synth";
        row.game = "stream";
        row.window = i + 1;
        row.label = inst.label;
        row.x = inst.x;
        table.rows.push_back(std::move(row));
    }
    egnn::write_feature_csv(args.output, table);
    std::cout << "wrote " << table.rows.size() << " instances to " << args.output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolving granular classifier and EEG spectral-feature pipeline"};
    app.require_subcommand(1);

    ExtractArgs extract_args;
    CLI::App* extract = app.add_subcommand(
        "extract", "Turn raw recordings into windowed band-feature instances");
    extract->add_option("--manifest", extract_args.manifest, "Dataset manifest JSON")
        ->required();
    extract->add_option("--window", extract_args.window_seconds, "Window length in seconds")
        ->required();
    extract->add_option("--output", extract_args.output, "Feature CSV to write")->required();

    RankArgs rank_args;
    CLI::App* rank =
        app.add_subcommand("rank", "Score and rank features by class association");
    rank->add_option("--features", rank_args.features, "Feature CSV")->required();
    rank->add_option("--outdir", rank_args.outdir, "Directory for ranking.csv/ranking.json")
        ->required();
    rank->add_option("--lambda", rank_args.lambda, "Redundancy penalty weight (default 1)");

    RunArgs run_args;
    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "One prequential test-then-train experiment");
    run->add_option("--features", run_args.features, "Feature CSV");
    run->add_option("--outdir", run_args.outdir, "Artifact directory");
    run->add_option("--ranking", run_args.ranking, "Ranking CSV (with --n-features)");
    run->add_option("--n-features", run_args.n_features, "Use only the top-ranked features");
    run->add_option("--rho0", run_args.rho0, "Initial maximum box width (default 0.5)");
    run->add_option("--hr", run_args.hr, "Deletion/adaptation horizon (default 100)");
    run->add_option("--eta", run_args.eta, "Reference creation rate (default 2)");
    run->add_option("--classes", run_args.classes, "Known class ids, comma-separated");
    run->add_flag("--no-normalize", run_args.no_normalize,
                  "Instances are already in the unit cube");
    run->add_option("--config", run_config, "JSON config supplying unset flags");
    add_seed(run, run_args.seed);

    SweepArgs sweep_args;
    std::string sweep_config;
    CLI::App* sweep =
        app.add_subcommand("sweep", "Leave-k-out feature sweep or per-channel comparison");
    sweep->add_option("--features", sweep_args.features, "Feature CSV");
    sweep->add_option("--outdir", sweep_args.outdir, "Directory for sweep.csv");
    sweep->add_option("--ranking", sweep_args.ranking, "Ranking CSV defining feature order");
    sweep->add_option("--k", sweep_args.k, "Features removed per step (default 5)");
    sweep->add_option("--min-size", sweep_args.min_size, "Smallest subset size (default 1)");
    sweep->add_option("--rho0", sweep_args.rho0s,
                      "Initial width; repeat to form a grid paired with --hr");
    sweep->add_option("--hr", sweep_args.hrs, "Horizon; repeat to form a grid");
    sweep->add_option("--eta", sweep_args.eta, "Reference creation rate (default 2)");
    sweep->add_option("--classes", sweep_args.classes, "Known class ids, comma-separated");
    sweep->add_flag("--per-channel", sweep_args.per_channel,
                    "One cell per channel instead of ranking prefixes");
    sweep->add_flag("--no-normalize", sweep_args.no_normalize,
                    "Instances are already in the unit cube");
    sweep->add_option("--config", sweep_config, "JSON config supplying unset flags");
    add_seed(sweep, sweep_args.seed);

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Plot-data files from run artifacts");
    report->add_option("--run", report_args.run_dir, "Run artifact directory")->required();
    report->add_option("--outdir", report_args.outdir, "Output directory (default: run dir)");

    SynthArgs synth_args;
    CLI::App* synth =
        app.add_subcommand("synth", "Generate the four-box benchmark stream as a feature CSV");
    synth->add_option("--output", synth_args.output, "Feature CSV to write")->required();
    synth->add_option("--instances", synth_args.cfg.instances, "Stream length (default 4000)");
    synth->add_option("--noise", synth_args.cfg.noise, "Label noise probability (default 0.05)");
    synth->add_option("--drift-at", synth_args.cfg.drift_at,
                      "Step at which all boxes shift (0 = stationary)");
    synth->add_option("--shift", synth_args.cfg.drift_shift, "Drift translation (default 0.3)");
    synth->add_option("--seed", synth_args.cfg.seed, "Generator seed (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (extract->parsed()) return cmd_extract(extract_args);
        if (rank->parsed()) return cmd_rank(rank_args);
        if (run->parsed()) {
            ConfigMerge cfg(run, run_config);
            cfg.merge("--features", "features", run_args.features);
            cfg.merge("--outdir", "outdir", run_args.outdir);
            cfg.merge("--ranking", "ranking", run_args.ranking);
            cfg.merge("--n-features", "n_features", run_args.n_features);
            cfg.merge("--rho0", "rho0", run_args.rho0);
            cfg.merge("--hr", "hr", run_args.hr);
            cfg.merge("--eta", "eta", run_args.eta);
            cfg.merge("--classes", "classes", run_args.classes);
            if (!run_args.seed.given) {
                cfg.merge("--seed", "seed", run_args.seed.value);
                run_args.seed.given = cfg.has("seed");
            }
            if (!run_args.seed.given) {
                std::cerr << "run: --seed is required (flag or config)\n";
                return 1;
            }
            if (run_args.features.empty() || run_args.outdir.empty()) {
                std::cerr << "run: --features and --outdir are required\n";
                return 1;
            }
            return cmd_run(run_args);
        }
        if (sweep->parsed()) {
            ConfigMerge cfg(sweep, sweep_config);
            cfg.merge("--features", "features", sweep_args.features);
            cfg.merge("--outdir", "outdir", sweep_args.outdir);
            cfg.merge("--ranking", "ranking", sweep_args.ranking);
            cfg.merge("--k", "k", sweep_args.k);
            cfg.merge("--min-size", "min_size", sweep_args.min_size);
            cfg.merge("--rho0", "rho0", sweep_args.rho0s);
            cfg.merge("--hr", "hr", sweep_args.hrs);
            cfg.merge("--eta", "eta", sweep_args.eta);
            cfg.merge("--classes", "classes", sweep_args.classes);
            if (!sweep_args.seed.given) {
                cfg.merge("--seed", "seed", sweep_args.seed.value);
                sweep_args.seed.given = cfg.has("seed");
            }
            if (!sweep_args.seed.given) {
                std::cerr << "sweep: --seed is required (flag or config)\n";
                return 1;
            }
            if (sweep_args.features.empty() || sweep_args.outdir.empty()) {
                std::cerr << "sweep: --features and --outdir are required\n";
                return 1;
            }
            return cmd_sweep(sweep_args);
        }
        if (report->parsed()) return cmd_report(report_args);
        if (synth->parsed()) return cmd_synth(synth_args);
    } catch (const egnn::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
