// Command-line front end for the partial network alignment pipeline:
// synthetic pair generation, feature dumps, model training, prediction,
// generic stable matching, evaluation, and the cross-validated experiment
// protocol with parameter sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pna/latent.hpp"
#include "pna/matching.hpp"
#include "pna/pipeline.hpp"
#include "pna/pruning.hpp"
#include "pna/rng.hpp"
#include "pna/tsv.hpp"

namespace {

using namespace pna;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::uint64_t pair_key(NodeId a, NodeId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

std::vector<Edge> all_candidates(const AlignedPair& pair) {
    std::set<std::uint64_t> anchors;
    for (const auto& [a, b] : pair.anchors()) anchors.insert(pair_key(a, b));
    std::vector<Edge> candidates;
    for (NodeId u = 0; u < pair.g1().user_count(); ++u)
        for (NodeId v = 0; v < pair.g2().user_count(); ++v)
            if (!anchors.count(pair_key(u, v))) candidates.push_back({u, v});
    return candidates;
}

std::vector<double> feature_vector(const AnchorAdjacencyTensor& tensor,
                                   const TuckerFactors& factors, Edge e) {
    const auto fiber = eaaf(tensor, e.first, e.second);
    std::vector<double> f(fiber.begin(), fiber.end());
    const auto latent = link_latent_features(factors, e.first, e.second);
    f.insert(f.end(), latent.begin(), latent.end());
    return f;
}

TuckerRanks clamped_ranks(const AlignedPair& pair) {
    TuckerRanks ranks;
    ranks.p = std::min<std::size_t>(ranks.p, pair.g1().user_count());
    ranks.q = std::min<std::size_t>(ranks.q, pair.g2().user_count());
    return ranks;
}

std::vector<PredictionScore> load_scores(const std::filesystem::path& path) {
    TsvReader reader(path);
    std::vector<PredictionScore> scores;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 4) reader.fail("expected 4 columns (u1, u2, probability, label)");
        PredictionScore s;
        s.pair = {static_cast<NodeId>(parse_int(reader, fields[0])),
                  static_cast<NodeId>(parse_int(reader, fields[1]))};
        s.probability = parse_double(reader, fields[2]);
        s.label = static_cast<int>(parse_int(reader, fields[3]));
        scores.push_back(s);
    }
    return scores;
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> methods;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string item =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) methods.push_back(parse_method(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (methods.empty()) throw ConfigError("no methods given");
    return methods;
}

int run_generate(const std::string& out, std::uint64_t seed, const GeneratorParams& params) {
    const AlignedPair pair = generate_synthetic_pair(params, seed);
    save_aligned_pair(pair, out);
    std::printf("wrote aligned pair with %u + %u users, %zu anchors to %s\n",
                pair.g1().user_count(), pair.g2().user_count(), pair.anchors().size(),
                out.c_str());
    return kExitOk;
}

int run_features(const std::string& pair_dir, const std::string& out, double eta,
                 std::uint64_t seed) {
    const AlignedPair pair = load_aligned_pair(pair_dir);
    std::vector<Edge> train_anchors = pair.anchors();
    if (eta < 1.0) {
        Rng rng(seed);
        rng.shuffle(train_anchors);
        const std::size_t keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(eta * train_anchors.size())));
        train_anchors.resize(std::min(keep, train_anchors.size()));
        std::sort(train_anchors.begin(), train_anchors.end());
    }
    const AnchorAdjacencyTensor tensor =
        build_tensor(pair, training_anchor_matrix(pair, train_anchors));
    const TuckerFactors factors = hosvd(tensor, clamped_ranks(pair));

    std::filesystem::create_directories(out);
    {
        auto file = open_output(std::filesystem::path(out) / "eaaf.tsv");
        std::set<std::pair<NodeId, NodeId>> support;
        for (const auto& slice : tensor.slices)
            for (std::uint32_t i = 0; i < slice.rows(); ++i)
                for (const auto& [j, v] : slice.row(i)) {
                    (void)v;
                    support.insert({i, j});
                }
        for (const auto& [u, v] : support) {
            file << u << '\t' << v;
            for (double x : eaaf(tensor, u, v)) file << '\t' << format_double(x);
            file << '\n';
        }
    }
    const auto dump_factor = [&](const DenseMatrix& m, const char* name) {
        auto file = open_output(std::filesystem::path(out) / name);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            file << i;
            for (std::size_t j = 0; j < m.cols(); ++j) file << '\t' << format_double(m(i, j));
            file << '\n';
        }
    };
    dump_factor(factors.a, "latent_u1.tsv");
    dump_factor(factors.b, "latent_u2.tsv");
    std::printf("wrote eaaf.tsv, latent_u1.tsv, latent_u2.tsv to %s\n", out.c_str());
    return kExitOk;
}

int run_train(const std::string& pair_dir, const std::string& out, int theta, double sigma,
              const std::string& sampling, std::uint64_t seed, const TrainOptions& base_opts) {
    const AlignedPair pair = load_aligned_pair(pair_dir);
    if (pair.anchors().empty()) throw ConfigError("pair has no anchors to train on");

    const AnchorAdjacencyTensor tensor =
        build_tensor(pair, training_anchor_matrix(pair, pair.anchors()));
    const TuckerFactors factors = hosvd(tensor, clamped_ranks(pair));

    Rng rng(seed);
    std::set<std::uint64_t> used;
    for (const auto& [a, b] : pair.anchors()) used.insert(pair_key(a, b));
    const std::size_t neg_count = static_cast<std::size_t>(theta) * pair.anchors().size();
    const std::size_t cross =
        static_cast<std::size_t>(pair.g1().user_count()) * pair.g2().user_count();
    if (neg_count > cross - pair.anchors().size())
        throw ConfigError("theta demands more negatives than the cross product holds");

    std::vector<LabeledInstance> data;
    for (const Edge& e : pair.anchors())
        data.push_back({e, feature_vector(tensor, factors, e), 1});
    while (data.size() < pair.anchors().size() + neg_count) {
        const NodeId a = static_cast<NodeId>(rng.uniform(pair.g1().user_count()));
        const NodeId b = static_cast<NodeId>(rng.uniform(pair.g2().user_count()));
        if (!used.insert(pair_key(a, b)).second) continue;
        data.push_back({Edge{a, b}, feature_vector(tensor, factors, Edge{a, b}), -1});
    }

    if (sampling == "over")
        data = sigma_oversample(data, sigma, 5, rng.next_u64());
    else if (sampling == "down")
        data = sigma_downsample(data, sigma, 1, rng.next_u64());
    else if (sampling != "none")
        throw ConfigError("--sampling must be none, over, or down");

    TrainOptions opts = base_opts;
    opts.seed = seed;
    const LinkModel model = train(data, opts);
    save_model(model, out);
    std::printf("trained on %zu instances, wrote %s\n", data.size(), out.c_str());
    return kExitOk;
}

int run_predict(const std::string& pair_dir, const std::string& model_path,
                const std::string& out) {
    const AlignedPair pair = load_aligned_pair(pair_dir);
    const LinkModel model = load_model(model_path);
    const AnchorAdjacencyTensor tensor =
        build_tensor(pair, training_anchor_matrix(pair, pair.anchors()));
    const TuckerFactors factors = hosvd(tensor, clamped_ranks(pair));

    const std::vector<Edge> candidates = all_candidates(pair);
    const std::vector<Edge> survivors =
        eaaf_prune(profile_prune(candidates, pair.g1(), pair.g2()), tensor);

    auto file = open_output(out);
    for (const Edge& e : survivors) {
        const PredictionScore s = predict(model, e, feature_vector(tensor, factors, e));
        file << e.first << '\t' << e.second << '\t' << format_double(s.probability) << '\t'
             << s.label << '\n';
    }
    std::printf("scored %zu of %zu candidate pairs (pre-pruning removed %zu), wrote %s\n",
                survivors.size(), candidates.size(), candidates.size() - survivors.size(),
                out.c_str());
    return kExitOk;
}

int run_match(const std::string& pair_dir, const std::string& scores_path, const std::string& out,
              std::uint32_t k, bool traditional) {
    const AlignedPair pair = load_aligned_pair(pair_dir);
    const std::vector<PredictionScore> scores = load_scores(scores_path);
    std::vector<PredictionScore> predicted_links;
    for (const auto& s : scores)
        if (s.label == 1) predicted_links.push_back(s);

    const std::uint32_t n1 = pair.g1().user_count();
    const std::uint32_t n2 = pair.g2().user_count();
    const PreferenceBuild build =
        traditional ? build_traditional_preferences(predicted_links, pair.anchors(), n1, n2)
                    : build_preferences(predicted_links, pair.anchors(), n1, n2, k);
    const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
    const auto violations = verify_stability(result, build.prefs, build.strategies);
    if (!violations.empty()) throw Error("matching failed verification: " + violations.front());

    std::filesystem::create_directories(out);
    std::set<std::uint64_t> known;
    for (const auto& [a, b] : pair.anchors()) known.insert(pair_key(a, b));
    std::size_t inferred = 0;
    {
        auto file = open_output(std::filesystem::path(out) / "matching.tsv");
        for (const auto& [a, b] : result.matched) {
            if (known.count(pair_key(a, b))) continue;  // given, not inferred
            file << a << '\t' << b << '\t' << format_double(build.prefs.probability(a, b))
                 << '\n';
            ++inferred;
        }
    }
    {
        auto file = open_output(std::filesystem::path(out) / "unmatched.tsv");
        for (NodeId u : result.self_matched_1) file << 1 << '\t' << u << '\n';
        for (NodeId v : result.self_matched_2) file << 2 << '\t' << v << '\n';
    }
    std::printf("matched %zu pairs (%zu inferred), wrote matching.tsv and unmatched.tsv to %s\n",
                result.matched.size(), inferred, out.c_str());
    return kExitOk;
}

int run_evaluate(const std::string& scores_path, const std::string& truth_path,
                 const std::string& out) {
    const std::vector<PredictionScore> scores = load_scores(scores_path);
    std::unordered_map<std::uint64_t, PredictionScore> by_pair;
    for (const auto& s : scores) by_pair[pair_key(s.pair.first, s.pair.second)] = s;

    TsvReader reader(truth_path);
    std::vector<PredictionScore> aligned;
    std::vector<int> truth;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 3) reader.fail("expected 3 columns (u1, u2, label)");
        const Edge e{static_cast<NodeId>(parse_int(reader, fields[0])),
                     static_cast<NodeId>(parse_int(reader, fields[1]))};
        const int label = static_cast<int>(parse_int(reader, fields[2]));
        auto it = by_pair.find(pair_key(e.first, e.second));
        // pairs absent from the score file were pruned: predicted negative
        aligned.push_back(it != by_pair.end() ? it->second : PredictionScore{e, 0.0, -1});
        truth.push_back(label);
    }
    const Metrics m = compute_metrics(aligned, truth);

    auto file = open_output(out);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", m.accuracy);
    file << "accuracy\t" << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.6f", m.f1);
    file << "f1\t" << buf << '\n';
    if (m.auc) {
        std::snprintf(buf, sizeof(buf), "%.6f", *m.auc);
        file << "auc\t" << buf << '\n';
    } else {
        file << "auc\tna\n";
    }
    std::printf("accuracy=%.6f f1=%.6f auc=%s -> %s\n", m.accuracy, m.f1,
                m.auc ? "computed" : "na", out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partial network alignment pipeline"};
    app.require_subcommand(1);

    // shared knobs
    GeneratorParams gen;
    ExperimentConfig config;
    std::uint64_t seed = 0;
    std::string out, pair_dir, model_path, scores_path, truth_path;

    bool users2_given = false;
    const auto add_generator_flags = [&](CLI::App* cmd) {
        cmd->add_option("--users", gen.users1, "side-1 user count");
        cmd->add_option("--users2", gen.users2, "side-2 user count (defaults to --users)")
            ->each([&](const std::string&) { users2_given = true; });
        cmd->add_option("--anchor-fraction", gen.anchor_fraction,
                        "fraction of side-1 users that are anchors");
        cmd->add_option("--follow-degree", gen.follow_out_degree, "mean follow out-degree");
        cmd->add_option("--posts-per-user", gen.posts_per_user1, "mean posts per user");
    };

    auto* generate = app.add_subcommand("generate", "emit a synthetic aligned pair directory");
    generate->add_option("--out", out, "output directory")->required();
    generate->add_option("--seed", seed, "generator seed")->required();
    add_generator_flags(generate);

    double features_eta = 1.0;
    auto* features = app.add_subcommand("features", "dump EAAF and latent feature tables");
    features->add_option("--pair", pair_dir, "aligned pair directory")->required();
    features->add_option("--out", out, "output directory")->required();
    features->add_option("--eta", features_eta, "anchor subsample rate for feature extraction");
    features->add_option("--seed", seed, "subsample seed");

    std::string sampling = "none";
    auto* train_cmd = app.add_subcommand("train", "train a link classifier on a pair directory");
    train_cmd->add_option("--pair", pair_dir, "aligned pair directory")->required();
    train_cmd->add_option("--out", out, "model output file")->required();
    train_cmd->add_option("--seed", seed, "negative sampling / training seed")->required();
    train_cmd->add_option("--theta", config.theta, "negative/positive rate");
    train_cmd->add_option("--sigma", config.sigma, "sampling rate");
    train_cmd->add_option("--sampling", sampling, "class-imbalance treatment: none|over|down");
    train_cmd->add_option("--l2", config.train_options.l2, "L2 regularization weight");
    train_cmd->add_option("--epochs", config.train_options.epochs, "gradient descent epochs");
    train_cmd->add_option("--lr", config.train_options.learning_rate, "learning rate");

    auto* predict_cmd = app.add_subcommand("predict", "score pre-pruned candidate pairs");
    predict_cmd->add_option("--pair", pair_dir, "aligned pair directory")->required();
    predict_cmd->add_option("--model", model_path, "model file from train")->required();
    predict_cmd->add_option("--out", out, "scores output file")->required();

    bool traditional = false;
    auto* match_cmd = app.add_subcommand("match", "prune predicted links by stable matching");
    match_cmd->add_option("--pair", pair_dir, "aligned pair directory")->required();
    match_cmd->add_option("--scores", scores_path, "scores file from predict")->required();
    match_cmd->add_option("--out", out, "output directory")->required();
    match_cmd->add_option("--k", config.k, "partial matching rate K");
    match_cmd->add_flag("--traditional", traditional,
                        "traditional stable matching (no truncation, no self option)");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "compute metrics against truth labels");
    evaluate_cmd->add_option("--scores", scores_path, "scores file")->required();
    evaluate_cmd->add_option("--truth", truth_path, "truth file (u1, u2, label)")->required();
    evaluate_cmd->add_option("--out", out, "metrics output file")->required();

    std::string method_name = "PNA-omt";
    auto* experiment = app.add_subcommand("experiment", "run the 10-fold protocol");
    experiment->add_option("--out", out, "output directory")->required();
    experiment->add_option("--seed", seed, "master seed")->required();
    experiment->add_option("--method", method_name, "method name, e.g. PNA-omt");
    experiment->add_option("--theta", config.theta, "negative/positive rate");
    experiment->add_option("--eta", config.eta, "alignment sample rate");
    experiment->add_option("--sigma", config.sigma, "sampling rate");
    experiment->add_option("--k", config.k, "partial matching rate K");
    experiment->add_option("--folds", config.folds, "fold count");
    add_generator_flags(experiment);

    std::string axis_name = "eta", values_csv, methods_csv, seeds_csv;
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter axis");
    sweep_cmd->add_option("--axis", axis_name, "theta|eta|sigma|k")->required();
    sweep_cmd->add_option("--values", values_csv, "comma-separated axis values")->required();
    sweep_cmd->add_option("--out", out, "output directory")->required();
    sweep_cmd->add_option("--seed", seed, "master seed")->required();
    sweep_cmd->add_option("--seeds", seeds_csv, "comma-separated seeds (overrides --seed)");
    sweep_cmd->add_option("--methods", methods_csv, "comma-separated methods (default: all)");
    sweep_cmd->add_option("--theta", config.theta, "fixed negative/positive rate");
    sweep_cmd->add_option("--eta", config.eta, "fixed alignment sample rate");
    sweep_cmd->add_option("--sigma", config.sigma, "fixed sampling rate");
    sweep_cmd->add_option("--k", config.k, "fixed partial matching rate");
    add_generator_flags(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!users2_given) gen.users2 = gen.users1;
        config.gen = gen;
        config.seed = seed;

        if (app.got_subcommand(generate)) return run_generate(out, seed, gen);
        if (app.got_subcommand(features))
            return run_features(pair_dir, out, features_eta, seed);
        if (app.got_subcommand(train_cmd))
            return run_train(pair_dir, out, config.theta, config.sigma, sampling, seed,
                             config.train_options);
        if (app.got_subcommand(predict_cmd)) return run_predict(pair_dir, model_path, out);
        if (app.got_subcommand(match_cmd))
            return run_match(pair_dir, scores_path, out, config.k, traditional);
        if (app.got_subcommand(evaluate_cmd)) return run_evaluate(scores_path, truth_path, out);
        if (app.got_subcommand(experiment)) {
            config.method = parse_method(method_name);
            const ExperimentResult result = run_experiment(config);
            std::filesystem::create_directories(out);
            write_experiment_file(result, config, std::filesystem::path(out) / "folds.tsv");
            std::printf("mean accuracy=%.6f f1=%.6f -> %s/folds.tsv\n", result.mean.accuracy,
                        result.mean.f1, out.c_str());
            return kExitOk;
        }
        if (app.got_subcommand(sweep_cmd)) {
            SweepSpec spec;
            spec.axis = parse_axis(axis_name);
            for (const std::string& v : CLI::detail::split(values_csv, ','))
                if (!v.empty()) spec.values.push_back(std::stod(v));
            if (!methods_csv.empty()) {
                spec.methods = parse_methods(methods_csv);
            } else {
                for (std::size_t m = 0; m < kMethodCount; ++m)
                    spec.methods.push_back(static_cast<Method>(m));
            }
            if (!seeds_csv.empty()) {
                for (const std::string& s : CLI::detail::split(seeds_csv, ','))
                    if (!s.empty()) spec.seeds.push_back(std::stoull(s));
            } else {
                spec.seeds = {seed};
            }
            spec.base = config;
            const SweepReport report = run_sweep(spec);
            write_sweep_files(report, spec, out);
            std::printf("%zu rows, %zu failures -> %s\n", report.rows.size(),
                        report.failures.size(), out.c_str());
            return kExitOk;
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
