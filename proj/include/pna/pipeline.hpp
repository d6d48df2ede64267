#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pna/classifier.hpp"
#include "pna/latent.hpp"
#include "pna/matching.hpp"

namespace pna {

// Knobs of the seeded synthetic aligned-pair generator. Anchored user pairs
// share a configurable fraction of their follow neighborhoods, checkin
// locations, words and timestamps, and get correlated profiles; everyone
// else is independent.
struct GeneratorParams {
    std::uint32_t users1 = 300;
    std::uint32_t users2 = 300;
    double anchor_fraction = 0.6;

    double follow_out_degree = 8.0;
    double posts_per_user1 = 3.0;
    double posts_per_user2 = 3.0;
    double checkin_prob = 0.85;
    std::uint32_t words_per_post = 4;
    std::uint32_t lists_per_user1 = 1;
    std::uint32_t locations_per_list = 3;

    // vocabularies small enough that unrelated users collide regularly,
    // which keeps the classification problem from being separable
    std::uint32_t location_vocab = 40;
    std::uint32_t shared_locations = 28;
    std::uint32_t word_vocab = 110;
    std::uint32_t shared_words = 70;
    std::uint32_t timestamp_vocab = 48;
    std::uint32_t shared_timestamps = 36;
    std::uint32_t town_vocab = 10;

    double follow_copy = 0.35;     // anchored pair: fraction of copied follows
    double checkin_copy = 0.3;     // ... of reused checkin locations
    double word_copy = 0.3;
    double time_copy = 0.3;
    double list_from_checkin = 0.7;
    double name_abbrev_prob = 0.45;    // g2 username becomes an abbreviation
    double hometown_match_prob = 0.85;
};

AlignedPair generate_synthetic_pair(const GeneratorParams& params, std::uint64_t seed);

enum class Method {
    PnaOmt,         // over-sampling + generic stable matching
    PnaDmt,         // down-sampling + generic stable matching
    PnaOm,          // over-sampling + traditional stable matching
    PnaDm,          // down-sampling + traditional stable matching
    PnaO,           // over-sampling only
    PnaD,           // down-sampling only
    Mna,            // no sampling + traditional stable matching
    MnaNoMatching,  // plain classifier
};
inline constexpr std::size_t kMethodCount = 8;

const char* to_string(Method m);
Method parse_method(const std::string& s);

enum class SamplingKind { None, Over, Down };
enum class MatchingKind { None, Traditional, Generic };
SamplingKind sampling_of(Method m);
MatchingKind matching_of(Method m);

struct ExperimentConfig {
    int theta = 10;        // #negative / #positive
    double eta = 0.6;      // alignment sample rate
    double sigma = 1.0;    // sampling rate
    std::uint32_t k = 5;   // partial matching rate
    Method method = Method::PnaOmt;
    std::uint64_t seed = 0;
    int folds = 10;
    GeneratorParams gen;
    TrainOptions train_options;
    int knn_k = 1;    // consistency-classifier neighbor count
    int smote_k = 5;  // SMOTE neighbor count
    TuckerRanks ranks;
};

// theta/eta/sigma must sit on the protocol grids; throws ConfigError.
void validate_config(const ExperimentConfig& config);

struct ExperimentResult {
    Method method = Method::PnaOmt;
    std::vector<Metrics> folds;
    Metrics mean;
    double matching_seconds = 0.0;  // wall clock spent in the matching stage
};

// 10-fold cross-validated protocol: positives are the pair's anchors,
// negatives are theta * |positives| seeded random non-anchor cross pairs,
// training positives are subsampled by eta, features come from the training
// anchors only, and the per-method pipeline (sampling, training, pre-pruning,
// prediction, optional matching) runs on each fold. AUC is reported only for
// methods without a matching stage.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Same protocol evaluating several methods on shared fold data; the fold
// splits, features and pre-pruning are identical across methods, so results
// match per-method run_experiment calls exactly.
std::vector<ExperimentResult> run_experiment_methods(const ExperimentConfig& config,
                                                     const std::vector<Method>& methods);

enum class SweepAxis { Theta, Eta, Sigma, K };
const char* to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Eta;
    std::vector<double> values;
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds;  // results are averaged across seeds
    ExperimentConfig base;
};

struct SweepRow {
    double value = 0.0;
    Method method = Method::PnaOmt;
    double accuracy = 0.0;
    double f1 = 0.0;
    std::optional<double> auc;
    double matching_seconds = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::vector<std::pair<double, std::string>> failures;  // axis value -> error
};

SweepReport run_sweep(const SweepSpec& spec);

// sweep_<axis>.tsv and summary.tsv are deterministic given (spec, seeds);
// timing.tsv carries the measured matching wall clock and is excluded from
// byte-for-byte reproducibility.
void write_sweep_files(const SweepReport& report, const SweepSpec& spec,
                       const std::filesystem::path& out_dir);

void write_experiment_file(const ExperimentResult& result, const ExperimentConfig& config,
                           const std::filesystem::path& path);

}  // namespace pna
