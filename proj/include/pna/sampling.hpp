#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pna/hetnet.hpp"

namespace pna {

// One candidate user pair with its feature vector and class label.
// pair is empty for synthetic (over-sampled) instances.
struct LabeledInstance {
    std::optional<Edge> pair;
    std::vector<double> features;
    int label = -1;  // +1 or -1
};

// Per-dimension z-score statistics. Zero-variance dimensions keep stddev 1
// so they standardize to a constant zero.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool operator==(const Standardization&) const = default;
};

Standardization fit_standardization(const std::vector<LabeledInstance>& data);
std::vector<double> standardize(const Standardization& s, const std::vector<double>& features);

// All unordered cross-class pairs (i, j) such that no third instance z is
// strictly closer to both i and j than they are to each other; distances are
// Euclidean over standardized features. Pairs are returned with i < j,
// sorted ascending.
std::vector<std::pair<std::size_t, std::size_t>> find_tomek_links(
    const std::vector<LabeledInstance>& data);

struct DownsampleResult {
    // The consistent subset C, in ascending original-index order.
    std::vector<LabeledInstance> instances;
    // Indices into the input for the stage outputs.
    std::vector<std::size_t> post_tomek;  // survivors of Tomek-link removal
    std::vector<std::size_t> consistent;  // members of C
};

// Two-stage negative reduction: first the negative member of every Tomek
// link is dropped (one scan), then a consistent subset is condensed from the
// survivors: all positives plus one seeded random negative seed the subset,
// and every remaining instance the subset's k-NN classifier misclassifies is
// added, in one pass over ascending indices. Positives are never removed.
DownsampleResult downsample(const std::vector<LabeledInstance>& data, int k, std::uint64_t seed);

struct SmoteResult {
    std::vector<LabeledInstance> synthetic;
    // (seed instance index, neighbor index) into the minority input, aligned
    // with synthetic; lets callers verify segment membership.
    std::vector<std::pair<std::size_t, std::size_t>> parents;
};

// Synthetic minority instances interpolated toward the seed's k nearest
// minority neighbors: x + theta .* (y - x) with theta a fresh per-dimension
// uniform [0, 1] vector. rate 2.5 means 250%: each minority instance seeds
// floor(rate) synthetics and a seeded random subset gets one extra so the
// total is round(rate * |minority|).
SmoteResult smote(const std::vector<LabeledInstance>& minority, double rate, int k,
                  std::uint64_t seed);
// Same, but with the exact output count given directly.
SmoteResult smote_count(const std::vector<LabeledInstance>& minority, std::size_t count, int k,
                        std::uint64_t seed);

// Sampling-rate contract used by the experiment protocol: both ops move
// exactly floor(sigma * (#neg - #pos)) instances. Down-sampling removes that
// many negatives, drawing from the non-safe ones (Tomek-removed or outside
// the consistent subset) before touching safe ones; over-sampling appends
// that many synthetic positives.
std::vector<LabeledInstance> sigma_downsample(const std::vector<LabeledInstance>& data,
                                              double sigma, int k, std::uint64_t seed);
std::vector<LabeledInstance> sigma_oversample(const std::vector<LabeledInstance>& data,
                                              double sigma, int k, std::uint64_t seed);

}  // namespace pna
