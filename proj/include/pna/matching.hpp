#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pna/classifier.hpp"

namespace pna {

// Preference lists on both sides, ordered by probability descending with
// ties broken by partner id ascending. Known anchor links carry probability
// 1.0 and therefore sit on top. Only scored pairs appear.
struct PreferenceTable {
    std::uint32_t n1 = 0;
    std::uint32_t n2 = 0;
    std::vector<std::vector<NodeId>> side1;  // per side-1 user: side-2 candidates
    std::vector<std::vector<NodeId>> side2;  // per side-2 user: side-1 candidates
    std::unordered_map<std::uint64_t, double> probabilities;

    bool has_pair(NodeId u1, NodeId u2) const;
    double probability(NodeId u1, NodeId u2) const;
};

// Acceptable-partner prefixes per user. With self_option set (generic
// matching) each strategy implicitly ends with the user themself right after
// the prefix; without it (traditional matching) the prefix is the whole
// preference list and running out means staying unmatched.
struct TruncatedStrategies {
    bool self_option = true;
    std::vector<std::vector<NodeId>> side1;
    std::vector<std::vector<NodeId>> side2;
};

struct PreferenceBuild {
    PreferenceTable prefs;
    TruncatedStrategies strategies;
};

struct MatchingResult {
    std::vector<Edge> matched;                // injective both ways, sorted
    std::vector<NodeId> self_matched_1;       // "stay unconnected" users, side 1
    std::vector<NodeId> self_matched_2;
    std::vector<NodeId> unprocessed_1;        // users with no candidates at all
    std::vector<NodeId> unprocessed_2;

    bool operator==(const MatchingResult&) const = default;
};

// Preference lists alone, from the scores plus the known anchors at
// probability 1.0. Duplicate scored pairs are an error.
PreferenceTable build_preference_table(const std::vector<PredictionScore>& scores,
                                       const std::vector<Edge>& known_anchors, std::uint32_t n1,
                                       std::uint32_t n2);

// Top-K acceptable prefixes (self in position K+1) or, with self_option off,
// the full lists for traditional matching.
TruncatedStrategies truncate_strategies(const PreferenceTable& prefs, std::uint32_t k,
                                        bool self_option);

// Generic-matching tables: per-user preference lists from the scores plus
// the known anchors at probability 1.0, truncated to the top K acceptable
// partners with self in position K+1. Duplicate scored pairs are an error.
PreferenceBuild build_preferences(const std::vector<PredictionScore>& scores,
                                  const std::vector<Edge>& known_anchors, std::uint32_t n1,
                                  std::uint32_t n2, std::uint32_t k);

// Traditional stable-matching tables: full preference lists, no self option.
PreferenceBuild build_traditional_preferences(const std::vector<PredictionScore>& scores,
                                              const std::vector<Edge>& known_anchors,
                                              std::uint32_t n1, std::uint32_t n2);

// Deferred acceptance over truncated strategies. Side-1 users propose down
// their strategies; hitting self means staying unconnected. A side-2 user
// accepts a free proposal only from inside its own acceptable prefix and
// trades up whenever it prefers the proposer to its current partner, freeing
// the displaced user. The outcome is rational and has no blocking pair
// within the truncated strategies.
MatchingResult generic_gale_shapley(const PreferenceTable& prefs,
                                    const TruncatedStrategies& strategies);

// Stability report: empty means the result is a valid generic stable
// matching for these tables (one-to-one or fewer, rational on both sides,
// and free of blocking pairs; a self outcome counts as the partner to beat).
std::vector<std::string> verify_stability(const MatchingResult& result,
                                          const PreferenceTable& prefs,
                                          const TruncatedStrategies& strategies);

// Exhaustive enumeration of every stable outcome; only feasible for up to 8
// users per side. Test oracle.
std::vector<MatchingResult> brute_force_stable_matchings(const PreferenceTable& prefs,
                                                         const TruncatedStrategies& strategies);

}  // namespace pna
