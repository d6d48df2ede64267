#include "pna/matching.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace pna {

namespace {

std::uint64_t pair_key(NodeId u1, NodeId u2) {
    return (static_cast<std::uint64_t>(u1) << 32) | u2;
}

constexpr std::size_t kNoRank = std::numeric_limits<std::size_t>::max();

// position of `partner` in `list`, or kNoRank
std::size_t rank_of(const std::vector<NodeId>& list, NodeId partner) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == partner) return i;
    return kNoRank;
}

}  // namespace

PreferenceTable build_preference_table(const std::vector<PredictionScore>& scores,
                                       const std::vector<Edge>& known_anchors, std::uint32_t n1,
                                       std::uint32_t n2) {
    PreferenceTable prefs;
    prefs.n1 = n1;
    prefs.n2 = n2;
    prefs.side1.resize(n1);
    prefs.side2.resize(n2);

    for (const auto& s : scores) {
        if (s.pair.first >= n1 || s.pair.second >= n2)
            throw ConfigError("scored pair (" + std::to_string(s.pair.first) + ", " +
                              std::to_string(s.pair.second) + ") out of range");
        if (s.probability < 0.0 || s.probability > 1.0)
            throw ConfigError("probability outside [0, 1]");
        if (!prefs.probabilities.emplace(pair_key(s.pair.first, s.pair.second), s.probability)
                 .second)
            throw ConfigError("duplicate scored pair (" + std::to_string(s.pair.first) + ", " +
                              std::to_string(s.pair.second) + ")");
    }
    for (const auto& [u1, u2] : known_anchors) {
        if (u1 >= n1 || u2 >= n2) throw ConfigError("known anchor out of range");
        prefs.probabilities[pair_key(u1, u2)] = 1.0;  // overrides any prediction
    }

    for (const auto& [key, prob] : prefs.probabilities) {
        (void)prob;
        const NodeId u1 = static_cast<NodeId>(key >> 32);
        const NodeId u2 = static_cast<NodeId>(key & 0xffffffffu);
        prefs.side1[u1].push_back(u2);
        prefs.side2[u2].push_back(u1);
    }
    for (NodeId u = 0; u < n1; ++u) {
        auto& list = prefs.side1[u];
        std::sort(list.begin(), list.end(), [&](NodeId a, NodeId b) {
            const double pa = prefs.probability(u, a), pb = prefs.probability(u, b);
            return pa != pb ? pa > pb : a < b;
        });
    }
    for (NodeId v = 0; v < n2; ++v) {
        auto& list = prefs.side2[v];
        std::sort(list.begin(), list.end(), [&](NodeId a, NodeId b) {
            const double pa = prefs.probability(a, v), pb = prefs.probability(b, v);
            return pa != pb ? pa > pb : a < b;
        });
    }

    return prefs;
}

TruncatedStrategies truncate_strategies(const PreferenceTable& prefs, std::uint32_t k,
                                        bool self_option) {
    TruncatedStrategies st;
    st.self_option = self_option;
    st.side1.resize(prefs.n1);
    st.side2.resize(prefs.n2);
    const std::size_t cap = self_option ? k : std::numeric_limits<std::size_t>::max();
    for (NodeId u = 0; u < prefs.n1; ++u) {
        const auto& list = prefs.side1[u];
        st.side1[u].assign(list.begin(),
                           list.begin() + static_cast<std::ptrdiff_t>(
                                              std::min<std::size_t>(cap, list.size())));
    }
    for (NodeId v = 0; v < prefs.n2; ++v) {
        const auto& list = prefs.side2[v];
        st.side2[v].assign(list.begin(),
                           list.begin() + static_cast<std::ptrdiff_t>(
                                              std::min<std::size_t>(cap, list.size())));
    }
    return st;
}

namespace {

// In generic mode a candidate-less user still holds the [self] strategy and
// ends up self-matched; only traditional matching leaves such users entirely
// outside the game, which is what "unprocessed" records.
MatchingResult make_result(const std::vector<Edge>& matched, const PreferenceTable& prefs,
                           bool self_option) {
    MatchingResult r;
    r.matched = matched;
    std::sort(r.matched.begin(), r.matched.end());
    std::vector<bool> taken1(prefs.n1, false), taken2(prefs.n2, false);
    for (const auto& [u1, u2] : r.matched) {
        taken1[u1] = true;
        taken2[u2] = true;
    }
    for (NodeId u = 0; u < prefs.n1; ++u) {
        if (taken1[u]) continue;
        const bool no_candidates = prefs.side1[u].empty();
        (no_candidates && !self_option ? r.unprocessed_1 : r.self_matched_1).push_back(u);
    }
    for (NodeId v = 0; v < prefs.n2; ++v) {
        if (taken2[v]) continue;
        const bool no_candidates = prefs.side2[v].empty();
        (no_candidates && !self_option ? r.unprocessed_2 : r.self_matched_2).push_back(v);
    }
    return r;
}

}  // namespace

bool PreferenceTable::has_pair(NodeId u1, NodeId u2) const {
    return probabilities.count(pair_key(u1, u2)) > 0;
}

double PreferenceTable::probability(NodeId u1, NodeId u2) const {
    auto it = probabilities.find(pair_key(u1, u2));
    if (it == probabilities.end())
        throw ConfigError("no probability for pair (" + std::to_string(u1) + ", " +
                          std::to_string(u2) + ")");
    return it->second;
}

PreferenceBuild build_preferences(const std::vector<PredictionScore>& scores,
                                  const std::vector<Edge>& known_anchors, std::uint32_t n1,
                                  std::uint32_t n2, std::uint32_t k) {
    if (k < 1) throw ConfigError("partial matching rate K must be >= 1");
    PreferenceBuild out;
    out.prefs = build_preference_table(scores, known_anchors, n1, n2);
    out.strategies = truncate_strategies(out.prefs, k, /*self_option=*/true);
    return out;
}

PreferenceBuild build_traditional_preferences(const std::vector<PredictionScore>& scores,
                                              const std::vector<Edge>& known_anchors,
                                              std::uint32_t n1, std::uint32_t n2) {
    PreferenceBuild out;
    out.prefs = build_preference_table(scores, known_anchors, n1, n2);
    out.strategies = truncate_strategies(out.prefs, 0, /*self_option=*/false);
    return out;
}

MatchingResult generic_gale_shapley(const PreferenceTable& prefs,
                                    const TruncatedStrategies& strategies) {
    const std::uint32_t n1 = prefs.n1;
    const std::uint32_t n2 = prefs.n2;
    if (strategies.side1.size() != n1 || strategies.side2.size() != n2)
        throw ConfigError("strategies do not match the preference table");

    // side-2 acceptability ranks
    std::vector<std::unordered_map<NodeId, std::size_t>> rank2(n2);
    for (NodeId v = 0; v < n2; ++v)
        for (std::size_t i = 0; i < strategies.side2[v].size(); ++i)
            rank2[v].emplace(strategies.side2[v][i], i);

    constexpr NodeId kFree = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> partner2(n2, kFree);
    std::vector<NodeId> partner1(n1, kFree);
    std::vector<std::size_t> next(n1, 0);
    std::vector<bool> unconnected1(n1, false);

    std::deque<NodeId> free_users;
    for (NodeId u = 0; u < n1; ++u) free_users.push_back(u);

    while (!free_users.empty()) {
        const NodeId u = free_users.front();
        free_users.pop_front();
        if (partner1[u] != kFree || unconnected1[u]) continue;
        const auto& strategy = strategies.side1[u];
        while (next[u] <= strategy.size()) {
            const std::size_t pos = next[u]++;
            if (pos == strategy.size()) {
                // the slot after the acceptable prefix: self (generic mode)
                // or an exhausted list (traditional mode); either way the
                // user stays unconnected
                if (strategies.self_option) unconnected1[u] = true;
                break;
            }
            const NodeId v = strategy[pos];
            auto rank_it = rank2[v].find(u);
            if (rank_it == rank2[v].end()) continue;  // outside v's acceptable set
            if (partner2[v] == kFree) {
                partner2[v] = u;
                partner1[u] = v;
                break;
            }
            const NodeId p = partner2[v];
            if (rank_it->second < rank2[v].at(p)) {
                partner1[p] = kFree;
                free_users.push_back(p);
                partner2[v] = u;
                partner1[u] = v;
                break;
            }
        }
    }

    std::vector<Edge> matched;
    for (NodeId v = 0; v < n2; ++v)
        if (partner2[v] != kFree) matched.emplace_back(partner2[v], v);
    return make_result(matched, prefs, strategies.self_option);
}

std::vector<std::string> verify_stability(const MatchingResult& result,
                                          const PreferenceTable& prefs,
                                          const TruncatedStrategies& strategies) {
    std::vector<std::string> violations;
    const std::uint32_t n1 = prefs.n1;
    const std::uint32_t n2 = prefs.n2;

    constexpr NodeId kFree = std::numeric_limits<NodeId>::max();
    std::vector<NodeId> partner1(n1, kFree), partner2(n2, kFree);
    for (const auto& [u1, u2] : result.matched) {
        if (u1 >= n1 || u2 >= n2) {
            violations.push_back("matched pair out of range");
            continue;
        }
        if (partner1[u1] != kFree)
            violations.push_back("one-to-one violated: side-1 user " + std::to_string(u1) +
                                 " matched twice");
        if (partner2[u2] != kFree)
            violations.push_back("one-to-one violated: side-2 user " + std::to_string(u2) +
                                 " matched twice");
        partner1[u1] = u2;
        partner2[u2] = u1;
    }

    auto check_disjoint = [&](const std::vector<NodeId>& self_matched,
                              const std::vector<NodeId>& unprocessed,
                              const std::vector<NodeId>& partner, const char* side) {
        for (NodeId u : self_matched)
            if (u < partner.size() && partner[u] != kFree)
                violations.push_back(std::string("side-") + side + " user " + std::to_string(u) +
                                     " both matched and self-matched");
        for (NodeId u : unprocessed)
            if (u < partner.size() && partner[u] != kFree)
                violations.push_back(std::string("side-") + side + " user " + std::to_string(u) +
                                     " both matched and unprocessed");
    };
    check_disjoint(result.self_matched_1, result.unprocessed_1, partner1, "1");
    check_disjoint(result.self_matched_2, result.unprocessed_2, partner2, "2");

    // rationality: matched partners lie inside the acceptable prefixes
    for (const auto& [u1, u2] : result.matched) {
        if (u1 >= n1 || u2 >= n2) continue;
        if (rank_of(strategies.side1[u1], u2) == kNoRank)
            violations.push_back("rationality violated: side-2 user " + std::to_string(u2) +
                                 " not acceptable to side-1 user " + std::to_string(u1));
        if (rank_of(strategies.side2[u2], u1) == kNoRank)
            violations.push_back("rationality violated: side-1 user " + std::to_string(u1) +
                                 " not acceptable to side-2 user " + std::to_string(u2));
    }

    // outcome rank per user: matched partner's rank, or the self slot right
    // after the prefix (generic), or worse than anything (traditional)
    auto outcome_rank = [&](const std::vector<NodeId>& accept, NodeId current,
                            bool matched) -> std::size_t {
        if (matched) {
            const std::size_t r = rank_of(accept, current);
            return r == kNoRank ? accept.size() : r;
        }
        return strategies.self_option ? accept.size() : kNoRank;
    };

    for (NodeId u = 0; u < n1; ++u) {
        const bool u_matched = partner1[u] != kFree;
        const std::size_t u_outcome =
            outcome_rank(strategies.side1[u], u_matched ? partner1[u] : 0, u_matched);
        for (std::size_t i = 0; i < strategies.side1[u].size(); ++i) {
            const NodeId v = strategies.side1[u][i];
            if (u_matched && partner1[u] == v) continue;
            if (i >= u_outcome) break;  // v not preferred over u's outcome
            const std::size_t rv = rank_of(strategies.side2[v], u);
            if (rv == kNoRank) continue;  // u unacceptable to v
            const bool v_matched = partner2[v] != kFree;
            const std::size_t v_outcome =
                outcome_rank(strategies.side2[v], v_matched ? partner2[v] : 0, v_matched);
            if (rv < v_outcome)
                violations.push_back("blocking pair (" + std::to_string(u) + ", " +
                                     std::to_string(v) + ")");
        }
    }
    return violations;
}

std::vector<MatchingResult> brute_force_stable_matchings(const PreferenceTable& prefs,
                                                         const TruncatedStrategies& strategies) {
    if (prefs.n1 > 8 || prefs.n2 > 8)
        throw ConfigError("brute force enumeration capped at 8 users per side");

    std::vector<MatchingResult> stable;
    std::vector<NodeId> assignment;  // per side-1 user: partner or sentinel
    constexpr NodeId kSelf = std::numeric_limits<NodeId>::max();
    assignment.assign(prefs.n1, kSelf);
    std::vector<bool> used2(prefs.n2, false);

    auto recurse = [&](auto&& self_fn, NodeId u) -> void {
        if (u == prefs.n1) {
            std::vector<Edge> matched;
            for (NodeId i = 0; i < prefs.n1; ++i)
                if (assignment[i] != kSelf) matched.emplace_back(i, assignment[i]);
            MatchingResult candidate = make_result(matched, prefs, strategies.self_option);
            if (verify_stability(candidate, prefs, strategies).empty())
                stable.push_back(std::move(candidate));
            return;
        }
        assignment[u] = kSelf;
        self_fn(self_fn, u + 1);
        for (NodeId v : strategies.side1[u]) {
            if (used2[v] || rank_of(strategies.side2[v], u) == kNoRank) continue;
            assignment[u] = v;
            used2[v] = true;
            self_fn(self_fn, u + 1);
            used2[v] = false;
            assignment[u] = kSelf;
        }
    };
    recurse(recurse, 0);
    return stable;
}

}  // namespace pna
