#include "pna/pruning.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace pna {

double cosine_bag_similarity(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::map<std::string, double> ca, cb;
    for (const auto& s : a) ca[s] += 1.0;
    for (const auto& s : b) cb[s] += 1.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [key, v] : ca) {
        na += v * v;
        auto it = cb.find(key);
        if (it != cb.end()) dot += v * it->second;
    }
    for (const auto& [key, v] : cb) nb += v * v;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::vector<std::string> username_bigrams(const std::string& username) {
    const std::string low = lowercase(username);
    std::vector<std::string> bag;
    for (std::size_t i = 0; i + 1 < low.size(); ++i) bag.push_back(low.substr(i, 2));
    return bag;
}

std::vector<std::string> hometown_tokens(const std::string& hometown) {
    const std::string low = lowercase(hometown);
    std::vector<std::string> bag;
    std::size_t i = 0;
    while (i < low.size()) {
        while (i < low.size() && std::isspace(static_cast<unsigned char>(low[i]))) ++i;
        std::size_t j = i;
        while (j < low.size() && !std::isspace(static_cast<unsigned char>(low[j]))) ++j;
        if (j > i) bag.push_back(low.substr(i, j - i));
        i = j;
    }
    return bag;
}

std::vector<Edge> profile_prune(const std::vector<Edge>& candidates,
                                const HeterogeneousNetwork& g1,
                                const HeterogeneousNetwork& g2) {
    std::vector<Edge> kept;
    kept.reserve(candidates.size());
    for (const Edge& cand : candidates) {
        const UserProfile& p1 = g1.profile(cand.first);
        const UserProfile& p2 = g2.profile(cand.second);
        if (p1.empty() || p2.empty()) {
            kept.push_back(cand);
            continue;
        }
        const double name_sim =
            cosine_bag_similarity(username_bigrams(p1.username), username_bigrams(p2.username));
        const double town_sim =
            cosine_bag_similarity(hometown_tokens(p1.hometown), hometown_tokens(p2.hometown));
        if (name_sim == 0.0 && town_sim == 0.0) continue;
        kept.push_back(cand);
    }
    return kept;
}

std::vector<Edge> eaaf_prune(const std::vector<Edge>& candidates,
                             const AnchorAdjacencyTensor& tensor) {
    std::vector<Edge> kept;
    kept.reserve(candidates.size());
    for (const Edge& cand : candidates) {
        bool nonzero = false;
        for (const auto& slice : tensor.slices) {
            if (slice.at(cand.first, cand.second) != 0) {
                nonzero = true;
                break;
            }
        }
        if (nonzero) kept.push_back(cand);
    }
    return kept;
}

}  // namespace pna
