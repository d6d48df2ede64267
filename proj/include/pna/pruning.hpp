#pragma once

#include <string>
#include <vector>

#include "pna/metapath.hpp"

namespace pna {

// Cosine similarity between two count bags; 0 when either bag is empty.
double cosine_bag_similarity(const std::vector<std::string>& a,
                             const std::vector<std::string>& b);

// Character bigrams of the lowercased username; a username shorter than two
// characters yields an empty bag.
std::vector<std::string> username_bigrams(const std::string& username);
// Lowercased whitespace tokens of the hometown string.
std::vector<std::string> hometown_tokens(const std::string& hometown);

// Drops a candidate pair only when both profile signals are exactly zero:
// username bigram cosine 0 and hometown token cosine 0. A pair where either
// user has an entirely empty profile is kept; there is no evidence to prune
// on.
std::vector<Edge> profile_prune(const std::vector<Edge>& candidates,
                                const HeterogeneousNetwork& g1,
                                const HeterogeneousNetwork& g2);

// Drops candidates whose 8-entry tensor fiber is all zero.
std::vector<Edge> eaaf_prune(const std::vector<Edge>& candidates,
                             const AnchorAdjacencyTensor& tensor);

}  // namespace pna
