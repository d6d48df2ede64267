#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pna/hetnet.hpp"

namespace pna {

// Sparse non-negative integer matrix, row-major with sorted column entries.
// Stored values are always > 0; cells never exceed kCountCap (larger values
// are a hard error during multiplication).
class SparseCountMatrix {
public:
    static constexpr std::int64_t kCountCap = 2147483647;  // 2^31 - 1

    SparseCountMatrix() = default;
    SparseCountMatrix(std::uint32_t rows, std::uint32_t cols);

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }

    // Adds to the cell; dropping back to zero removes the entry.
    void add(std::uint32_t row, std::uint32_t col, std::int64_t value);
    std::int64_t at(std::uint32_t row, std::uint32_t col) const;

    const std::vector<std::pair<std::uint32_t, std::int64_t>>& row(std::uint32_t r) const {
        return rows_data_[r];
    }

    std::size_t nonzero_count() const;
    SparseCountMatrix transposed() const;

    // Left-to-right sparse product with the count cap enforced per cell.
    SparseCountMatrix multiply(const SparseCountMatrix& other) const;

    bool operator==(const SparseCountMatrix& other) const = default;

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> rows_data_;
};

// The eight anchor meta paths, identified by what they share across networks.
// Index order is fixed; slice k of the tensor corresponds to path k.
enum class AnchorPath : std::uint8_t {
    CommonOutNeighbor,   // 1: follow out-neighborhoods joined via an anchor
    CommonInNeighbor,    // 2: follow in-neighborhoods joined via an anchor
    CommonOutInNeighbor, // 3: out-neighbor on side 1, in-neighbor on side 2
    CommonInOutNeighbor, // 4: in-neighbor on side 1, out-neighbor on side 2
    SharedCheckin,       // 5: posts checking in at a shared location
    ListedCheckin,       // 6: side-1 list location matched to side-2 checkins
    SharedTimestamp,     // 7: posts written at a shared timestamp
    SharedWord,          // 8: posts containing a shared word
};
inline constexpr std::size_t kAnchorPathCount = 8;
inline constexpr std::array<AnchorPath, kAnchorPathCount> kAllAnchorPaths = {
    AnchorPath::CommonOutNeighbor,   AnchorPath::CommonInNeighbor,
    AnchorPath::CommonOutInNeighbor, AnchorPath::CommonInOutNeighbor,
    AnchorPath::SharedCheckin,       AnchorPath::ListedCheckin,
    AnchorPath::SharedTimestamp,     AnchorPath::SharedWord,
};

// |U1| x |U2| x 8 stack of anchor adjacency matrices.
struct AnchorAdjacencyTensor {
    std::uint32_t users1 = 0;
    std::uint32_t users2 = 0;
    std::array<SparseCountMatrix, kAnchorPathCount> slices;
};

// Binary |U1| x |U2| matrix of the given training anchors. Only the anchors
// that feed feature extraction belong here; held-out anchors must not.
SparseCountMatrix training_anchor_matrix(const AlignedPair& pair,
                                         const std::vector<Edge>& train_anchors);

// Number of path instances of the given anchor meta path between every
// cross-network user pair, computed as a chain of sparse factor products.
// Instances are typed walks: nodes may repeat as long as every step follows
// the path's link type and direction.
SparseCountMatrix compute_aam(const AlignedPair& pair, const SparseCountMatrix& anchor_matrix,
                              AnchorPath path);

AnchorAdjacencyTensor build_tensor(const AlignedPair& pair,
                                   const SparseCountMatrix& anchor_matrix);

// The 8-entry fiber of the tensor for one user pair.
std::array<double, kAnchorPathCount> eaaf(const AnchorAdjacencyTensor& tensor, NodeId u1,
                                          NodeId u2);

}  // namespace pna
