#include "pna/metapath.hpp"

#include <algorithm>

namespace pna {

SparseCountMatrix::SparseCountMatrix(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), rows_data_(rows) {}

void SparseCountMatrix::add(std::uint32_t row, std::uint32_t col, std::int64_t value) {
    if (row >= rows_ || col >= cols_)
        throw ConfigError("sparse matrix index (" + std::to_string(row) + ", " +
                          std::to_string(col) + ") out of bounds");
    auto& entries = rows_data_[row];
    auto it = std::lower_bound(entries.begin(), entries.end(), col,
                               [](const auto& e, std::uint32_t c) { return e.first < c; });
    if (it != entries.end() && it->first == col) {
        it->second += value;
        if (it->second < 0) throw ConfigError("sparse matrix count went negative");
        if (it->second == 0) entries.erase(it);
    } else if (value != 0) {
        if (value < 0) throw ConfigError("sparse matrix count went negative");
        entries.insert(it, {col, value});
    }
}

std::int64_t SparseCountMatrix::at(std::uint32_t row, std::uint32_t col) const {
    if (row >= rows_ || col >= cols_)
        throw ConfigError("sparse matrix index (" + std::to_string(row) + ", " +
                          std::to_string(col) + ") out of bounds");
    const auto& entries = rows_data_[row];
    auto it = std::lower_bound(entries.begin(), entries.end(), col,
                               [](const auto& e, std::uint32_t c) { return e.first < c; });
    return (it != entries.end() && it->first == col) ? it->second : 0;
}

std::size_t SparseCountMatrix::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& r : rows_data_) n += r.size();
    return n;
}

SparseCountMatrix SparseCountMatrix::transposed() const {
    SparseCountMatrix t(cols_, rows_);
    for (std::uint32_t r = 0; r < rows_; ++r)
        for (const auto& [c, v] : rows_data_[r]) t.rows_data_[c].emplace_back(r, v);
    return t;  // column order within each row is already ascending
}

SparseCountMatrix SparseCountMatrix::multiply(const SparseCountMatrix& other) const {
    if (cols_ != other.rows_)
        throw ConfigError("sparse matrix dimension mismatch: " + std::to_string(rows_) + "x" +
                          std::to_string(cols_) + " * " + std::to_string(other.rows_) + "x" +
                          std::to_string(other.cols_));
    SparseCountMatrix result(rows_, other.cols_);
    std::vector<std::int64_t> acc(other.cols_, 0);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t r = 0; r < rows_; ++r) {
        touched.clear();
        for (const auto& [k, a] : rows_data_[r]) {
            for (const auto& [c, b] : other.rows_data_[k]) {
                if (acc[c] == 0) touched.push_back(c);
                acc[c] += a * b;
                if (acc[c] > kCountCap)
                    throw DataError("path count at (" + std::to_string(r) + ", " +
                                    std::to_string(c) + ") exceeds the 2^31-1 cap");
            }
        }
        std::sort(touched.begin(), touched.end());
        auto& out = result.rows_data_[r];
        out.reserve(touched.size());
        for (std::uint32_t c : touched) {
            out.emplace_back(c, acc[c]);
            acc[c] = 0;
        }
    }
    return result;
}

namespace {

SparseCountMatrix from_edges(const HeterogeneousNetwork& net, LinkTag tag) {
    const LinkSchema schema = schema_of(tag);
    SparseCountMatrix m(net.node_count(schema.source), net.node_count(schema.target));
    for (const auto& [src, dst] : net.edges(tag)) m.add(src, dst, 1);
    return m;
}

SparseCountMatrix from_bridge(const AlignedPair& pair, NodeType type) {
    SparseCountMatrix m(pair.g1().node_count(type), pair.g2().node_count(type));
    for (const auto& [a, b] : pair.bridge(type)) m.add(a, b, 1);
    return m;
}

SparseCountMatrix chain(std::vector<SparseCountMatrix> factors) {
    SparseCountMatrix result = std::move(factors.front());
    for (std::size_t i = 1; i < factors.size(); ++i) result = result.multiply(factors[i]);
    return result;
}

}  // namespace

SparseCountMatrix training_anchor_matrix(const AlignedPair& pair,
                                         const std::vector<Edge>& train_anchors) {
    SparseCountMatrix m(pair.g1().user_count(), pair.g2().user_count());
    for (const auto& [u1, u2] : train_anchors) {
        if (!std::binary_search(pair.anchors().begin(), pair.anchors().end(), Edge{u1, u2}))
            throw DataError("training anchor (" + std::to_string(u1) + ", " + std::to_string(u2) +
                            ") is not a known anchor of the pair");
        m.add(u1, u2, 1);
    }
    return m;
}

SparseCountMatrix compute_aam(const AlignedPair& pair, const SparseCountMatrix& anchor_matrix,
                              AnchorPath path) {
    const HeterogeneousNetwork& g1 = pair.g1();
    const HeterogeneousNetwork& g2 = pair.g2();
    if (anchor_matrix.rows() != g1.user_count() || anchor_matrix.cols() != g2.user_count())
        throw ConfigError("anchor matrix dimensions do not match the user counts");

    const SparseCountMatrix& a = anchor_matrix;
    switch (path) {
        case AnchorPath::CommonOutNeighbor: {
            auto f1 = from_edges(g1, LinkTag::Follow);
            auto f2 = from_edges(g2, LinkTag::Follow);
            return chain({f1, a, f2.transposed()});
        }
        case AnchorPath::CommonInNeighbor: {
            auto f1 = from_edges(g1, LinkTag::Follow);
            auto f2 = from_edges(g2, LinkTag::Follow);
            return chain({f1.transposed(), a, f2});
        }
        case AnchorPath::CommonOutInNeighbor: {
            auto f1 = from_edges(g1, LinkTag::Follow);
            auto f2 = from_edges(g2, LinkTag::Follow);
            return chain({f1, a, f2});
        }
        case AnchorPath::CommonInOutNeighbor: {
            auto f1 = from_edges(g1, LinkTag::Follow);
            auto f2 = from_edges(g2, LinkTag::Follow);
            return chain({f1.transposed(), a, f2.transposed()});
        }
        case AnchorPath::SharedCheckin:
            return chain({from_edges(g1, LinkTag::Write), from_edges(g1, LinkTag::CheckinAt),
                          from_bridge(pair, NodeType::Location),
                          from_edges(g2, LinkTag::CheckinAt).transposed(),
                          from_edges(g2, LinkTag::Write).transposed()});
        case AnchorPath::ListedCheckin:
            return chain({from_edges(g1, LinkTag::Create), from_edges(g1, LinkTag::ListContain),
                          from_bridge(pair, NodeType::Location),
                          from_edges(g2, LinkTag::CheckinAt).transposed(),
                          from_edges(g2, LinkTag::Write).transposed()});
        case AnchorPath::SharedTimestamp:
            return chain({from_edges(g1, LinkTag::Write), from_edges(g1, LinkTag::At),
                          from_bridge(pair, NodeType::Timestamp),
                          from_edges(g2, LinkTag::At).transposed(),
                          from_edges(g2, LinkTag::Write).transposed()});
        case AnchorPath::SharedWord:
            return chain({from_edges(g1, LinkTag::Write), from_edges(g1, LinkTag::Contain),
                          from_bridge(pair, NodeType::Word),
                          from_edges(g2, LinkTag::Contain).transposed(),
                          from_edges(g2, LinkTag::Write).transposed()});
    }
    throw ConfigError("unknown anchor meta path");
}

AnchorAdjacencyTensor build_tensor(const AlignedPair& pair,
                                   const SparseCountMatrix& anchor_matrix) {
    AnchorAdjacencyTensor tensor;
    tensor.users1 = pair.g1().user_count();
    tensor.users2 = pair.g2().user_count();
    for (std::size_t k = 0; k < kAnchorPathCount; ++k)
        tensor.slices[k] = compute_aam(pair, anchor_matrix, kAllAnchorPaths[k]);
    return tensor;
}

std::array<double, kAnchorPathCount> eaaf(const AnchorAdjacencyTensor& tensor, NodeId u1,
                                          NodeId u2) {
    if (u1 >= tensor.users1 || u2 >= tensor.users2)
        throw ConfigError("eaaf: user pair (" + std::to_string(u1) + ", " + std::to_string(u2) +
                          ") out of range");
    std::array<double, kAnchorPathCount> fiber{};
    for (std::size_t k = 0; k < kAnchorPathCount; ++k)
        fiber[k] = static_cast<double>(tensor.slices[k].at(u1, u2));
    return fiber;
}

}  // namespace pna
