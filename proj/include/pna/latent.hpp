#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pna/metapath.hpp"

namespace pna {

// Minimal row-major dense matrix; just what the decomposition needs.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const DenseMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct DenseTensor3 {
    std::size_t d1 = 0, d2 = 0, d3 = 0;
    std::vector<double> data;  // index (i, j, k) -> i + d1 * (j + d2 * k)

    DenseTensor3() = default;
    DenseTensor3(std::size_t a, std::size_t b, std::size_t c)
        : d1(a), d2(b), d3(c), data(a * b * c, 0.0) {}
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[i + d1 * (j + d2 * k)];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[i + d1 * (j + d2 * k)];
    }
};

struct TuckerRanks {
    std::size_t p = 10;
    std::size_t q = 10;
    std::size_t r = 4;
};

// Orthonormal factor matrices plus the core tensor of a Tucker decomposition.
// Row l of A (row m of B) is the latent topological feature vector of side-1
// user l (side-2 user m).
struct TuckerFactors {
    DenseMatrix a;       // |U1| x P
    DenseMatrix b;       // |U2| x Q
    DenseMatrix c;       // 8 x R
    DenseTensor3 core;   // P x Q x R
    TuckerRanks ranks;
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenpairs are returned sorted by eigenvalue descending, ties broken by
// the pre-sort diagonal index. Exposed for tests.
struct SymmetricEigen {
    std::vector<double> values;
    DenseMatrix vectors;  // column j is the eigenvector of values[j]
};
SymmetricEigen symmetric_eigen(DenseMatrix a);

// Higher-order SVD of the anchor adjacency tensor. Factor n holds the top
// singular vectors of the mode-n unfolding; the core is the tensor contracted
// with the factor transposes. Column signs are fixed so the entry of largest
// magnitude in each column is positive, which makes the result deterministic.
// An all-zero tensor is refused ("degenerate tensor").
TuckerFactors hosvd(const AnchorAdjacencyTensor& tensor, TuckerRanks ranks);

// Dense reconstruction core x1 A x2 B x3 C; intended for error measurement
// at test scale.
DenseTensor3 tucker_reconstruct(const TuckerFactors& factors);

double tensor_frobenius(const AnchorAdjacencyTensor& tensor);
double reconstruction_error(const AnchorAdjacencyTensor& tensor, const TuckerFactors& factors);

// Per-link latent feature vector: row u1 of A, row u2 of B, then the inner
// product of the two rows over their leading min(P, Q) dimensions.
std::vector<double> link_latent_features(const TuckerFactors& factors, NodeId u1, NodeId u2);

}  // namespace pna
