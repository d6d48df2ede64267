#include "pna/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pna {

namespace {

double off_diagonal_mass(const DenseMatrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j) sum += m(i, j) * m(i, j);
    return std::sqrt(sum);
}

double frobenius(const DenseMatrix& m) {
    double sum = 0.0;
    for (double v : m.data()) sum += v * v;
    return std::sqrt(sum);
}

}  // namespace

SymmetricEigen symmetric_eigen(DenseMatrix a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw ConfigError("symmetric_eigen requires a square matrix");

    // vt holds V^T so the plane rotations touch contiguous rows
    DenseMatrix vt(n, n);
    for (std::size_t i = 0; i < n; ++i) vt(i, i) = 1.0;

    const double scale = frobenius(a);
    const double mass_threshold = 1e-12 * (scale > 0 ? scale : 1.0);
    const double elem_threshold = n > 0 ? mass_threshold / static_cast<double>(n) : 0.0;
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_mass(a) <= mass_threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= elem_threshold) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root of t^2 + 2*tau*t - 1 = 0
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(p, k);
                    const double akq = a(q, k);
                    const double np = c * akp - s * akq;
                    const double nq = s * akp + c * akq;
                    a(p, k) = np;
                    a(k, p) = np;
                    a(q, k) = nq;
                    a(k, q) = nq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vpk = vt(p, k);
                    const double vqk = vt(q, k);
                    vt(p, k) = c * vpk - s * vqk;
                    vt(q, k) = s * vpk + c * vqk;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    SymmetricEigen result;
    result.values.resize(n);
    result.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        result.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) result.vectors(i, j) = vt(order[j], i);
    }
    return result;
}

namespace {

// Gram matrix of the mode-1 unfolding: sum over slices of S * S^T.
DenseMatrix mode1_gram(const AnchorAdjacencyTensor& t) {
    DenseMatrix g(t.users1, t.users1);
    for (const auto& slice : t.slices) {
        const SparseCountMatrix cols = slice.transposed();
        for (std::uint32_t j = 0; j < cols.rows(); ++j) {
            const auto& entries = cols.row(j);
            for (const auto& [i1, v1] : entries)
                for (const auto& [i2, v2] : entries)
                    g(i1, i2) += static_cast<double>(v1) * static_cast<double>(v2);
        }
    }
    return g;
}

DenseMatrix mode2_gram(const AnchorAdjacencyTensor& t) {
    DenseMatrix g(t.users2, t.users2);
    for (const auto& slice : t.slices) {
        for (std::uint32_t i = 0; i < slice.rows(); ++i) {
            const auto& entries = slice.row(i);
            for (const auto& [j1, v1] : entries)
                for (const auto& [j2, v2] : entries)
                    g(j1, j2) += static_cast<double>(v1) * static_cast<double>(v2);
        }
    }
    return g;
}

DenseMatrix mode3_gram(const AnchorAdjacencyTensor& t) {
    DenseMatrix g(kAnchorPathCount, kAnchorPathCount);
    for (std::size_t k = 0; k < kAnchorPathCount; ++k) {
        for (std::uint32_t i = 0; i < t.slices[k].rows(); ++i) {
            for (const auto& [j, vk] : t.slices[k].row(i)) {
                for (std::size_t l = k; l < kAnchorPathCount; ++l) {
                    const std::int64_t vl = (l == k) ? vk : t.slices[l].at(i, j);
                    if (vl == 0) continue;
                    const double prod = static_cast<double>(vk) * static_cast<double>(vl);
                    g(k, l) += prod;
                    if (l != k) g(l, k) += prod;
                }
            }
        }
    }
    return g;
}

DenseMatrix top_eigenvectors(const DenseMatrix& gram, std::size_t count) {
    SymmetricEigen eig = symmetric_eigen(gram);
    DenseMatrix out(gram.rows(), count);
    for (std::size_t j = 0; j < count; ++j) {
        // sign fix: largest-magnitude entry of the column made positive
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < gram.rows(); ++i) {
            const double mag = std::abs(eig.vectors(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        const double sign = (eig.vectors(arg, j) < 0.0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < gram.rows(); ++i) out(i, j) = sign * eig.vectors(i, j);
    }
    return out;
}

}  // namespace

TuckerFactors hosvd(const AnchorAdjacencyTensor& tensor, TuckerRanks ranks) {
    if (tensor.users1 == 0 || tensor.users2 == 0) throw ConfigError("hosvd: empty tensor");
    if (ranks.p < 1 || ranks.p > tensor.users1 || ranks.q < 1 || ranks.q > tensor.users2 ||
        ranks.r < 1 || ranks.r > kAnchorPathCount)
        throw ConfigError("hosvd: ranks out of bounds");

    bool any_nonzero = false;
    for (const auto& slice : tensor.slices) any_nonzero |= slice.nonzero_count() > 0;
    if (!any_nonzero) throw DataError("degenerate tensor: all entries are zero");

    TuckerFactors f;
    f.ranks = ranks;
    f.a = top_eigenvectors(mode1_gram(tensor), ranks.p);
    f.b = top_eigenvectors(mode2_gram(tensor), ranks.q);
    f.c = top_eigenvectors(mode3_gram(tensor), ranks.r);

    // core = X x1 A^T x2 B^T x3 C^T, accumulated over the sparse entries
    f.core = DenseTensor3(ranks.p, ranks.q, ranks.r);
    for (std::size_t k = 0; k < kAnchorPathCount; ++k) {
        const auto& slice = tensor.slices[k];
        for (std::uint32_t i = 0; i < slice.rows(); ++i) {
            for (const auto& [j, count] : slice.row(i)) {
                const double x = static_cast<double>(count);
                for (std::size_t p = 0; p < ranks.p; ++p) {
                    const double xa = x * f.a(i, p);
                    if (xa == 0.0) continue;
                    for (std::size_t q = 0; q < ranks.q; ++q) {
                        const double xab = xa * f.b(j, q);
                        if (xab == 0.0) continue;
                        for (std::size_t r = 0; r < ranks.r; ++r)
                            f.core.at(p, q, r) += xab * f.c(k, r);
                    }
                }
            }
        }
    }
    return f;
}

DenseTensor3 tucker_reconstruct(const TuckerFactors& f) {
    const std::size_t d1 = f.a.rows(), d2 = f.b.rows(), d3 = f.c.rows();
    DenseTensor3 out(d1, d2, d3);
    // contract core with C first (third mode is tiny), then B, then A
    DenseTensor3 cr(f.ranks.p, f.ranks.q, d3);
    for (std::size_t p = 0; p < f.ranks.p; ++p)
        for (std::size_t q = 0; q < f.ranks.q; ++q)
            for (std::size_t k = 0; k < d3; ++k) {
                double sum = 0.0;
                for (std::size_t r = 0; r < f.ranks.r; ++r)
                    sum += f.core.at(p, q, r) * f.c(k, r);
                cr.at(p, q, k) = sum;
            }
    DenseTensor3 br(f.ranks.p, d2, d3);
    for (std::size_t p = 0; p < f.ranks.p; ++p)
        for (std::size_t j = 0; j < d2; ++j)
            for (std::size_t k = 0; k < d3; ++k) {
                double sum = 0.0;
                for (std::size_t q = 0; q < f.ranks.q; ++q) sum += cr.at(p, q, k) * f.b(j, q);
                br.at(p, j, k) = sum;
            }
    for (std::size_t i = 0; i < d1; ++i)
        for (std::size_t j = 0; j < d2; ++j)
            for (std::size_t k = 0; k < d3; ++k) {
                double sum = 0.0;
                for (std::size_t p = 0; p < f.ranks.p; ++p) sum += br.at(p, j, k) * f.a(i, p);
                out.at(i, j, k) = sum;
            }
    return out;
}

double tensor_frobenius(const AnchorAdjacencyTensor& tensor) {
    double sum = 0.0;
    for (const auto& slice : tensor.slices)
        for (std::uint32_t i = 0; i < slice.rows(); ++i)
            for (const auto& [j, v] : slice.row(i))
                sum += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(sum);
}

double reconstruction_error(const AnchorAdjacencyTensor& tensor, const TuckerFactors& factors) {
    const DenseTensor3 rec = tucker_reconstruct(factors);
    if (rec.d1 != tensor.users1 || rec.d2 != tensor.users2 || rec.d3 != kAnchorPathCount)
        throw ConfigError("reconstruction_error: dimension mismatch");
    double diff = 0.0;
    for (std::size_t k = 0; k < kAnchorPathCount; ++k)
        for (std::size_t i = 0; i < tensor.users1; ++i)
            for (std::size_t j = 0; j < tensor.users2; ++j) {
                const double d = rec.at(i, j, k) -
                                 static_cast<double>(tensor.slices[k].at(
                                     static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)));
                diff += d * d;
            }
    const double norm = tensor_frobenius(tensor);
    return norm > 0 ? std::sqrt(diff) / norm : std::sqrt(diff);
}

std::vector<double> link_latent_features(const TuckerFactors& factors, NodeId u1, NodeId u2) {
    if (u1 >= factors.a.rows() || u2 >= factors.b.rows())
        throw ConfigError("link_latent_features: user id out of range");
    std::vector<double> out;
    out.reserve(factors.ranks.p + factors.ranks.q + 1);
    for (std::size_t p = 0; p < factors.ranks.p; ++p) out.push_back(factors.a(u1, p));
    for (std::size_t q = 0; q < factors.ranks.q; ++q) out.push_back(factors.b(u2, q));
    double dot = 0.0;
    for (std::size_t d = 0; d < std::min(factors.ranks.p, factors.ranks.q); ++d)
        dot += factors.a(u1, d) * factors.b(u2, d);
    out.push_back(dot);
    return out;
}

}  // namespace pna
