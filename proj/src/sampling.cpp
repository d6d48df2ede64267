#include "pna/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pna/rng.hpp"

namespace pna {

Standardization fit_standardization(const std::vector<LabeledInstance>& data) {
    if (data.empty()) throw ConfigError("cannot standardize an empty dataset");
    const std::size_t d = data[0].features.size();
    Standardization s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (const auto& inst : data) {
        if (inst.features.size() != d)
            throw ConfigError("inconsistent feature dimension in dataset");
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += inst.features[j];
    }
    for (double& m : s.mean) m /= static_cast<double>(data.size());
    for (const auto& inst : data)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = inst.features[j] - s.mean[j];
            s.stddev[j] += diff * diff;
        }
    for (double& v : s.stddev) {
        v = std::sqrt(v / static_cast<double>(data.size()));
        if (v == 0.0) v = 1.0;
    }
    return s;
}

std::vector<double> standardize(const Standardization& s, const std::vector<double>& features) {
    if (features.size() != s.mean.size())
        throw ConfigError("feature dimension does not match standardization");
    std::vector<double> out(features.size());
    for (std::size_t j = 0; j < features.size(); ++j)
        out[j] = (features[j] - s.mean[j]) / s.stddev[j];
    return out;
}

namespace {

void require_both_classes(const std::vector<LabeledInstance>& data) {
    bool pos = false, neg = false;
    for (const auto& inst : data) {
        if (inst.label == 1) pos = true;
        else if (inst.label == -1) neg = true;
        else throw ConfigError("instance label must be +1 or -1");
    }
    if (!pos || !neg) throw ConfigError("dataset must contain both classes");
}

// Squared pairwise distances over standardized features, plus per-row
// neighbor orderings (distance ascending, index ascending on ties).
struct DistanceTable {
    std::size_t n = 0;
    std::vector<double> d2;                           // n * n
    std::vector<std::vector<std::uint32_t>> ordered;  // neighbors of each i, i excluded

    double at(std::size_t i, std::size_t j) const { return d2[i * n + j]; }
};

DistanceTable build_distances(const std::vector<LabeledInstance>& data) {
    const Standardization s = fit_standardization(data);
    const std::size_t n = data.size();
    const std::size_t d = s.mean.size();
    std::vector<double> z(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto zi = standardize(s, data[i].features);
        std::copy(zi.begin(), zi.end(), z.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    DistanceTable t;
    t.n = n;
    t.d2.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = z[i * d + k] - z[j * d + k];
                sum += diff * diff;
            }
            t.d2[i * n + j] = sum;
            t.d2[j * n + i] = sum;
        }
    }
    t.ordered.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& ord = t.ordered[i];
        ord.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) ord.push_back(static_cast<std::uint32_t>(j));
        std::sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double da = t.at(i, a), db = t.at(i, b);
            return da != db ? da < db : a < b;
        });
    }
    return t;
}

// Tomek links restricted to the alive subset. A cross-class alive pair (i, j)
// qualifies when no alive z is strictly closer to both endpoints.
std::vector<std::pair<std::size_t, std::size_t>> tomek_among(
    const std::vector<LabeledInstance>& data, const DistanceTable& t,
    const std::vector<bool>& alive) {
    std::vector<std::pair<std::size_t, std::size_t>> links;
    const std::size_t n = data.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!alive[j] || data[i].label == data[j].label) continue;
            const double dij = t.at(i, j);
            bool blocked = false;
            for (std::uint32_t z : t.ordered[i]) {
                if (t.at(i, z) >= dij) break;
                if (alive[z] && z != j && t.at(j, z) < dij) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) links.emplace_back(i, j);
        }
    }
    return links;
}

// k-NN vote over the reference subset; distance ties favor the smaller
// index (the reference order is already smallest-index-first on ties) and a
// split vote falls back to the nearest neighbor's label.
int knn_label(const std::vector<LabeledInstance>& data, const DistanceTable& t,
              const std::vector<std::size_t>& refs, std::size_t query, int k) {
    std::vector<std::size_t> nearest = refs;
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), nearest.size());
    std::partial_sort(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(kk),
                      nearest.end(), [&](std::size_t a, std::size_t b) {
                          const double da = t.at(query, a), db = t.at(query, b);
                          return da != db ? da < db : a < b;
                      });
    int vote = 0;
    for (std::size_t r = 0; r < kk; ++r) vote += data[nearest[r]].label;
    if (vote > 0) return 1;
    if (vote < 0) return -1;
    return data[nearest[0]].label;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> find_tomek_links(
    const std::vector<LabeledInstance>& data) {
    require_both_classes(data);
    const DistanceTable t = build_distances(data);
    std::vector<bool> alive(data.size(), true);
    return tomek_among(data, t, alive);
}

DownsampleResult downsample(const std::vector<LabeledInstance>& data, int k, std::uint64_t seed) {
    require_both_classes(data);
    if (k < 1) throw ConfigError("neighbor count k must be >= 1");

    const DistanceTable t = build_distances(data);
    std::vector<bool> alive(data.size(), true);

    // Tomek stage: single scan, dropping the negative member of every link.
    // Not iterated: the closest cross-class pair always forms a Tomek link,
    // so a rescan-until-empty loop would wipe out every negative.
    for (const auto& [i, j] : tomek_among(data, t, alive)) {
        const std::size_t neg = data[i].label == -1 ? i : j;
        alive[neg] = false;
    }

    DownsampleResult result;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (alive[i]) result.post_tomek.push_back(i);

    // Condensation: C starts as every positive plus one random negative.
    std::vector<std::size_t> negatives;
    for (std::size_t i : result.post_tomek)
        if (data[i].label == -1) negatives.push_back(i);
    std::vector<bool> in_c(data.size(), false);
    for (std::size_t i : result.post_tomek)
        if (data[i].label == 1) in_c[i] = true;
    if (!negatives.empty()) {
        Rng rng(seed);
        in_c[negatives[rng.uniform(negatives.size())]] = true;
    }

    std::vector<std::size_t> c_members;
    for (std::size_t i : result.post_tomek)
        if (in_c[i]) c_members.push_back(i);

    for (std::size_t i : result.post_tomek) {
        if (in_c[i]) continue;
        if (knn_label(data, t, c_members, i, k) != data[i].label) {
            in_c[i] = true;
            c_members.insert(std::lower_bound(c_members.begin(), c_members.end(), i), i);
        }
    }

    result.consistent = c_members;
    result.instances.reserve(c_members.size());
    for (std::size_t i : c_members) result.instances.push_back(data[i]);
    return result;
}

SmoteResult smote_count(const std::vector<LabeledInstance>& minority, std::size_t count, int k,
                        std::uint64_t seed) {
    if (k < 1) throw ConfigError("smote: neighbor count k must be >= 1");
    if (minority.size() <= static_cast<std::size_t>(k))
        throw ConfigError("smote: need more than k minority instances");
    for (const auto& inst : minority)
        if (inst.label != 1) throw ConfigError("smote: minority instances must be labeled +1");

    const std::size_t n = minority.size();
    const DistanceTable t = [&] {
        // distances among minority instances only
        return build_distances(minority);
    }();

    // k nearest minority neighbors of each instance
    std::vector<std::vector<std::uint32_t>> nearest(n);
    for (std::size_t i = 0; i < n; ++i)
        nearest[i].assign(t.ordered[i].begin(),
                          t.ordered[i].begin() + static_cast<std::ptrdiff_t>(
                                                     std::min<std::size_t>(k, t.ordered[i].size())));

    Rng rng(seed);
    const std::size_t base = count / n;
    const std::size_t remainder = count % n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<bool> extra(n, false);
    for (std::size_t i = 0; i < remainder; ++i) extra[order[i]] = true;

    SmoteResult result;
    result.synthetic.reserve(count);
    result.parents.reserve(count);
    const std::size_t d = minority[0].features.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t emit = base + (extra[i] ? 1 : 0);
        if (emit == 0) continue;
        std::vector<std::uint32_t> picks(nearest[i]);
        rng.shuffle(picks);
        for (std::size_t e = 0; e < emit; ++e) {
            const std::size_t y = picks[e % picks.size()];
            LabeledInstance synth;
            synth.label = 1;
            synth.features.resize(d);
            for (std::size_t j = 0; j < d; ++j) {
                const double theta = rng.uniform01();
                synth.features[j] = minority[i].features[j] +
                                    theta * (minority[y].features[j] - minority[i].features[j]);
            }
            result.synthetic.push_back(std::move(synth));
            result.parents.emplace_back(i, y);
        }
    }
    return result;
}

SmoteResult smote(const std::vector<LabeledInstance>& minority, double rate, int k,
                  std::uint64_t seed) {
    if (rate <= 0.0) throw ConfigError("smote: rate must be positive");
    const std::size_t count =
        static_cast<std::size_t>(std::llround(rate * static_cast<double>(minority.size())));
    return smote_count(minority, count, k, seed);
}

namespace {

std::ptrdiff_t sigma_quota(const std::vector<LabeledInstance>& data, double sigma) {
    if (sigma < 0.0 || sigma > 1.0) throw ConfigError("sigma must be in [0, 1]");
    std::ptrdiff_t pos = 0, neg = 0;
    for (const auto& inst : data) (inst.label == 1 ? pos : neg) += 1;
    if (neg <= pos) return 0;
    return static_cast<std::ptrdiff_t>(std::floor(sigma * static_cast<double>(neg - pos)));
}

}  // namespace

std::vector<LabeledInstance> sigma_downsample(const std::vector<LabeledInstance>& data,
                                              double sigma, int k, std::uint64_t seed) {
    const std::ptrdiff_t quota = sigma_quota(data, sigma);
    if (quota == 0) return data;
    require_both_classes(data);

    Rng rng(seed);
    const DownsampleResult ds = downsample(data, k, rng.next_u64());
    std::set<std::size_t> safe(ds.consistent.begin(), ds.consistent.end());

    std::vector<std::size_t> expendable, reserved;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].label != -1) continue;
        (safe.count(i) ? reserved : expendable).push_back(i);
    }
    rng.shuffle(expendable);
    rng.shuffle(reserved);
    expendable.insert(expendable.end(), reserved.begin(), reserved.end());

    std::vector<bool> removed(data.size(), false);
    for (std::ptrdiff_t i = 0; i < quota; ++i) removed[expendable[static_cast<std::size_t>(i)]] = true;

    std::vector<LabeledInstance> out;
    out.reserve(data.size() - static_cast<std::size_t>(quota));
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!removed[i]) out.push_back(data[i]);
    return out;
}

std::vector<LabeledInstance> sigma_oversample(const std::vector<LabeledInstance>& data,
                                              double sigma, int k, std::uint64_t seed) {
    const std::ptrdiff_t quota = sigma_quota(data, sigma);
    if (quota == 0) return data;

    std::vector<LabeledInstance> minority;
    for (const auto& inst : data)
        if (inst.label == 1) minority.push_back(inst);

    SmoteResult s = smote_count(minority, static_cast<std::size_t>(quota), k, seed);
    std::vector<LabeledInstance> out = data;
    out.reserve(data.size() + s.synthetic.size());
    for (auto& inst : s.synthetic) out.push_back(std::move(inst));
    return out;
}

}  // namespace pna
