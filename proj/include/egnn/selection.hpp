#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "egnn/features.hpp"

namespace egnn {

/// Ranks with ties averaged: values [10, 20, 20, 30] rank as [1, 2.5, 2.5, 4].
inline std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t m = v.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
    const double m = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= m;
    mean_b /= m;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return 0.0;
    return cov / std::sqrt(var_a * var_b);
}

/// Spearman rank correlation: Pearson correlation of average ranks. A
/// constant sequence has no monotone association and yields 0.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman needs equal lengths");
    if (a.size() < 2) throw std::invalid_argument("spearman needs at least two samples");
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    return pearson(ra, rb);
}

struct RankedFeature {
    std::size_t index = 0;
    double score = 0.0;        // class association minus redundancy penalty
    double class_assoc = 0.0;  // |rho_s(x_j, y)|
    double redundancy = 0.0;   // mean_{k != j} |rho_s(x_j, x_k)|
};

struct FeatureRanking {
    std::vector<RankedFeature> order;  // descending score; score ties break by index
    double lambda = 1.0;
};

/// Scores every feature by its monotone association with the class sequence
/// minus lambda times its mean absolute correlation with the other features,
/// then sorts descending. X is instance-major (one inner vector per
/// instance). lambda = 0 disables the redundancy penalty.
inline FeatureRanking score_features(const std::vector<std::vector<double>>& X,
                                     std::span<const int> y, double lambda = 1.0) {
    if (X.size() < 2) throw std::invalid_argument("scoring needs at least two instances");
    if (X.size() != y.size()) throw std::invalid_argument("instance/label count mismatch");
    const std::size_t m = X.size();
    const std::size_t n = X.front().size();
    for (const auto& row : X) {
        if (row.size() != n) throw std::invalid_argument("ragged instance matrix");
    }

    std::vector<std::vector<double>> feature_ranks(n);
    {
        std::vector<double> column(m);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < m; ++i) column[i] = X[i][j];
            feature_ranks[j] = average_ranks(column);
        }
    }
    std::vector<double> label_column(m);
    for (std::size_t i = 0; i < m; ++i) label_column[i] = static_cast<double>(y[i]);
    const std::vector<double> label_ranks = average_ranks(label_column);

    FeatureRanking ranking;
    ranking.lambda = lambda;
    ranking.order.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        ranking.order[j].index = j;
        ranking.order[j].class_assoc = std::abs(pearson(feature_ranks[j], label_ranks));
    }
    if (n > 1) {
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                sum += std::abs(pearson(feature_ranks[j], feature_ranks[k]));
            }
            ranking.order[j].redundancy = sum / static_cast<double>(n - 1);
        }
    }
    for (auto& f : ranking.order) f.score = f.class_assoc - lambda * f.redundancy;
    std::stable_sort(ranking.order.begin(), ranking.order.end(),
                     [](const RankedFeature& a, const RankedFeature& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.index < b.index;
                     });
    return ranking;
}

struct BandSums {
    std::map<std::string, double> total;  // band -> sum of |rho_s(feature, y)|
    std::map<std::string, double> left;
    std::map<std::string, double> right;
};

/// Sums absolute feature-label Spearman correlations per band, with a
/// left/right hemisphere decomposition keyed off the channel position digit.
/// Feature names must follow the "<Channel>.<Band>.<stat>" convention.
inline BandSums band_correlation_sums(const std::vector<std::vector<double>>& X,
                                      std::span<const int> y,
                                      std::span<const std::string> names) {
    if (X.empty() || X.front().size() != names.size())
        throw std::invalid_argument("feature name count does not match matrix width");
    const std::size_t m = X.size();
    std::vector<double> column(m);
    std::vector<double> label_column(m);
    for (std::size_t i = 0; i < m; ++i) label_column[i] = static_cast<double>(y[i]);
    BandSums sums;
    for (std::size_t j = 0; j < names.size(); ++j) {
        for (std::size_t i = 0; i < m; ++i) column[i] = X[i][j];
        const double assoc = std::abs(spearman(column, label_column));
        const FeatureName parts = parse_feature_name(names[j]);
        sums.total[parts.band] += assoc;
        if (hemisphere(parts.channel) == Hemisphere::left)
            sums.left[parts.band] += assoc;
        else
            sums.right[parts.band] += assoc;
    }
    return sums;
}

/// Nested prefix subsets of a ranked index list: sizes n, n-k, n-2k, ...
/// while the size stays at or above min_size (and above zero). Each returned
/// vector holds original feature indices, best-ranked first.
inline std::vector<std::vector<std::size_t>> leave_k_out_schedule(
    std::span<const std::size_t> ranked, std::size_t k, std::size_t min_size = 1) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (ranked.empty()) return {};
    min_size = std::clamp<std::size_t>(min_size, 1, ranked.size());

    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t size = ranked.size(); size >= min_size; size -= k) {
        subsets.emplace_back(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(size));
        if (size < min_size + k) break;  // next would drop below min_size (or wrap)
    }
    return subsets;
}

inline std::vector<std::vector<std::size_t>> leave_k_out_schedule(const FeatureRanking& ranking,
                                                                  std::size_t k,
                                                                  std::size_t min_size = 1) {
    std::vector<std::size_t> ranked;
    ranked.reserve(ranking.order.size());
    for (const RankedFeature& f : ranking.order) ranked.push_back(f.index);
    return leave_k_out_schedule(std::span<const std::size_t>(ranked), k, min_size);
}

}  // namespace egnn
