#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "egnn/common.hpp"

namespace egnn {

/// Streaming min-max scaler. Each arriving instance first widens the running
/// per-feature extremes and is then mapped to [0,1]; a feature whose range is
/// still degenerate maps to 0.5. Replay of the same stream reproduces the
/// same output exactly.
class OnlineNormalizer {
public:
    explicit OnlineNormalizer(std::size_t dims) : min_(dims), max_(dims) {}

    static OnlineNormalizer from_state(std::vector<double> mins, std::vector<double> maxs,
                                       std::uint64_t seen) {
        if (mins.size() != maxs.size())
            throw std::invalid_argument("normalizer min/max size mismatch");
        OnlineNormalizer n(mins.size());
        n.min_ = std::move(mins);
        n.max_ = std::move(maxs);
        n.seen_ = seen;
        return n;
    }

    std::size_t dims() const { return min_.size(); }
    std::uint64_t seen() const { return seen_; }
    const std::vector<double>& mins() const { return min_; }
    const std::vector<double>& maxs() const { return max_; }

    std::vector<double> normalize(std::span<const double> x) {
        if (x.size() != min_.size())
            throw std::invalid_argument("instance width does not match normalizer");
        if (!all_finite(x)) throw std::invalid_argument("non-finite feature value");
        if (seen_ == 0) {
            for (std::size_t j = 0; j < x.size(); ++j) min_[j] = max_[j] = x[j];
        } else {
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (x[j] < min_[j]) min_[j] = x[j];
                if (x[j] > max_[j]) max_[j] = x[j];
            }
        }
        ++seen_;
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double range = max_[j] - min_[j];
            out[j] = range > 0.0 ? (x[j] - min_[j]) / range : 0.5;
        }
        return out;
    }

private:
    std::vector<double> min_;
    std::vector<double> max_;
    std::uint64_t seen_ = 0;
};

}  // namespace egnn
