#pragma once

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "egnn/granule.hpp"

namespace egnn {

/// Recursive streaming mean: value_new = ((h-1)*value_old + sample)/h.
/// With sample = 1 on a hit and 0 on a miss this is the prequential
/// accuracy; with sample = current granule count it is the average
/// compactness.
inline double update_accuracy(double acc_old, std::uint64_t h, bool correct) {
    const double tau = correct ? 1.0 : 0.0;
    return (static_cast<double>(h - 1) * acc_old + tau) / static_cast<double>(h);
}

inline double update_compactness(double c_avg_old, std::uint64_t h, double c_now) {
    return (static_cast<double>(h - 1) * c_avg_old + c_now) / static_cast<double>(h);
}

/// Hyper-volume of the outer box: product of the outer edge lengths.
inline double volume(const Granule& g) {
    double v = 1.0;
    for (std::size_t j = 0; j < g.dims(); ++j) v *= g.width(j);
    return v;
}

/// Streaming confusion counts. Rows are true classes, columns estimates;
/// classes appear as they are first seen.
class ConfusionMatrix {
public:
    void add(int true_class, int predicted_class) {
        ++cells_[true_class][predicted_class];
        classes_.insert(true_class);
        classes_.insert(predicted_class);
        ++total_;
    }

    std::uint64_t count(int true_class, int predicted_class) const {
        auto row = cells_.find(true_class);
        if (row == cells_.end()) return 0;
        auto cell = row->second.find(predicted_class);
        return cell == row->second.end() ? 0 : cell->second;
    }

    std::uint64_t row_sum(int true_class) const {
        auto row = cells_.find(true_class);
        if (row == cells_.end()) return 0;
        std::uint64_t s = 0;
        for (const auto& [pred, n] : row->second) s += n;
        return s;
    }

    std::vector<int> classes() const { return {classes_.begin(), classes_.end()}; }
    std::uint64_t total() const { return total_; }

private:
    std::map<int, std::map<int, std::uint64_t>> cells_;
    std::set<int> classes_;
    std::uint64_t total_ = 0;
};

struct InterpretabilityReport {
    double ii = 0.0;
    double equilibrium = 0.0;  // 1 - 4 * variance of scaled volumes
    std::size_t n_hat = 0;     // features per granule
    std::size_t c = 0;         // granule count
    double theta_hat = 0.0;    // parameters per granule
    std::vector<double> volumes;
    std::vector<double> scaled_volumes;
};

/// Interpretability of a granular model. Outer-box volumes are scaled by the
/// largest volume (plus a tiny epsilon so degenerate all-zero models divide
/// cleanly), their balance enters through the equilibrium term
/// 1 - 4*variance, and the structural burden through granule count, feature
/// count, and parameters per granule:
///
///     ii = equilibrium * (n + c + theta) / (3 * n * c * theta)
///
/// theta defaults to the count of adaptive values a granule carries: four
/// bounds and one weight per feature plus the class label, 5n + 1. Pass a
/// positive theta_hat to calibrate against other parameter accounting.
inline InterpretabilityReport interpretability(const std::vector<Granule>& granules,
                                               double theta_hat = 0.0) {
    if (granules.empty()) throw std::invalid_argument("interpretability needs granules");
    InterpretabilityReport rep;
    rep.c = granules.size();
    rep.n_hat = granules.front().dims();
    const double n = static_cast<double>(rep.n_hat);
    rep.theta_hat = theta_hat > 0.0 ? theta_hat : 5.0 * n + 1.0;

    rep.volumes.reserve(rep.c);
    double v_max = 0.0;
    for (const Granule& g : granules) {
        rep.volumes.push_back(volume(g));
        v_max = std::max(v_max, rep.volumes.back());
    }
    // 10^(-3n) underflows past n ~ 103; the guard only has to keep the
    // denominator positive.
    const double eps = std::max(std::pow(10.0, -3.0 * n), DBL_MIN);
    rep.scaled_volumes.reserve(rep.c);
    double mean = 0.0;
    for (double v : rep.volumes) {
        rep.scaled_volumes.push_back(v / (v_max + eps));
        mean += rep.scaled_volumes.back();
    }
    mean /= static_cast<double>(rep.c);
    double var = 0.0;
    for (double v : rep.scaled_volumes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(rep.c);
    rep.equilibrium = 1.0 - 4.0 * var;

    const double c = static_cast<double>(rep.c);
    rep.ii = rep.equilibrium * (n + c + rep.theta_hat) / (3.0 * n * c * rep.theta_hat);
    return rep;
}

/// Per-step evaluation state for a prequential run.
class StreamMetrics {
public:
    /// Scores one instance: true label against the estimate made before the
    /// label was revealed, plus the granule count after the learning step.
    void record(int true_class, int predicted_class, std::size_t c_now) {
        ++step_;
        acc_ = update_accuracy(acc_, step_, true_class == predicted_class);
        c_avg_ = update_compactness(c_avg_, step_, static_cast<double>(c_now));
        confusion_.add(true_class, predicted_class);
    }

    void record_interpretability(double ii) { ii_history_.push_back(ii); }

    std::uint64_t step() const { return step_; }
    double accuracy() const { return acc_; }
    double avg_compactness() const { return c_avg_; }
    const ConfusionMatrix& confusion() const { return confusion_; }
    const std::vector<double>& ii_history() const { return ii_history_; }

    double mean_ii() const {
        if (ii_history_.empty()) return 0.0;
        double s = 0.0;
        for (double v : ii_history_) s += v;
        return s / static_cast<double>(ii_history_.size());
    }

    double final_ii() const { return ii_history_.empty() ? 0.0 : ii_history_.back(); }

private:
    std::uint64_t step_ = 0;
    double acc_ = 0.0;
    double c_avg_ = 0.0;
    ConfusionMatrix confusion_;
    std::vector<double> ii_history_;
};

}  // namespace egnn
