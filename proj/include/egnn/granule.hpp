#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "egnn/common.hpp"

namespace egnn {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// One n-dimensional double-boundary hyper-box granule.
///
/// Each feature axis carries four bounds in ascending order:
///
///     outer_lo <= inner_lo <= inner_hi <= outer_hi
///
/// The inner box (core) is the flexible part that tracks drifts; the outer
/// box (support) governs data coverage and is more robust to noise. A
/// granule points to a single class and keeps per-feature synaptic weights
/// in [0,1] plus right/wrong prediction counters used by the weight update.
class Granule {
public:
    struct AxisBounds {
        double outer_lo;
        double inner_lo;
        double inner_hi;
        double outer_hi;
    };

    /// Creates a pointwise granule: all four bounds collapse onto x per axis,
    /// weights start at 1, counters at zero. Rejects inputs outside the unit
    /// cube (the normalization contract upstream of the classifier).
    static Granule pointwise(std::span<const double> x, int label, std::uint64_t step) {
        if (x.empty()) throw std::invalid_argument("granule needs at least one feature");
        if (!all_finite(x) || !in_unit_cube(x))
            throw std::invalid_argument("granule creation requires features in [0,1]");
        Granule g;
        g.bounds_.reserve(x.size());
        for (double v : x) g.bounds_.push_back({v, v, v, v});
        g.weights_.assign(x.size(), 1.0);
        g.label_ = label;
        g.last_win_step_ = step;
        g.created_step_ = step;
        return g;
    }

    /// Reassembles a granule from stored parts (checkpoints). Validates the
    /// ordering invariant and the weight range.
    static Granule from_parts(std::vector<AxisBounds> bounds, std::vector<double> weights,
                              int label, std::uint64_t right, std::uint64_t wrong,
                              std::uint64_t last_win_step, std::uint64_t created_step) {
        if (bounds.empty() || bounds.size() != weights.size())
            throw std::invalid_argument("granule bounds/weights size mismatch");
        for (const auto& b : bounds) {
            if (!(b.outer_lo <= b.inner_lo && b.inner_lo <= b.inner_hi && b.inner_hi <= b.outer_hi))
                throw std::invalid_argument("granule bounds out of order");
        }
        for (double w : weights) {
            if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("granule weight outside [0,1]");
        }
        Granule g;
        g.bounds_ = std::move(bounds);
        g.weights_ = std::move(weights);
        g.label_ = label;
        g.right_count_ = right;
        g.wrong_count_ = wrong;
        g.last_win_step_ = last_win_step;
        g.created_step_ = created_step;
        return g;
    }

    std::size_t dims() const { return bounds_.size(); }
    int label() const { return label_; }
    std::uint64_t right_count() const { return right_count_; }
    std::uint64_t wrong_count() const { return wrong_count_; }
    std::uint64_t last_win_step() const { return last_win_step_; }
    std::uint64_t created_step() const { return created_step_; }
    const std::vector<AxisBounds>& bounds() const { return bounds_; }
    std::span<const double> weights() const { return weights_; }

    double midpoint(std::size_t j) const {
        const AxisBounds& b = bounds_[j];
        return 0.5 * (b.inner_lo + b.inner_hi);
    }

    double width(std::size_t j) const {
        const AxisBounds& b = bounds_[j];
        return b.outer_hi - b.outer_lo;
    }

    Interval core(std::size_t j) const { return {bounds_[j].inner_lo, bounds_[j].inner_hi}; }
    Interval support(std::size_t j) const { return {bounds_[j].outer_lo, bounds_[j].outer_hi}; }

    /// Interval into which this granule may grow along axis j: midpoint
    /// plus/minus half the current maximum width. May protrude beyond [0,1].
    Interval expansion_region(std::size_t j, double rho) const {
        const double mp = midpoint(j);
        return {mp - 0.5 * rho, mp + 0.5 * rho};
    }

    /// True iff x lies inside the expansion region on every axis.
    bool covers_expansion(std::span<const double> x, double rho) const {
        for (std::size_t j = 0; j < bounds_.size(); ++j) {
            if (!expansion_region(j, rho).contains(x[j])) return false;
        }
        return true;
    }

    /// Pointwise similarity between x and this granule along axis j:
    ///
    ///   1 - (|outer_lo-x| + |inner_lo-x| + |inner_hi-x| + |outer_hi-x|)
    ///       / (4 * (max(outer_hi, x) - min(outer_lo, x)))
    ///
    /// A pointwise granule evaluated exactly at its point yields 0/0; that is
    /// defined as 1 (perfect match).
    double axis_similarity(std::size_t j, double xj) const {
        const AxisBounds& b = bounds_[j];
        const double spread = std::max(b.outer_hi, xj) - std::min(b.outer_lo, xj);
        if (spread <= 0.0) return 1.0;
        const double dist = std::abs(b.outer_lo - xj) + std::abs(b.inner_lo - xj) +
                            std::abs(b.inner_hi - xj) + std::abs(b.outer_hi - xj);
        return 1.0 - dist / (4.0 * spread);
    }

    void similarity(std::span<const double> x, std::span<double> out) const {
        for (std::size_t j = 0; j < bounds_.size(); ++j) out[j] = axis_similarity(j, x[j]);
    }

    std::vector<double> similarity(std::span<const double> x) const {
        std::vector<double> out(bounds_.size());
        similarity(x, out);
        return out;
    }

    /// Moves the box toward x. Per axis exactly one case applies, tested in
    /// order with half-open intervals so that overlapping endpoints resolve
    /// to the earliest case:
    ///
    ///   (a) x in [mp - rho/2, outer_lo)  -> outer_lo = x
    ///   (b) x in [outer_lo, mp)          -> inner box becomes [x, mp]
    ///   (c) x in [mp, outer_hi]          -> inner box becomes [mp, x]
    ///   (d) x in (outer_hi, mp + rho/2]  -> outer_hi = x
    ///   (e) otherwise                    -> axis untouched
    ///
    /// The midpoint is then recomputed from the new inner box, the outer box
    /// is contracted to [mp - rho/2, mp + rho/2] where it protrudes, and the
    /// inner bounds are clamped back into the outer box so the ordering
    /// invariant holds.
    void adapt(std::span<const double> x, double rho) {
        const double half = 0.5 * rho;
        for (std::size_t j = 0; j < bounds_.size(); ++j) {
            AxisBounds& b = bounds_[j];
            const double mp = 0.5 * (b.inner_lo + b.inner_hi);
            const double xj = x[j];
            if (xj >= mp - half && xj < b.outer_lo) {
                b.outer_lo = xj;
            } else if (xj >= b.outer_lo && xj < mp) {
                b.inner_lo = xj;
                b.inner_hi = mp;
            } else if (xj >= mp && xj <= b.outer_hi) {
                b.inner_lo = mp;
                b.inner_hi = xj;
            } else if (xj > b.outer_hi && xj <= mp + half) {
                b.outer_hi = xj;
            }
            contract_axis(b, half);
        }
    }

    /// Shrinks the outer box so no axis is wider than rho, then clamps the
    /// inner box back inside. Applied to all granules whenever the maximum
    /// width decreases.
    void enforce_max_width(double rho) {
        const double half = 0.5 * rho;
        for (AxisBounds& b : bounds_) contract_axis(b, half);
    }

    /// Bumps the right or wrong counter and stamps the step at which this
    /// granule last held the highest class probability.
    void record_outcome(bool correct, std::uint64_t step) {
        if (correct)
            ++right_count_;
        else
            ++wrong_count_;
        last_win_step_ = step;
    }

    /// Weight update for the winning granule. Counters must already include
    /// the outcome of the current step, so right+wrong >= 1.
    ///
    ///   beta = R/(R+W) on a hit, W/(R+W) on a miss
    ///   w_j  = clamp01(w_j - err * beta * sim_j)
    ///
    /// err is -1 for a correct prediction and +1 otherwise.
    void update_weights(std::span<const double> sim, int err) {
        const double total = static_cast<double>(right_count_ + wrong_count_);
        const double beta =
            (err < 0 ? static_cast<double>(right_count_) : static_cast<double>(wrong_count_)) / total;
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            weights_[j] = std::clamp(weights_[j] - err * beta * sim[j], 0.0, 1.0);
        }
    }

private:
    static void contract_axis(AxisBounds& b, double half) {
        const double mp = 0.5 * (b.inner_lo + b.inner_hi);
        if (mp - half > b.outer_lo) b.outer_lo = mp - half;
        if (mp + half < b.outer_hi) b.outer_hi = mp + half;
        b.inner_lo = std::max(b.inner_lo, b.outer_lo);
        b.inner_hi = std::min(b.inner_hi, b.outer_hi);
    }

    std::vector<AxisBounds> bounds_;
    std::vector<double> weights_;
    int label_ = 0;
    std::uint64_t right_count_ = 0;
    std::uint64_t wrong_count_ = 0;
    std::uint64_t last_win_step_ = 0;
    std::uint64_t created_step_ = 0;
};

}  // namespace egnn
