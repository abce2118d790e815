#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "egnn/common.hpp"
#include "egnn/granule.hpp"

namespace egnn {

enum class Aggregation { product };

struct HyperParams {
    double rho0 = 0.5;
    std::uint64_t hr = 100;
    double eta = 2.0;
    Aggregation aggregation = Aggregation::product;
};

/// Weighted product aggregation of per-feature similarities.
inline double aggregate(std::span<const double> sim, std::span<const double> w) {
    double o = 1.0;
    for (std::size_t j = 0; j < sim.size(); ++j) o *= sim[j] * w[j];
    return o;
}

/// Softmax over activations. Activations live in [0,1], so the plain
/// exponential cannot overflow and no max-shift is needed.
inline std::vector<double> softmax(std::span<const double> o) {
    std::vector<double> p(o.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) {
        p[i] = std::exp(o[i]);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

/// -1 when the estimate hit the true class, +1 otherwise.
inline int compute_error(int true_class, int predicted_class) {
    return true_class == predicted_class ? -1 : +1;
}

struct Prediction {
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::vector<double> activations;
    std::vector<double> probabilities;
    std::size_t winner = kNone;  // kNone only for the first-instance estimate
    int predicted_class = 0;
};

struct LearnResult {
    Prediction prediction;
    int error = 0;      // -1 hit, +1 miss
    bool created = false;
};

/// One human-readable classification rule, read off a granule:
/// IF x_j is within [core/support interval_j] for all j THEN class = label.
struct Rule {
    int label = 0;
    std::vector<Interval> core;
    std::vector<Interval> support;
    std::vector<double> weights;
    std::uint64_t right = 0;
    std::uint64_t wrong = 0;
    double win_share = 0.0;  // this rule's share of all winner decisions
};

/// Serializable snapshot of a classifier. Restoring a snapshot resumes the
/// exact trajectory, including the generator used for the first-instance
/// estimate.
struct ClassifierState {
    HyperParams params;
    double rho = 0.0;
    std::uint64_t step = 0;
    std::uint64_t created_in_epoch = 0;
    std::vector<int> classes_seen;
    std::vector<int> class_universe;
    std::string rng_state;
    std::vector<Granule> granules;
};

/// Evolving granular classifier over streams of feature vectors in the unit
/// cube. Starts empty; granules are created, adapted, and deleted online,
/// and the maximum box width rho is re-tuned from the creation rate every
/// hr steps.
class Classifier {
public:
    static constexpr double kMinRho = 1e-3;

    explicit Classifier(HyperParams params, std::uint64_t seed,
                        std::vector<int> class_universe = {})
        : params_(params),
          rho_(params.rho0),
          class_universe_(std::move(class_universe)),
          rng_(seed) {
        if (!(params.rho0 > 0.0 && params.rho0 <= 1.0))
            throw std::invalid_argument("rho0 must lie in (0,1]");
        if (params.hr < 1) throw std::invalid_argument("hr must be at least 1");
        if (!(params.eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
    }

    const HyperParams& params() const { return params_; }
    double rho() const { return rho_; }
    std::uint64_t step() const { return step_; }
    std::uint64_t created_in_epoch() const { return created_in_epoch_; }
    const std::vector<Granule>& granules() const { return granules_; }
    std::size_t granule_count() const { return granules_.size(); }
    const std::set<int>& classes_seen() const { return classes_seen_; }
    std::size_t class_count() const { return classes_seen_.size(); }

    bool empty() const { return granules_.empty(); }

    /// Runs the forward pass: per-granule similarity, weighted product
    /// aggregation, softmax, argmax. Ties break toward the lowest granule
    /// index. The model must contain at least one granule.
    Prediction predict(std::span<const double> x) const {
        if (granules_.empty())
            throw std::logic_error("predict on empty model; learn bootstraps it");
        check_input(x);
        Prediction pred;
        pred.activations.reserve(granules_.size());
        std::vector<double> sim(x.size());
        for (const Granule& g : granules_) {
            g.similarity(x, sim);
            pred.activations.push_back(aggregate(sim, g.weights()));
        }
        pred.probabilities = softmax(pred.activations);
        pred.winner = 0;
        for (std::size_t i = 1; i < pred.probabilities.size(); ++i) {
            if (pred.probabilities[i] > pred.probabilities[pred.winner]) pred.winner = i;
        }
        pred.predicted_class = granules_[pred.winner].label();
        return pred;
    }

    /// One incremental step: estimate the class of x, then learn from the
    /// revealed true class.
    ///
    /// - First instance ever: the estimate is a random draw from the class
    ///   universe (or class 1 when no universe was declared) and a pointwise
    ///   granule is created.
    /// - Otherwise the winner's hit/miss counters and win timestamp are
    ///   updated first. A new granule is created when the estimate was wrong
    ///   or no expansion region covers x; otherwise the winner adapts toward
    ///   x and its weights are updated from the pre-adaptation similarity.
    /// - Granules that have not won for more than hr steps are deleted.
    /// - Every hr steps rho is re-tuned from the number of granules created
    ///   in the epoch (r) against the reference rate eta:
    ///   r > eta grows rho by (1 + r/hr); r < eta shrinks it by
    ///   (1 - (eta - r)/hr); rho is clamped to [kMinRho, 1] and every box is
    ///   shrunk to the new width cap.
    LearnResult learn(std::span<const double> x, int true_class) {
        check_input(x);
        ++step_;
        LearnResult res;
        if (granules_.empty()) {
            res.prediction.predicted_class = bootstrap_estimate();
            res.error = compute_error(true_class, res.prediction.predicted_class);
            create_granule(x, true_class);
            res.created = true;
        } else {
            res.prediction = predict(x);
            res.error = compute_error(true_class, res.prediction.predicted_class);
            Granule& winner = granules_[res.prediction.winner];
            winner.record_outcome(res.error < 0, step_);
            const bool covered = covers_any_expansion(x);
            if (res.error > 0 || !covered) {
                create_granule(x, true_class);
                res.created = true;
            } else {
                const std::vector<double> sim = winner.similarity(x);
                winner.adapt(x, rho_);
                winner.update_weights(sim, res.error);
            }
        }
        delete_inactive();
        if (step_ % params_.hr == 0) adapt_granularity();
        return res;
    }

    /// True iff x falls inside at least one granule's expansion region.
    bool covers_any_expansion(std::span<const double> x) const {
        for (const Granule& g : granules_) {
            if (g.covers_expansion(x, rho_)) return true;
        }
        return false;
    }

    /// Reads one rule per granule. win_share distributes the decision mass:
    /// each rule's fraction of all recorded winner outcomes, or 1/c while no
    /// outcome has been recorded yet.
    std::vector<Rule> extract_rules() const {
        std::uint64_t total = 0;
        for (const Granule& g : granules_) total += g.right_count() + g.wrong_count();
        std::vector<Rule> rules;
        rules.reserve(granules_.size());
        for (const Granule& g : granules_) {
            Rule r;
            r.label = g.label();
            r.right = g.right_count();
            r.wrong = g.wrong_count();
            r.weights.assign(g.weights().begin(), g.weights().end());
            for (std::size_t j = 0; j < g.dims(); ++j) {
                r.core.push_back(g.core(j));
                r.support.push_back(g.support(j));
            }
            r.win_share = total > 0
                              ? static_cast<double>(r.right + r.wrong) / static_cast<double>(total)
                              : 1.0 / static_cast<double>(granules_.size());
            rules.push_back(std::move(r));
        }
        return rules;
    }

    ClassifierState state() const {
        ClassifierState s;
        s.params = params_;
        s.rho = rho_;
        s.step = step_;
        s.created_in_epoch = created_in_epoch_;
        s.classes_seen.assign(classes_seen_.begin(), classes_seen_.end());
        s.class_universe = class_universe_;
        std::ostringstream os;
        os << rng_;
        s.rng_state = os.str();
        s.granules = granules_;
        return s;
    }

    static Classifier from_state(const ClassifierState& s) {
        Classifier c(s.params, 0, s.class_universe);
        if (!(s.rho >= kMinRho && s.rho <= 1.0))
            throw std::invalid_argument("restored rho outside [1e-3, 1]");
        c.rho_ = s.rho;
        c.step_ = s.step;
        c.created_in_epoch_ = s.created_in_epoch;
        c.classes_seen_.insert(s.classes_seen.begin(), s.classes_seen.end());
        std::istringstream is(s.rng_state);
        is >> c.rng_;
        if (!is) throw std::invalid_argument("malformed generator state");
        c.granules_ = s.granules;
        return c;
    }

private:
    static void check_input(std::span<const double> x) {
        if (x.empty()) throw std::invalid_argument("empty feature vector");
        if (!all_finite(x) || !in_unit_cube(x))
            throw std::invalid_argument("features must be finite and normalized to [0,1]");
    }

    int bootstrap_estimate() {
        if (class_universe_.empty()) return 1;
        return class_universe_[rng_() % class_universe_.size()];
    }

    void create_granule(std::span<const double> x, int label) {
        granules_.push_back(Granule::pointwise(x, label, step_));
        ++created_in_epoch_;
        classes_seen_.insert(label);
    }

    void delete_inactive() {
        const std::uint64_t h = step_;
        const std::uint64_t hr = params_.hr;
        std::erase_if(granules_,
                      [h, hr](const Granule& g) { return h - g.last_win_step() > hr; });
    }

    void adapt_granularity() {
        const double r = static_cast<double>(created_in_epoch_);
        const double hr = static_cast<double>(params_.hr);
        if (r > params_.eta) {
            rho_ *= 1.0 + r / hr;
        } else if (r < params_.eta) {
            rho_ *= 1.0 - (params_.eta - r) / hr;
        }
        rho_ = std::clamp(rho_, kMinRho, 1.0);
        for (Granule& g : granules_) g.enforce_max_width(rho_);
        created_in_epoch_ = 0;
    }

    HyperParams params_;
    double rho_;
    std::uint64_t step_ = 0;
    std::uint64_t created_in_epoch_ = 0;
    std::set<int> classes_seen_;
    std::vector<int> class_universe_;
    std::mt19937_64 rng_;
    std::vector<Granule> granules_;
};

}  // namespace egnn
