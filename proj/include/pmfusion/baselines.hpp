#pragma once

// Comparison fusion methods: two-level Dempster-Shafer classification and a recursive
// Bayesian (DDF-style) filter.

#include <cstdint>
#include <map>
#include <vector>

#include "pmfusion/core.hpp"
#include "pmfusion/scoring.hpp"

namespace pmfusion {

/// Basic belief assignment over a frame of at most 16 hypotheses; focal sets are bitmasks.
class MassFunction {
public:
    using Subset = std::uint32_t;

    MassFunction() = default;
    MassFunction(std::size_t frame_size, std::map<Subset, double> masses)
        : frame_size_(frame_size), masses_(std::move(masses)) {
        if (frame_size_ == 0 || frame_size_ > 16) throw ArgumentError("MassFunction: frame size must be 1..16");
        double sum = 0.0;
        for (auto it = masses_.begin(); it != masses_.end();) {
            const auto [set, mass] = *it;
            if ((set & ~full()) != 0) throw ArgumentError("MassFunction: focal set outside the frame");
            if (!(mass >= -1e-12 && mass <= 1.0 + 1e-12)) throw ArgumentError("MassFunction: mass outside [0,1]");
            if (set == 0 && mass > 1e-12) throw ArgumentError("MassFunction: empty set carries mass");
            sum += mass;
            if (set == 0 || mass <= 0.0) it = masses_.erase(it);
            else ++it;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) throw ArgumentError("MassFunction: masses do not sum to 1");
    }

    static MassFunction vacuous(std::size_t frame_size) {
        return MassFunction(frame_size, {{full_of(frame_size), 1.0}});
    }

    /// Singleton {i} gets weight · p_i, the whole frame the remaining 1 - weight.
    static MassFunction discounted(const TypeDistribution& p, double weight) {
        if (!(weight >= 0.0 && weight <= 1.0)) throw ArgumentError("MassFunction::discounted: weight outside [0,1]");
        std::map<Subset, double> m;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] > 0.0) m[Subset{1} << i] += weight * p[i];
        m[full_of(p.size())] += 1.0 - weight;
        return MassFunction(p.size(), std::move(m));
    }

    static constexpr Subset full_of(std::size_t n) { return n >= 32 ? ~Subset{0} : (Subset{1} << n) - 1; }
    Subset full() const noexcept { return full_of(frame_size_); }
    std::size_t frame_size() const noexcept { return frame_size_; }
    const std::map<Subset, double>& focal() const noexcept { return masses_; }

    double mass(Subset s) const {
        const auto it = masses_.find(s);
        return it == masses_.end() ? 0.0 : it->second;
    }

private:
    std::size_t frame_size_ = 0;
    std::map<Subset, double> masses_;
};

/// Dempster's rule: conjunctive combination with the conflict mass renormalized away.
inline MassFunction ds_combine(const MassFunction& a, const MassFunction& b) {
    if (a.frame_size() != b.frame_size()) throw ArgumentError("ds_combine: frames differ");
    std::map<MassFunction::Subset, double> joint;
    double conflict = 0.0;
    for (const auto& [sa, ma] : a.focal())
        for (const auto& [sb, mb] : b.focal()) {
            const auto c = sa & sb;
            if (c == 0) conflict += ma * mb;
            else joint[c] += ma * mb;
        }
    const double norm = 1.0 - conflict;
    if (!(norm > 1e-15)) throw ConflictError("ds_combine: total conflict between mass functions");
    double sum = 0.0;
    for (auto& [s, m] : joint) sum += m;
    // divide by the accumulated non-conflict mass rather than 1 - conflict to keep the sum exact
    for (auto& [s, m] : joint) m /= sum;
    return MassFunction(a.frame_size(), std::move(joint));
}

/// BetP(x) = Σ_{A ∋ x} m(A) / |A|.
inline TypeDistribution pignistic(const MassFunction& m) {
    std::vector<double> p(m.frame_size(), 0.0);
    for (const auto& [set, mass] : m.focal()) {
        const int card = __builtin_popcount(set);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (set & (MassFunction::Subset{1} << i)) p[i] += mass / card;
    }
    return normalize(p);
}

/// Maps the two-level frames onto the m object types.
struct DsFrames {
    std::size_t types = 3;
    std::size_t mine_type = 0;
    /// Friendly object type implied by each metal-content level (e.g. low -> non-metallic).
    std::vector<std::size_t> friendly_type_by_level{2, 1, 1};
};

inline constexpr MassFunction::Subset kMine = 1;      // level-2 frame {mine, friendly}
inline constexpr MassFunction::Subset kFriendly = 2;

struct DsClassification {
    std::size_t metal_level = 0;
    MassFunction level1;                // combined, over metal-content levels
    MassFunction level2;                // combined, over {mine, friendly}
    TypeDistribution level2_pignistic;  // (mine, friendly)
    TypeDistribution types;
};

/// Two-level classification: combine the metal-content evidence, pick the most probable
/// level, combine the mine/friendly evidence conditioned on that level, and spread the
/// result over object types. {mine} and {friendly} land on their types; ignorance over
/// {mine, friendly} is split uniformly over all types.
inline DsClassification ds_classify(std::span<const MassFunction> level1,
                                    const std::vector<std::vector<MassFunction>>& level2_by_level,
                                    const DsFrames& frames) {
    const std::size_t levels = frames.friendly_type_by_level.size();
    if (levels == 0 || level2_by_level.size() != levels) throw ArgumentError("ds_classify: level-2 evidence per metal level required");

    MassFunction l1 = MassFunction::vacuous(levels);
    for (const auto& m : level1) l1 = ds_combine(l1, m);
    const std::size_t level = pignistic(l1).argmax();

    MassFunction l2 = MassFunction::vacuous(2);
    for (const auto& m : level2_by_level[level]) l2 = ds_combine(l2, m);

    std::vector<double> types(frames.types, l2.mass(kMine | kFriendly) / static_cast<double>(frames.types));
    types.at(frames.mine_type) += l2.mass(kMine);
    types.at(frames.friendly_type_by_level[level]) += l2.mass(kFriendly);

    return {level, l1, l2, pignistic(l2), normalize(types)};
}

struct FilterState {
    TypeDistribution posterior;
    int updates_applied = 0;
};

/// posterior' ∝ posterior × likelihood.
inline FilterState ddf_update(const FilterState& state, const TypeDistribution& likelihood) {
    if (likelihood.size() != state.posterior.size()) throw ArgumentError("ddf_update: size mismatch");
    std::vector<double> p(likelihood.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (likelihood[j] < kReportEpsilon * (1.0 - 1e-9)) throw ArgumentError("ddf_update: likelihood below clip floor");
        p[j] = state.posterior[j] * likelihood[j];
    }
    return {normalize(p), state.updates_applied + 1};
}

}  // namespace pmfusion
