#pragma once

// Numerical checks of the mechanism that back the `verify-incentives` and `oracle-check`
// commands and the test suites. Nothing here is used by the simulation itself.

#include <array>
#include <chrono>
#include <limits>
#include <cmath>
#include <vector>

#include "pmfusion/market.hpp"
#include "pmfusion/rng.hpp"
#include "pmfusion/scoring.hpp"
#include "pmfusion/sensor_agent.hpp"

namespace pmfusion::verify {

/// Uniform sample from the probability simplex (flat Dirichlet).
inline std::vector<double> random_simplex(Rng& rng, std::size_t m) {
    std::vector<double> x(m);
    double s = 0.0;
    for (double& v : x) {
        v = -std::log(1.0 - rng.uniform());
        s += v;
    }
    for (double& v : x) v /= s;
    return x;
}

/// h x m table whose columns are conditional distributions P(· | θ_j).
inline std::vector<std::vector<double>> random_decision_table(Rng& rng, std::size_t h, std::size_t m) {
    std::vector<std::vector<double>> p(h, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
        const auto col = random_simplex(rng, h);
        for (std::size_t i = 0; i < h; ++i) p[i][j] = col[i];
    }
    return p;
}

// ---------------------------------------------------------------------------
// Aggregation oracle
// ---------------------------------------------------------------------------

/// B^t evaluated term by term as written: form Ψ^ave_j, subtract the weighted reward sum,
/// divide by ϖ_j, exponentiate and normalize over types. No log-space shortcuts.
inline std::vector<double> literal_aggregate(std::span<const Report> reports, const RewardLedger& ledgers,
                                             std::span<const double> varpi) {
    const std::size_t m = varpi.size();
    std::vector<double> numer(m);
    for (std::size_t j = 0; j < m; ++j) {
        double weighted_rewards = 0.0;
        for (const auto& r : reports)
            for (const auto& e : ledgers.at(r.agent_id)) weighted_rewards += e.weight * e.reward;
        double log_terms = 0.0;
        for (const auto& r : reports) log_terms += r.expert_weight * std::log(r.values[j]);
        const double psi_ave = weighted_rewards + varpi[j] * log_terms;
        numer[j] = std::exp((psi_ave - weighted_rewards) / varpi[j]);
    }
    double denom = 0.0;
    for (double x : numer) denom += x;
    for (double& x : numer) x /= denom;
    return numer;
}

struct AggregationCase {
    std::vector<Report> reports;
    RewardLedger ledgers;
    std::vector<double> varpi;  // per type
};

inline AggregationCase random_aggregation_case(Rng& rng) {
    AggregationCase c;
    const std::size_t m = 2 + rng.below(4);       // 2..5 types
    const std::size_t agents = 2 + rng.below(9);  // 2..10 agents
    for (std::size_t a = 0; a < agents; ++a) {
        Report r;
        r.agent_id = static_cast<int>(a);
        r.values = clip_report(random_simplex(rng, m));
        r.expert_weight = 1.0 - rng.uniform();  // (0,1]
        c.reports.push_back(r);
        const std::size_t history = 1 + rng.below(10);
        for (std::size_t k = 0; k < history; ++k)
            c.ledgers[r.agent_id].push_back({static_cast<int>(k + 1), 1.0 - rng.uniform(), rng.uniform(-5.0, 5.0)});
    }
    for (std::size_t j = 0; j < m; ++j) c.varpi.push_back(10.0 * (1.0 - rng.uniform()));
    return c;
}

struct OracleReport {
    int samples = 0;
    double max_oracle_diff = 0.0;      // |log pool - literal|_inf
    double max_invariance_diff = 0.0;  // change under resampled rewards and ϖ
};

inline OracleReport check_aggregation_oracle(int samples, std::uint64_t seed) {
    Rng rng(seed);
    OracleReport rep;
    rep.samples = samples;
    for (int s = 0; s < samples; ++s) {
        const AggregationCase c = random_aggregation_case(rng);
        const TypeDistribution fast = aggregate_beliefs(c.reports, c.ledgers, c.varpi);
        const std::vector<double> slow = literal_aggregate(c.reports, c.ledgers, c.varpi);
        for (std::size_t j = 0; j < slow.size(); ++j)
            rep.max_oracle_diff = std::max(rep.max_oracle_diff, std::abs(fast[j] - slow[j]));

        AggregationCase perturbed = c;
        for (auto& [id, entries] : perturbed.ledgers)
            for (auto& e : entries) e.reward = rng.uniform(-100.0, 100.0);
        for (double& v : perturbed.varpi) v = 1000.0 * (1.0 - rng.uniform());
        const TypeDistribution again = aggregate_beliefs(perturbed.reports, perturbed.ledgers, perturbed.varpi);
        for (std::size_t j = 0; j < slow.size(); ++j)
            rep.max_invariance_diff = std::max(rep.max_invariance_diff, std::abs(fast[j] - again[j]));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Incentive compatibility
// ---------------------------------------------------------------------------

/// An agent's decision problem at its final report: belief b, decision weight ϖ, the
/// decision maker's P(d_i|θ_j), and the rewards already collected.
struct IncentiveInstance {
    std::vector<double> belief;
    double varpi = 1.0;
    std::vector<std::vector<double>> p_table;  // [decision][type]
    std::vector<double> rewards;
};

inline IncentiveInstance random_incentive_instance(Rng& rng, std::size_t m) {
    IncentiveInstance in;
    in.belief = random_simplex(rng, m);
    in.varpi = 10.0 * (1.0 - rng.uniform());  // (0,10]
    in.p_table = random_decision_table(rng, 1 + rng.below(14), m);
    const std::size_t n = rng.below(10);
    for (std::size_t k = 0; k < n; ++k) in.rewards.push_back(rng.uniform(-4.0, 5.0));
    return in;
}

/// EU(b, r) = Σ_i Σ_j P(d_i|θ_j) · b_j · Ψ(rewards, S(r_j, ϖ)).
inline double expected_payment(const IncentiveInstance& in, std::span<const double> report) {
    double eu = 0.0;
    for (const auto& row : in.p_table)
        for (std::size_t j = 0; j < in.belief.size(); ++j)
            eu += row[j] * in.belief[j] * payment(in.rewards, score_report(report[j], in.varpi));
    return eu;
}

/// expected_payment regrouped as Σ_j c_j · b_j · (Σρ + S(r_j, ϖ)) with c_j = Σ_i P(d_i|θ_j)
/// precomputed; the maximizer evaluates it many times.
class ExpectedPayment {
public:
    explicit ExpectedPayment(const IncentiveInstance& in) : in_(in), weight_(in.belief.size(), 0.0) {
        for (const auto& row : in.p_table)
            for (std::size_t j = 0; j < weight_.size(); ++j) weight_[j] += row[j];
        for (std::size_t j = 0; j < weight_.size(); ++j) weight_[j] *= in.belief[j];
        reward_sum_ = payment(in.rewards, 0.0);
    }

    double operator()(std::span<const double> report) const {
        double eu = 0.0;
        for (std::size_t j = 0; j < weight_.size(); ++j)
            eu += weight_[j] * (reward_sum_ + score_report(report[j], in_.varpi));
        return eu;
    }

private:
    const IncentiveInstance& in_;
    std::vector<double> weight_;
    double reward_sum_ = 0.0;
};

namespace detail {

/// Maximizer of a unimodal function on [lo, hi] by golden-section search.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-11) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Numerical argmax of expected_payment over {r : Σ r = 1, r_j ≥ ε}, for m = 2 or 3, by
/// (nested) golden-section search on the concave objective. Knows nothing about the
/// closed-form optimum.
inline std::vector<double> maximize_expected_payment(const IncentiveInstance& in, double eps = kReportEpsilon) {
    const std::size_t m = in.belief.size();
    const ExpectedPayment eu(in);
    if (m == 2) {
        const double r1 = detail::golden_max([&](double x) { return eu(std::array<double, 2>{x, 1.0 - x}); },
                                             eps, 1.0 - eps);
        return {r1, 1.0 - r1};
    }
    if (m == 3) {
        auto inner = [&](double r1) {
            return detail::golden_max(
                [&](double r2) { return eu(std::array<double, 3>{r1, r2, 1.0 - r1 - r2}); }, eps,
                1.0 - r1 - eps);
        };
        const double r1 = detail::golden_max(
            [&](double x) {
                const double r2 = inner(x);
                return eu(std::array<double, 3>{x, r2, 1.0 - x - r2});
            },
            eps, 1.0 - 2.0 * eps, 1e-9);
        const double r2 = inner(r1);
        return {r1, r2, 1.0 - r1 - r2};
    }
    throw ArgumentError("maximize_expected_payment: only m = 2 or 3 supported");
}

struct IncentiveReport {
    int instances = 0;
    int comparisons = 0;
    double max_optimum_error = 0.0;  // max ||r* - b||_inf
    double max_properness_gap = -std::numeric_limits<double>::infinity();  // max EU(b,r) - EU(b,b)
    int properness_violations = 0;   // gap > slack
    double seconds = 0.0;
};

inline IncentiveReport check_incentives(int instances, int reports_per_instance, std::uint64_t seed,
                                        double slack = 1e-9) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);
    IncentiveReport rep;
    rep.instances = instances;
    for (int s = 0; s < instances; ++s) {
        const std::size_t m = 2 + rng.below(2);
        const IncentiveInstance in = random_incentive_instance(rng, m);
        const TypeDistribution truthful = clip_report(in.belief);

        const std::vector<double> best = maximize_expected_payment(in);
        for (std::size_t j = 0; j < m; ++j)
            rep.max_optimum_error = std::max(rep.max_optimum_error, std::abs(best[j] - in.belief[j]));

        const double eu_truth = expected_payment(in, truthful.values());
        for (int k = 0; k < reports_per_instance; ++k) {
            const TypeDistribution r = clip_report(random_simplex(rng, m));
            const double gap = expected_payment(in, r.values()) - eu_truth;
            rep.max_properness_gap = std::max(rep.max_properness_gap, gap);
            if (gap > slack) ++rep.properness_violations;
            ++rep.comparisons;
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace pmfusion::verify
