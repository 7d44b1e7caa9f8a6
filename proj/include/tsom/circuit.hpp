#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsom/common.hpp"

namespace tsom {

// Constants of the stochastic dendritic-field description: radial terminal
// density rho(r) = alpha*cos(c*r) + b over a disk of field_radius, Gaussian
// terminal placement spread gp_sigma, saturating response probability with
// asymptote p_max and time constant tau, and per-activation energy e_unit.
struct DendriticFieldParams {
    double alpha = 0.5;
    double b = 1.0;
    double c = kPi / 2000.0;      // rad per micron
    double field_radius = 2000.0; // microns
    double gp_sigma = 1.0;
    double p_max = 0.5;
    double tau = 0.020;           // seconds
    double e_unit = 1.0;

    void validate() const {
        require(field_radius > 0.0, "field_radius must be positive");
        require(c >= 0.0, "c must be non-negative");
        require(gp_sigma > 0.0, "gp_sigma must be positive");
        require(p_max > 0.0 && p_max < 1.0, "p_max must lie in (0,1)");
        require(tau > 0.0, "tau must be positive");
        require(e_unit > 0.0, "e_unit must be positive");
        // Density must stay non-negative across the field. cos(c*r) over
        // [0, c*R] attains 1 at r=0 and its minimum at the far end (or -1
        // once the span covers half a period).
        const double span = c * field_radius;
        const double cos_min = span >= kPi ? -1.0 : std::cos(span);
        const double rho_min = std::min(alpha * cos_min, alpha * 1.0) + b;
        require(rho_min >= -1e-12, "density alpha*cos(c*r)+b must be non-negative on the field");
    }
};

// Radial dendritic terminal density.
inline double density(const DendriticFieldParams& params, double r) {
    params.validate();
    require(r >= 0.0 && r <= params.field_radius, "r outside the dendritic field");
    return params.alpha * std::cos(params.c * r) + params.b;
}

// Probability that a parent node occupies a patch of the given area at
// radius r: P_c(A) = 1/2 * rho(r) * A.
inline double parent_probability(const DendriticFieldParams& params, double r, double area) {
    require(area >= 0.0, "area must be non-negative");
    return 0.5 * density(params, r) * area;
}

// Probability that a dendritic terminal lands at the given offset from its
// parent: P_d = g_p(offset) * P_c(A), with g_p the centered Gaussian density.
inline double dendrite_presence(const DendriticFieldParams& params, double r, double area,
                                double offset) {
    const double s = params.gp_sigma;
    const double gp = std::exp(-(offset * offset) / (2.0 * s * s)) /
                      (s * std::sqrt(2.0 * kPi));
    return gp * parent_probability(params, r, area);
}

// Poisson probability of exactly n_a activated terminals given intensity
// rho*A.
inline double activation_pmf(double rho_times_area, int n_a) {
    require(rho_times_area >= 0.0, "intensity must be non-negative");
    require(n_a >= 0, "count must be non-negative");
    if (rho_times_area == 0.0) return n_a == 0 ? 1.0 : 0.0;
    return std::exp(n_a * std::log(rho_times_area) - rho_times_area -
                    std::lgamma(static_cast<double>(n_a) + 1.0));
}

// Neural response to n_a activations after dwell time delta_t:
//   y = n_a * p_max * (1 - exp(-delta_t/tau)),
// plus p_max for a moving stimulus. The saturating-exponential shape is the
// simplest monotone form with the required asymptote p_max at infinity.
inline double response(const DendriticFieldParams& params, int n_a, double delta_t,
                       bool moving) {
    params.validate();
    require(n_a >= 0, "count must be non-negative");
    require(delta_t > 0.0, "delta_t must be positive");
    const double pr = params.p_max * (1.0 - std::exp(-delta_t / params.tau));
    double y = n_a * pr;
    if (moving) y += params.p_max;
    return y;
}

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;  // upper bound on the truncated remainder
};

// Expected number of effective activations per step:
//   sum_{n>=1} n * P_a(n) * (1 - (1-p_max)^n),
// truncated at `cutoff` terms. The remainder is bounded by the Poisson tail
// sum_{n>cutoff} n*P_a(n) = rho*A * P[N >= cutoff], majorized geometrically.
inline SeriesValue expected_extra_activations(const DendriticFieldParams& params,
                                              double rho_times_area, int cutoff) {
    params.validate();
    require(cutoff >= 1, "cutoff must be at least 1");
    require(rho_times_area >= 0.0, "intensity must be non-negative");
    SeriesValue out;
    const double q = 1.0 - params.p_max;
    double qn = 1.0;
    for (int n = 1; n <= cutoff; ++n) {
        qn *= q;
        out.value += n * activation_pmf(rho_times_area, n) * (1.0 - qn);
    }
    const double head = activation_pmf(rho_times_area, cutoff);
    const double ratio = rho_times_area / (cutoff + 1.0);
    out.tail_bound = ratio < 1.0 ? rho_times_area * head / (1.0 - ratio)
                                 : std::numeric_limits<double>::infinity();
    return out;
}

// Energy recurrence: e_{t+1} = e_t + e_unit * p_next.
inline double accumulate_energy(double e_t, double e_unit, double p_next) {
    require(std::isfinite(e_t) && std::isfinite(e_unit), "inputs must be finite");
    require(p_next >= 0.0 && p_next <= 1.0, "p_next must lie in [0,1]");
    return e_t + e_unit * p_next;
}

// One projection instance: n_subsets groups, sampling distribution p over
// groups, per-group activation probabilities e.
struct TwoStageInstance {
    int n_subsets = 1;
    std::vector<double> p;
    std::vector<double> e;

    void validate() const {
        require(n_subsets >= 1, "instance needs at least one subset");
        require(static_cast<int>(p.size()) == n_subsets &&
                    static_cast<int>(e.size()) == n_subsets,
                "p and e must have n_subsets entries");
        double sum = 0.0;
        for (double v : p) {
            require(v >= 0.0, "p must be non-negative");
            sum += v;
        }
        require(std::abs(sum - 1.0) <= 1e-12, "p must sum to 1");
        for (double v : e) require(v >= 0.0 && v <= 1.0, "e must lie in [0,1]");
    }
};

// Direct sampling: expected activation E1 = sum_i p_i e_i.
inline double one_stage(const TwoStageInstance& inst) {
    inst.validate();
    double s = 0.0;
    for (int i = 0; i < inst.n_subsets; ++i) s += inst.p[i] * inst.e[i];
    return s;
}

// Convergent projection: activation probability E2 = 1 - prod_i (1 - e_i).
inline double two_stage(const TwoStageInstance& inst) {
    inst.validate();
    double prod = 1.0;
    for (double e : inst.e) prod *= 1.0 - e;
    return 1.0 - prod;
}

struct TrialReport {
    long long trials = 0;
    int n_subsets_min = 1;
    int n_subsets_max = 1;
    std::uint64_t seed = 0;
    long long violations = 0;
    double max_e1_minus_e2 = -std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();  // min of E2-E1
    bool passed = false;
    std::optional<TwoStageInstance> counterexample;
    double counterexample_e1 = 0.0;
    double counterexample_e2 = 0.0;
};

inline void to_json(nlohmann::json& j, const TrialReport& r) {
    j = nlohmann::json{{"trials", r.trials},
                       {"n_subsets_range", {r.n_subsets_min, r.n_subsets_max}},
                       {"seed", r.seed},
                       {"violations", r.violations},
                       {"max_e1_minus_e2", r.max_e1_minus_e2},
                       {"min_margin", r.min_margin},
                       {"passed", r.passed}};
    if (r.counterexample) {
        j["counterexample"] = {{"n_subsets", r.counterexample->n_subsets},
                               {"p", r.counterexample->p},
                               {"e", r.counterexample->e},
                               {"e1", r.counterexample_e1},
                               {"e2", r.counterexample_e2}};
    } else {
        j["counterexample"] = nullptr;
    }
}

namespace detail {

// Uniform integer in [0, span) by rejection — no modulo bias, and the draw
// sequence is fully pinned by the mt19937_64 stream.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t span) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % span;
}

inline TwoStageInstance sample_instance(std::mt19937_64& g, int n_lo, int n_hi) {
    TwoStageInstance inst;
    inst.n_subsets =
        n_lo + static_cast<int>(uniform_index(g, static_cast<std::uint64_t>(n_hi - n_lo + 1)));
    inst.p.resize(inst.n_subsets);
    inst.e.resize(inst.n_subsets);
    // Simplex-uniform p via normalized exponentials.
    double sum = 0.0;
    do {
        sum = 0.0;
        for (double& v : inst.p) {
            v = -std::log1p(-u01(g()));
            sum += v;
        }
    } while (sum == 0.0);
    for (double& v : inst.p) v /= sum;
    for (double& v : inst.e) v = u01(g());
    return inst;
}

}  // namespace detail

// Monte Carlo check of the two-stage dominance inequality E1 <= E2 over
// random instances with subset counts in [n_lo, n_hi]. A violating instance
// is carried verbatim in the report.
inline TrialReport verify_proposition(long long n_trials, int n_lo, int n_hi,
                                      std::uint64_t seed) {
    require(n_trials >= 1, "need at least one trial");
    require(n_lo >= 1 && n_hi >= n_lo, "bad subset-count range");
    TrialReport report;
    report.trials = n_trials;
    report.n_subsets_min = n_lo;
    report.n_subsets_max = n_hi;
    report.seed = seed;
    std::mt19937_64 g(seed);
    for (long long i = 0; i < n_trials; ++i) {
        const TwoStageInstance inst = detail::sample_instance(g, n_lo, n_hi);
        const double e1 = one_stage(inst), e2 = two_stage(inst);
        const double diff = e1 - e2;
        report.max_e1_minus_e2 = std::max(report.max_e1_minus_e2, diff);
        report.min_margin = std::min(report.min_margin, -diff);
        if (diff > 1e-12) {
            ++report.violations;
            if (!report.counterexample) {
                report.counterexample = inst;
                report.counterexample_e1 = e1;
                report.counterexample_e2 = e2;
            }
        }
    }
    report.passed = report.violations == 0;
    return report;
}

}  // namespace tsom
