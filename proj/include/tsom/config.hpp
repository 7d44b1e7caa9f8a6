#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsom/common.hpp"

namespace tsom {

// Every tunable constant of the detection pipeline. Values are free
// parameters of the model; defaults are the project's calibrated choices.
struct PipelineConfig {
    double sigma1 = 1.0;          // retina Gaussian std (px)
    int retina_kernel_size = 5;   // retina kernel side (odd px)
    int n_directions = 8;         // orientation samples over [0, pi)
    double gabor_gamma = 0.5;     // Gabor aspect ratio
    double gabor_sigma = 2.0;     // Gabor envelope std (px)
    double gabor_lambda = 6.0;    // Gabor wavelength (px)
    int kernel_size = 13;         // Gabor / scale kernel side (odd px)
    double soma_a = 4.0;          // scale-kernel center sharpness (>1)
    double soma_mu = 0.5;         // scale-kernel inhibition strength (0..1)
    double zscore_epsilon = 1.5;  // background-suppression threshold
    int pool_size = 3;            // max-pool window (px)
    std::vector<double> alpha;    // per-direction weights; empty = uniform
    int top_k = 1;                // detections returned per frame
    double score_floor = 0.0;     // minimum reported detection score

    std::vector<double> resolved_alpha() const {
        if (!alpha.empty()) return alpha;
        return std::vector<double>(n_directions, 1.0 / n_directions);
    }

    void validate() const {
        require(sigma1 > 0.0, "sigma1 must be positive");
        require(retina_kernel_size >= 1 && retina_kernel_size % 2 == 1,
                "retina_kernel_size must be odd and positive");
        require(n_directions >= 2, "n_directions must be at least 2");
        require(gabor_gamma > 0.0 && gabor_sigma > 0.0 && gabor_lambda > 0.0,
                "gabor constants must be positive");
        require(kernel_size >= 3 && kernel_size % 2 == 1, "kernel_size must be odd and >= 3");
        require(soma_a > 1.0, "soma_a must exceed 1");
        require(soma_mu > 0.0 && soma_mu < 1.0, "soma_mu must lie in (0,1)");
        require(zscore_epsilon >= 0.0, "zscore_epsilon must be non-negative");
        require(pool_size >= 1, "pool_size must be positive");
        if (!alpha.empty()) {
            require(static_cast<int>(alpha.size()) == n_directions,
                    "alpha length must equal n_directions");
            for (double a : alpha) require(a >= 0.0 && std::isfinite(a), "alpha must be >= 0");
        }
        require(top_k >= 1, "top_k must be positive");
        require(std::isfinite(score_floor), "score_floor must be finite");
    }
};

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
    j = nlohmann::json{{"sigma1", c.sigma1},
                       {"retina_kernel_size", c.retina_kernel_size},
                       {"n_directions", c.n_directions},
                       {"gabor_gamma", c.gabor_gamma},
                       {"gabor_sigma", c.gabor_sigma},
                       {"gabor_lambda", c.gabor_lambda},
                       {"kernel_size", c.kernel_size},
                       {"soma_a", c.soma_a},
                       {"soma_mu", c.soma_mu},
                       {"zscore_epsilon", c.zscore_epsilon},
                       {"pool_size", c.pool_size},
                       {"alpha", c.alpha},
                       {"top_k", c.top_k},
                       {"score_floor", c.score_floor}};
}

// Missing keys keep their defaults; unknown keys are rejected so config typos
// surface as validation errors instead of silently running with defaults.
inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
    static const char* known[] = {"sigma1",      "retina_kernel_size", "n_directions",
                                  "gabor_gamma", "gabor_sigma",        "gabor_lambda",
                                  "kernel_size", "soma_a",             "soma_mu",
                                  "zscore_epsilon", "pool_size",       "alpha",
                                  "top_k",       "score_floor"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        require(ok, "unknown pipeline config key: " + key);
    }
    c.sigma1 = j.value("sigma1", c.sigma1);
    c.retina_kernel_size = j.value("retina_kernel_size", c.retina_kernel_size);
    c.n_directions = j.value("n_directions", c.n_directions);
    c.gabor_gamma = j.value("gabor_gamma", c.gabor_gamma);
    c.gabor_sigma = j.value("gabor_sigma", c.gabor_sigma);
    c.gabor_lambda = j.value("gabor_lambda", c.gabor_lambda);
    c.kernel_size = j.value("kernel_size", c.kernel_size);
    c.soma_a = j.value("soma_a", c.soma_a);
    c.soma_mu = j.value("soma_mu", c.soma_mu);
    c.zscore_epsilon = j.value("zscore_epsilon", c.zscore_epsilon);
    c.pool_size = j.value("pool_size", c.pool_size);
    c.alpha = j.value("alpha", c.alpha);
    c.top_k = j.value("top_k", c.top_k);
    c.score_floor = j.value("score_floor", c.score_floor);
    c.validate();
}

}  // namespace tsom
