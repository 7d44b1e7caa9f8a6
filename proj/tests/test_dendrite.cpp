#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "tsom/dendrite.hpp"
#include "tsom/retina.hpp"

using namespace tsom;
using tsomtest::max_abs_diff;
using tsomtest::noise_frame;
using tsomtest::noise_sequence;

namespace {

double kernel_max_abs_diff(const SpatialKernel& a, const SpatialKernel& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        m = std::max(m, std::abs(a.weights[i] - b.weights[i]));
    return m;
}

PipelineConfig default_config() { return PipelineConfig{}; }

}  // namespace

TEST_CASE("oriented kernels are zero-mean with unit pre-subtraction center") {
    for (double theta : {0.0, kPi / 8, kPi / 2, 3 * kPi / 4})
        for (double phi : {0.0, kPi / 2}) {
            const GaborKernel g = make_gabor(theta, phi, 0.5, 2.0, 6.0, 13);
            REQUIRE(std::abs(g.kernel.sum()) < 1e-10);
            // Pre-subtraction center value is envelope(0,0)*cos(phi):
            // reconstruct the subtracted mean independently and undo it.
            double raw_sum = 0.0;
            const int r = g.kernel.radius();
            const double ct = std::cos(theta), st = std::sin(theta);
            for (int y = -r; y <= r; ++y)
                for (int x = -r; x <= r; ++x) {
                    const double xp = x * ct + y * st, yp = -x * st + y * ct;
                    raw_sum += std::exp(-(xp * xp + 0.25 * yp * yp) / 8.0) *
                               std::cos(2.0 * kPi * xp / 6.0 + phi);
                }
            const double raw_mean = raw_sum / 169.0;
            REQUIRE(g.kernel.weight(0, 0) + raw_mean == Catch::Approx(std::cos(phi)).margin(1e-12));
        }
}

TEST_CASE("direction flip by pi reproduces each quadrature kernel") {
    // Cosine-phase kernels are invariant under theta -> theta + pi alone
    // (even carrier); sine-phase kernels additionally need the phase shifted
    // by pi. Both identities hold to well below 1e-9.
    for (int k = 0; k < 8; ++k) {
        const double theta = k * kPi / 8.0;
        const GaborKernel cos_a = make_gabor(theta, 0.0, 0.5, 2.0, 6.0, 13);
        const GaborKernel cos_b = make_gabor(theta + kPi, 0.0, 0.5, 2.0, 6.0, 13);
        REQUIRE(kernel_max_abs_diff(cos_a.kernel, cos_b.kernel) < 1e-9);

        const GaborKernel sin_a = make_gabor(theta, kPi / 2.0, 0.5, 2.0, 6.0, 13);
        const GaborKernel sin_b = make_gabor(theta + kPi, kPi / 2.0 + kPi, 0.5, 2.0, 6.0, 13);
        REQUIRE(kernel_max_abs_diff(sin_a.kernel, sin_b.kernel) < 1e-9);
    }
}

TEST_CASE("theta=pi/2 kernel is the theta=0 kernel with axes rotated") {
    const GaborKernel g0 = make_gabor(0.0, 0.0, 0.5, 2.0, 6.0, 13);
    const GaborKernel g90 = make_gabor(kPi / 2.0, 0.0, 0.5, 2.0, 6.0, 13);
    const int r = g0.kernel.radius();
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            REQUIRE(g90.kernel.weight(x, y) ==
                    Catch::Approx(g0.kernel.weight(y, -x)).margin(1e-12));
}

TEST_CASE("bank layout: direction-major, phase-minor, quadrature offsets") {
    const PipelineConfig config = default_config();
    const auto bank = gabor_bank(config);
    REQUIRE(bank.size() == 16);
    for (int d = 0; d < 8; ++d) {
        REQUIRE(bank[2 * d].theta == Catch::Approx(d * kPi / 8.0));
        REQUIRE(bank[2 * d].phi == 0.0);
        REQUIRE(bank[2 * d + 1].phi == Catch::Approx(kPi / 2.0));
        REQUIRE(bank[2 * d + 1].theta == bank[2 * d].theta);
    }
}

TEST_CASE("temporal taps are the centered first difference") {
    const TemporalKernel tk = temporal_kernel();
    REQUIRE(tk.taps == std::vector<double>{-1.0, 0.0, 1.0});
    double sum = 0.0;
    for (double t : tk.taps) sum += t;
    REQUIRE(sum == 0.0);
    REQUIRE(tk.taps[0] == -tk.taps[2]);

    // Step series (a, a, a+d, a+d): response d at both interior steps.
    const double a = 0.3, d = 0.45;
    const double at1 = tk.taps[0] * a + tk.taps[1] * a + tk.taps[2] * (a + d);
    REQUIRE(at1 == Catch::Approx(d).margin(1e-15));
    // Ramp v(t) = c*t: response 2c at any interior t.
    const double c = 0.21;
    const double ramp = tk.taps[0] * (1 * c) + tk.taps[1] * (2 * c) + tk.taps[2] * (3 * c);
    REQUIRE(ramp == Catch::Approx(2 * c).margin(1e-15));
}

TEST_CASE("step sequence responds with the convolved frame difference") {
    PipelineConfig config = default_config();
    config.n_directions = 2;
    config.kernel_size = 7;
    const Frame c = noise_frame(20, 16, 1), d = noise_frame(20, 16, 2);
    Sequence seq;
    seq.frames = {c, c, d, d};
    const DirectionalStack stack = dendrite_response(seq, config);
    REQUIRE(stack.t_begin == 1);
    REQUIRE(stack.n_times == 2);

    Frame diff(20, 16);
    for (std::size_t i = 0; i < diff.size(); ++i) diff.data[i] = d.data[i] - c.data[i];
    const auto bank = gabor_bank(config);
    for (int j = 0; j < 4; ++j) {
        const Frame expected = convolve_direct(diff, bank[j].kernel);
        REQUIRE(max_abs_diff(stack.maps[0 * 4 + j], expected) < 1e-12);
        REQUIRE(max_abs_diff(stack.maps[1 * 4 + j], expected) < 1e-12);
    }
}

TEST_CASE("luminance ramp responds with twice the per-step increment") {
    PipelineConfig config = default_config();
    config.n_directions = 2;
    config.kernel_size = 5;
    const Frame base = noise_frame(16, 14, 3), inc = noise_frame(16, 14, 4);
    Sequence seq;
    for (int t = 0; t < 5; ++t) {
        Frame f(16, 14);
        for (std::size_t i = 0; i < f.size(); ++i) f.data[i] = base.data[i] + t * inc.data[i];
        seq.frames.push_back(std::move(f));
    }
    const DirectionalStack stack = dendrite_response(seq, config);
    const auto bank = gabor_bank(config);
    for (int t = 0; t < stack.n_times; ++t)
        for (int j = 0; j < 4; ++j) {
            Frame twice(16, 14);
            for (std::size_t i = 0; i < twice.size(); ++i) twice.data[i] = 2.0 * inc.data[i];
            REQUIRE(max_abs_diff(stack.maps[static_cast<std::size_t>(t) * 4 + j],
                                 convolve_direct(twice, bank[j].kernel)) < 1e-11);
        }
}

TEST_CASE("static sequences produce exactly zero responses") {
    PipelineConfig config = default_config();
    config.kernel_size = 9;
    const Frame f = noise_frame(24, 18, 9);
    Sequence seq;
    seq.frames = {f, f, f, f};
    const DirectionalStack stack = dendrite_response(seq, config);
    for (const Frame& m : stack.maps)
        for (double v : m.data) REQUIRE(v == 0.0);  // exact, no tolerance

    Sequence zeros;
    zeros.frames.assign(3, Frame(24, 18));
    for (const Frame& m : dendrite_response(zeros, config).maps)
        for (double v : m.data) REQUIRE(v == 0.0);
}

TEST_CASE("separable realization matches brute-force 3-D convolution") {
    PipelineConfig config = default_config();
    config.n_directions = 2;
    config.kernel_size = 3;  // fits a 9x9 frame with border room
    const Sequence seq = noise_sequence(9, 9, 5, 123);
    const DirectionalStack stack = dendrite_response(seq, config);
    const auto bank = gabor_bank(config);
    const TemporalKernel tk = temporal_kernel();
    for (int t = 1; t <= 3; ++t)
        for (int j = 0; j < 4; ++j) {
            const Frame ref =
                tsomtest::ref_convolve_3d(seq.frames, t, bank[j].kernel, tk.taps);
            REQUIRE(max_abs_diff(stack.maps[static_cast<std::size_t>(t - 1) * 4 + j], ref) <
                    1e-9);
        }
}

TEST_CASE("translating blob drives the aligned direction hardest") {
    PipelineConfig config = default_config();
    config.kernel_size = 13;
    Sequence seq;
    for (int t = 0; t < 3; ++t) {
        Frame f(48, 48);
        // 3-px-wide bright disk moving +x (theta = 0).
        const double cx = 20.0 + 3.0 * t, cy = 24.0;
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x)
                if (std::hypot(x - cx, y - cy) <= 1.5) f.at(x, y) = 1.0;
        seq.frames.push_back(std::move(f));
    }
    const DirectionalStack stack = dendrite_response(seq, config);
    const auto peak_for_direction = [&](int d) {
        double peak = 0.0;
        for (int p = 0; p < 2; ++p)
            for (double v : stack.map(0, d, p).data) peak = std::max(peak, std::abs(v));
        return peak;
    };
    REQUIRE(peak_for_direction(0) > peak_for_direction(4));  // theta=0 vs theta=pi/2
}

TEST_CASE("sequences shorter than the tap window are rejected") {
    const Sequence seq = noise_sequence(16, 16, 2, 5);
    REQUIRE_THROWS_AS(dendrite_response(seq, default_config()), ValidationError);
}

TEST_CASE("linearity in the input sequence") {
    PipelineConfig config = default_config();
    config.n_directions = 2;
    config.kernel_size = 5;
    const Sequence sa = noise_sequence(14, 12, 4, 21), sb = noise_sequence(14, 12, 4, 22);
    Sequence mix;
    for (int t = 0; t < 4; ++t) {
        Frame f(14, 12);
        for (std::size_t i = 0; i < f.size(); ++i)
            f.data[i] = 0.6 * sa.frames[t].data[i] + 0.4 * sb.frames[t].data[i];
        mix.frames.push_back(std::move(f));
    }
    const DirectionalStack da = dendrite_response(sa, config);
    const DirectionalStack db = dendrite_response(sb, config);
    const DirectionalStack dm = dendrite_response(mix, config);
    for (std::size_t m = 0; m < dm.maps.size(); ++m)
        for (std::size_t i = 0; i < dm.maps[m].size(); ++i)
            REQUIRE(dm.maps[m].data[i] ==
                    Catch::Approx(0.6 * da.maps[m].data[i] + 0.4 * db.maps[m].data[i])
                        .margin(1e-11));
}
