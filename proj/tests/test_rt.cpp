#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "tsom/rt.hpp"

using namespace tsom;
using tsomtest::noise_frame;

namespace {

DirectionalStack quadrature_stack(int w, int h, int nd, int nt, std::uint32_t seed) {
    DirectionalStack s;
    for (int d = 0; d < nd; ++d) s.directions.push_back(d * kPi / nd);
    s.phases = {0.0, kPi / 2};
    s.t_begin = 1;
    s.n_times = nt;
    s.width = w;
    s.height = h;
    for (int i = 0; i < nt * nd * 2; ++i)
        s.maps.push_back(noise_frame(w, h, seed + i, -1.0, 1.0));
    return s;
}

}  // namespace

TEST_CASE("motion energy is the quadrature magnitude") {
    Frame s0(3, 1), s90(3, 1);
    s0.data = {3.0, 0.0, 5.0};
    s90.data = {4.0, 0.0, 12.0};
    const Frame e = motion_energy_map(s0, s90);
    REQUIRE(e.data[0] == 5.0);   // exact Pythagorean triple
    REQUIRE(e.data[1] == 0.0);
    REQUIRE(e.data[2] == 13.0);

    // Swapping the phases leaves the energy unchanged.
    const Frame swapped = motion_energy_map(s90, s0);
    REQUIRE(tsomtest::bit_equal(e, swapped));
}

TEST_CASE("energy bounds: max component <= E' <= component sum") {
    const Frame a = noise_frame(16, 12, 1, -2.0, 2.0), b = noise_frame(16, 12, 2, -2.0, 2.0);
    const Frame e = motion_energy_map(a, b);
    for (std::size_t i = 0; i < e.size(); ++i) {
        REQUIRE(e.data[i] >= 0.0);
        REQUIRE(e.data[i] >= std::max(std::abs(a.data[i]), std::abs(b.data[i])) - 1e-12);
        REQUIRE(e.data[i] <= std::abs(a.data[i]) + std::abs(b.data[i]) + 1e-12);
    }
}

TEST_CASE("stack-level energy pairs phases per direction") {
    const DirectionalStack stack = quadrature_stack(10, 8, 4, 2, 400);
    const EnergyStack energy = motion_energy(stack, 2);
    REQUIRE(energy.directions == stack.directions);
    REQUIRE(energy.t_begin == stack.t_begin);
    REQUIRE(energy.n_times == 2);
    for (int t = 0; t < 2; ++t)
        for (int d = 0; d < 4; ++d)
            REQUIRE(tsomtest::bit_equal(energy.map(t, d),
                                        motion_energy_map(stack.map(t, d, 0), stack.map(t, d, 1))));

    DirectionalStack bad = stack;
    bad.phases = {0.0, kPi / 3};  // not a quadrature pair
    REQUIRE_THROWS_AS(motion_energy(bad), ValidationError);
}

TEST_CASE("flicker normalization: equal directions sit near 1") {
    const int nd = 8;
    std::vector<Frame> maps(nd, Frame(4, 3));
    for (Frame& m : maps)
        for (double& v : m.data) v = 1.0;
    std::vector<const Frame*> ptrs;
    for (const Frame& m : maps) ptrs.push_back(&m);
    for (const Frame& o : flicker_normalize_slice(ptrs))
        for (double v : o.data) REQUIRE(v == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("flicker normalization: one-hot direction scores about n") {
    const int nd = 8;
    std::vector<Frame> maps(nd, Frame(2, 2));
    for (double& v : maps[3].data) v = 1.0;
    std::vector<const Frame*> ptrs;
    for (const Frame& m : maps) ptrs.push_back(&m);
    const auto out = flicker_normalize_slice(ptrs);
    for (double v : out[3].data) REQUIRE(v == Catch::Approx(8.0).margin(1e-3));
    for (int d = 0; d < nd; ++d)
        if (d != 3)
            for (double v : out[d].data) REQUIRE(v == 0.0);
}

TEST_CASE("flicker normalization rescales a slice by its mean energy") {
    // Two directions over two pixels with very different amplitudes. Every
    // value is divided by the same slice mean, so relative strengths survive:
    // a weak pixel must not be inflated to parity with a strong one.
    Frame d0(2, 1), d1(2, 1);
    d0.data = {4.0, 0.0};
    d1.data = {0.0, 1.0};
    const std::vector<const Frame*> ptrs = {&d0, &d1};
    const auto out = flicker_normalize_slice(ptrs);
    const double mean = (4.0 + 1.0) / 4.0;
    REQUIRE(out[0].data[0] == Catch::Approx(4.0 / mean).epsilon(1e-5));
    REQUIRE(out[1].data[1] == Catch::Approx(1.0 / mean).epsilon(1e-5));
    REQUIRE(out[0].data[1] == 0.0);
    REQUIRE(out[1].data[0] == 0.0);
    REQUIRE(out[0].data[0] > 3.9 * out[1].data[1]);  // 4:1 ordering preserved
}

TEST_CASE("flicker normalization: all-zero pixels stay zero") {
    std::vector<Frame> maps(4, Frame(3, 3));
    std::vector<const Frame*> ptrs;
    for (const Frame& m : maps) ptrs.push_back(&m);
    for (const Frame& o : flicker_normalize_slice(ptrs))
        for (double v : o.data) REQUIRE(v == 0.0);
}

TEST_CASE("max pooling: window semantics, identity, monotonicity") {
    Frame one(7, 7);
    one.at(3, 3) = 1.0;
    const Frame pooled = max_pool(one, 3);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x) {
            const bool in_block = std::abs(x - 3) <= 1 && std::abs(y - 3) <= 1;
            REQUIRE(pooled.at(x, y) == (in_block ? 1.0 : 0.0));
        }

    const Frame m = noise_frame(11, 9, 77);
    REQUIRE(tsomtest::bit_equal(max_pool(m, 1), m));  // pool 1 is the identity
    const Frame p = max_pool(m, 3);
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(p.data[i] >= m.data[i]);
}

TEST_CASE("pooling and combination: identity case and weight linearity") {
    const int nd = 4;
    std::vector<Frame> maps(nd, noise_frame(9, 7, 31));
    std::vector<const Frame*> ptrs;
    for (const Frame& m : maps) ptrs.push_back(&m);

    // pool 1, uniform convex weights, identical maps: O equals the map.
    const std::vector<double> uniform(nd, 1.0 / nd);
    const Frame o = pool_combine_slice(ptrs, uniform, 1);
    for (std::size_t i = 0; i < o.size(); ++i)
        REQUIRE(o.data[i] == Catch::Approx(maps[0].data[i]).margin(1e-12));

    // Scaling alpha scales O and keeps the argmax location.
    std::vector<double> scaled(nd, 3.0 / nd);
    const Frame o3 = pool_combine_slice(ptrs, scaled, 3);
    const Frame o1 = pool_combine_slice(ptrs, uniform, 3);
    std::size_t arg1 = 0, arg3 = 0;
    for (std::size_t i = 0; i < o1.size(); ++i) {
        if (o1.data[i] > o1.data[arg1]) arg1 = i;
        if (o3.data[i] > o3.data[arg3]) arg3 = i;
        REQUIRE(o3.data[i] == Catch::Approx(3.0 * o1.data[i]).margin(1e-12));
    }
    REQUIRE(arg1 == arg3);

    std::vector<double> bad(nd + 1, 0.1);
    REQUIRE_THROWS_AS(pool_combine_slice(ptrs, bad, 3), ValidationError);
}

TEST_CASE("detection: ordering, tie-breaks, floors, borders") {
    Frame o(12, 12);
    o.at(5, 5) = 1.0;
    o.at(2, 9) = 1.0;   // equal score, larger y: reported second
    o.at(8, 2) = 0.5;
    const auto dets = detect_frame(o, 7, 3, 0.0);
    REQUIRE(dets.size() == 3);
    REQUIRE((dets[0].x == 5 && dets[0].y == 5));
    REQUIRE((dets[1].x == 2 && dets[1].y == 9));
    REQUIRE((dets[2].x == 8 && dets[2].y == 2));
    for (const Detection& d : dets) REQUIRE(d.t == 7);

    // top_k truncates after ordering.
    REQUIRE(detect_frame(o, 0, 1, 0.0).size() == 1);
    // A floor above the secondary peak hides it.
    REQUIRE(detect_frame(o, 0, 3, 0.75).size() == 2);

    // Constant maps have no strict maxima.
    Frame flat(6, 6);
    for (double& v : flat.data) v = 2.0;
    REQUIRE(detect_frame(flat, 0, 5, 0.0).empty());

    // Adjacent equal values are not strict maxima.
    Frame plateau(8, 8);
    plateau.at(3, 3) = 1.0;
    plateau.at(4, 3) = 1.0;
    REQUIRE(detect_frame(plateau, 0, 5, 0.0).empty());

    // Border pixels are eligible (missing neighbors are not blockers).
    Frame corner(6, 6);
    corner.at(0, 0) = 1.0;
    const auto cd = detect_frame(corner, 0, 1, 0.0);
    REQUIRE(cd.size() == 1);
    REQUIRE((cd[0].x == 0 && cd[0].y == 0));
}

TEST_CASE("multi-frame detection carries source frame indices") {
    std::vector<Frame> maps;
    for (int t = 0; t < 3; ++t) {
        Frame o(8, 8);
        o.at(t + 1, 2) = 1.0 + t;
        maps.push_back(std::move(o));
    }
    const auto dets = detect(maps, 1, 1, 0.0);
    REQUIRE(dets.size() == 3);
    for (int i = 0; i < 3; ++i) {
        REQUIRE(dets[i].t == i + 1);
        REQUIRE(dets[i].x == i + 1);
        REQUIRE(dets[i].score == Catch::Approx(1.0 + i));
    }
}

TEST_CASE("detection output is identical across repeated runs") {
    const Frame o = noise_frame(40, 30, 555);
    const auto a = detect_frame(o, 3, 10, 0.0);
    const auto b = detect_frame(o, 3, 10, 0.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].x == b[i].x);
        REQUIRE(a[i].y == b[i].y);
        REQUIRE(a[i].score == b[i].score);
    }
    for (std::size_t i = 1; i < a.size(); ++i) REQUIRE(a[i - 1].score >= a[i].score);
}
