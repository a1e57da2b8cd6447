#include <catch_amalgamated.hpp>

#include <cmath>

#include "polyberg/frames.hpp"

using namespace polyberg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("sampling_sum: trivial cases and brute-force loop") {
    const Lattice one = make_lattice(2.0, 1.0, {0, 0}, {0, 0});
    const PolyField e00 = PolyField::basis(0, 0);
    CHECK(sampling_sum([](const HalfPlanePoint&) { return cplx{}; }, one) == 0.0);
    CHECK_THAT(sampling_sum(e00, one), WithinRel(16.0 / 81.0, 1e-14));

    const Lattice g = make_lattice(2.0, 1.0, {-2, 2}, {-8, 8});
    const PolyField F = PolyField::from_coeffs({{0.3, cplx(0.0, -1.0)}, {1.0, 0.5}});
    double loop = 0.0;
    for (int m = -2; m <= 2; ++m)
        for (int k = -8; k <= 8; ++k) {
            const double s = std::ldexp(1.0, m);
            loop += s * s * std::norm(F(HalfPlanePoint(s * k, s)));
        }
    CHECK_THAT(sampling_sum(F, g), WithinRel(loop, 1e-12));

    // Degree-2 homogeneity; multiplying by 2i is exact in floating point.
    const auto F2 = [&](const HalfPlanePoint& z) { return cplx(0.0, 2.0) * F(z); };
    CHECK(sampling_sum(F2, g) == 4.0 * sampling_sum(F, g));
}

TEST_CASE("sampling_sum names the offending lattice index") {
    const Lattice g = make_lattice(2.0, 1.0, {0, 1}, {-1, 1});
    const auto bad = [](const HalfPlanePoint& z) { return z.x > 1.5 ? cplx(NAN, 0.0) : cplx(1.0); };
    try {
        sampling_sum(bad, g);
        FAIL("expected numeric_overflow");
    } catch (const numeric_overflow& e) {
        CHECK(std::string(e.what()).find("m=1, k=1") != std::string::npos);
    }
}

TEST_CASE("necessary_condition arithmetic") {
    CHECK(necessary_condition(2.0, 9.0, 0).satisfied);
    CHECK_FALSE(necessary_condition(2.0, 10.0, 0).satisfied);
    CHECK(necessary_condition(2.0, 10.0, 1).satisfied);
    CHECK(necessary_condition(2.0, 18.0, 1).satisfied);
    CHECK_FALSE(necessary_condition(2.0, 19.0, 1).satisfied);
    const ConditionReport r = necessary_condition(2.0, 9.0, 0);
    CHECK_THAT(r.value, WithinRel(9.0 * std::log(2.0), 1e-15));
    CHECK_THAT(r.threshold, WithinRel(2.0 * kPi, 1e-15));
    CHECK_THAT(r.margin, WithinRel(2.0 * kPi - 9.0 * std::log(2.0), 1e-14));
    CHECK_THAT(necessary_condition(2.0, 1.0, 0, 1.0).threshold, WithinRel(kPi, 1e-15));
    CHECK_THROWS_AS(necessary_condition(1.0, 1.0, 0), invalid_argument);
    CHECK_THROWS_AS(necessary_condition(2.0, -1.0, 0), invalid_argument);
}

TEST_CASE("frame_ratio: single-element dictionary") {
    const Lattice g = make_lattice(2.0, 1.0, {-2, 2}, {-5, 5});
    FrameOptions opt;
    opt.M = 1;
    opt.trials = 1;
    const FrameReport r = frame_ratio(0, g, opt);
    const double ref = sampling_sum([](const HalfPlanePoint& z) { return basis_e_normalized(0, 0, z); }, g);
    CHECK_THAT(r.lower_est, WithinRel(ref, 1e-12));
    CHECK_THAT(r.upper_est, WithinRel(ref, 1e-12));
    CHECK(r.dictionary_size == 1);
}

TEST_CASE("frame_ratio: dense lattice versus a lattice past the density threshold") {
    FrameOptions opt;
    opt.M = 16;
    opt.trials = 20;
    opt.seed = 4;
    const FrameReport dense = frame_ratio(0, make_lattice_window(std::pow(2.0, 0.25), 0.25, {-24, 24}, 40.0), opt);
    const FrameReport sparse = frame_ratio(0, make_lattice_window(2.0, 10.0, {-6, 6}, 40.0), opt);
    CHECK(dense.lower_est > 0.0);
    CHECK(dense.lower_est <= dense.upper_est);
    CHECK(sparse.lower_est * 10.0 <= dense.lower_est);
    CHECK(sparse.ratio < dense.ratio);
    CHECK(dense.condition_satisfied);
    CHECK_FALSE(sparse.condition_satisfied);
}

TEST_CASE("frame_ratio: refinement never lowers the estimates") {
    FrameOptions opt;
    opt.M = 8;
    opt.trials = 10;
    opt.spectral = false;
    const FrameReport small = frame_ratio(1, make_lattice(2.0, 1.0, {-3, 3}, {-10, 10}), opt);
    const FrameReport large = frame_ratio(1, make_lattice(2.0, 1.0, {-4, 4}, {-20, 20}), opt);
    // Per trial the sum only gains nonnegative terms; allow for summation roundoff.
    CHECK(large.lower_est >= small.lower_est * (1.0 - 1e-12));
    CHECK(large.upper_est >= small.upper_est * (1.0 - 1e-12));
    opt.spectral = true;
    const FrameReport small_s = frame_ratio(1, make_lattice(2.0, 1.0, {-3, 3}, {-10, 10}), opt);
    const FrameReport large_s = frame_ratio(1, make_lattice(2.0, 1.0, {-4, 4}, {-20, 20}), opt);
    CHECK(large_s.upper_est >= small_s.upper_est * (1.0 - 1e-12));
}

TEST_CASE("frame_ratio: determinism and superframe variant") {
    const Lattice g = make_lattice(2.0, 1.0, {-3, 3}, {-10, 10});
    FrameOptions opt;
    opt.M = 4;
    opt.trials = 7;
    opt.seed = 99;
    const FrameReport a = frame_ratio(0, g, opt);
    const FrameReport b = frame_ratio(0, g, opt);
    CHECK(a.trial_lower == b.trial_lower);
    CHECK(a.trial_upper == b.trial_upper);
    opt.variant = FrameVariant::superframe;
    const FrameReport s = frame_ratio(3, g, opt);
    CHECK(s.dictionary_size == 12);
    CHECK_THAT(s.threshold, WithinRel(2.0 * kPi, 1e-15));
    CHECK_THROWS_AS(frame_ratio(0, g, opt), invalid_argument);
    CHECK_THROWS_AS(frame_ratio(0, Lattice{}, FrameOptions{}), invalid_argument);
}

TEST_CASE("scan_lattice window") {
    const Lattice l = scan_lattice(2.0, 1.0);
    CHECK(l.m_range.lo == -6);
    CHECK(l.m_range.hi == 6);
    for (const auto& p : l.points) CHECK(std::abs(p.z.x) <= kScanXMax);
    CHECK_THROWS_AS(scan_lattice(1.0001, 1e-6), invalid_argument);
}

TEST_CASE("h vanishes on the lattice") {
    const HParams p(2.0, 1.0, 60);
    CHECK(h_eval(HalfPlanePoint(0.0, 1.0), p) == cplx{});
    for (int m = -55; m <= 55; m += 5)
        for (int k = -6; k <= 6; ++k) {
            const double am = std::ldexp(1.0, m);
            CHECK(std::abs(h_eval(HalfPlanePoint(am * k, am), p)) < 1e-10);
        }
}

TEST_CASE("h converges under truncation increase") {
    const HalfPlanePoint z(0.3, 0.7);
    const cplx h200 = h_eval(z, HParams(2.0, 1.0, 200));
    const cplx h250 = h_eval(z, HParams(2.0, 1.0, 250));
    CHECK(std::abs(h200) > 0.0);
    CHECK(std::isfinite(h200.real()));
    CHECK(std::abs(h250 - h200) <= 1e-8 * std::abs(h200));
}

TEST_CASE("h quasi-periodicity and growth") {
    std::vector<HalfPlanePoint> probes;
    for (int i = 0; i < 20; ++i) probes.emplace_back(-1.9 + 0.2 * i, 0.35 + 0.15 * i);
    for (const auto& [a, b] : {std::pair{2.0, 1.0}, std::pair{3.0, 1.5}, std::pair{1.5, 0.8}}) {
        const HParams p(a, b, 200);
        const HCheckReport r = h_checks(p, probes);
        CHECK(r.quasi_residual < 1e-6);
        CHECK(r.slope_rel_error < 5e-2);
        CHECK_THAT(r.expected_slope, WithinRel(-2.0 * kPi / (b * std::log(a)), 1e-15));
        std::vector<HalfPlanePoint> scaled;
        for (const auto& z : probes) scaled.emplace_back(a * z.x, a * z.s);
        CHECK(h_checks(p, scaled).quasi_residual < 1e-6);
    }
    CHECK_THROWS_AS(HParams(2.0, 1.0, 4), invalid_argument);
}
