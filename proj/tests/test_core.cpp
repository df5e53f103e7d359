#include "doctest.h"

#include <cmath>
#include <numbers>

#include "eitmem/ensemble.hpp"
#include "eitmem/errors.hpp"
#include "eitmem/units.hpp"
#include "eitmem/wavepacket.hpp"
#include "helpers.hpp"

using namespace eitmem;
using doctest::Approx;

TEST_CASE("unit system uses gamma13 = 2 pi x 3 MHz") {
    CHECK(UnitSystem::from_mhz_2pi(3.0) == Approx(1.0).epsilon(1e-15));
    CHECK(UnitSystem::to_ns(1.0) == Approx(53.0516476972984).epsilon(1e-13));
    CHECK(UnitSystem::to_ns(UnitSystem::from_ns(900.0)) == Approx(900.0).epsilon(1e-15));
    CHECK(UnitSystem::from_us(1.0) == Approx(UnitSystem::from_ns(1000.0)));
    CHECK(UnitSystem::from_mhz_2pi(361.6) == Approx(120.5333333333).epsilon(1e-10));
}

TEST_CASE("time grid validation") {
    CHECK_THROWS_AS(TimeGrid(0.0, 0.0, 10), config_error);
    CHECK_THROWS_AS(TimeGrid(0.0, -1.0, 10), config_error);
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 1), config_error);
    const TimeGrid g(-1.0, 0.25, 9);
    CHECK(g.at(4) == Approx(0.0));
    CHECK(g.t_end() == Approx(1.0));
    const TimeGrid c = TimeGrid::covering(0.0, 1.05, 0.1);
    CHECK(c.t_end() >= 1.05);
    CHECK(c.n == 12);
}

TEST_CASE("wavepacket construction checks lengths") {
    const TimeGrid g(0.0, 1.0, 4);
    CHECK_THROWS_AS(Wavepacket(g, std::vector<cplx>(3)), config_error);
    CHECK_THROWS_AS(Wavepacket(g, std::vector<cplx>(4), std::vector<std::uint8_t>(2)), config_error);
}

TEST_CASE("wavepacket norm") {
    const TimeGrid g(-50.0, 0.05, 2001);
    const auto w = testing::gaussian_packet(g, 0.0, 3.0);
    CHECK(wavepacket_norm(w, false) == Approx(1.0).epsilon(1e-9));
    CHECK(wavepacket_norm(Wavepacket(g, std::vector<cplx>(g.n)), false) == 0.0);

    SUBCASE("2% of the norm in masked samples") {
        std::vector<cplx> a(w.amplitude().begin(), w.amplitude().end());
        std::vector<std::uint8_t> mask(g.n, 0);
        // Spike on five samples far from the Gaussian, scaled to 2% of the total.
        for (std::size_t k = 10; k < 15; ++k) {
            a[k] = 1.0;
            mask[k] = 1;
        }
        double spike = 5.0 * g.dt;
        double main = wavepacket_norm(w, false);
        const double s = std::sqrt(0.02 / 0.98 * main / spike);
        for (std::size_t k = 10; k < 15; ++k) a[k] *= s;
        const double total = main + 0.02 / 0.98 * main;
        for (auto& v : a) v /= std::sqrt(total);
        const Wavepacket m(g, a, mask);
        CHECK(wavepacket_norm(m, false) == Approx(1.0).epsilon(1e-12));
        CHECK(wavepacket_norm(m, true) == Approx(0.98).epsilon(1e-12));
    }
}

TEST_CASE("wavepacket shape statistics") {
    const TimeGrid g(-100.0, 0.01, 20001);
    const double sigma = 7.0;
    const auto w = testing::gaussian_packet(g, 12.0, sigma);
    CHECK(w.peak_time() == Approx(12.0).epsilon(1e-9));
    CHECK(w.centroid() == Approx(12.0).epsilon(1e-9));
    CHECK(w.intensity_fwhm() == Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma).epsilon(1e-6));
    const auto s = w.shifted(5.0);
    CHECK(s.peak_time() == Approx(17.0).epsilon(1e-9));
    CHECK(wavepacket_norm(w.scaled(cplx(0.0, 2.0)), false) == Approx(4.0).epsilon(1e-9));
}

TEST_CASE("linear sampling is zero outside the grid") {
    const TimeGrid g(0.0, 1.0, 3);
    const Wavepacket w(g, {cplx(1.0), cplx(3.0), cplx(5.0)});
    CHECK(w.sample(-0.1) == cplx(0.0));
    CHECK(w.sample(2.1) == cplx(0.0));
    CHECK(w.sample(0.5).real() == Approx(2.0));
    CHECK(w.sample(2.0).real() == Approx(5.0));
}

TEST_CASE("resampling onto a half step keeps the norm of a smooth packet") {
    const TimeGrid g(-60.0, 0.2, 601);
    const auto w = testing::gaussian_packet(g, 0.0, 6.0);
    const auto r = resample(w, TimeGrid(g.t_start, g.dt / 2.0, 2 * g.n - 1));
    CHECK(std::abs(wavepacket_norm(r, false) / wavepacket_norm(w, false) - 1.0) < 1e-4);
}

TEST_CASE("control profile plateaus and edges") {
    const double edge = UnitSystem::from_ns(70.0);
    const auto c = ControlProfile::store(7.6, 100.0, 40.0, edge);
    CHECK(evaluate_control(c, 0.0) == Approx(7.6));
    CHECK(evaluate_control(c, 120.0) == 0.0);
    CHECK(evaluate_control(c, 100.0) == Approx(3.8));
    CHECK(evaluate_control(c, 140.0) == Approx(3.8));
    CHECK(evaluate_control(c, 200.0) == Approx(7.6));
    CHECK(c.storage_time() == Approx(40.0));
    CHECK(evaluate_control(ControlProfile::constant(5.0), 1e6) == 5.0);

    SUBCASE("10-90 duration matches the configured edge within 1%") {
        const double step = edge * 1e-5;
        double t10 = 0.0, t90 = 0.0;
        for (double t = 100.0 - edge; t < 100.0 + edge; t += step) {
            const double v = evaluate_control(c, t) / 7.6;
            if (v >= 0.9) t90 = t;
            if (v >= 0.1) t10 = t;
        }
        CHECK(std::abs((t10 - t90) / edge - 1.0) < 0.01);
    }

    SUBCASE("monotone on each edge, continuous everywhere") {
        // Steepest raised-cosine slope is pi Omega / (2 support).
        const double max_step = 0.01 * std::numbers::pi * 7.6 / (2.0 * c.edge_width()) * 1.001;
        double prev = evaluate_control(c, 90.0);
        for (double t = 90.0; t <= 110.0; t += 0.01) {
            const double v = evaluate_control(c, t);
            CHECK(v <= prev + 1e-12);
            CHECK(std::abs(v - prev) <= max_step);
            prev = v;
        }
        prev = evaluate_control(c, 130.0);
        for (double t = 130.0; t <= 150.0; t += 0.01) {
            const double v = evaluate_control(c, t);
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }

    CHECK(raised_cosine_width_factor() == Approx(1.69395495231829).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    EnsembleParams e;
    CHECK_NOTHROW(e.validate());
    e.od = -1.0;
    CHECK_THROWS_AS(e.validate(), config_error);
    e = {};
    e.gamma12 = -0.1;
    CHECK_THROWS_AS(e.validate(), config_error);
    ControlProfile c = ControlProfile::store(5.0, 10.0, 5.0);
    c.on_time = 9.0;
    CHECK_THROWS_AS(c.validate(), config_error);
}
