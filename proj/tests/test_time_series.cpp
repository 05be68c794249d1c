#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "powerbench/time_series.hpp"
#include "test_util.hpp"

using namespace powerbench;

TEST_CASE("construction enforces the invariants") {
    CHECK_THROWS_AS(TimeSeries({0.0, 1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(TimeSeries({0.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(TimeSeries({0.0, 0.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(TimeSeries({0.0, -1.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(TimeSeries({0.0, std::nan("")}, {1.0, 2.0}), ValidationError);
    CHECK_NOTHROW(TimeSeries({0.0, 1.0}, {1.0, 2.0}));
}

TEST_CASE("linear interpolation hits the midpoint") {
    TimeSeries s({0.0, 1.0}, {0.0, 10.0});
    CHECK(s.value_at(0.5) == doctest::Approx(5.0).epsilon(1e-15));
    TimeSeries r = resample(s, std::vector<double>{0.25, 0.5});
    CHECK(r.values()[0] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.values()[1] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("resampling a constant signal stays constant") {
    TimeSeries s({0.0, 2.0}, {3.0, 3.0});
    TimeSeries r = resample(s, std::vector<double>{0.0, 1.0, 2.0});
    for (double v : r.values()) CHECK(v == 3.0);
}

TEST_CASE("resampling a sine onto a finer grid tracks the analytic values") {
    // sampled at dt = 0.01 over [0, pi]; resampled at dt = 0.005
    const size_t n = 314;
    std::vector<double> ts = uniform_grid(0.01, n);
    std::vector<double> vs(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) vs[i] = std::sin(ts[i]);
    TimeSeries s(std::move(ts), std::move(vs));

    std::vector<double> grid = uniform_grid(0.005, 2 * n);
    TimeSeries r = resample(s, grid);
    double max_err = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        max_err = std::max(max_err, std::abs(r.values()[i] - std::sin(grid[i])));
    }
    CHECK(max_err < 1e-4);
}

TEST_CASE("resampling outside the domain is a domain error") {
    TimeSeries s({0.0, 1.0}, {0.0, 1.0});
    CHECK_THROWS_AS(resample(s, std::vector<double>{0.5, 1.5}), DomainError);
    CHECK_THROWS_AS(s.value_at(-0.1), DomainError);
}

TEST_CASE("resampling onto the original grid is the identity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> val(-50.0, 150.0);
    std::uniform_real_distribution<double> step(0.01, 0.3);
    std::vector<double> ts{0.0};
    std::vector<double> vs{val(rng)};
    for (int i = 0; i < 300; ++i) {
        ts.push_back(ts.back() + step(rng)); // non-uniform on purpose
        vs.push_back(val(rng));
    }
    TimeSeries s(ts, vs);
    TimeSeries r = resample(s, s.timestamps());
    CHECK(r == s);
}

TEST_CASE("integral of a constant is the rectangle area") {
    CHECK(integrate(constant_series(1.0, 10, 100.0)) == doctest::Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("trapezoid is exact for a linear signal") {
    TimeSeries s({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    CHECK(integrate(s) == 2.0);
}

TEST_CASE("integral of 50 + 20 sin^2(2 pi t) matches the closed form") {
    // over [0, 10] the sin^2 term averages to 1/2: integral = 500 + 100
    const size_t n = 10000;
    std::vector<double> ts = uniform_grid(1e-3, n);
    std::vector<double> vs(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        const double s = std::sin(2.0 * M_PI * ts[i]);
        vs[i] = 50.0 + 20.0 * s * s;
    }
    const double result = integrate(TimeSeries(std::move(ts), std::move(vs)));
    CHECK(std::abs(result - 600.0) / 600.0 < 1e-6);
}

TEST_CASE("integration is additive over a split at any interior sample") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> val(0.0, 200.0);
    std::uniform_real_distribution<double> step(0.005, 0.2);
    std::vector<double> ts{0.0};
    std::vector<double> vs{val(rng)};
    for (int i = 0; i < 200; ++i) {
        ts.push_back(ts.back() + step(rng));
        vs.push_back(val(rng));
    }
    TimeSeries s(ts, vs);
    const double whole = integrate(s);

    std::uniform_int_distribution<size_t> pick(1, ts.size() - 2);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t split = pick(rng);
        TimeSeries left({ts.begin(), ts.begin() + split + 1},
                        {vs.begin(), vs.begin() + split + 1});
        TimeSeries right({ts.begin() + split, ts.end()},
                         {vs.begin() + split, vs.end()});
        const double parts = integrate(left) + integrate(right);
        CHECK(std::abs(parts - whole) <= 1e-12 * std::abs(whole));
    }
}

TEST_CASE("integration is linear in the signal") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> val(-10.0, 90.0);
    std::vector<double> ts = uniform_grid(0.05, 400);
    std::vector<double> vs(ts.size());
    for (auto& v : vs) v = val(rng);
    TimeSeries s(ts, vs);
    const double base = integrate(s);
    for (double k : {0.5, 2.0, 10.0, -3.0}) {
        std::vector<double> scaled(vs.size());
        for (size_t i = 0; i < vs.size(); ++i) scaled[i] = k * vs[i];
        const double result = integrate(TimeSeries(ts, scaled));
        CHECK(std::abs(result - k * base) <= 1e-12 * std::abs(k * base));
    }
}

TEST_CASE("range of a constant signal is zero") {
    CHECK(signal_range(constant_series(0.1, 5, 42.0)) == 0.0);
}

TEST_CASE("range picks max minus min") {
    CHECK(signal_range(TimeSeries({0.0, 1.0, 2.0}, {2.0, 9.0, 4.0})) == 7.0);
}

TEST_CASE("range equals the brute-force scan on random data") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> val(-3.0, 17.0);
    std::vector<double> ts = uniform_grid(0.01, 999);
    std::vector<double> vs(ts.size());
    for (auto& v : vs) v = val(rng);

    double lo = vs[0], hi = vs[0];
    for (double v : vs) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(signal_range(TimeSeries(ts, vs)) == hi - lo);
}

TEST_CASE("range is invariant under permutation and constant shift") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> val(0.0, 250.0);
    std::vector<double> ts = uniform_grid(0.02, 500);
    std::vector<double> vs(ts.size());
    for (auto& v : vs) v = val(rng);
    TimeSeries s(ts, vs);
    const double base = signal_range(s);

    std::shuffle(vs.begin(), vs.end(), rng);
    CHECK(signal_range(TimeSeries(ts, vs)) == base);

    for (double c : {-31.5, 0.25, 1000.0}) {
        std::vector<double> shifted(vs.size());
        for (size_t i = 0; i < vs.size(); ++i) shifted[i] = vs[i] + c;
        CHECK(signal_range(TimeSeries(ts, shifted)) ==
              doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("median sample interval follows the average-of-two convention") {
    TimeSeries s({0.0, 0.01, 0.03}, {0.0, 0.0, 0.0}); // gaps 0.01, 0.02
    CHECK(s.median_dt() == doctest::Approx(0.015).epsilon(1e-15));
}
