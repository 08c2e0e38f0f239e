#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "blicket/errors.hpp"
#include "blicket/rng.hpp"
#include "blicket/stats.hpp"

using namespace blicket;

TEST_CASE("average ranks with ties") {
    CHECK(average_ranks({10, 20, 30}) == std::vector<double>{1, 2, 3});
    CHECK(average_ranks({30, 10, 20}) == std::vector<double>{3, 1, 2});
    CHECK(average_ranks({5, 5, 1}) == std::vector<double>{2.5, 2.5, 1});
    CHECK(average_ranks({2, 2, 2, 2}) == std::vector<double>{2.5, 2.5, 2.5, 2.5});
}

TEST_CASE("spearman matches the hand-derived example") {
    SpearmanResult r = spearman({1, 2, 3, 4, 5}, {1, 3, 2, 5, 4});
    CHECK(r.rho == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.t == doctest::Approx(2.3094010767585025).epsilon(1e-9));
    CHECK(r.p == doctest::Approx(0.10408803866182788).epsilon(1e-6));
    CHECK(r.n == 5);
}

TEST_CASE("spearman handles perfect correlations") {
    SpearmanResult up = spearman({1, 2, 3}, {10, 20, 30});
    CHECK(up.rho == doctest::Approx(1.0));
    CHECK(up.p == 0.0);
    SpearmanResult down = spearman({1, 2, 3}, {30, 20, 10});
    CHECK(down.rho == doctest::Approx(-1.0));
    CHECK(down.p == 0.0);
}

TEST_CASE("spearman input validation") {
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), ConfigError);
    CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2}), ConfigError);
    CHECK_THROWS_AS(spearman({2, 2, 2}, {1, 2, 3}), ConfigError);
    CHECK_THROWS_AS(spearman({1, 2, 3}, {7, 7, 7}), ConfigError);
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
    Rng rng(500);
    for (int instance = 0; instance < 1000; ++instance) {
        std::size_t n = 4 + rng.bounded(12);
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n; ++i) {
            xs.push_back(static_cast<double>(rng.bounded(1000)));
            ys.push_back(static_cast<double>(rng.bounded(1000)));
        }
        bool xs_const = std::all_of(xs.begin(), xs.end(),
                                    [&](double v) { return v == xs.front(); });
        bool ys_const = std::all_of(ys.begin(), ys.end(),
                                    [&](double v) { return v == ys.front(); });
        if (xs_const || ys_const) continue;
        std::vector<double> fx;
        for (double v : xs) fx.push_back(std::exp(v / 200.0) + 3.0 * v);
        SpearmanResult a = spearman(xs, ys);
        SpearmanResult b = spearman(fx, ys);
        CHECK(a.rho == doctest::Approx(b.rho).epsilon(1e-9));
    }
}

TEST_CASE("exact permutation p-value for small n") {
    double p = spearman_exact_p({1, 2, 3, 4}, {1, 2, 3, 4});
    CHECK(p == doctest::Approx(2.0 / 24.0).epsilon(1e-12));
    double p5 = spearman_exact_p({1, 2, 3, 4, 5}, {1, 3, 2, 5, 4});
    CHECK(p5 > 0.0);
    CHECK(p5 < 0.3);
    CHECK_THROWS_AS(spearman_exact_p({1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                                     {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}),
                    ConfigError);
}

TEST_CASE("welch matches the hand-derived example") {
    WelchResult r = welch_t_test({1, 2, 3, 4}, {11, 12, 13, 14});
    CHECK(r.t == doctest::Approx(-10.954451150103322).epsilon(1e-9));
    CHECK(r.df == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(r.p == doctest::Approx(3.436402807612147e-05).epsilon(1e-3));
    CHECK(significance_stars(r.p) == "***");
}

TEST_CASE("welch on identical samples") {
    WelchResult r = welch_t_test({1, 2, 3}, {1, 2, 3});
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
    CHECK(significance_stars(r.p) == "ns");
}

TEST_CASE("welch input validation") {
    CHECK_THROWS_AS(welch_t_test({1}, {1, 2}), ConfigError);
    CHECK_THROWS_AS(welch_t_test({1, 2}, {3}), ConfigError);
    CHECK_THROWS_AS(welch_t_test({5, 5, 5}, {7, 7}), ConfigError);
}

TEST_CASE("welch antisymmetry over random instances") {
    Rng rng(600);
    for (int instance = 0; instance < 1000; ++instance) {
        std::size_t na = 2 + rng.bounded(8);
        std::size_t nb = 2 + rng.bounded(8);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < na; ++i) a.push_back(rng.real() * 10);
        for (std::size_t i = 0; i < nb; ++i) b.push_back(rng.real() * 10 + 1);
        WelchResult ab = welch_t_test(a, b);
        WelchResult ba = welch_t_test(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.df == doctest::Approx(ba.df).epsilon(1e-12));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
    }
}

TEST_CASE("stars thresholds") {
    CHECK(significance_stars(0.0009) == "***");
    CHECK(significance_stars(0.001) == "**");
    CHECK(significance_stars(0.009) == "**");
    CHECK(significance_stars(0.01) == "*");
    CHECK(significance_stars(0.049) == "*");
    CHECK(significance_stars(0.05) == "ns");
    CHECK(significance_stars(0.5) == "ns");
}

TEST_CASE("t distribution cdf sanity") {
    CHECK(students_t_cdf(0.0, 5.0) == doctest::Approx(0.5));
    CHECK(students_t_cdf(100.0, 5.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(students_t_cdf(-100.0, 5.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("mean and sample sd") {
    CHECK(mean({2, 4, 6}) == doctest::Approx(4.0));
    CHECK(sample_sd({2, 4, 6}) == doctest::Approx(2.0));
    CHECK(sample_sd({5}) == 0.0);
    CHECK(sample_sd({3, 3, 3}) == doctest::Approx(0.0));
}
