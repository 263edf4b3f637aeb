#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qwsim/tcspc.hpp"

using namespace qwsim;

TEST_CASE("generate_pair_arrivals statistics") {
    Rng rng(41);
    SourceModel off{0.0, 1.0, {}, 0.0};
    const auto [ea, eb] = generate_pair_arrivals(off, 1.0, rng);
    CHECK(ea.times.empty());
    CHECK(eb.times.empty());

    SourceModel src{5000.0, 1.0, {}, 0.0};
    const auto [a, b] = generate_pair_arrivals(src, 10.0, rng);
    const double expected = 5000.0 * 10.0;
    CHECK(std::abs(static_cast<double>(a.size()) - expected) < 4.0 * std::sqrt(expected));
    CHECK(a.times == b.times);  // full coupling: identical creation stamps
    CHECK(a.sorted());

    SourceModel lossy{5000.0, 0.7, {}, 0.0};
    const auto [la, lb] = generate_pair_arrivals(lossy, 10.0, rng);
    // per-stream count ~= 0.7 x pair count within a 4 sigma binomial band
    const double pairs = 5000.0 * 10.0;
    const double band = 4.0 * std::sqrt(pairs * 0.7 * 0.3 + pairs * 0.49);  // binomial + Poisson drive
    CHECK(std::abs(static_cast<double>(la.size()) - 0.7 * pairs) < band);
    CHECK(std::abs(static_cast<double>(lb.size()) - 0.7 * pairs) < band);

    CHECK_THROWS_AS(generate_pair_arrivals(src, 0.0, rng), std::domain_error);
}

TEST_CASE("route_pairs outcomes") {
    Rng rng(42);
    SourceModel src{20000.0, 1.0, {}, 0.0};
    const auto [a, b] = generate_pair_arrivals(src, 5.0, rng);
    const double pairs = static_cast<double>(a.size());

    SUBCASE("no split outcomes means no shared timestamps") {
        RoutingModel routing{0.0, 0.5, 0.5, 0.5, 0.5};
        const auto [t1, t2] = route_pairs(a, b, routing, rng);
        const auto cc = count_coincidences(t1, t2, 4.0, 0, 5.0);
        CHECK(cc.count == 0);
        CHECK(t1.size() + t2.size() == 2 * a.size());
    }

    SUBCASE("half split, half bunched") {
        RoutingModel routing{0.5, 0.25, 0.25, 0.5, 0.5};
        const auto [t1, t2] = route_pairs(a, b, routing, rng);
        const auto cc = count_coincidences(t1, t2, 4.0, 0, 5.0);
        CHECK(std::abs(static_cast<double>(cc.count) - 0.5 * pairs) <
              4.0 * std::sqrt(pairs * 0.25));
    }

    SUBCASE("unpaired photons follow the single-photon marginals") {
        SourceModel lossy{20000.0, 0.5, {}, 0.0};
        Rng r2(77);
        const auto [la, lb] = generate_pair_arrivals(lossy, 5.0, r2);
        RoutingModel routing{1.0, 0.0, 0.0, 0.9, 0.1};
        const auto [t1, t2] = route_pairs(la, lb, routing, r2);
        // singles from A lean to detector 1, singles from B to detector 2;
        // matched pairs split evenly, so detector totals reflect the bias
        CHECK(t1.size() + t2.size() == la.size() + lb.size());
    }

    RoutingModel bad{0.5, 0.1, 0.1, 0.5, 0.5};
    CHECK_THROWS_AS(route_pairs(a, b, bad, rng), std::domain_error);
}

TEST_CASE("count_coincidences basics") {
    TimestampStream a{{100, 2000, 30000}, "a"};
    CHECK(count_coincidences(a, a, 4.0, 0, 1.0).count == 3);

    TimestampStream far{{1000000, 2000000}, "b"};
    CHECK(count_coincidences(a, far, 1000.0, 0, 1.0).count == 0);

    // greedy one-to-one: each click used at most once
    TimestampStream left{{0, 10}, "a"};
    TimestampStream right{{5}, "b"};
    CHECK(count_coincidences(left, right, 100.0, 0, 1.0).count == 1);

    CHECK_THROWS_AS(count_coincidences(TimestampStream{{5, 1}, "x"}, a, 4.0, 0, 1.0),
                    std::domain_error);
}

TEST_CASE("count_coincidences is symmetric under stream swap with negated offset") {
    Rng rng(55);
    TimestampStream a{{}, "a"}, b{{}, "b"};
    TimePs ta = 0, tb = 0;
    for (int i = 0; i < 5000; ++i) {
        ta += static_cast<TimePs>(rng.exponential(50000.0)) + 1;
        a.times.push_back(ta);
        tb += static_cast<TimePs>(rng.exponential(70000.0)) + 1;
        b.times.push_back(tb);
    }
    for (TimePs offset : {TimePs{0}, TimePs{1234}, TimePs{-777}}) {
        const auto forward = count_coincidences(a, b, 1000.0, offset, 1.0);
        const auto reverse = count_coincidences(b, a, 1000.0, -offset, 1.0);
        CHECK(forward.count == reverse.count);
    }
}

TEST_CASE("independent Poisson streams reproduce the analytic accidental rate") {
    Rng rng(66);
    const double r1 = 10000.0, r2 = 10000.0, duration = 100.0;
    TimestampStream a{{}, "a"}, b{{}, "b"};
    const double end_ps = duration * kPicosecondsPerSecond;
    for (double t = rng.exponential(1e12 / r1); t < end_ps; t += rng.exponential(1e12 / r1))
        a.times.push_back(static_cast<TimePs>(t));
    for (double t = rng.exponential(1e12 / r2); t < end_ps; t += rng.exponential(1e12 / r2))
        b.times.push_back(static_cast<TimePs>(t));

    const double expected = accidental_rate_analytic(r1, r2, 1000.0) * duration;
    CHECK(expected == doctest::Approx(10.0));
    const auto direct = count_coincidences(a, b, 1000.0, 0, duration);
    CHECK(std::abs(static_cast<double>(direct.count) - expected) < 4.0 * std::sqrt(expected) + 1);

    const auto delayed = delayed_window_accidentals(a, b, 1000.0, 500000, duration);
    CHECK(std::abs(static_cast<double>(delayed.count) - expected) < 4.0 * std::sqrt(expected) + 1);
}

TEST_CASE("delayed window on correlated pairs estimates the flat background") {
    Rng rng(67);
    SourceModel src{5000.0, 1.0, {}, 0.0};
    const auto [a, b] = generate_pair_arrivals(src, 50.0, rng);
    // true coincidences dominate at zero offset
    const auto at_zero = count_coincidences(a, b, 1000.0, 0, 50.0);
    CHECK(static_cast<double>(at_zero.count) > 0.9 * static_cast<double>(a.size()));
    // far from zero offset only r1 r2 w T accidentals remain
    const auto shifted = delayed_window_accidentals(a, b, 1000.0, 1000000, 50.0);
    const double expected = 5000.0 * 5000.0 * 1e-9 * 50.0;  // 1.25
    CHECK(static_cast<double>(shifted.count) < expected + 4.0 * std::sqrt(expected) + 2);

    CHECK_THROWS_AS(delayed_window_accidentals(a, b, 1000.0, 5000, 50.0), std::domain_error);
}

TEST_CASE("accidental_rate_analytic") {
    CHECK(accidental_rate_analytic(0.0, 5000.0, 1000.0) == 0.0);
    CHECK(accidental_rate_analytic(1000.0, 1000.0, 1000.0) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(accidental_rate_analytic(-1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("visibility") {
    const Visibility v = visibility(200.0, 20.0);
    CHECK(v.value == doctest::Approx(0.9));
    CHECK(v.sigma == doctest::Approx((20.0 / 200.0) * std::sqrt(1.0 / 20.0 + 1.0 / 200.0)));

    const Visibility perfect = visibility(100.0, 0.0);
    CHECK(perfect.value == doctest::Approx(1.0));
    CHECK(perfect.sigma == 0.0);  // limiting value of the propagation formula

    CHECK(visibility(50.0, 50.0).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(visibility(0.0, 0.0), std::domain_error);
}

TEST_CASE("corrected_visibility") {
    const Visibility same = corrected_visibility(200.0, 20.0, 0.0);
    CHECK(same.value == doctest::Approx(visibility(200.0, 20.0).value));

    CHECK(corrected_visibility(11000.0, 1111.0, 200.0).value ==
          doctest::Approx(0.9157).epsilon(1e-3));

    CHECK(corrected_visibility(1000.0, 30.0, 30.0).value == doctest::Approx(1.0));
    // subtraction floors at zero when accidentals exceed the dip counts
    CHECK(corrected_visibility(1000.0, 10.0, 30.0).value == doctest::Approx(1.0));
    CHECK_THROWS_AS(corrected_visibility(100.0, 10.0, 100.0), std::domain_error);
}

TEST_CASE("coincidence result invariants") {
    const CoincidenceResult r = CoincidenceResult::make(1234, 10.0, 1000.0);
    CHECK(r.error == std::sqrt(1234.0));
    CHECK(r.rate_hz == doctest::Approx(123.4));
    CHECK(CoincidenceResult::make(0, 10.0, 1000.0).error == 0.0);
}

TEST_CASE("identical seeds give identical streams") {
    SourceModel src{5000.0, 0.7, {}, 0.0};
    Rng rng1(99), rng2(99);
    const auto [a1, b1] = generate_pair_arrivals(src, 5.0, rng1);
    const auto [a2, b2] = generate_pair_arrivals(src, 5.0, rng2);
    CHECK(a1.times == a2.times);
    CHECK(b1.times == b2.times);
}

TEST_CASE("timestamp stream binary and csv round trips") {
    TimestampStream s{{0, 4, 123456789012345}, "x"};
    std::ostringstream bin(std::ios::binary);
    write_binary(s, bin);
    CHECK(bin.str().size() == 24);
    // little-endian check on the second record (value 4)
    CHECK(static_cast<unsigned char>(bin.str()[8]) == 4);
    CHECK(static_cast<unsigned char>(bin.str()[9]) == 0);
    std::istringstream bin_in(bin.str(), std::ios::binary);
    CHECK(read_binary(bin_in, "x").times == s.times);

    std::ostringstream csv;
    write_csv(s, csv);
    std::istringstream csv_in(csv.str());
    CHECK(read_csv(csv_in, "x").times == s.times);
}

TEST_CASE("routing_from_unitary on the 1/3 coupler") {
    const ModeUnitary third = coupler_unitary(1.0 / 3.0);
    const RoutingModel quantum = routing_from_unitary(third, {0, 1}, {0, 1}, 1.0);
    CHECK(quantum.pair_split == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(quantum.pair_both_1 == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(quantum.pair_both_2 == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    // single photons keep the classical splitting ratio
    CHECK(quantum.single_a_to_1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const RoutingModel classical = routing_from_unitary(third, {0, 1}, {0, 1}, 0.0);
    CHECK(classical.pair_split == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    CHECK(classical.pair_both_1 == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    const RoutingModel hom = routing_from_unitary(coupler_unitary(0.5), {0, 1}, {0, 1}, 1.0);
    CHECK(hom.pair_split < 1e-14);
    const RoutingModel hom_classical = routing_from_unitary(coupler_unitary(0.5), {0, 1}, {0, 1}, 0.0);
    CHECK(hom_classical.pair_split == doctest::Approx(0.5).epsilon(1e-12));
}
