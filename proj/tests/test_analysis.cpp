#include <doctest.h>

#include <cmath>
#include <random>

#include "rclab/analysis.hpp"
#include "rclab/paths.hpp"

using namespace rclab;

namespace {

RunSpec quick_run(Algorithm a, std::size_t samples, std::uint64_t seed = 7) {
    RunSpec r;
    r.sampler.algorithm = a;
    r.sampler.burn_in = 100;
    r.seed = seed;
    r.samples_per_replica = samples;
    return r;
}

SampleSeries iid_series(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(3.0, 2.0);
    SampleSeries s;
    s.replicas.resize(1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = normal(gen);
        s.replicas[0].push_back({x, 2.0 * x});
    }
    return s;
}

}  // namespace

TEST_CASE("batch means on independent data") {
    const BatchStats s = batch_stats(iid_series(20000, 3));
    CHECK(s.batches == 50);
    CHECK(s.mean[0] == doctest::Approx(3.0).epsilon(0.02));
    // sigma / sqrt(n) = 0.0141; batch means is noisy with 50 batches
    CHECK(s.std_error(0) == doctest::Approx(2.0 / std::sqrt(20000.0)).epsilon(0.35));
    CHECK(s.cov[0][1] == doctest::Approx(2.0 * s.cov[0][0]));
    CHECK(s.n_effective(0) <= 20000.0);
}

TEST_CASE("probability estimates") {
    auto d = build_custom({make_edge({0, 0}, {1, 0})});
    const Params params = Params::make(0.5, 2.0);
    const auto bc = BoundaryCondition::free(*d);
    const auto always = estimate_probability([](const Configuration&) { return true; }, d, params, bc,
                                             quick_run(Algorithm::HeatBath, 2000));
    CHECK(always.value == 1.0);
    CHECK(always.std_error == 0.0);
    CHECK(always.n_samples == 2000);

    const auto edge = estimate_probability([](const Configuration& c) { return c.open(0); }, d, params, bc,
                                           quick_run(Algorithm::HeatBath, 20000));
    const double exact = 0.5 / (0.5 + 0.5 * 2.0);
    CHECK(std::abs(edge.value - exact) < 4.0 * edge.std_error);
    CHECK(edge.std_error > 0.0);
    CHECK(edge.context.q == 2.0);
    CHECK(edge.context.algorithm == "heat-bath");

    RunSpec none = quick_run(Algorithm::HeatBath, 0);
    CHECK_THROWS_AS(estimate_probability([](const Configuration&) { return true; }, d, params, bc, none), DomainError);
}

TEST_CASE("conditional means") {
    auto box = build_box(1);
    const Params params = Params::make(0.9, 1.0);
    const auto bc = BoundaryCondition::free(*box);
    const RunSpec run = quick_run(Algorithm::HeatBath, 4000);
    auto one = estimate_conditional_mean([](const Configuration&) { return 1.0; },
                                         [&](const Configuration& c) { return has_horizontal_crossing(c, *box); }, box,
                                         params, bc, run);
    CHECK(one.value == doctest::Approx(1.0));
    CHECK_FALSE(one.error.has_value());

    auto all_open = estimate_conditional_mean(
        [&](const Configuration& c) { return static_cast<double>(*chemical_distance(c, *box)); },
        [](const Configuration& c) { return c.open_count() == static_cast<int>(c.size()); }, box, params, bc, run);
    CHECK(all_open.value == doctest::Approx(2.0));

    auto never = estimate_conditional_mean([](const Configuration&) { return 1.0; },
                                           [](const Configuration&) { return false; }, box, params, bc, run);
    CHECK(never.error.has_value());
    CHECK(std::isnan(never.value));
}

TEST_CASE("quasi-multiplicativity ratio degenerates to 1 at n3 = n1") {
    const auto r = quasi_mult_ratio(1, 1, 3, parse_sigma("OOC"), Params::critical(1.0), false,
                                    quick_run(Algorithm::HeatBath, 300), 3);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK_THROWS_AS(quasi_mult_ratio(2, 1, 3, parse_sigma("OOC"), Params::critical(1.0), false,
                                     quick_run(Algorithm::HeatBath, 10)),
                    InvalidGeometry);
}

TEST_CASE("power-law fits") {
    std::vector<PowerPoint> exact;
    for (double x : {2.0, 4.0, 8.0, 16.0}) exact.push_back({x, x * x, 0.0});
    const auto f = fit_power_law(exact);
    CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(f.ci_high - f.ci_low < 2e-3);
    CHECK(f.r_squared == doctest::Approx(1.0));

    std::mt19937_64 gen(9);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<PowerPoint> noisy;
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double y = std::pow(x, 1.5);
        noisy.push_back({x, y * (1.0 + noise(gen)), 0.05 * y});
    }
    const auto g = fit_power_law(noisy);
    CHECK(g.ci_low <= 1.5);
    CHECK(g.ci_high >= 1.5);
    CHECK(g.ci_low <= g.exponent);
    CHECK(g.exponent <= g.ci_high);

    CHECK_THROWS_AS(fit_power_law({{1, 1, 0}, {2, 0, 0}, {3, 1, 0}}), DomainError);
    CHECK_THROWS_AS(fit_power_law({{1, 1, 0}, {2, 1, 0}}), DomainError);
}

TEST_CASE("mixing coefficient vanishes under independence") {
    auto box = build_box(2);
    const auto bc = BoundaryCondition::free(*box);
    const int e0 = box->find_edge(Vertex{-2, -2}, Vertex{-1, -2});
    const int e1 = box->find_edge(Vertex{1, 2}, Vertex{2, 2});
    const auto m = mixing_coefficient([&](const Configuration& c) { return c.open(e0); },
                                      [&](const Configuration& c) { return c.open(e1); }, box, Params::make(0.5, 1.0),
                                      bc, quick_run(Algorithm::HeatBath, 20000));
    CHECK(m.value < 3.0 * m.std_error + 1e-12);
    CHECK_THROWS_AS(mixing_coefficient([](const Configuration&) { return false; },
                                       [](const Configuration&) { return true; }, box, Params::make(0.5, 1.0), bc,
                                       quick_run(Algorithm::HeatBath, 100)),
                    DomainError);
}

TEST_CASE("monotonicity check and exact FKG on B(1)") {
    auto box = build_box(1);
    const Predicate cross = [&](const Configuration& c) { return has_horizontal_crossing(c, *box); };
    const Predicate radial = [&](const Configuration& c) { return radial_chemical_distance(c, *box).has_value(); };
    const Predicate closed0 = [](const Configuration& c) { return !c.open(0); };
    CHECK(is_increasing(cross, box));
    CHECK(is_increasing(radial, box));
    CHECK_FALSE(is_increasing(closed0, box));
    CHECK_THROWS_AS(is_increasing(cross, build_box(2)), SizeCapExceeded);

    for (double q : {1.0, 2.0, 4.0}) {
        for (bool wired : {false, true}) {
            const auto bc = wired ? BoundaryCondition::wired(*box) : BoundaryCondition::free(*box);
            const ExactTable t = exact_distribution(box, Params::critical(q), bc);
            CHECK(exact_covariance(t, cross, radial) >= -1e-12);
            CHECK(exact_covariance(t, cross, cross) >= 0.0);
        }
    }
    CHECK_THROWS_AS(fkg_covariance(cross, closed0, box, Params::critical(2.0), BoundaryCondition::free(*box),
                                   quick_run(Algorithm::HeatBath, 100)),
                    DomainError);
    const auto cov = fkg_covariance(cross, cross, box, Params::critical(2.0), BoundaryCondition::free(*box),
                                    quick_run(Algorithm::HeatBath, 2000));
    CHECK(cov.value >= 0.0);
}

TEST_CASE("extremal distance") {
    const auto unit = solve_extremal(Quad::rectangle(1, 1));
    CHECK(unit.value == doctest::Approx(1.0).epsilon(1e-9));
    for (auto [n, m] : {std::pair{8, 4}, std::pair{16, 4}, std::pair{5, 7}}) {
        const auto s = solve_extremal(Quad::rectangle(n, m));
        CHECK(std::abs(s.value - double(n) / m) <= 0.15 * double(n) / m);
        CHECK(s.residual <= 1e-9);
    }

    // punching holes never lowers the value
    std::mt19937_64 gen(21);
    const Quad full = Quad::rectangle(8, 6);
    const double base = extremal_distance(full);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Edge> kept;
        std::bernoulli_distribution drop(0.15);
        for (const Edge& e : full.domain->edges()) {
            const bool interior = e.a.x > 0 && e.b.x < 8 && e.a.y > 0 && e.b.y < 6;
            if (!(interior && drop(gen))) kept.push_back(e);
        }
        Quad holed = full;
        holed.domain = build_custom(kept);
        const auto s = solve_extremal(holed);
        CHECK(s.value >= base - 1e-9);
        CHECK(s.residual <= 1e-9);
    }

    // cutting every column of faces disconnects the arcs
    std::vector<Edge> cut;
    for (const Edge& e : full.domain->edges()) {
        if (!(e.horizontal() && e.a.x == 4)) cut.push_back(e);
    }
    Quad split = full;
    split.domain = build_custom(cut);
    CHECK(std::isinf(extremal_distance(split)));

    Quad bad = full;
    bad.cd = bad.ab;
    CHECK_THROWS_AS(extremal_distance(bad), InvalidGeometry);
}

TEST_CASE("bound ratio series on small boxes") {
    RunSpec run = quick_run(Algorithm::HeatBath, 400, 5);
    const auto recs = bound_ratio_series({4, 10}, Params::critical(1.0), false, run);
    REQUIRE(recs.size() == 4);
    for (std::size_t i = 0; i < recs.size(); i += 2) {
        CHECK(recs[i].name == "S_ratio");
        CHECK(recs[i + 1].name == "L_ratio");
        REQUIRE_FALSE(recs[i].error.has_value());
        CHECK(recs[i].value <= recs[i + 1].value);
        CHECK(recs[i].extra.at("s_exceeds_l_samples") == 0.0);
        CHECK(recs[i].extra.at("mean_S_given_H") >= 2.0 * recs[i].context.n);
    }
    CHECK(recs[2].extra.at("chain_links") == 2.0);
    CHECK_THROWS_AS(bound_ratio_series({8, 4}, Params::critical(1.0), false, run), DomainError);
}
