#include <doctest.h>

#include <random>

#include "rclab/arms.hpp"

using namespace rclab;

namespace {

Configuration random_config(std::shared_ptr<const Domain> d, double p, std::mt19937_64& gen) {
    Configuration c(d);
    std::bernoulli_distribution coin(p);
    for (int e = 0; e < d->edge_count(); ++e) c.set(e, coin(gen));
    return c;
}

void check_agreement(const Configuration& c, const ArmSpec& spec, ArmDetector& det) {
    const bool oracle = brute_force_arm_oracle(c, spec);
    const ArmResult r = det.detect(c, spec.sigma);
    REQUIRE(r.occurs == oracle);
    if (r.occurs) {
        REQUIRE(r.witness.has_value());
        std::string why;
        INFO(why);
        REQUIRE(validate_witness(c, spec, *r.witness, &why));
    }
}

}  // namespace

TEST_CASE("sigma parsing and n0") {
    CHECK(to_string(parse_sigma("ooc")) == "OOC");
    CHECK_THROWS_AS(parse_sigma("OX"), InvalidArmSpec);
    CHECK(n0(1) == 0);
    CHECK(n0(2) == 1);
    CHECK(n0(5) == 1);
    CHECK_THROWS_AS((ArmSpec{build_annulus({0, 0}, 0, 2), parse_sigma("OC")}.validate()), InvalidArmSpec);
}

TEST_CASE("trivial arm events") {
    auto a = build_annulus({0, 0}, 1, 3);
    ArmDetector det(a);
    const Configuration open(a, true), closed(a, false);
    CHECK(det.detect(open, parse_sigma("O")).occurs);
    CHECK_FALSE(det.detect(open, parse_sigma("OOC")).occurs);
    CHECK_FALSE(det.detect(closed, parse_sigma("O")).occurs);
    CHECK(det.detect(closed, parse_sigma("CCC")).occurs);
    CHECK(det.detect(open, parse_sigma("OOOOOOOO")).occurs);
    CHECK_FALSE(det.detect(open, parse_sigma("OOOOOOOO") ).witness->empty());
}

TEST_CASE("disjoint open crossings") {
    auto a = build_annulus({0, 0}, 1, 3);
    CHECK(count_disjoint_open_crossings(Configuration(a, true), *a) == 8);
    CHECK(count_disjoint_open_crossings(Configuration(a, false), *a) == 0);
    Configuration ray(a, false);
    for (int x = 1; x < 3; ++x) ray.set(a->find_edge({x, 0}, {x + 1, 0}), true);
    CHECK(count_disjoint_open_crossings(ray, *a) == 1);
}

TEST_CASE("detector matches oracle on every radial state of Ann(1,2)") {
    auto a = build_annulus({0, 0}, 1, 2);
    REQUIRE(a->edge_count() == 36);
    std::vector<int> radial, ring_edges;
    for (int e = 0; e < a->edge_count(); ++e) {
        const Edge& ed = a->edges()[static_cast<std::size_t>(e)];
        (sup_norm(ed.a, {0, 0}) != sup_norm(ed.b, {0, 0}) ? radial : ring_edges).push_back(e);
    }
    REQUIRE(radial.size() == 12);
    ArmDetector det(a);
    std::mt19937_64 gen(11);
    const char* sigmas[] = {"O", "C", "OC", "OOC", "OCOCO", "OCC", "OOOC"};
    for (int bg = 0; bg < 6; ++bg) {
        std::vector<std::uint8_t> ring_state(ring_edges.size());
        for (auto& s : ring_state) s = bg == 0 ? 1 : bg == 1 ? 0 : static_cast<std::uint8_t>(gen() & 1U);
        for (std::uint32_t m = 0; m < 4096; ++m) {
            Configuration c(a);
            for (std::size_t i = 0; i < radial.size(); ++i) c.set(radial[i], (m >> i) & 1U);
            for (std::size_t i = 0; i < ring_edges.size(); ++i) c.set(ring_edges[i], ring_state[i]);
            for (const char* s : sigmas) check_agreement(c, {a, parse_sigma(s)}, det);
        }
    }
}

TEST_CASE("detector matches oracle on random configurations") {
    std::mt19937_64 gen(5);
    for (auto [n1, n2] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{3, 4}}) {
        auto a = build_annulus({0, 0}, n1, n2);
        ArmDetector det(a);
        for (int i = 0; i < (n1 == 1 ? 100 : 300); ++i) {
            const double p = 0.3 + 0.4 * (i % 5) / 4.0;
            const Configuration c = random_config(a, p, gen);
            for (const char* s : {"OCOCO", "OOC", "OC", "OOCC", "OCOC", "OOOCCC", "OCOCOCOC"}) check_agreement(c, {a, parse_sigma(s)}, det);
        }
    }
}
