#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "rclab/paths.hpp"

using namespace rclab;

namespace {

Configuration random_config(std::shared_ptr<const Domain> d, double p, std::mt19937_64& gen) {
    Configuration c(d);
    std::bernoulli_distribution coin(p);
    for (int e = 0; e < d->edge_count(); ++e) c.set(e, coin(gen));
    return c;
}

void open_path(Configuration& c, const std::vector<Vertex>& pts) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) c.set(c.domain().find_edge(pts[i], pts[i + 1]), true);
}

/// Every crossing in the sense of LowestCrossing, as edge lists.
std::vector<std::vector<int>> all_crossings(const Configuration& c, const RectDomain& box) {
    std::vector<std::vector<int>> out;
    std::vector<char> used(static_cast<std::size_t>(box.vertex_count()), 0);
    std::vector<int> path;
    auto rec = [&](auto&& self, int v) -> void {
        if (box.vertices()[static_cast<std::size_t>(v)].x == box.x1()) {
            out.push_back(path);
            return;
        }
        for (int dir = 0; dir < 4; ++dir) {
            const int e = box.incident(v, dir);
            if (e < 0 || !c.open(e)) continue;
            const int w = box.neighbour(v, dir);
            if (used[static_cast<std::size_t>(w)] || box.vertices()[static_cast<std::size_t>(w)].x == box.x0()) continue;
            used[static_cast<std::size_t>(w)] = 1;
            path.push_back(e);
            self(self, w);
            path.pop_back();
            used[static_cast<std::size_t>(w)] = 0;
        }
    };
    for (int y = box.y0(); y <= box.y1(); ++y) {
        const int s = box.vertex_id({box.x0(), y});
        used[static_cast<std::size_t>(s)] = 1;
        rec(rec, s);
        used[static_cast<std::size_t>(s)] = 0;
    }
    return out;
}

std::set<HalfPoint> faces_below(const RectDomain& box, const std::vector<int>& path) {
    std::set<Edge> blocked;
    for (int e : path) blocked.insert(box.edges()[static_cast<std::size_t>(e)]);
    std::set<HalfPoint> seen, inside;
    std::vector<HalfPoint> stack;
    for (int x = box.x0(); x < box.x1(); ++x) {
        stack.push_back({2 * x + 1, 2 * box.y0() - 1});
        seen.insert(stack.back());
    }
    while (!stack.empty()) {
        const HalfPoint h = stack.back();
        stack.pop_back();
        if (h.y2 > 2 * box.y0() && h.y2 < 2 * box.y1() && h.x2 > 2 * box.x0() && h.x2 < 2 * box.x1()) inside.insert(h);
        for (auto [dx, dy] : kDirections) {
            const HalfPoint g{h.x2 + 2 * dx, h.y2 + 2 * dy};
            const Edge crossed = primal_of(DualEdge{h, g} < DualEdge{g, h} ? DualEdge{h, g} : DualEdge{g, h});
            const int e = box.find_edge(crossed);
            if (e < 0 || blocked.count(crossed) || seen.count(g)) continue;
            seen.insert(g);
            stack.push_back(g);
        }
    }
    return inside;
}

void check_lowest(const Configuration& c, const RectDomain& box) {
    const auto crossings = all_crossings(c, box);
    const auto lc = lowest_crossing(c, box);
    REQUIRE(lc.has_value() == !crossings.empty());
    REQUIRE(lc.has_value() == has_horizontal_crossing(c, box));
    if (!lc) return;
    REQUIRE(std::find(crossings.begin(), crossings.end(), lc->path) != crossings.end());
    const auto mine = faces_below(box, lc->path);
    REQUIRE(static_cast<long>(mine.size()) == lc->below_area);
    for (const auto& other : crossings) {
        const auto theirs = faces_below(box, other);
        REQUIRE(std::includes(theirs.begin(), theirs.end(), mine.begin(), mine.end()));
    }
    int shortest = 1 << 30;
    for (const auto& other : crossings) shortest = std::min(shortest, static_cast<int>(other.size()));
    REQUIRE(chemical_distance(c, box) == shortest);
}

}  // namespace

TEST_CASE("horizontal crossings and chemical distance on trivial configurations") {
    auto box = build_box(4);
    Configuration open(box, true), closed(box, false);
    CHECK(has_horizontal_crossing(open, *box));
    CHECK_FALSE(has_horizontal_crossing(closed, *box));
    CHECK(chemical_distance(open, *box) == 8);
    CHECK_FALSE(chemical_distance(closed, *box).has_value());

    Configuration bottom(box);
    for (int x = -4; x < 4; ++x) bottom.set(box->find_edge(Vertex{x, -4}, Vertex{x + 1, -4}), true);
    CHECK(has_horizontal_crossing(bottom, *box));
    const auto r = horizontal_crossing(bottom, *box);
    REQUIRE(r.shortest_path.has_value());
    CHECK(r.shortest_path->size() == 8);

    Configuration other(build_box(4));
    CHECK_THROWS_AS(has_horizontal_crossing(other, *box), InvalidGeometry);
}

TEST_CASE("serpentine path length equals brute-force shortest crossing") {
    auto box = build_box(3);
    Configuration c(box);
    std::vector<Vertex> pts;
    // snake through the columns, alternating up and down
    int y = -3;
    for (int x = -3; x <= 3; ++x) {
        pts.push_back({x, y});
        if (x == 3) break;
        const int target = (x + 3) % 2 == 0 ? 3 : -3;
        while (y != target) {
            y += target > y ? 1 : -1;
            pts.push_back({x, y});
        }
        // step right happens at the start of the next iteration
    }
    open_path(c, pts);
    const int length = static_cast<int>(pts.size()) - 1;
    CHECK(length == 6 + 6 * 6);
    // the left column segment is free, so the crossing starts at its top
    const auto crossings = all_crossings(c, *box);
    int shortest = 1 << 30;
    for (const auto& p : crossings) shortest = std::min(shortest, static_cast<int>(p.size()));
    CHECK(chemical_distance(c, *box) == shortest);
    CHECK(shortest == length - 6);
}

TEST_CASE("lowest crossing is the below-order minimum on every configuration of B(1)") {
    auto box = build_box(1);
    REQUIRE(box->edge_count() == 12);
    for (std::uint64_t m = 0; m < (1u << 12); ++m) check_lowest(Configuration::from_mask(box, m), *box);
}

TEST_CASE("lowest crossing matches enumeration on random small rectangles") {
    std::mt19937_64 gen(11);
    for (auto box : {build_box(2), build_rect(0, 3, 0, 3), build_rect(0, 4, 0, 2)}) {
        for (int i = 0; i < 400; ++i) check_lowest(random_config(box, 0.45 + 0.2 * (i % 3) / 2.0, gen), *box);
    }
}

TEST_CASE("lowest crossing fixtures") {
    auto box = build_box(2);
    Configuration open(box, true);
    auto lc = lowest_crossing(open, *box);
    REQUIRE(lc);
    CHECK(lc->path.size() == 4);
    CHECK(lc->vertices.front() == Vertex{-2, -2});
    CHECK(lc->below_area == 0);

    // bottom row with a gap, second row open: detour up and back
    Configuration gap(box);
    for (int x = -2; x < 2; ++x) {
        if (x != 0) gap.set(box->find_edge(Vertex{x, -2}, Vertex{x + 1, -2}), true);
        gap.set(box->find_edge(Vertex{x, -1}, Vertex{x + 1, -1}), true);
    }
    for (int x = -2; x <= 2; ++x) gap.set(box->find_edge(Vertex{x, -2}, Vertex{x, -1}), true);
    lc = lowest_crossing(gap, *box);
    REQUIRE(lc);
    CHECK(lc->path.size() == 6);
    CHECK(lc->below_area == 1);
    check_lowest(gap, *box);

    // two disjoint horizontal crossings: the lower one wins
    Configuration two(box);
    for (int x = -2; x < 2; ++x) {
        two.set(box->find_edge(Vertex{x, 0}, Vertex{x + 1, 0}), true);
        two.set(box->find_edge(Vertex{x, 2}, Vertex{x + 1, 2}), true);
    }
    lc = lowest_crossing(two, *box);
    REQUIRE(lc);
    CHECK(lc->vertices.front() == Vertex{-2, 0});
    CHECK(lc->below_area == 8);
    check_lowest(two, *box);

    CHECK_FALSE(lowest_crossing(Configuration(box), *box).has_value());
}

TEST_CASE("duality dichotomy on every configuration of the smallest crossing rectangle") {
    auto rect = build_crossing_rectangle(1);
    REQUIRE(rect->edge_count() == 17);
    for (std::uint64_t m = 0; m < (1u << 17); ++m) {
        const Configuration c = Configuration::from_mask(rect, m);
        REQUIRE(has_horizontal_crossing(c, *rect) != has_dual_vertical_crossing(c, *rect));
    }
    std::mt19937_64 gen(3);
    auto big = build_crossing_rectangle(6);
    for (int i = 0; i < 500; ++i) {
        const Configuration c = random_config(big, 0.5, gen);
        REQUIRE(has_horizontal_crossing(c, *big) != has_dual_vertical_crossing(c, *big));
    }
}

TEST_CASE("every lowest-crossing edge is a three-arm point") {
    std::mt19937_64 gen(17);
    auto box = build_box(6);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const Configuration c = random_config(box, 0.5, gen);
        const auto lc = lowest_crossing(c, *box);
        if (!lc) continue;
        ++checked;
        const int len = static_cast<int>(lc->path.size());
        REQUIRE(three_arm_point_count(c, *box, *lc, 100) == len);
        REQUIRE(three_arm_point_count(c, *box, *lc, 0) == len);
    }
    CHECK(checked > 50);

    auto b2 = build_box(2);
    Configuration open(b2, true);
    const auto lc = lowest_crossing(open, *b2);
    REQUIRE(lc);
    CHECK(three_arm_point_count(open, *b2, *lc, 10) == 4);
}

TEST_CASE("a non-lowest crossing fails the three-arm check somewhere") {
    auto box = build_box(4);
    Configuration c(box, true);
    // take the middle row of the all-open box as the crossing
    LowestCrossing fake;
    for (int x = -4; x < 4; ++x) fake.path.push_back(box->find_edge(Vertex{x, 0}, Vertex{x + 1, 0}));
    CHECK(three_arm_point_count(c, *box, fake, 4) < 8);
}

TEST_CASE("radial chemical distance") {
    auto box = build_box(5);
    CHECK(radial_chemical_distance(Configuration(box, true), *box) == 5);
    CHECK_FALSE(radial_chemical_distance(Configuration(box), *box).has_value());
    Configuration ray(box);
    for (int x = 0; x < 5; ++x) ray.set(box->find_edge(Vertex{x, 0}, Vertex{x + 1, 0}), true);
    CHECK(radial_chemical_distance(ray, *box) == 5);
    Configuration bent(box);
    open_path(bent, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {3, 4}, {4, 4}, {4, 5}});
    CHECK(radial_chemical_distance(bent, *box) == 9);
}
