#include "rclab/paths.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <memory>

#include "rclab/arms.hpp"

namespace rclab {

namespace {

void require_box(const Configuration& config, const RectDomain& box) {
    if (&config.domain() != static_cast<const Domain*>(&box)) {
        throw InvalidGeometry("configuration does not live on the given rectangle");
    }
}

struct Bfs {
    std::vector<int> dist;
    std::vector<int> via;  // edge used to reach the vertex
};

Bfs open_bfs(const Configuration& config, const std::vector<int>& sources) {
    const Domain& d = config.domain();
    Bfs r{std::vector<int>(static_cast<std::size_t>(d.vertex_count()), -1),
          std::vector<int>(static_cast<std::size_t>(d.vertex_count()), -1)};
    std::deque<int> queue;
    for (int s : sources) {
        r.dist[static_cast<std::size_t>(s)] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int dir = 0; dir < 4; ++dir) {
            const int e = d.incident(v, dir);
            if (e < 0 || !config.open(e)) continue;
            const int w = d.neighbour(v, dir);
            if (r.dist[static_cast<std::size_t>(w)] >= 0) continue;
            r.dist[static_cast<std::size_t>(w)] = r.dist[static_cast<std::size_t>(v)] + 1;
            r.via[static_cast<std::size_t>(w)] = e;
            queue.push_back(w);
        }
    }
    return r;
}

std::vector<int> column(const RectDomain& box, int x) {
    std::vector<int> out;
    for (int y = box.y0(); y <= box.y1(); ++y) out.push_back(box.vertex_id({x, y}));
    return out;
}

int boundary_distance(const RectDomain& box, Vertex v) {
    return std::min({v.x - box.x0(), box.x1() - v.x, v.y - box.y0(), box.y1() - v.y});
}

/// OOC detectors on Ann(0; 1, r) and the offsets of their edges.
struct LocalArms {
    struct Step {
        int dx, dy, dir;
    };
    std::unique_ptr<ArmDetector> detector;
    std::vector<Step> steps;
};

LocalArms& local_arms(int r) {
    // detectors keep scratch state, so each thread owns its cache
    thread_local std::map<int, std::unique_ptr<LocalArms>> cache;
    auto& slot = cache[r];
    if (!slot) {
        slot = std::make_unique<LocalArms>();
        auto a = build_annulus({0, 0}, 1, r);
        for (const Edge& e : a->edges()) slot->steps.push_back({e.a.x, e.a.y, e.horizontal() ? 0 : 1});
        slot->detector = std::make_unique<ArmDetector>(a);
    }
    return *slot;
}

}  // namespace

CrossingResult horizontal_crossing(const Configuration& config, const RectDomain& box) {
    require_box(config, box);
    const Bfs b = open_bfs(config, column(box, box.x0()));
    int best = -1;
    for (int v : column(box, box.x1())) {
        const int dv = b.dist[static_cast<std::size_t>(v)];
        if (dv >= 0 && (best < 0 || dv < b.dist[static_cast<std::size_t>(best)])) best = v;
    }
    CrossingResult r;
    if (best < 0) return r;
    r.exists = true;
    r.shortest_length = b.dist[static_cast<std::size_t>(best)];
    std::vector<int> path;
    const Domain& d = config.domain();
    for (int v = best; b.via[static_cast<std::size_t>(v)] >= 0;) {
        const int e = b.via[static_cast<std::size_t>(v)];
        path.push_back(e);
        v = d.edge_source(e) == v ? d.edge_target(e) : d.edge_source(e);
    }
    std::reverse(path.begin(), path.end());
    r.shortest_path = std::move(path);
    return r;
}

bool has_horizontal_crossing(const Configuration& config, const RectDomain& box) {
    return horizontal_crossing(config, box).exists;
}

std::optional<int> chemical_distance(const Configuration& config, const RectDomain& box) {
    return horizontal_crossing(config, box).shortest_length;
}

bool has_dual_vertical_crossing(const Configuration& config, const RectDomain& box) {
    require_box(config, box);
    const DualGraph dual(box);
    std::vector<char> seen(static_cast<std::size_t>(dual.vertex_count()), 0);
    std::deque<int> queue;
    for (int f = 0; f < dual.vertex_count(); ++f) {
        if (dual.point(f).y2 == 2 * box.y0() - 1) {
            seen[static_cast<std::size_t>(f)] = 1;
            queue.push_back(f);
        }
    }
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        if (dual.point(f).y2 == 2 * box.y1() + 1) return true;
        for (int dir = 0; dir < 4; ++dir) {
            const int g = dual.neighbour(f, dir);
            if (g < 0 || seen[static_cast<std::size_t>(g)] || config.open(dual.crossed(f, dir))) continue;
            seen[static_cast<std::size_t>(g)] = 1;
            queue.push_back(g);
        }
    }
    return false;
}

long below_area(const RectDomain& box, const std::vector<int>& path) {
    const DualGraph dual(box);
    std::vector<char> blocked(static_cast<std::size_t>(box.edge_count()), 0);
    for (int e : path) blocked[static_cast<std::size_t>(e)] = 1;
    std::vector<char> seen(static_cast<std::size_t>(dual.vertex_count()), 0);
    std::vector<int> stack;
    for (int f = 0; f < dual.vertex_count(); ++f) {
        if (dual.point(f).y2 == 2 * box.y0() - 1) {
            seen[static_cast<std::size_t>(f)] = 1;
            stack.push_back(f);
        }
    }
    long area = 0;
    while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        const HalfPoint h = dual.point(f);
        if (h.x2 > 2 * box.x0() && h.x2 < 2 * box.x1() && h.y2 > 2 * box.y0() && h.y2 < 2 * box.y1()) ++area;
        for (int dir = 0; dir < 4; ++dir) {
            const int g = dual.neighbour(f, dir);
            if (g < 0 || seen[static_cast<std::size_t>(g)] || blocked[static_cast<std::size_t>(dual.crossed(f, dir))]) {
                continue;
            }
            seen[static_cast<std::size_t>(g)] = 1;
            stack.push_back(g);
        }
    }
    return area;
}

std::optional<LowestCrossing> lowest_crossing(const Configuration& config, const RectDomain& box) {
    require_box(config, box);
    const Domain& d = box;
    std::vector<char> seen(static_cast<std::size_t>(d.vertex_count()), 0);
    const auto left = column(box, box.x0());
    for (int v : left) seen[static_cast<std::size_t>(v)] = 1;

    struct Frame {
        int v;
        int in;    // direction of the step that entered v
        int tried; // 0..3: right, straight, left, exhausted
        int via;
    };
    for (int s : left) {
        std::vector<Frame> stack{{s, 0, 0, -1}};
        while (!stack.empty()) {
            Frame& top = stack.back();
            if (d.vertices()[static_cast<std::size_t>(top.v)].x == box.x1()) {
                LowestCrossing lc;
                for (const Frame& f : stack) {
                    lc.vertices.push_back(d.vertices()[static_cast<std::size_t>(f.v)]);
                    if (f.via >= 0) lc.path.push_back(f.via);
                }
                lc.below_area = below_area(box, lc.path);
                return lc;
            }
            if (top.tried == 3) {
                stack.pop_back();
                continue;
            }
            static constexpr std::array<int, 3> kTurn{3, 0, 1};
            const int dir = (top.in + kTurn[static_cast<std::size_t>(top.tried++)]) % 4;
            const int e = d.incident(top.v, dir);
            if (e < 0 || !config.open(e)) continue;
            const int w = d.neighbour(top.v, dir);
            if (seen[static_cast<std::size_t>(w)]) continue;
            seen[static_cast<std::size_t>(w)] = 1;
            stack.push_back({w, dir, 0, e});
        }
    }
    return std::nullopt;
}

int three_arm_point_count(const Configuration& config, const RectDomain& box, const LowestCrossing& crossing,
                          int cap_radius) {
    require_box(config, box);
    static const Sigma ooc = parse_sigma("OOC");
    int count = 0;
    std::vector<std::uint8_t> local;
    for (int e : crossing.path) {
        const Vertex a = box.edges()[static_cast<std::size_t>(e)].a;
        const int r = std::min(cap_radius, boundary_distance(box, a));
        if (r <= 1) {
            ++count;
            continue;
        }
        LocalArms& arms = local_arms(r);
        local.assign(arms.steps.size(), 0);
        for (std::size_t i = 0; i < arms.steps.size(); ++i) {
            const auto& s = arms.steps[i];
            const int v = box.vertex_id({a.x + s.dx, a.y + s.dy});
            local[i] = config.open(box.incident(v, s.dir)) ? 1 : 0;
        }
        if (arms.detector->detect(local, ooc).occurs) ++count;
    }
    return count;
}

std::optional<int> radial_chemical_distance(const Configuration& config, const RectDomain& box) {
    require_box(config, box);
    const Vertex c = box.center();
    const Bfs b = open_bfs(config, {box.vertex_id(c)});
    std::optional<int> best;
    for (int v : box.boundary()) {
        const int dv = b.dist[static_cast<std::size_t>(v)];
        if (dv >= 0 && (!best || dv < *best)) best = dv;
    }
    return best;
}

}  // namespace rclab
