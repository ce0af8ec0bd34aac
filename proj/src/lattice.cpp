#include "rclab/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace rclab {

namespace {

std::int64_t key(Vertex v) {
    return (static_cast<std::int64_t>(v.x) << 32) ^ static_cast<std::int64_t>(static_cast<std::uint32_t>(v.y));
}

int direction_of(Vertex from, Vertex to) {
    for (int d = 0; d < 4; ++d) {
        if (from.x + kDirections[d][0] == to.x && from.y + kDirections[d][1] == to.y) return d;
    }
    return -1;
}

std::vector<Edge> grid_edges(const std::vector<Vertex>& vertices, const std::set<Vertex>& present) {
    std::vector<Edge> edges;
    for (const Vertex& v : vertices) {
        const Vertex right{v.x + 1, v.y};
        const Vertex up{v.x, v.y + 1};
        if (present.count(right)) edges.push_back({v, right});
        if (present.count(up)) edges.push_back({v, up});
    }
    return edges;
}

}  // namespace

Edge make_edge(Vertex u, Vertex v) {
    const int dx = u.x - v.x;
    const int dy = u.y - v.y;
    if (dx * dx + dy * dy != 1) {
        throw InvalidGeometry("edge endpoints are not nearest neighbours");
    }
    return u < v ? Edge{u, v} : Edge{v, u};
}

DualEdge dual_of(const Edge& e) {
    const HalfPoint m = e.midpoint();
    if (e.horizontal()) return {{m.x2, m.y2 - 1}, {m.x2, m.y2 + 1}};
    return {{m.x2 - 1, m.y2}, {m.x2 + 1, m.y2}};
}

Edge primal_of(const DualEdge& d) {
    const HalfPoint m = d.midpoint();
    // The dual edge is vertical iff its primal edge is horizontal.
    if (d.a.x2 == d.b.x2) return make_edge({(m.x2 - 1) / 2, m.y2 / 2}, {(m.x2 + 1) / 2, m.y2 / 2});
    return make_edge({m.x2 / 2, (m.y2 - 1) / 2}, {m.x2 / 2, (m.y2 + 1) / 2});
}

std::vector<Vertex> ring(Vertex c, int r) {
    if (r < 0) throw InvalidGeometry("negative ring radius");
    if (r == 0) return {c};
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(8 * r));
    for (int x = c.x - r; x < c.x + r; ++x) out.push_back({x, c.y - r});
    for (int y = c.y - r; y < c.y + r; ++y) out.push_back({c.x + r, y});
    for (int x = c.x + r; x > c.x - r; --x) out.push_back({x, c.y + r});
    for (int y = c.y + r; y > c.y - r; --y) out.push_back({c.x - r, y});
    return out;
}

void Domain::finalize(std::vector<Edge> edges, const std::vector<Vertex>* vertex_order) {
    edges_ = std::move(edges);
    if (vertex_order) {
        vertices_ = *vertex_order;
    } else {
        std::set<Vertex> vs;
        for (const Edge& e : edges_) {
            vs.insert(e.a);
            vs.insert(e.b);
        }
        // row-major, matching grid domains
        vertices_.assign(vs.begin(), vs.end());
        std::sort(vertices_.begin(), vertices_.end(), [](Vertex a, Vertex b) {
            return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
    }
    vertex_index_.clear();
    vertex_index_.reserve(vertices_.size() * 2);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertex_index_.emplace(key(vertices_[i]), static_cast<int>(i)).second) {
            throw InvalidGeometry("duplicate vertex");
        }
    }
    adjacency_.assign(vertices_.size(), {kNone, kNone, kNone, kNone});
    endpoints_.resize(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        const int a = find_vertex(e.a);
        const int b = find_vertex(e.b);
        if (a == kNone || b == kNone) throw InvalidGeometry("edge endpoint missing from vertex set");
        const int d = direction_of(e.a, e.b);
        auto& slot = adjacency_[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
        if (slot != kNone) throw InvalidGeometry("duplicate edge");
        slot = static_cast<int>(i);
        adjacency_[static_cast<std::size_t>(b)][static_cast<std::size_t>((d + 2) % 4)] = static_cast<int>(i);
        endpoints_[i] = {a, b};
    }
    boundary_pos_.assign(vertices_.size(), kNone);
}

int Domain::find_vertex(Vertex v) const {
    auto it = vertex_index_.find(key(v));
    return it == vertex_index_.end() ? kNone : it->second;
}

int Domain::find_edge(const Edge& e) const {
    const int a = find_vertex(e.a);
    if (a == kNone) return kNone;
    const int d = direction_of(e.a, e.b);
    if (d < 0) return kNone;
    return incident(a, d);
}

int Domain::neighbour(int v, int dir) const {
    const int e = incident(v, dir);
    if (e == kNone) return kNone;
    const auto& ends = endpoints_[static_cast<std::size_t>(e)];
    return ends[0] == v ? ends[1] : ends[0];
}

std::string Domain::describe() const {
    std::ostringstream os;
    if (auto* r = dynamic_cast<const RectDomain*>(this)) {
        os << "rect[" << r->x0() << "," << r->x1() << "]x[" << r->y0() << "," << r->y1() << "]";
    } else if (auto* a = dynamic_cast<const AnnulusDomain*>(this)) {
        os << "annulus(" << a->center().x << "," << a->center().y << ";" << a->n1() << "," << a->n2() << ")";
    } else {
        os << "custom(" << edge_count() << " edges)";
    }
    return os.str();
}

std::shared_ptr<const RectDomain> build_rect(int x0, int x1, int y0, int y1) {
    if (x1 < x0 || y1 < y0) throw InvalidGeometry("empty rectangle");
    auto d = std::shared_ptr<RectDomain>(new RectDomain());
    d->kind_ = DomainKind::Rect;
    d->x0_ = x0;
    d->x1_ = x1;
    d->y0_ = y0;
    d->y1_ = y1;
    std::vector<Vertex> vs;
    std::set<Vertex> present;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            vs.push_back({x, y});
            present.insert({x, y});
        }
    }
    d->finalize(grid_edges(vs, present), &vs);
    std::vector<Vertex> perimeter;
    if (x0 == x1 && y0 == y1) {
        perimeter.push_back({x0, y0});
    } else if (x0 == x1 || y0 == y1) {
        perimeter = vs;
    } else {
        for (int x = x0; x < x1; ++x) perimeter.push_back({x, y0});
        for (int y = y0; y < y1; ++y) perimeter.push_back({x1, y});
        for (int x = x1; x > x0; --x) perimeter.push_back({x, y1});
        for (int y = y1; y > y0; --y) perimeter.push_back({x0, y});
    }
    for (const Vertex& v : perimeter) {
        const int id = d->find_vertex(v);
        d->boundary_pos_[static_cast<std::size_t>(id)] = static_cast<int>(d->boundary_.size());
        d->boundary_.push_back(id);
    }
    return d;
}

std::shared_ptr<const BoxDomain> build_box(int n, Vertex center) {
    if (n < 0) throw InvalidGeometry("box half-side must be nonnegative");
    return build_rect(center.x - n, center.x + n, center.y - n, center.y + n);
}

std::shared_ptr<const RectDomain> build_crossing_rectangle(int n) {
    if (n < 1) throw InvalidGeometry("crossing rectangle needs n >= 1");
    return build_rect(-n, n + 1, -n, n);
}

std::shared_ptr<const AnnulusDomain> build_annulus(Vertex center, int n1, int n2) {
    if (n1 < 0 || n1 >= n2) throw InvalidGeometry("annulus requires 0 <= n1 < n2");
    auto d = std::shared_ptr<AnnulusDomain>(new AnnulusDomain());
    d->kind_ = DomainKind::Annulus;
    d->center_ = center;
    d->n1_ = n1;
    d->n2_ = n2;
    std::vector<Vertex> vs;
    std::set<Vertex> present;
    for (int y = center.y - n2; y <= center.y + n2; ++y) {
        for (int x = center.x - n2; x <= center.x + n2; ++x) {
            if (sup_norm({x, y}, center) >= n1) {
                vs.push_back({x, y});
                present.insert({x, y});
            }
        }
    }
    d->finalize(grid_edges(vs, present), &vs);
    d->outer_ = ring(center, n2);
    d->inner_ = ring(center, n1);
    for (const auto* list : {&d->outer_, &d->inner_}) {
        for (const Vertex& v : *list) {
            const int id = d->find_vertex(v);
            d->boundary_pos_[static_cast<std::size_t>(id)] = static_cast<int>(d->boundary_.size());
            d->boundary_.push_back(id);
        }
    }
    return d;
}

std::shared_ptr<const Domain> build_custom(std::vector<Edge> edges) {
    if (edges.empty()) throw InvalidGeometry("custom domain needs at least one edge");
    for (Edge& e : edges) e = make_edge(e.a, e.b);
    auto d = std::shared_ptr<Domain>(new Domain());
    d->kind_ = DomainKind::Custom;
    d->finalize(std::move(edges), nullptr);
    auto has_face = [&](Vertex ll) {
        const Vertex lr{ll.x + 1, ll.y}, ul{ll.x, ll.y + 1}, ur{ll.x + 1, ll.y + 1};
        return d->find_vertex(ll) != Domain::kNone && d->find_vertex(ur) != Domain::kNone &&
               d->find_edge(ll, lr) != Domain::kNone && d->find_edge(ll, ul) != Domain::kNone &&
               d->find_edge(lr, ur) != Domain::kNone && d->find_edge(ul, ur) != Domain::kNone;
    };
    std::vector<Vertex> sorted = d->vertices_;
    std::sort(sorted.begin(), sorted.end());
    for (const Vertex& v : sorted) {
        const int id = d->find_vertex(v);
        bool interior = true;
        for (int dir = 0; dir < 4; ++dir) interior = interior && d->incident(id, dir) != Domain::kNone;
        interior = interior && has_face(v) && has_face({v.x - 1, v.y}) && has_face({v.x, v.y - 1}) &&
                   has_face({v.x - 1, v.y - 1});
        if (!interior) {
            d->boundary_pos_[static_cast<std::size_t>(id)] = static_cast<int>(d->boundary_.size());
            d->boundary_.push_back(id);
        }
    }
    return d;
}

DualMap::DualMap(std::shared_ptr<const Domain> domain) : domain_(std::move(domain)) {
    if (!domain_ || domain_->edge_count() == 0) throw InvalidGeometry("dual map of an empty domain");
    duals_.reserve(static_cast<std::size_t>(domain_->edge_count()));
    for (const Edge& e : domain_->edges()) duals_.push_back(dual_of(e));
}

int DualMap::primal(const DualEdge& d) const {
    const DualEdge canon = d.a < d.b ? d : DualEdge{d.b, d.a};
    if ((canon.a.x2 & 1) == 0 || (canon.a.y2 & 1) == 0) return Domain::kNone;
    return domain_->find_edge(primal_of(canon));
}

DualMap dual_map(std::shared_ptr<const Domain> domain) { return DualMap(std::move(domain)); }

DualGraph::DualGraph(const Domain& domain) {
    auto hkey = [](HalfPoint h) {
        return (static_cast<std::int64_t>(h.x2) << 32) ^ static_cast<std::int64_t>(static_cast<std::uint32_t>(h.y2));
    };
    auto intern = [&](HalfPoint h) {
        auto [it, fresh] = index_.emplace(hkey(h), static_cast<int>(points_.size()));
        if (fresh) {
            points_.push_back(h);
            adj_.push_back({Domain::kNone, Domain::kNone, Domain::kNone, Domain::kNone});
            crossed_.push_back({Domain::kNone, Domain::kNone, Domain::kNone, Domain::kNone});
        }
        return it->second;
    };
    ends_.resize(static_cast<std::size_t>(domain.edge_count()));
    for (int e = 0; e < domain.edge_count(); ++e) {
        const DualEdge d = dual_of(domain.edges()[static_cast<std::size_t>(e)]);
        const int a = intern(d.a);
        const int b = intern(d.b);
        // d.a is below (vertical dual) or left (horizontal dual) of d.b
        const int dir = d.a.x2 == d.b.x2 ? 1 : 0;
        adj_[static_cast<std::size_t>(a)][static_cast<std::size_t>(dir)] = b;
        adj_[static_cast<std::size_t>(b)][static_cast<std::size_t>(dir + 2)] = a;
        crossed_[static_cast<std::size_t>(a)][static_cast<std::size_t>(dir)] = e;
        crossed_[static_cast<std::size_t>(b)][static_cast<std::size_t>(dir + 2)] = e;
        ends_[static_cast<std::size_t>(e)] = {a, b};
    }
}

int DualGraph::find(HalfPoint h) const {
    auto it = index_.find((static_cast<std::int64_t>(h.x2) << 32) ^
                          static_cast<std::int64_t>(static_cast<std::uint32_t>(h.y2)));
    return it == index_.end() ? Domain::kNone : it->second;
}

std::vector<Vertex> boundary_vertices(const Domain& domain) {
    std::vector<Vertex> out;
    out.reserve(domain.boundary().size());
    for (int id : domain.boundary()) out.push_back(domain.vertices()[static_cast<std::size_t>(id)]);
    return out;
}

}  // namespace rclab
