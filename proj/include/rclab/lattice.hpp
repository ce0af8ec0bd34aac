#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rclab {

class InvalidGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Vertex {
    int x = 0;
    int y = 0;
    auto operator<=>(const Vertex&) const = default;
};

/// Point on the half-integer lattice stored with doubled coordinates.
/// Primal vertices have even coordinates, dual vertices (Z^2 + (1/2,1/2)) odd ones.
struct HalfPoint {
    int x2 = 0;
    int y2 = 0;
    auto operator<=>(const HalfPoint&) const = default;
};

inline HalfPoint to_half(Vertex v) { return {2 * v.x, 2 * v.y}; }

/// Nearest-neighbour edge, endpoints in lexicographic order (a < b).
struct Edge {
    Vertex a;
    Vertex b;
    auto operator<=>(const Edge&) const = default;
    HalfPoint midpoint() const { return {a.x + b.x, a.y + b.y}; }
    bool horizontal() const { return a.y == b.y; }
};

Edge make_edge(Vertex u, Vertex v);

struct DualEdge {
    HalfPoint a;
    HalfPoint b;
    auto operator<=>(const DualEdge&) const = default;
    HalfPoint midpoint() const { return {(a.x2 + b.x2) / 2, (a.y2 + b.y2) / 2}; }
};

/// Rotates an edge by 90 degrees about its midpoint.
DualEdge dual_of(const Edge& e);
Edge primal_of(const DualEdge& d);

/// Unit steps in counterclockwise order: +x, +y, -x, -y.
inline constexpr std::array<std::array<int, 2>, 4> kDirections{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

inline int sup_norm(Vertex v, Vertex c) {
    const int dx = v.x > c.x ? v.x - c.x : c.x - v.x;
    const int dy = v.y > c.y ? v.y - c.y : c.y - v.y;
    return dx > dy ? dx : dy;
}

/// Vertices with sup-distance exactly r from c, counterclockwise starting at the
/// bottom-left corner (c.x - r, c.y - r).
std::vector<Vertex> ring(Vertex c, int r);

enum class DomainKind { Rect, Annulus, Custom };

/// Finite subdomain of Z^2: an edge set and the endpoints of its edges.
///
/// Vertex and edge ids are dense and fixed at construction. Grid-built domains
/// (rectangles, boxes, annuli) order vertices row-major (y, then x) and emit,
/// per vertex in that order, the edge to (x+1, y) followed by the edge to
/// (x, y+1). Domains are immutable and shared by pointer; configurations refer
/// to a domain by identity.
class Domain {
public:
    static constexpr int kNone = -1;

    virtual ~Domain() = default;

    DomainKind kind() const { return kind_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    int find_vertex(Vertex v) const;
    int find_edge(const Edge& e) const;
    int find_edge(Vertex u, Vertex v) const { return find_edge(make_edge(u, v)); }

    /// Edge id incident to vertex id `v` in direction `dir` (index into kDirections), or kNone.
    int incident(int v, int dir) const { return adjacency_[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)]; }
    /// Vertex id across the edge in direction `dir`, or kNone.
    int neighbour(int v, int dir) const;

    int edge_source(int e) const { return endpoints_[static_cast<std::size_t>(e)][0]; }
    int edge_target(int e) const { return endpoints_[static_cast<std::size_t>(e)][1]; }

    /// Boundary vertex ids. Rectangles: the perimeter, counterclockwise from the
    /// bottom-left corner. Annuli: outer ring then inner ring, each counterclockwise.
    /// Custom domains: vertices missing an incident edge or an adjacent face,
    /// lexicographic order.
    const std::vector<int>& boundary() const { return boundary_; }
    /// Position of a vertex id in boundary(), or kNone.
    int boundary_position(int v) const { return boundary_pos_[static_cast<std::size_t>(v)]; }

    std::string describe() const;

protected:
    Domain() = default;
    void finalize(std::vector<Edge> edges, const std::vector<Vertex>* vertex_order);

    DomainKind kind_ = DomainKind::Custom;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 4>> adjacency_;
    std::vector<std::array<int, 2>> endpoints_;
    std::vector<int> boundary_;
    std::vector<int> boundary_pos_;
    std::unordered_map<std::int64_t, int> vertex_index_;

    friend std::shared_ptr<const Domain> build_custom(std::vector<Edge> edges);
};

/// Full grid [x0, x1] x [y0, y1]. Boxes B(c, n) are the square case.
class RectDomain : public Domain {
public:
    int x0() const { return x0_; }
    int x1() const { return x1_; }
    int y0() const { return y0_; }
    int y1() const { return y1_; }
    int width() const { return x1_ - x0_; }
    int height() const { return y1_ - y0_; }
    bool is_box() const { return width() == height(); }
    Vertex center() const { return {(x0_ + x1_) / 2, (y0_ + y1_) / 2}; }
    int half_side() const { return width() / 2; }
    bool contains(Vertex v) const { return v.x >= x0_ && v.x <= x1_ && v.y >= y0_ && v.y <= y1_; }
    /// Vertex id without a hash lookup (row-major layout).
    int vertex_id(Vertex v) const { return (v.y - y0_) * (width() + 1) + (v.x - x0_); }

private:
    friend std::shared_ptr<const RectDomain> build_rect(int, int, int, int);
    int x0_ = 0, x1_ = 0, y0_ = 0, y1_ = 0;
};

using BoxDomain = RectDomain;

/// Ann(c; n1, n2): the subgraph of B(c, n2) induced by vertices at sup-distance >= n1.
class AnnulusDomain : public Domain {
public:
    Vertex center() const { return center_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    const std::vector<Vertex>& inner_boundary() const { return inner_; }
    const std::vector<Vertex>& outer_boundary() const { return outer_; }

private:
    friend std::shared_ptr<const AnnulusDomain> build_annulus(Vertex, int, int);
    Vertex center_;
    int n1_ = 0, n2_ = 0;
    std::vector<Vertex> inner_, outer_;
};

std::shared_ptr<const RectDomain> build_rect(int x0, int x1, int y0, int y1);
std::shared_ptr<const BoxDomain> build_box(int n, Vertex center = {});
std::shared_ptr<const AnnulusDomain> build_annulus(Vertex center, int n1, int n2);
/// Domain spanned by an arbitrary edge list (duplicates rejected).
std::shared_ptr<const Domain> build_custom(std::vector<Edge> edges);

/// Self-dual crossing rectangle [-n, n+1] x [-n, n]: its left-right primal graph
/// is isomorphic to the top-bottom dual graph.
std::shared_ptr<const RectDomain> build_crossing_rectangle(int n);

/// Edge <-> dual edge bijection of a domain.
class DualMap {
public:
    explicit DualMap(std::shared_ptr<const Domain> domain);

    const Domain& domain() const { return *domain_; }
    std::size_t size() const { return duals_.size(); }
    const DualEdge& dual(int edge_id) const { return duals_[static_cast<std::size_t>(edge_id)]; }
    /// Edge id whose dual is `d`, or Domain::kNone.
    int primal(const DualEdge& d) const;

private:
    std::shared_ptr<const Domain> domain_;
    std::vector<DualEdge> duals_;
};

DualMap dual_map(std::shared_ptr<const Domain> domain);

/// Graph on the dual vertices of a domain's edges: f and f' are adjacent when
/// the dual edge between them crosses a domain edge.
class DualGraph {
public:
    explicit DualGraph(const Domain& domain);

    int vertex_count() const { return static_cast<int>(points_.size()); }
    const std::vector<HalfPoint>& points() const { return points_; }
    const HalfPoint& point(int f) const { return points_[static_cast<std::size_t>(f)]; }
    /// Dual vertex id, or Domain::kNone.
    int find(HalfPoint h) const;
    /// Neighbouring dual vertex in direction `dir`, or Domain::kNone.
    int neighbour(int f, int dir) const { return adj_[static_cast<std::size_t>(f)][static_cast<std::size_t>(dir)]; }
    /// Primal edge id crossed by the step from f in direction `dir`, or Domain::kNone.
    int crossed(int f, int dir) const { return crossed_[static_cast<std::size_t>(f)][static_cast<std::size_t>(dir)]; }
    /// The two dual vertices of edge e: {below/left, above/right}.
    const std::array<int, 2>& ends(int e) const { return ends_[static_cast<std::size_t>(e)]; }

private:
    std::vector<HalfPoint> points_;
    std::unordered_map<std::int64_t, int> index_;
    std::vector<std::array<int, 4>> adj_;
    std::vector<std::array<int, 4>> crossed_;
    std::vector<std::array<int, 2>> ends_;
};
std::vector<Vertex> boundary_vertices(const Domain& domain);

}  // namespace rclab
