#include "rclab/arms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <unordered_set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

namespace rclab {

// ------------------------------------------------------------------ sigma

Sigma parse_sigma(const std::string& text) {
    Sigma out;
    for (char ch : text) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (c == 'O') {
            out.push_back(Colour::Open);
        } else if (c == 'C') {
            out.push_back(Colour::DualClosed);
        } else {
            throw InvalidArmSpec(std::string("bad colour '") + ch + "' in sigma (use O and C)");
        }
    }
    if (out.empty()) throw InvalidArmSpec("empty colour sequence");
    return out;
}

std::string to_string(const Sigma& sigma) {
    std::string s;
    for (Colour c : sigma) s.push_back(c == Colour::Open ? 'O' : 'C');
    return s;
}

Sigma rotate(const Sigma& sigma, std::size_t by) {
    Sigma out(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = sigma[(i + by) % sigma.size()];
    return out;
}

int n0(int k) { return k <= 1 ? 0 : 1; }

void ArmSpec::validate() const {
    if (!annulus) throw InvalidArmSpec("arm spec without annulus");
    if (sigma.empty()) throw InvalidArmSpec("empty colour sequence");
    const int k = static_cast<int>(sigma.size());
    if (annulus->n1() < n0(k)) {
        throw InvalidArmSpec("inner radius " + std::to_string(annulus->n1()) + " below n0(" + std::to_string(k) +
                             ") = " + std::to_string(n0(k)));
    }
    if (k > 8 * std::max(1, annulus->n1())) throw InvalidArmSpec("more arms than inner boundary vertices");
}

namespace {

int sup2(HalfPoint h, Vertex c) { return std::max(std::abs(h.x2 - 2 * c.x), std::abs(h.y2 - 2 * c.y)); }

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCut = 0.1;  // angle of the sheet cut, avoids lattice directions

double base_angle(HalfPoint h, Vertex c) {
    double a = std::atan2(static_cast<double>(h.y2 - 2 * c.y), static_cast<double>(h.x2 - 2 * c.x));
    while (a < kCut) a += kTwoPi;
    while (a >= kCut + kTwoPi) a -= kTwoPi;
    return a;
}

// Sheet offset of q relative to p for two nearby points p, q.
int sheet_delta(double ap, double aq) {
    double d = aq - ap;
    while (d > std::numbers::pi) d -= kTwoPi;
    while (d <= -std::numbers::pi) d += kTwoPi;
    return static_cast<int>(std::lround((ap + d - aq) / kTwoPi));
}

int outward_dir(HalfPoint h, Vertex c) {
    const int dx = h.x2 - 2 * c.x;
    const int dy = h.y2 - 2 * c.y;
    if (std::abs(dx) >= std::abs(dy)) return dx > 0 ? 0 : 2;
    return dy > 0 ? 1 : 3;
}

struct LiftedVertex {
    int v;
    int sheet;
};

using LiftedPath = std::vector<LiftedVertex>;

// Left-closed set of lifted vertices: every sheet below `base` is blocked,
// sheets base.. carry explicit flags per type (0 primal, 1 dual).
struct Region {
    int base = 0;
    std::vector<std::vector<std::uint8_t>> flags[2];

    int top() const { return base + static_cast<int>(flags[0].size()); }
    bool blocked(int t, int v, int s) const {
        if (s < base) return true;
        const auto off = static_cast<std::size_t>(s - base);
        return off < flags[t].size() && flags[t][off][static_cast<std::size_t>(v)] != 0;
    }
};

}  // namespace

struct ArmDetector::Impl {
    std::shared_ptr<const AnnulusDomain> annulus;
    DualGraph dual;
    Vertex c;
    int n1, n2;
    int count[2];
    std::vector<std::array<int, 4>> nbr[2];
    std::vector<std::array<int, 4>> edge[2];   // primal edge used (t = 0) or crossed (t = 1)
    std::vector<std::array<int, 4>> delta[2];  // sheet change of the step
    std::vector<std::array<int, 4>> edge_sheet[2];  // sheet of edge_source(edge) relative to the vertex
    std::vector<std::uint8_t> inner[2], outer[2];
    std::vector<int> out_dir[2];
    std::vector<int> sources[2];  // inner vertices by increasing angle
    std::vector<HalfPoint> points[2];

    // scratch
    std::vector<std::vector<std::uint32_t>> stamp[2];
    std::uint32_t epoch = 0;

    explicit Impl(std::shared_ptr<const AnnulusDomain> a)
        : annulus(std::move(a)), dual(*annulus), c(annulus->center()), n1(annulus->n1()), n2(annulus->n2()) {
        const Domain& d = *annulus;
        count[0] = d.vertex_count();
        count[1] = dual.vertex_count();
        std::vector<double> angle[2];
        for (int t = 0; t < 2; ++t) {
            const auto n = static_cast<std::size_t>(count[t]);
            nbr[t].assign(n, {-1, -1, -1, -1});
            edge[t].assign(n, {-1, -1, -1, -1});
            delta[t].assign(n, {0, 0, 0, 0});
            edge_sheet[t].assign(n, {0, 0, 0, 0});
            inner[t].assign(n, 0);
            outer[t].assign(n, 0);
            out_dir[t].assign(n, 0);
            angle[t].resize(n);
        }
        auto point = [&](int t, int v) {
            return t == 0 ? to_half(d.vertices()[static_cast<std::size_t>(v)]) : dual.point(v);
        };
        for (int t = 0; t < 2; ++t) {
            for (int v = 0; v < count[t]; ++v) angle[t][static_cast<std::size_t>(v)] = base_angle(point(t, v), c);
        }
        const int inner2[2] = {2 * n1, n1 == 0 ? 1 : 2 * n1 - 1};
        const int outer2[2] = {2 * n2, 2 * n2 + 1};
        for (int t = 0; t < 2; ++t) {
            for (int v = 0; v < count[t]; ++v) {
                const auto sv = static_cast<std::size_t>(v);
                const HalfPoint h = point(t, v);
                points[t].push_back(h);
                inner[t][sv] = sup2(h, c) == inner2[t];
                outer[t][sv] = sup2(h, c) == outer2[t];
                out_dir[t][sv] = outward_dir(h, c);
                for (int dir = 0; dir < 4; ++dir) {
                    const int w = t == 0 ? d.neighbour(v, dir) : dual.neighbour(v, dir);
                    if (w < 0) continue;
                    const int e = t == 0 ? d.incident(v, dir) : dual.crossed(v, dir);
                    nbr[t][sv][static_cast<std::size_t>(dir)] = w;
                    edge[t][sv][static_cast<std::size_t>(dir)] = e;
                    delta[t][sv][static_cast<std::size_t>(dir)] =
                        sheet_delta(angle[t][sv], angle[t][static_cast<std::size_t>(w)]);
                    const int src = d.edge_source(e);
                    edge_sheet[t][sv][static_cast<std::size_t>(dir)] =
                        sheet_delta(angle[t][sv], angle[0][static_cast<std::size_t>(src)]);
                }
            }
        }
        // An inner dual corner has two outward steps, one on each side of the
        // corner vertex. Give each step its own leaf so that a dual arm is
        // identified by the inner-ring edge it crosses first.
        if (n1 > 0) {
            const int base_count = count[1];
            for (int f = 0; f < base_count; ++f) {
                const auto sf = static_cast<std::size_t>(f);
                if (!inner[1][sf]) continue;
                int steps = 0;
                for (int dir = 0; dir < 4; ++dir) steps += nbr[1][sf][static_cast<std::size_t>(dir)] >= 0;
                if (steps < 2) continue;
                int moved = -1;
                for (int dir = 3; dir >= 0 && moved < 0; --dir) {
                    if (nbr[1][sf][static_cast<std::size_t>(dir)] >= 0) moved = dir;
                }
                const int leaf = count[1]++;
                const auto sl = static_cast<std::size_t>(leaf);
                points[1].push_back(points[1][sf]);
                angle[1].push_back(angle[1][sf]);
                nbr[1].push_back({-1, -1, -1, -1});
                edge[1].push_back({-1, -1, -1, -1});
                delta[1].push_back({0, 0, 0, 0});
                edge_sheet[1].push_back({0, 0, 0, 0});
                inner[1].push_back(1);
                outer[1].push_back(0);
                out_dir[1].push_back(moved);
                const auto md = static_cast<std::size_t>(moved);
                const int w = nbr[1][sf][md];
                nbr[1][sl][md] = w;
                edge[1][sl][md] = edge[1][sf][md];
                delta[1][sl][md] = delta[1][sf][md];
                edge_sheet[1][sl][md] = edge_sheet[1][sf][md];
                nbr[1][sf][md] = -1;
                const auto back = static_cast<std::size_t>((moved + 2) % 4);
                nbr[1][static_cast<std::size_t>(w)][back] = leaf;
                for (int dir = 0; dir < 4; ++dir) {
                    if (nbr[1][sf][static_cast<std::size_t>(dir)] >= 0) out_dir[1][sf] = dir;
                }
            }
        }
        for (int t = 0; t < 2; ++t) {
            for (int v = 0; v < count[t]; ++v) {
                if (inner[t][static_cast<std::size_t>(v)]) sources[t].push_back(v);
            }
            // corner leaves share a point; order them by the side they leave through
            std::vector<double> key(static_cast<std::size_t>(count[t]));
            for (int v : sources[t]) {
                const auto sv = static_cast<std::size_t>(v);
                const int dir = out_dir[t][sv];
                const HalfPoint h = points[t][sv];
                const HalfPoint ahead{h.x2 + kDirections[static_cast<std::size_t>(dir)][0],
                                      h.y2 + kDirections[static_cast<std::size_t>(dir)][1]};
                double turn = base_angle(ahead, c) - angle[t][sv];
                while (turn > std::numbers::pi) turn -= kTwoPi;
                while (turn <= -std::numbers::pi) turn += kTwoPi;
                key[sv] = angle[t][sv] + 1e-6 * turn;
            }
            std::sort(sources[t].begin(), sources[t].end(), [&](int a, int b) {
                return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)];
            });
        }
    }

    static bool usable(const std::vector<std::uint8_t>& open, int t, int e) {
        const bool o = open[static_cast<std::size_t>(e)] != 0;
        return t == 0 ? o : !o;
    }

    std::uint32_t& mark(int t, int v, int off) {
        auto& layer = stamp[t];
        if (layer.size() <= static_cast<std::size_t>(off)) layer.resize(static_cast<std::size_t>(off) + 1);
        auto& row = layer[static_cast<std::size_t>(off)];
        if (row.empty()) row.assign(static_cast<std::size_t>(count[t]), 0);
        return row[static_cast<std::size_t>(v)];
    }

    // Clockwise-most minimal arm of type t avoiding `R`, by right-first search
    // from the inner sources in order of increasing lifted angle.
    std::optional<LiftedPath> extremal_arm(const Region& R, int t, const std::vector<std::uint8_t>& open) {
        ++epoch;
        if (epoch == 0) {
            for (auto& layer : stamp) layer.clear();
            epoch = 1;
        }
        const int span = (R.top() - R.base) + (n2 - n1) + 4;
        struct Frame {
            int v, s, in, tried;
        };
        std::vector<Frame> stack;
        for (int off = 0; off < span; ++off) {
            const int s0 = R.base + off;
            for (int src : sources[t]) {
                if (R.blocked(t, src, s0)) continue;
                std::uint32_t& m0 = mark(t, src, off);
                if (m0 == epoch) continue;
                m0 = epoch;
                stack.clear();
                stack.push_back({src, s0, out_dir[t][static_cast<std::size_t>(src)], 0});
                while (!stack.empty()) {
                    Frame& f = stack.back();
                    if (f.tried == 3) {
                        stack.pop_back();
                        continue;
                    }
                    static constexpr int kTurn[3] = {3, 0, 1};  // right, straight, left
                    const int dir = (f.in + kTurn[f.tried++]) % 4;
                    const auto sv = static_cast<std::size_t>(f.v);
                    const int w = nbr[t][sv][static_cast<std::size_t>(dir)];
                    if (w < 0) continue;
                    if (!usable(open, t, edge[t][sv][static_cast<std::size_t>(dir)])) continue;
                    const auto sw = static_cast<std::size_t>(w);
                    if (inner[t][sw]) continue;
                    const int s = f.s + delta[t][sv][static_cast<std::size_t>(dir)];
                    if (R.blocked(t, w, s)) continue;
                    const int woff = s - R.base;
                    if (woff >= span) throw std::runtime_error("arm detector exceeded its sheet window");
                    std::uint32_t& mw = mark(t, w, woff);
                    if (mw == epoch) continue;
                    mw = epoch;
                    if (outer[t][sw]) {
                        LiftedPath path;
                        path.reserve(stack.size() + 1);
                        for (const Frame& fr : stack) path.push_back({fr.v, fr.s});
                        path.push_back({w, s});
                        return path;
                    }
                    stack.push_back({w, s, dir, 0});
                }
            }
        }
        return std::nullopt;
    }

    static std::int64_t lifted_key(int id, int sheet) {
        return (static_cast<std::int64_t>(sheet) << 32) ^ static_cast<std::int64_t>(static_cast<std::uint32_t>(id));
    }

    // gamma together with everything on its clockwise side.
    Region left_side(const LiftedPath& gamma, int t) {
        int lo = gamma.front().sheet, hi = lo;
        for (const auto& lv : gamma) {
            lo = std::min(lo, lv.sheet);
            hi = std::max(hi, lv.sheet);
        }
        Region G;
        G.base = lo - 1;
        const int width = hi - lo + 3;
        for (int u = 0; u < 2; ++u) {
            G.flags[u].assign(static_cast<std::size_t>(width), std::vector<std::uint8_t>(static_cast<std::size_t>(count[u]), 0));
        }
        std::unordered_set<std::int64_t> on_path, cut_edges;
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            on_path.insert(lifted_key(gamma[i].v, gamma[i].sheet));
            if (i + 1 == gamma.size()) break;
            const auto sv = static_cast<std::size_t>(gamma[i].v);
            for (int dir = 0; dir < 4; ++dir) {
                if (nbr[t][sv][static_cast<std::size_t>(dir)] == gamma[i + 1].v &&
                    gamma[i].sheet + delta[t][sv][static_cast<std::size_t>(dir)] == gamma[i + 1].sheet) {
                    cut_edges.insert(lifted_key(edge[t][sv][static_cast<std::size_t>(dir)],
                                                gamma[i].sheet + edge_sheet[t][sv][static_cast<std::size_t>(dir)]));
                    break;
                }
            }
        }
        for (const auto& lv : gamma) G.flags[t][static_cast<std::size_t>(lv.sheet - G.base)][static_cast<std::size_t>(lv.v)] = 1;
        for (int u = 0; u < 2; ++u) {
            auto& fl = G.flags[u];
            std::deque<LiftedVertex> queue;
            for (int v = 0; v < count[u]; ++v) {
                fl[0][static_cast<std::size_t>(v)] = 1;
                queue.push_back({v, G.base});
            }
            while (!queue.empty()) {
                const LiftedVertex cur = queue.front();
                queue.pop_front();
                const auto sv = static_cast<std::size_t>(cur.v);
                for (int dir = 0; dir < 4; ++dir) {
                    const int w = nbr[u][sv][static_cast<std::size_t>(dir)];
                    if (w < 0) continue;
                    const int s = cur.sheet + delta[u][sv][static_cast<std::size_t>(dir)];
                    if (s < G.base || s > hi + 1) continue;
                    auto& f = fl[static_cast<std::size_t>(s - G.base)][static_cast<std::size_t>(w)];
                    if (f) continue;
                    if (u == t && on_path.count(lifted_key(w, s))) continue;
                    if (u != t) {
                        const int e = edge[u][sv][static_cast<std::size_t>(dir)];
                        const int es = cur.sheet + edge_sheet[u][sv][static_cast<std::size_t>(dir)];
                        if (u == 1 && cut_edges.count(lifted_key(e, es))) continue;
                        if (u == 0 && crosses_dual_path(cut_edges, e, es)) continue;
                    }
                    f = 1;
                    queue.push_back({w, s});
                }
            }
        }
        return G;
    }

    // A dual path records the lifted primal edges it crosses.
    static bool crosses_dual_path(const std::unordered_set<std::int64_t>& cut, int e, int es) {
        return cut.count(lifted_key(e, es)) != 0;
    }

    static void normalize(Region& R) {
        auto full = [&](std::size_t off) {
            for (int u = 0; u < 2; ++u) {
                const auto& row = R.flags[u][off];
                if (std::find(row.begin(), row.end(), 0) != row.end()) return false;
            }
            return true;
        };
        std::size_t drop = 0;
        while (drop < R.flags[0].size() && full(drop)) ++drop;
        if (drop) {
            for (int u = 0; u < 2; ++u) R.flags[u].erase(R.flags[u].begin(), R.flags[u].begin() + static_cast<long>(drop));
            R.base += static_cast<int>(drop);
        }
        auto empty = [&](std::size_t off) {
            for (int u = 0; u < 2; ++u) {
                const auto& row = R.flags[u][off];
                if (std::find(row.begin(), row.end(), 1) != row.end()) return false;
            }
            return true;
        };
        while (!R.flags[0].empty() && empty(R.flags[0].size() - 1)) {
            for (int u = 0; u < 2; ++u) R.flags[u].pop_back();
        }
    }

    // Is G shifted by `shift` sheets contained in R?
    static bool contained(const Region& G, int shift, const Region& R) {
        if (G.base + shift > R.base) return false;
        for (int u = 0; u < 2; ++u) {
            for (std::size_t off = 0; off < G.flags[u].size(); ++off) {
                const int s = G.base + shift + static_cast<int>(off);
                const auto& row = G.flags[u][off];
                for (std::size_t v = 0; v < row.size(); ++v) {
                    if (row[v] && !R.blocked(u, static_cast<int>(v), s)) return false;
                }
            }
        }
        return true;
    }

    void unite(Region& R, const Region& G, int shift) const {
        const int gbase = G.base + shift;
        if (gbase > R.base) {
            const auto drop = static_cast<std::size_t>(std::min(gbase - R.base, static_cast<int>(R.flags[0].size())));
            for (int u = 0; u < 2; ++u) R.flags[u].erase(R.flags[u].begin(), R.flags[u].begin() + static_cast<long>(drop));
            R.base = gbase;
        }
        for (int u = 0; u < 2; ++u) {
            for (std::size_t off = 0; off < G.flags[u].size(); ++off) {
                const int s = gbase + static_cast<int>(off);
                if (s < R.base) continue;
                const auto roff = static_cast<std::size_t>(s - R.base);
                while (R.flags[u].size() <= roff) {
                    R.flags[u].emplace_back(static_cast<std::size_t>(count[u]), 0);
                }
                auto& dst = R.flags[u][roff];
                const auto& src = G.flags[u][off];
                for (std::size_t v = 0; v < src.size(); ++v) dst[v] |= src[v];
            }
        }
        const std::size_t n = std::max(R.flags[0].size(), R.flags[1].size());
        for (int u = 0; u < 2; ++u) {
            while (R.flags[u].size() < n) R.flags[u].emplace_back(static_cast<std::size_t>(count[u]), 0);
        }
        normalize(R);
    }

    static std::string shape(const Region& R) {
        std::string key;
        for (int u = 0; u < 2; ++u) {
            key.push_back(static_cast<char>('0' + u));
            for (const auto& row : R.flags[u]) key.append(row.begin(), row.end());
        }
        return key;
    }

    ArmPath project(const LiftedPath& p, int t) const {
        ArmPath a;
        a.colour = t == 0 ? Colour::Open : Colour::DualClosed;
        for (const auto& lv : p) {
            if (t == 0) {
                a.primal.push_back(annulus->vertices()[static_cast<std::size_t>(lv.v)]);
            } else {
                a.dual.push_back(points[1][static_cast<std::size_t>(lv.v)]);
            }
        }
        return a;
    }

    ArmResult single(const std::vector<std::uint8_t>& open, int t) {
        // breadth-first search from every inner source; the first outer hit
        // closes a shortest, hence minimal, arm
        const auto n = static_cast<std::size_t>(count[t]);
        std::vector<int> parent(n, -2);
        std::deque<int> queue;
        for (int s : sources[t]) {
            parent[static_cast<std::size_t>(s)] = -1;
            queue.push_back(s);
        }
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            const auto sv = static_cast<std::size_t>(v);
            for (int dir = 0; dir < 4; ++dir) {
                const int w = nbr[t][sv][static_cast<std::size_t>(dir)];
                if (w < 0 || parent[static_cast<std::size_t>(w)] != -2) continue;
                if (!usable(open, t, edge[t][sv][static_cast<std::size_t>(dir)])) continue;
                parent[static_cast<std::size_t>(w)] = v;
                if (outer[t][static_cast<std::size_t>(w)]) {
                    LiftedPath p;
                    for (int x = w; x != -1; x = parent[static_cast<std::size_t>(x)]) p.push_back({x, 0});
                    std::reverse(p.begin(), p.end());
                    return {true, std::vector<ArmPath>{project(p, t)}};
                }
                queue.push_back(w);
            }
        }
        return {false, std::nullopt};
    }

    ArmResult detect(const std::vector<std::uint8_t>& open, const Sigma& sigma) {
        if (open.size() != static_cast<std::size_t>(annulus->edge_count())) {
            throw std::invalid_argument("edge state vector does not match the annulus");
        }
        ArmSpec{annulus, sigma}.validate();
        const int k = static_cast<int>(sigma.size());
        auto type_of = [](Colour col) { return col == Colour::Open ? 0 : 1; };
        if (k == 1) return single(open, type_of(sigma[0]));
        for (Colour col : sigma) {
            if (!single(open, type_of(col)).occurs) return {false, std::nullopt};
        }

        Region R;
        R.base = 0;
        std::map<std::string, int> seen;
        constexpr int kMaxRounds = 100000;
        for (int round = 0; round < kMaxRounds; ++round) {
            std::vector<LiftedPath> chain;
            Region W = R;
            for (int i = 0; i < k; ++i) {
                const int t = type_of(sigma[static_cast<std::size_t>(i)]);
                auto arm = extremal_arm(W, t, open);
                if (!arm) return {false, std::nullopt};
                const Region side = left_side(*arm, t);
                unite(W, side, 0);
                chain.push_back(std::move(*arm));
            }
            const Region last = left_side(chain.back(), type_of(sigma.back()));
            if (contained(last, -1, R)) {
                std::vector<ArmPath> witness;
                for (int i = 0; i < k; ++i) witness.push_back(project(chain[static_cast<std::size_t>(i)], type_of(sigma[static_cast<std::size_t>(i)])));
                return {true, std::move(witness)};
            }
            unite(R, last, -1);
            auto [it, fresh] = seen.emplace(shape(R), R.base);
            if (!fresh) {
                // same shape one or more deck shifts further on: the region
                // grows without bound, so no admissible family exists
                if (R.base > it->second) return {false, std::nullopt};
                throw std::logic_error("arm detector revisited a region");
            }
        }
        throw std::runtime_error("arm detector did not converge");
    }
};

ArmDetector::ArmDetector(std::shared_ptr<const AnnulusDomain> annulus) {
    if (!annulus) throw InvalidArmSpec("arm detector needs an annulus");
    impl_ = std::make_unique<Impl>(std::move(annulus));
}
ArmDetector::~ArmDetector() = default;
ArmDetector::ArmDetector(ArmDetector&&) noexcept = default;
ArmDetector& ArmDetector::operator=(ArmDetector&&) noexcept = default;

const AnnulusDomain& ArmDetector::annulus() const { return *impl_->annulus; }

ArmResult ArmDetector::detect(const std::vector<std::uint8_t>& open, const Sigma& sigma) {
    return impl_->detect(open, sigma);
}

ArmResult ArmDetector::detect(const Configuration& config, const Sigma& sigma) {
    return impl_->detect(config.bits(), sigma);
}

ArmResult detect_arm_event(const Configuration& config, const ArmSpec& spec) {
    spec.validate();
    if (&config.domain() != spec.annulus.get() && config.size() != static_cast<std::size_t>(spec.annulus->edge_count())) {
        throw std::invalid_argument("configuration does not live on the arm annulus");
    }
    ArmDetector det(spec.annulus);
    return det.detect(config.bits(), spec.sigma);
}

// ---------------------------------------------------------------- max-flow

int count_disjoint_open_crossings(const Configuration& config, const AnnulusDomain& annulus) {
    using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
    using Graph = boost::adjacency_list<
        boost::vecS, boost::vecS, boost::directedS, boost::no_property,
        boost::property<boost::edge_capacity_t, long,
                        boost::property<boost::edge_residual_capacity_t, long,
                                        boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
    const int n = annulus.vertex_count();
    // vertex v splits into in = 2v and out = 2v + 1
    Graph g(static_cast<std::size_t>(2 * n + 2));
    const auto source = static_cast<std::size_t>(2 * n);
    const auto sink = static_cast<std::size_t>(2 * n + 1);
    auto cap = boost::get(boost::edge_capacity, g);
    auto rev = boost::get(boost::edge_reverse, g);
    auto arc = [&](std::size_t a, std::size_t b, long c) {
        auto e1 = boost::add_edge(a, b, g).first;
        auto e2 = boost::add_edge(b, a, g).first;
        cap[e1] = c;
        cap[e2] = 0;
        rev[e1] = e2;
        rev[e2] = e1;
    };
    const Vertex c = annulus.center();
    for (int v = 0; v < n; ++v) {
        const auto sv = static_cast<std::size_t>(v);
        arc(2 * sv, 2 * sv + 1, 1);
        const int d = sup_norm(annulus.vertices()[sv], c);
        if (d == annulus.n1()) arc(source, 2 * sv, 1);
        if (d == annulus.n2()) arc(2 * sv + 1, sink, 1);
    }
    for (int e = 0; e < annulus.edge_count(); ++e) {
        if (!config.open(e)) continue;
        const auto a = static_cast<std::size_t>(annulus.edge_source(e));
        const auto b = static_cast<std::size_t>(annulus.edge_target(e));
        arc(2 * a + 1, 2 * b, 1);
        arc(2 * b + 1, 2 * a, 1);
    }
    return static_cast<int>(boost::push_relabel_max_flow(g, source, sink));
}

bool detect_poly_arm(const Configuration& config, const AnnulusDomain& annulus, int j) {
    if (j < 3) throw std::invalid_argument("poly-arm events need j >= 3");
    // open paths never cross a dual-closed path, so the cut changes nothing
    // beyond requiring the dual arm to exist
    ArmDetector det(std::shared_ptr<const AnnulusDomain>(std::shared_ptr<const AnnulusDomain>{}, &annulus));
    if (!det.detect(config.bits(), Sigma{Colour::DualClosed}).occurs) return false;
    return count_disjoint_open_crossings(config, annulus) >= j - 1;
}

// ------------------------------------------------------------ brute force

namespace {

struct OracleArm {
    Colour colour;
    int position;  // 2 * ring index for primal starts, 2 * edge index + 1 for dual
    std::vector<int> used;
};

void enumerate_primal(const Configuration& config, const AnnulusDomain& a, std::vector<OracleArm>& out) {
    const Vertex c = a.center();
    const auto inner_ring = ring(c, a.n1());
    std::vector<std::uint8_t> on_path(static_cast<std::size_t>(a.vertex_count()), 0);
    std::vector<int> path;
    for (std::size_t i = 0; i < inner_ring.size(); ++i) {
        const int start = a.find_vertex(inner_ring[i]);
        std::function<void(int)> walk = [&](int v) {
            path.push_back(v);
            on_path[static_cast<std::size_t>(v)] = 1;
            const bool at_outer = sup_norm(a.vertices()[static_cast<std::size_t>(v)], c) == a.n2();
            if (at_outer) {
                out.push_back({Colour::Open, static_cast<int>(2 * i), path});
            } else {
                for (int dir = 0; dir < 4; ++dir) {
                    const int e = a.incident(v, dir);
                    if (e < 0 || !config.open(e)) continue;
                    const int w = a.neighbour(v, dir);
                    if (on_path[static_cast<std::size_t>(w)]) continue;
                    if (sup_norm(a.vertices()[static_cast<std::size_t>(w)], c) == a.n1()) continue;
                    walk(w);
                }
            }
            on_path[static_cast<std::size_t>(v)] = 0;
            path.pop_back();
        };
        walk(start);
    }
}

void enumerate_dual(const Configuration& config, const AnnulusDomain& a, std::vector<OracleArm>& out) {
    const Vertex c = a.center();
    const DualGraph g(a);
    const int in2 = a.n1() == 0 ? 1 : 2 * a.n1() - 1;
    const int out2 = 2 * a.n2() + 1;
    const auto inner_ring = ring(c, a.n1());
    auto position = [&](int e) {
        // ring index of the crossed inner-ring edge
        if (a.n1() == 0) return 1;
        const Edge& ed = a.edges()[static_cast<std::size_t>(e)];
        for (std::size_t i = 0; i < inner_ring.size(); ++i) {
            const Vertex u = inner_ring[i], w = inner_ring[(i + 1) % inner_ring.size()];
            if ((ed.a == u && ed.b == w) || (ed.a == w && ed.b == u)) return static_cast<int>(2 * i + 1);
        }
        return -1;
    };
    std::vector<std::uint8_t> on_path(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<int> path;
    int first_edge = -1;
    std::function<void(int)> walk = [&](int f) {
        path.push_back(f);
        on_path[static_cast<std::size_t>(f)] = 1;
        if (sup2(g.point(f), c) == out2) {
            // the inner dual endpoint is shared by the two sides of a corner
            out.push_back({Colour::DualClosed, position(first_edge), std::vector<int>(path.begin() + 1, path.end())});
        } else {
            for (int dir = 0; dir < 4; ++dir) {
                const int w = g.neighbour(f, dir);
                if (w < 0 || config.open(g.crossed(f, dir))) continue;
                if (on_path[static_cast<std::size_t>(w)] || sup2(g.point(w), c) == in2) continue;
                if (path.size() == 1) first_edge = g.crossed(f, dir);
                walk(w);
            }
        }
        on_path[static_cast<std::size_t>(f)] = 0;
        path.pop_back();
    };
    for (int f = 0; f < g.vertex_count(); ++f) {
        if (sup2(g.point(f), c) == in2) walk(f);
    }
}

}  // namespace

bool brute_force_arm_oracle(const Configuration& config, const ArmSpec& spec) {
    spec.validate();
    const AnnulusDomain& a = *spec.annulus;
    if (a.edge_count() > kOracleMaxEdges) {
        throw SizeCapExceeded("arm oracle is limited to " + std::to_string(kOracleMaxEdges) + " edges");
    }
    std::vector<OracleArm> arms;
    enumerate_primal(config, a, arms);
    enumerate_dual(config, a, arms);
    std::stable_sort(arms.begin(), arms.end(), [](const OracleArm& x, const OracleArm& y) { return x.position < y.position; });
    const std::size_t k = spec.sigma.size();
    const DualGraph g(a);
    std::vector<int> used_p(static_cast<std::size_t>(a.vertex_count()), 0);
    std::vector<int> used_d(static_cast<std::size_t>(g.vertex_count()), 0);
    std::set<std::string> done;
    for (std::size_t r = 0; r < k; ++r) {
        const Sigma tau = rotate(spec.sigma, r);
        if (!done.insert(to_string(tau)).second) continue;
        std::function<bool(std::size_t, int)> place = [&](std::size_t i, int after) -> bool {
            if (i == k) return true;
            for (const OracleArm& arm : arms) {
                if (arm.position <= after || arm.colour != tau[i]) continue;
                auto& used = arm.colour == Colour::Open ? used_p : used_d;
                bool free = true;
                for (int v : arm.used) free = free && used[static_cast<std::size_t>(v)] == 0;
                if (!free) continue;
                for (int v : arm.used) used[static_cast<std::size_t>(v)] = 1;
                const bool ok = place(i + 1, arm.position);
                for (int v : arm.used) used[static_cast<std::size_t>(v)] = 0;
                if (ok) return true;
            }
            return false;
        };
        if (place(0, -1)) return true;
    }
    return false;
}

// --------------------------------------------------------------- witnesses

bool validate_witness(const Configuration& config, const ArmSpec& spec, const std::vector<ArmPath>& witness,
                      std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const AnnulusDomain& a = *spec.annulus;
    const Vertex c = a.center();
    if (witness.size() != spec.sigma.size()) return fail("wrong number of arms");
    const auto inner_ring = ring(c, a.n1());
    std::set<Vertex> seen_p;
    std::set<HalfPoint> seen_d;
    std::vector<std::pair<double, Colour>> starts;
    for (const ArmPath& arm : witness) {
        if (arm.colour == Colour::Open) {
            const auto& p = arm.primal;
            if (p.empty() || !arm.dual.empty()) return fail("open arm must list primal vertices only");
            if (sup_norm(p.front(), c) != a.n1()) return fail("open arm does not start on the inner ring");
            if (sup_norm(p.back(), c) != a.n2()) return fail("open arm does not end on the outer ring");
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (!seen_p.insert(p[i]).second) return fail("open arms share a vertex");
                if (i + 1 < p.size()) {
                    const int dx = std::abs(p[i].x - p[i + 1].x), dy = std::abs(p[i].y - p[i + 1].y);
                    if (dx + dy != 1) return fail("open arm has a non-adjacent step");
                    const int e = a.find_edge(p[i], p[i + 1]);
                    if (e < 0) return fail("open arm leaves the annulus");
                    if (!config.open(e)) return fail("open arm uses a closed edge");
                }
            }
            const auto it = std::find(inner_ring.begin(), inner_ring.end(), p.front());
            starts.push_back({2.0 * static_cast<double>(it - inner_ring.begin()), arm.colour});
        } else {
            const auto& d = arm.dual;
            if (d.size() < 2 || !arm.primal.empty()) return fail("dual arm must list dual vertices only");
            const int in2 = a.n1() == 0 ? 1 : 2 * a.n1() - 1;
            if (sup2(d.front(), c) != in2) return fail("dual arm does not start next to the inner ring");
            if (sup2(d.back(), c) != 2 * a.n2() + 1) return fail("dual arm does not end beyond the outer ring");
            double pos = -1.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                if ((d[i].x2 & 1) == 0 || (d[i].y2 & 1) == 0) return fail("dual arm visits a primal point");
                if (i > 0 && !seen_d.insert(d[i]).second) return fail("dual arms share a dual vertex");
                if (i + 1 < d.size()) {
                    const int dx = std::abs(d[i].x2 - d[i + 1].x2), dy = std::abs(d[i].y2 - d[i + 1].y2);
                    if (dx + dy != 2) return fail("dual arm has a non-adjacent step");
                    const Edge crossed = primal_of({d[i], d[i + 1]});
                    const int e = a.find_edge(crossed);
                    if (e < 0) return fail("dual arm crosses an edge outside the annulus");
                    if (config.open(e)) return fail("dual arm crosses an open edge");
                    if (i == 0) {
                        for (std::size_t j = 0; j < inner_ring.size(); ++j) {
                            const Edge re = make_edge(inner_ring[j], inner_ring[(j + 1) % inner_ring.size()]);
                            if (re == crossed) pos = 2.0 * static_cast<double>(j) + 1.0;
                        }
                    }
                }
            }
            if (a.n1() > 0 && pos < 0) return fail("dual arm does not leave through the inner ring");
            starts.push_back({pos, arm.colour});
        }
    }
    std::sort(starts.begin(), starts.end());
    Sigma order;
    for (const auto& s : starts) order.push_back(s.second);
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (rotate(order, r) == spec.sigma) return true;
    }
    return fail("arm colours are not in the cyclic order " + to_string(spec.sigma));
}

}  // namespace rclab
