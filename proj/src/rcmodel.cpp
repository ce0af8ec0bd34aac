#include "rclab/rcmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace rclab {

Params Params::make(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge weight p must lie in [0, 1]");
    if (!(q >= 1.0 && q <= 4.0)) throw DomainError("cluster weight q must lie in [1, 4]");
    return Params{p, q};
}

Params Params::critical(double q) { return make(critical_point(q), q); }

double critical_point(double q) {
    if (!(q > 0.0)) throw DomainError("critical_point requires q > 0");
    const double s = std::sqrt(q);
    return s / (1.0 + s);
}

double dual_parameter(double p, double q) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("dual_parameter requires 0 < p < 1");
    if (!(q > 0.0)) throw DomainError("dual_parameter requires q > 0");
    // p* p / ((1-p*)(1-p)) = q  =>  p* = q(1-p) / (p + q(1-p))
    const double a = q * (1.0 - p);
    return a / (p + a);
}

// ---------------------------------------------------------------- boundary

BoundaryCondition BoundaryCondition::free(const Domain& domain) {
    BoundaryCondition bc;
    bc.label_.resize(domain.boundary().size());
    std::iota(bc.label_.begin(), bc.label_.end(), 0);
    return bc;
}

BoundaryCondition BoundaryCondition::wired(const Domain& domain) {
    BoundaryCondition bc;
    bc.label_.assign(domain.boundary().size(), 0);
    return bc;
}

BoundaryCondition BoundaryCondition::from_labels(std::vector<int> labels) {
    std::map<int, int> first;
    for (std::size_t i = 0; i < labels.size(); ++i) first.emplace(labels[i], static_cast<int>(i));
    BoundaryCondition bc;
    bc.label_.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) bc.label_[i] = first.at(labels[i]);
    return bc;
}

BoundaryCondition BoundaryCondition::from_classes(const Domain& domain,
                                                  const std::vector<std::vector<Vertex>>& classes) {
    std::vector<int> labels(domain.boundary().size());
    std::iota(labels.begin(), labels.end(), 0);
    const int offset = static_cast<int>(labels.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (const Vertex& v : classes[c]) {
            const int id = domain.find_vertex(v);
            const int pos = id == Domain::kNone ? Domain::kNone : domain.boundary_position(id);
            if (pos == Domain::kNone) throw InvalidGeometry("boundary class lists a non-boundary vertex");
            if (labels[static_cast<std::size_t>(pos)] >= offset) throw InvalidGeometry("vertex listed in two classes");
            labels[static_cast<std::size_t>(pos)] = offset + static_cast<int>(c);
        }
    }
    return from_labels(std::move(labels));
}

bool BoundaryCondition::is_free() const {
    for (std::size_t i = 0; i < label_.size(); ++i) {
        if (label_[i] != static_cast<int>(i)) return false;
    }
    return true;
}

bool BoundaryCondition::is_wired() const {
    return std::all_of(label_.begin(), label_.end(), [](int l) { return l == 0; });
}

std::vector<std::vector<int>> BoundaryCondition::classes() const {
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < label_.size(); ++i) groups[label_[i]].push_back(static_cast<int>(i));
    std::vector<std::vector<int>> out;
    for (auto& [_, members] : groups) out.push_back(std::move(members));
    return out;
}

const char* BoundaryCondition::name() const {
    if (is_free()) return "free";
    if (is_wired()) return "wired";
    return "custom";
}

// ------------------------------------------------------------ configuration

Configuration::Configuration(std::shared_ptr<const Domain> domain, bool open) : domain_(std::move(domain)) {
    bits_.assign(static_cast<std::size_t>(domain_->edge_count()), open ? 1 : 0);
}

Configuration Configuration::from_mask(std::shared_ptr<const Domain> domain, std::uint64_t mask) {
    Configuration c(std::move(domain));
    for (std::size_t i = 0; i < c.bits_.size(); ++i) c.bits_[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    return c;
}

int Configuration::open_count() const {
    return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t Configuration::mask() const {
    if (bits_.size() > 64) throw SizeCapExceeded("mask() needs at most 64 edges");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) m |= static_cast<std::uint64_t>(bits_[i]) << i;
    return m;
}

// --------------------------------------------------------------- union-find

void UnionFind::reset(int n) {
    parent_.resize(static_cast<std::size_t>(n));
    std::iota(parent_.begin(), parent_.end(), 0);
    size_.assign(static_cast<std::size_t>(n), 1);
    components_ = n;
}

int UnionFind::find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
        auto& px = parent_[static_cast<std::size_t>(x)];
        px = parent_[static_cast<std::size_t>(px)];
        x = px;
    }
    return x;
}

bool UnionFind::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    --components_;
    return true;
}

Wiring::Wiring(const Domain& domain, const BoundaryCondition& bc) {
    if (bc.size() != domain.boundary().size()) throw InvalidGeometry("boundary condition does not match domain");
    class_of_.assign(static_cast<std::size_t>(domain.vertex_count()), -1);
    for (const auto& cls : bc.classes()) {
        if (cls.size() < 2) continue;
        std::vector<int> members;
        for (int pos : cls) members.push_back(domain.boundary()[static_cast<std::size_t>(pos)]);
        for (int v : members) class_of_[static_cast<std::size_t>(v)] = static_cast<int>(classes_.size());
        classes_.push_back(std::move(members));
    }
}

void Wiring::merge_into(UnionFind& uf) const {
    for (const auto& cls : classes_) {
        for (std::size_t i = 1; i < cls.size(); ++i) uf.unite(cls[0], cls[i]);
    }
}

// ------------------------------------------------------------------ weights

int cluster_count(const Configuration& config, const BoundaryCondition& bc) {
    const Domain& d = config.domain();
    UnionFind uf(d.vertex_count());
    Wiring(d, bc).merge_into(uf);
    for (int e = 0; e < d.edge_count(); ++e) {
        if (config.open(e)) uf.unite(d.edge_source(e), d.edge_target(e));
    }
    return uf.components();
}

namespace {

double xlogy(int count, double y) {
    if (count == 0) return 0.0;
    return static_cast<double>(count) * std::log(y);  // log(0) = -inf
}

}  // namespace

WeightBreakdown log_weight(const Configuration& config, const Params& params, const BoundaryCondition& bc) {
    WeightBreakdown w;
    w.open = config.open_count();
    w.closed = static_cast<int>(config.size()) - w.open;
    w.clusters = cluster_count(config, bc);
    w.log_weight = xlogy(w.open, params.p) + xlogy(w.closed, 1.0 - params.p) + w.clusters * std::log(params.q);
    return w;
}

// -------------------------------------------------------------- exact table

ExactTable::ExactTable(std::shared_ptr<const Domain> domain, Params params, BoundaryCondition bc)
    : domain_(std::move(domain)), params_(params), bc_(std::move(bc)) {
    const int m = domain_->edge_count();
    if (m > kMaxEdges) {
        throw SizeCapExceeded("exact enumeration refused: " + std::to_string(m) + " edges exceeds cap of " +
                              std::to_string(kMaxEdges));
    }
    const std::size_t count = std::size_t{1} << m;
    const Wiring wiring(*domain_, bc_);
    UnionFind base(domain_->vertex_count());
    wiring.merge_into(base);
    const double lp = params_.p > 0 ? std::log(params_.p) : -std::numeric_limits<double>::infinity();
    const double lc = params_.p < 1 ? std::log1p(-params_.p) : -std::numeric_limits<double>::infinity();
    const double lq = std::log(params_.q);

    std::vector<double> logw(count);
    UnionFind uf;
    for (std::size_t mask = 0; mask < count; ++mask) {
        uf = base;
        int open = 0;
        for (int e = 0; e < m; ++e) {
            if ((mask >> e) & 1U) {
                ++open;
                uf.unite(domain_->edge_source(e), domain_->edge_target(e));
            }
        }
        const int closed = m - open;
        logw[mask] = (open ? open * lp : 0.0) + (closed ? closed * lc : 0.0) + uf.components() * lq;
    }
    // streaming log-sum-exp in index order
    double mx = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double lw : logw) {
        if (lw == -std::numeric_limits<double>::infinity()) continue;
        if (lw > mx) {
            acc = acc * std::exp(mx - lw) + 1.0;
            mx = lw;
        } else {
            acc += std::exp(lw - mx);
        }
    }
    log_z_ = mx + std::log(acc);
    prob_.resize(count);
    cdf_.resize(count);
    double run = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        prob_[i] = std::exp(logw[i] - log_z_);
        run += prob_[i];
        cdf_[i] = run;
    }
}

std::uint64_t ExactTable::sample_index(double u) const {
    const double target = u * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    if (it == cdf_.end()) --it;
    // skip zero-probability cells that share the cumulative value
    auto idx = static_cast<std::uint64_t>(it - cdf_.begin());
    while (prob_[idx] == 0.0 && idx + 1 < prob_.size()) ++idx;
    return idx;
}

ExactTable exact_distribution(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc) {
    return ExactTable(std::move(domain), params, bc);
}

double exact_event_probability(const ExactTable& table, const std::function<bool(const Configuration&)>& predicate) {
    double total = 0.0;
    Configuration c(table.domain_ptr());
    for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
        for (std::size_t i = 0; i < c.size(); ++i) c.set(static_cast<int>(i), (mask >> i) & 1U);
        if (predicate(c)) total += table.probability(mask);
    }
    return total;
}

double exact_event_probability(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc,
                               const std::function<bool(const Configuration&)>& predicate) {
    return exact_event_probability(exact_distribution(std::move(domain), params, bc), predicate);
}

// -------------------------------------------------------------- domain Markov

BoundaryCondition induced_boundary_condition(const Configuration& outer, const BoundaryCondition& outer_bc,
                                             const Domain& subdomain) {
    const Domain& d = outer.domain();
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(d.edge_count()), 0);
    for (const Edge& e : subdomain.edges()) {
        const int id = d.find_edge(e);
        if (id == Domain::kNone) throw InvalidGeometry("subdomain is not contained in the outer domain");
        inside[static_cast<std::size_t>(id)] = 1;
    }
    UnionFind uf(d.vertex_count());
    Wiring(d, outer_bc).merge_into(uf);
    for (int e = 0; e < d.edge_count(); ++e) {
        if (!inside[static_cast<std::size_t>(e)] && outer.open(e)) uf.unite(d.edge_source(e), d.edge_target(e));
    }
    std::vector<int> labels;
    labels.reserve(subdomain.boundary().size());
    for (int sid : subdomain.boundary()) {
        const int id = d.find_vertex(subdomain.vertices()[static_cast<std::size_t>(sid)]);
        labels.push_back(uf.find(id));
    }
    return BoundaryCondition::from_labels(std::move(labels));
}

Configuration restrict_to(const Configuration& outer, std::shared_ptr<const Domain> subdomain) {
    Configuration c(subdomain);
    for (int e = 0; e < subdomain->edge_count(); ++e) {
        const int id = outer.domain().find_edge(subdomain->edges()[static_cast<std::size_t>(e)]);
        if (id == Domain::kNone) throw InvalidGeometry("subdomain is not contained in the outer domain");
        c.set(e, outer.open(id));
    }
    return c;
}

// ------------------------------------------------------------- connectivity

ConnectivityProbe::ConnectivityProbe(const Domain& domain, const Wiring& wiring) : domain_(&domain), wiring_(&wiring) {
    for (int s = 0; s < 2; ++s) {
        mark_[s].assign(static_cast<std::size_t>(domain.vertex_count()), 0);
        class_mark_[s].assign(wiring.classes().size(), 0);
    }
}

bool ConnectivityProbe::connected(const Configuration& config, int a, int b, int skip_edge) {
    if (a == b) return true;
    {
        const int ca = wiring_->class_of(a);
        if (ca >= 0 && ca == wiring_->class_of(b)) return true;
    }
    if (++stamp_ == 0) {
        for (int s = 0; s < 2; ++s) {
            std::fill(mark_[s].begin(), mark_[s].end(), 0);
            std::fill(class_mark_[s].begin(), class_mark_[s].end(), 0);
        }
        stamp_ = 1;
    }
    std::size_t head[2] = {0, 0};
    bool found = false;
    // visit() returns true once the two searches meet
    auto visit = [&](int side, int v) {
        auto& mk = mark_[side];
        if (mk[static_cast<std::size_t>(v)] == stamp_) return;
        if (mark_[1 - side][static_cast<std::size_t>(v)] == stamp_) {
            found = true;
            return;
        }
        mk[static_cast<std::size_t>(v)] = stamp_;
        queue_[side].push_back(v);
    };
    for (int s = 0; s < 2; ++s) queue_[s].clear();
    visit(0, a);
    visit(1, b);
    auto expand_class = [&](int side, int v) {
        const int c = wiring_->class_of(v);
        if (c < 0 || class_mark_[side][static_cast<std::size_t>(c)] == stamp_) return;
        class_mark_[side][static_cast<std::size_t>(c)] = stamp_;
        if (class_mark_[1 - side][static_cast<std::size_t>(c)] == stamp_) {
            found = true;
            return;
        }
        for (int w : wiring_->classes()[static_cast<std::size_t>(c)]) {
            visit(side, w);
            if (found) return;
        }
    };
    expand_class(0, a);
    if (!found) expand_class(1, b);
    int side = 0;
    while (!found) {
        if (head[side] == queue_[side].size()) return false;  // this side's cluster is exhausted
        const int v = queue_[side][head[side]++];
        for (int dir = 0; dir < 4 && !found; ++dir) {
            const int e = domain_->incident(v, dir);
            if (e == Domain::kNone || e == skip_edge || !config.open(e)) continue;
            const int w = domain_->neighbour(v, dir);
            const bool fresh = mark_[side][static_cast<std::size_t>(w)] != stamp_;
            visit(side, w);
            if (!found && fresh) expand_class(side, w);
        }
        side = 1 - side;
    }
    return true;
}

double heat_bath_open_probability(const Configuration& config, int edge, const Params& params,
                                  const BoundaryCondition& bc) {
    const Domain& d = config.domain();
    if (edge < 0 || edge >= d.edge_count()) throw InvalidGeometry("edge not in domain");
    const Wiring wiring(d, bc);
    ConnectivityProbe probe(d, wiring);
    if (probe.connected(config, d.edge_source(edge), d.edge_target(edge), edge)) return params.p;
    return params.p / (params.p + (1.0 - params.p) * params.q);
}

}  // namespace rclab
