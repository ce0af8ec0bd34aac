#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rclab/lattice.hpp"

namespace rclab {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SizeCapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Edge weight p and cluster weight q of the random-cluster measure.
struct Params {
    double p = 0.5;
    double q = 1.0;

    /// Validates 0 <= p <= 1 and 1 <= q <= 4.
    static Params make(double p, double q);
    static Params critical(double q);
};

double critical_point(double q);
double dual_parameter(double p, double q);

/// Partition of a domain's boundary. label()[i] is the smallest boundary
/// position in the class of boundary position i.
class BoundaryCondition {
public:
    static BoundaryCondition free(const Domain& domain);
    static BoundaryCondition wired(const Domain& domain);
    /// Classes given as vertex lists; unlisted boundary vertices are singletons.
    static BoundaryCondition from_classes(const Domain& domain, const std::vector<std::vector<Vertex>>& classes);
    /// Canonicalizes arbitrary per-position labels.
    static BoundaryCondition from_labels(std::vector<int> labels);

    const std::vector<int>& label() const { return label_; }
    std::size_t size() const { return label_.size(); }
    bool is_free() const;
    bool is_wired() const;
    std::vector<std::vector<int>> classes() const;
    /// "free", "wired" or "custom".
    const char* name() const;

    bool operator==(const BoundaryCondition&) const = default;

private:
    std::vector<int> label_;
};

/// One state per domain edge, 1 = open.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::shared_ptr<const Domain> domain, bool open = false);
    static Configuration from_mask(std::shared_ptr<const Domain> domain, std::uint64_t mask);

    const Domain& domain() const { return *domain_; }
    const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
    std::size_t size() const { return bits_.size(); }
    bool open(int e) const { return bits_[static_cast<std::size_t>(e)] != 0; }
    void set(int e, bool value) { bits_[static_cast<std::size_t>(e)] = value ? 1 : 0; }
    void flip(int e) { bits_[static_cast<std::size_t>(e)] ^= 1; }
    int open_count() const;
    std::uint64_t mask() const;  // only for <= 64 edges
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& bits() { return bits_; }

    bool operator==(const Configuration& o) const { return domain_ == o.domain_ && bits_ == o.bits_; }

private:
    std::shared_ptr<const Domain> domain_;
    std::vector<std::uint8_t> bits_;
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(int n = 0) { reset(n); }
    void reset(int n);
    int find(int x);
    bool unite(int a, int b);
    int components() const { return components_; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    int components_ = 0;
};

/// Boundary wiring resolved to vertex ids, shared by the cluster routines.
class Wiring {
public:
    Wiring(const Domain& domain, const BoundaryCondition& bc);
    /// Class index of a vertex id, or -1 when it is not wired to anything.
    int class_of(int v) const { return class_of_[static_cast<std::size_t>(v)]; }
    const std::vector<std::vector<int>>& classes() const { return classes_; }
    void merge_into(UnionFind& uf) const;

private:
    std::vector<int> class_of_;
    std::vector<std::vector<int>> classes_;  // only classes of size >= 2
};

struct WeightBreakdown {
    int open = 0;
    int closed = 0;
    int clusters = 0;
    double log_weight = 0.0;
};

int cluster_count(const Configuration& config, const BoundaryCondition& bc);
WeightBreakdown log_weight(const Configuration& config, const Params& params, const BoundaryCondition& bc);

/// Normalized measure over all 2^|E| configurations, indexed by edge bitmask
/// (bit i = edge i).
class ExactTable {
public:
    static constexpr int kMaxEdges = 22;

    ExactTable(std::shared_ptr<const Domain> domain, Params params, BoundaryCondition bc);

    const Domain& domain() const { return *domain_; }
    const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
    const Params& params() const { return params_; }
    const BoundaryCondition& bc() const { return bc_; }
    std::size_t size() const { return prob_.size(); }
    double probability(std::uint64_t mask) const { return prob_[mask]; }
    const std::vector<double>& probabilities() const { return prob_; }
    double log_partition() const { return log_z_; }
    Configuration configuration(std::uint64_t mask) const { return Configuration::from_mask(domain_, mask); }
    /// Inverse-CDF lookup for u in [0, 1).
    std::uint64_t sample_index(double u) const;

private:
    std::shared_ptr<const Domain> domain_;
    Params params_;
    BoundaryCondition bc_;
    std::vector<double> prob_;
    std::vector<double> cdf_;
    double log_z_ = 0.0;
};

ExactTable exact_distribution(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc);
double exact_event_probability(const ExactTable& table, const std::function<bool(const Configuration&)>& predicate);
double exact_event_probability(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc,
                               const std::function<bool(const Configuration&)>& predicate);

/// Boundary condition on `subdomain` induced by the configuration outside it.
BoundaryCondition induced_boundary_condition(const Configuration& outer, const BoundaryCondition& outer_bc,
                                             const Domain& subdomain);

/// Restriction of a configuration to a subdomain (edges matched by coordinates).
Configuration restrict_to(const Configuration& outer, std::shared_ptr<const Domain> subdomain);

/// Whether vertex ids a and b are joined by open edges other than `skip_edge`,
/// with wired boundary classes acting as single vertices. Explores from both
/// ends in lockstep and stops as soon as either side is exhausted.
class ConnectivityProbe {
public:
    ConnectivityProbe(const Domain& domain, const Wiring& wiring);
    bool connected(const Configuration& config, int a, int b, int skip_edge = Domain::kNone);

private:
    const Domain* domain_;
    const Wiring* wiring_;
    std::vector<std::uint32_t> mark_[2];
    std::vector<std::uint32_t> class_mark_[2];
    std::vector<int> queue_[2];
    std::uint32_t stamp_ = 0;
};

double heat_bath_open_probability(const Configuration& config, int edge, const Params& params,
                                  const BoundaryCondition& bc);

}  // namespace rclab
