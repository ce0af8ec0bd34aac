#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rclab/arms.hpp"
#include "rclab/lattice.hpp"
#include "rclab/rcmodel.hpp"
#include "rclab/sampler.hpp"

namespace rclab {

struct EstimateContext {
    double q = 1.0;
    double p = 0.5;
    int n = 0;   // box half-side, 0 when not applicable
    int n1 = 0;  // annulus radii, 0 when not applicable
    int n2 = 0;
    std::string bc = "free";
    std::uint64_t seed = 0;
    std::string algorithm;
};

struct EstimateRecord {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    double n_effective = 0.0;
    EstimateContext context;
    /// Set when the estimate could not be formed (value is NaN then).
    std::optional<std::string> error;
    /// Named auxiliary quantities (chaining constant, component estimates, ...).
    std::map<std::string, double> extra;
};

struct PowerLawFit {
    double exponent = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double intercept_log = 0.0;
    double r_squared = 0.0;
};

/// A sampling run: which chain, how many samples, which seed.
struct RunSpec {
    SamplerSpec sampler;
    std::uint64_t seed = 0;
    std::size_t samples_per_replica = 1000;
};

using Predicate = std::function<bool(const Configuration&)>;
using Statistic = std::function<double(const Configuration&)>;

// ------------------------------------------------------------ batch means

/// Means of several jointly sampled columns with the covariance of the means
/// estimated by batch means (at least `min_batches` batches in total, batches
/// never straddle replicas).
struct BatchStats {
    std::vector<double> mean;
    std::vector<std::vector<double>> cov;  // covariance of the column means
    std::vector<double> variance;          // per-sample variance of each column
    std::size_t n = 0;
    std::size_t batches = 0;

    double std_error(std::size_t k) const;
    /// n * variance / (n * var(mean)), clamped to [0, n]; n when var(mean) = 0.
    double n_effective(std::size_t k) const;
};

inline constexpr int kMinBatches = 50;

BatchStats batch_stats(const SampleSeries& series, int min_batches = kMinBatches);

// ------------------------------------------------------------- estimators

/// Default pilot observable for burn-in selection: fraction of open edges.
double edge_density(const Configuration& config);

EstimateRecord estimate_probability(const Predicate& event, std::shared_ptr<const Domain> domain,
                                    const Params& params, const BoundaryCondition& bc, const RunSpec& run);
/// Variant for events with per-thread scratch (one predicate per replica).
EstimateRecord estimate_probability(const std::function<Predicate()>& event_factory,
                                    std::shared_ptr<const Domain> domain, const Params& params,
                                    const BoundaryCondition& bc, const RunSpec& run);

/// E[statistic | condition] by the ratio estimator with delta-method error.
/// When the condition never occurs the record carries an error and a NaN value.
EstimateRecord estimate_conditional_mean(const Statistic& statistic, const Predicate& condition,
                                         std::shared_ptr<const Domain> domain, const Params& params,
                                         const BoundaryCondition& bc, const RunSpec& run);

/// Indicator of an arm event on an annulus that sits inside a larger domain.
class AnnulusEvent {
public:
    AnnulusEvent(const Domain& host, Vertex center, int n1, int n2, Sigma sigma);
    bool operator()(const Configuration& config);
    const AnnulusDomain& annulus() const { return detector_.annulus(); }

private:
    ArmDetector detector_;
    Sigma sigma_;
    std::vector<int> host_edge_;
    std::vector<std::uint8_t> bits_;
};

/// Arm probability pi_sigma(n1, n2) measured on the box B(box_n) (box_n >= n2).
EstimateRecord estimate_arm_probability(int n1, int n2, const Sigma& sigma, int box_n, const Params& params,
                                        bool wired, const RunSpec& run);

/// pi(n1,n3) pi(n3,n2) / pi(n1,n2), all three from one run on B(box_n)
/// (default 2 n2). pi(n, n) = 1. Throws DomainError when pi(n1,n2) is estimated as 0.
EstimateRecord quasi_mult_ratio(int n1, int n3, int n2, const Sigma& sigma, const Params& params, bool wired,
                                const RunSpec& run, int box_n = 0);

/// Weighted least squares of log y on log x with a parametric bootstrap CI.
struct PowerPoint {
    double x = 0.0;
    double y = 0.0;
    double std_error = 0.0;
};
PowerLawFit fit_power_law(const std::vector<PowerPoint>& points, int bootstrap = 2000, std::uint64_t seed = 1,
                          double confidence = 0.95);

/// |P(A and B) - P(A) P(B)| / (P(A) P(B)) from one run. Throws DomainError when
/// a marginal is estimated as 0.
EstimateRecord mixing_coefficient(const Predicate& a, const Predicate& b, std::shared_ptr<const Domain> domain,
                                  const Params& params, const BoundaryCondition& bc, const RunSpec& run);

/// Exhaustive monotonicity check; domains of at most kMonotoneCheckMaxEdges edges.
inline constexpr int kMonotoneCheckMaxEdges = 12;
bool is_increasing(const Predicate& event, std::shared_ptr<const Domain> domain);

/// Exact covariance of two indicators under an exact table.
double exact_covariance(const ExactTable& table, const Predicate& a, const Predicate& b);

/// Monte Carlo cov(1_A, 1_B). On small domains both events are checked to be
/// increasing (DomainError otherwise); larger domains rely on the caller.
EstimateRecord fkg_covariance(const Predicate& a, const Predicate& b, std::shared_ptr<const Domain> domain,
                              const Params& params, const BoundaryCondition& bc, const RunSpec& run);

// ------------------------------------------------------- extremal distance

/// A discrete quad: a domain and four boundary arcs in cyclic order.
struct Quad {
    std::shared_ptr<const Domain> domain;
    std::vector<Vertex> ab, bc, cd, da;

    /// [0, n] x [0, m]: (ab) the left side, (cd) the right side.
    static Quad rectangle(int n, int m);
    /// Throws InvalidGeometry for empty or overlapping arcs or arc vertices outside the domain.
    void validate() const;
};

struct ExtremalSolution {
    double value = std::numeric_limits<double>::infinity();
    double residual = 0.0;  // max-norm residual of the linear system
    int iterations = 0;
};

/// Effective resistance between (ab) and (cd). Each unit face of the domain
/// contributes conductance 1/2 to each of its four edges. Disconnected arcs
/// give +infinity.
ExtremalSolution solve_extremal(const Quad& quad, double tolerance = 1e-10);
double extremal_distance(const Quad& quad);

// ------------------------------------------------------ bound ratio series

/// For each n: E[S_n | H_n] / (n^2 pi3(1,n)) and E[#l_n | H_n] / (n^2 pi3(1,n))
/// with pi3(1,n) chained over annuli (1,8), (8,64), ... (the last link ends
/// at n). Per n the records are "S_ratio" then "L_ratio"; extras hold the
/// conditional means, the chained and direct pi3 and the chaining constant
/// (direct / chained).
std::vector<EstimateRecord> bound_ratio_series(const std::vector<int>& n_list, const Params& params, bool wired,
                                               const RunSpec& run);

}  // namespace rclab
