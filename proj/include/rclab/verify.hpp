#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rclab/arms.hpp"
#include "rclab/rcmodel.hpp"
#include "rclab/sampler.hpp"

namespace rclab {

/// Pearson test of sampled configurations against the exact table. Bins with
/// expected count below 5 are pooled into one bin.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t samples = 0;
    int bins = 0;
};

ChiSquareResult sampler_vs_exact(std::shared_ptr<const Domain> domain, const Params& params,
                                 const BoundaryCondition& bc, Algorithm algorithm, std::size_t samples,
                                 int thinning, std::uint64_t seed);

/// Upper tail of the chi-square distribution.
double chi_square_p_value(double statistic, int dof);

/// Algorithms that can target phi_{p,q} for this q.
std::vector<Algorithm> applicable_algorithms(double q);

/// Max |phi_{B(2)}(inner | outer) - phi_{B(1)}^{induced}(inner)| over `trials`
/// random outer configurations and all 2^12 inner ones.
double domain_markov_max_error(const Params& params, bool wired, int trials, std::uint64_t seed);

/// Smallest exact covariance over all pairs of a fixed library of increasing
/// events on B(1). Throws DomainError if a library event is not increasing.
double fkg_min_covariance(const Params& params, bool wired);

struct AgreementSummary {
    std::size_t cases = 0;
    std::size_t agree = 0;
    std::size_t witnesses_valid = 0;  // among cases where the event occurs
    std::size_t occurring = 0;
    bool all_good() const { return agree == cases && witnesses_valid == occurring; }
};

/// Ann(1,2): all 2^12 states of the radial edges, crossed with fixed ring-edge
/// backgrounds (all open, all closed, `random_backgrounds` random ones).
AgreementSummary arm_oracle_exhaustive(const std::vector<Sigma>& sigmas, int random_backgrounds = 4,
                                       std::uint64_t seed = 1);
AgreementSummary arm_oracle_random(int n1, int n2, const Sigma& sigma, int count, double p, std::uint64_t seed);

/// Configurations of the smallest crossing rectangle violating the
/// one-of-two crossing dichotomy (checked on all 2^17 of them).
std::size_t dichotomy_violations_exhaustive();

}  // namespace rclab
