#include "rclab/verify.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "rclab/analysis.hpp"
#include "rclab/paths.hpp"

namespace rclab {

double chi_square_p_value(double statistic, int dof) {
    if (dof < 1) return 1.0;
    const boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, std::max(statistic, 0.0)));
}

std::vector<Algorithm> applicable_algorithms(double q) {
    std::vector<Algorithm> out{Algorithm::HeatBath, Algorithm::ChayesMachta};
    if (q == 2.0 || q == 3.0 || q == 4.0) out.push_back(Algorithm::SwendsenWang);
    out.push_back(Algorithm::ExactTiny);
    return out;
}

ChiSquareResult sampler_vs_exact(std::shared_ptr<const Domain> domain, const Params& params,
                                 const BoundaryCondition& bc, Algorithm algorithm, std::size_t samples,
                                 int thinning, std::uint64_t seed) {
    const ExactTable table(domain, params, bc);
    SamplerSpec spec;
    spec.algorithm = algorithm;
    spec.burn_in = 1000;
    spec.thinning = thinning;
    Chain chain(spec, domain, params, bc, seed, 0);
    std::vector<std::size_t> counts(table.size(), 0);
    for (std::size_t i = 0; i < samples; ++i) ++counts[chain.next().mask()];

    ChiSquareResult r;
    r.samples = samples;
    const double n = static_cast<double>(samples);
    double pooled_expected = 0.0, pooled_observed = 0.0;
    for (std::size_t m = 0; m < table.size(); ++m) {
        const double expected = n * table.probability(m);
        const auto observed = static_cast<double>(counts[m]);
        if (expected < 5.0) {
            pooled_expected += expected;
            pooled_observed += observed;
            continue;
        }
        r.statistic += (observed - expected) * (observed - expected) / expected;
        ++r.bins;
    }
    if (pooled_expected > 0.0) {
        r.statistic += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
        ++r.bins;
    }
    r.dof = r.bins - 1;
    r.p_value = chi_square_p_value(r.statistic, r.dof);
    return r;
}

double domain_markov_max_error(const Params& params, bool wired, int trials, std::uint64_t seed) {
    auto outer = build_box(2);
    auto inner = build_box(1);
    const auto outer_bc = wired ? BoundaryCondition::wired(*outer) : BoundaryCondition::free(*outer);
    std::vector<int> inner_ids;
    for (const Edge& e : inner->edges()) inner_ids.push_back(outer->find_edge(e));
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution coin(params.p);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Configuration c(outer);
        for (int e = 0; e < outer->edge_count(); ++e) c.set(e, coin(gen));
        const BoundaryCondition induced = induced_boundary_condition(c, outer_bc, *inner);
        const ExactTable exact(inner, params, induced);
        std::vector<double> logw(exact.size());
        double top = -INFINITY;
        for (std::uint64_t m = 0; m < exact.size(); ++m) {
            for (std::size_t i = 0; i < inner_ids.size(); ++i) c.set(inner_ids[i], (m >> i) & 1U);
            logw[m] = log_weight(c, params, outer_bc).log_weight;
            top = std::max(top, logw[m]);
        }
        double z = 0.0;
        for (double& w : logw) z += (w = std::exp(w - top));
        for (std::uint64_t m = 0; m < exact.size(); ++m) {
            worst = std::max(worst, std::abs(logw[m] / z - exact.probability(m)));
        }
    }
    return worst;
}

double fkg_min_covariance(const Params& params, bool wired) {
    auto box = build_box(1);
    const auto bc = wired ? BoundaryCondition::wired(*box) : BoundaryCondition::free(*box);
    std::vector<Predicate> events;
    events.push_back([box](const Configuration& c) { return has_horizontal_crossing(c, *box); });
    events.push_back([box](const Configuration& c) { return radial_chemical_distance(c, *box).has_value(); });
    events.push_back([](const Configuration& c) { return c.open_count() >= 6; });
    for (int e : {0, 5, 11}) events.push_back([e](const Configuration& c) { return c.open(e); });
    events.push_back([box](const Configuration& c) {
        // corner (-1,-1) joined to corner (1,1)
        UnionFind uf(box->vertex_count());
        for (int e = 0; e < box->edge_count(); ++e) {
            if (c.open(e)) uf.unite(box->edge_source(e), box->edge_target(e));
        }
        return uf.find(box->vertex_id({-1, -1})) == uf.find(box->vertex_id({1, 1}));
    });
    for (const auto& ev : events) {
        if (!is_increasing(ev, box)) throw DomainError("library event is not increasing");
    }
    const ExactTable table(box, params, bc);
    double worst = INFINITY;
    for (std::size_t i = 0; i < events.size(); ++i) {
        for (std::size_t j = i; j < events.size(); ++j) worst = std::min(worst, exact_covariance(table, events[i], events[j]));
    }
    return worst;
}

namespace {

void compare(const Configuration& c, const Sigma& sigma, ArmDetector& det, const ArmSpec& spec, AgreementSummary& s) {
    ++s.cases;
    const ArmResult r = det.detect(c, sigma);
    if (r.occurs == brute_force_arm_oracle(c, spec)) ++s.agree;
    if (r.occurs) {
        ++s.occurring;
        if (r.witness && validate_witness(c, spec, *r.witness)) ++s.witnesses_valid;
    }
}

}  // namespace

AgreementSummary arm_oracle_exhaustive(const std::vector<Sigma>& sigmas, int random_backgrounds, std::uint64_t seed) {
    auto a = build_annulus({0, 0}, 1, 2);
    ArmDetector det(a);
    std::vector<int> radial, ring;
    for (int e = 0; e < a->edge_count(); ++e) {
        const Edge& ed = a->edges()[static_cast<std::size_t>(e)];
        (sup_norm(ed.a, {0, 0}) == sup_norm(ed.b, {0, 0}) ? ring : radial).push_back(e);
    }
    std::mt19937_64 gen(seed);
    std::vector<std::vector<std::uint8_t>> backgrounds{std::vector<std::uint8_t>(ring.size(), 1),
                                                       std::vector<std::uint8_t>(ring.size(), 0)};
    for (int b = 0; b < random_backgrounds; ++b) {
        std::vector<std::uint8_t> bg(ring.size());
        for (auto& x : bg) x = static_cast<std::uint8_t>(gen() & 1U);
        backgrounds.push_back(bg);
    }
    AgreementSummary s;
    for (const Sigma& sigma : sigmas) {
        const ArmSpec spec{a, sigma};
        for (const auto& bg : backgrounds) {
            Configuration c(a);
            for (std::size_t i = 0; i < ring.size(); ++i) c.set(ring[i], bg[i] != 0);
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << radial.size()); ++m) {
                for (std::size_t i = 0; i < radial.size(); ++i) c.set(radial[i], (m >> i) & 1U);
                compare(c, sigma, det, spec, s);
            }
        }
    }
    return s;
}

AgreementSummary arm_oracle_random(int n1, int n2, const Sigma& sigma, int count, double p, std::uint64_t seed) {
    auto a = build_annulus({0, 0}, n1, n2);
    ArmDetector det(a);
    const ArmSpec spec{a, sigma};
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution coin(p);
    AgreementSummary s;
    for (int i = 0; i < count; ++i) {
        Configuration c(a);
        for (int e = 0; e < a->edge_count(); ++e) c.set(e, coin(gen));
        compare(c, sigma, det, spec, s);
    }
    return s;
}

std::size_t dichotomy_violations_exhaustive() {
    auto rect = build_crossing_rectangle(1);
    std::size_t bad = 0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << rect->edge_count()); ++m) {
        const Configuration c = Configuration::from_mask(rect, m);
        if (has_horizontal_crossing(c, *rect) == has_dual_vertical_crossing(c, *rect)) ++bad;
    }
    return bad;
}

}  // namespace rclab
