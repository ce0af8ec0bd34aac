#include "rclab/sampler.hpp"

#include <atomic>
#include <exception>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace rclab {

namespace {

constexpr std::uint32_t kLaneEdge = 0;
constexpr std::uint32_t kLaneColour = 1;
constexpr std::uint32_t kLaneActive = 2;
constexpr std::uint32_t kLaneExact = 3;
constexpr std::uint32_t kLaneInit = 9;

bool integer_q(double q) { return q == 2.0 || q == 3.0 || q == 4.0; }

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::HeatBath: return "heat-bath";
        case Algorithm::SwendsenWang: return "swendsen-wang";
        case Algorithm::ChayesMachta: return "chayes-machta";
        case Algorithm::ExactTiny: return "exact";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "heat-bath" || name == "hb") return Algorithm::HeatBath;
    if (name == "swendsen-wang" || name == "sw") return Algorithm::SwendsenWang;
    if (name == "chayes-machta" || name == "cm") return Algorithm::ChayesMachta;
    if (name == "exact") return Algorithm::ExactTiny;
    throw UnsupportedAlgorithm("unknown algorithm '" + name + "'");
}

void validate(const SamplerSpec& spec, const Domain& domain, const Params& params) {
    if (spec.thinning < 1) throw std::invalid_argument("thinning must be at least 1");
    if (spec.replicas < 1) throw std::invalid_argument("replica count must be at least 1");
    if (spec.burn_in && *spec.burn_in < 0) throw std::invalid_argument("burn-in must be nonnegative");
    switch (spec.algorithm) {
        case Algorithm::SwendsenWang:
            if (!integer_q(params.q)) throw UnsupportedAlgorithm("Swendsen-Wang needs q in {2, 3, 4}");
            break;
        case Algorithm::ChayesMachta:
            if (params.q < 1.0) throw UnsupportedAlgorithm("Chayes-Machta needs q >= 1");
            break;
        case Algorithm::ExactTiny:
            if (domain.edge_count() > ExactTable::kMaxEdges) {
                throw UnsupportedAlgorithm("exact sampling needs at most " + std::to_string(ExactTable::kMaxEdges) +
                                           " edges");
            }
            break;
        case Algorithm::HeatBath: break;
    }
}

ChainState initial_state(std::shared_ptr<const Domain> domain, const Params& params, std::uint64_t seed,
                         std::uint64_t stream) {
    ChainState s;
    s.rng = CounterRng(seed, stream);
    s.config = Configuration(domain);
    for (int e = 0; e < domain->edge_count(); ++e) {
        s.config.set(e, s.rng.uniform(0, static_cast<std::uint32_t>(e), kLaneInit) < params.p);
    }
    s.counter = 1;
    return s;
}

// ------------------------------------------------------------------ sweeps

Sweeper::Sweeper(std::shared_ptr<const Domain> domain, Params params, BoundaryCondition bc)
    : domain_(std::move(domain)),
      params_(params),
      bc_(std::move(bc)),
      wiring_(std::make_unique<Wiring>(*domain_, bc_)),
      probe_(std::make_unique<ConnectivityProbe>(*domain_, *wiring_)),
      uf_(domain_->vertex_count()),
      root_(static_cast<std::size_t>(domain_->vertex_count())),
      tag_(static_cast<std::size_t>(domain_->vertex_count())) {}

void Sweeper::heat_bath(ChainState& s) {
    const double p_free = params_.p / (params_.p + (1.0 - params_.p) * params_.q);
    for (int e = 0; e < domain_->edge_count(); ++e) {
        const double u = s.rng.uniform(s.counter, static_cast<std::uint32_t>(e), kLaneEdge);
        // q = 1 needs no connectivity query
        double prob = params_.p;
        if (params_.q != 1.0 && u >= p_free && u < params_.p) {
            prob = probe_->connected(s.config, domain_->edge_source(e), domain_->edge_target(e), e) ? params_.p
                                                                                                     : p_free;
        }
        s.config.set(e, u < prob);
    }
    ++s.counter;
    ++s.sweeps;
}

void Sweeper::label_clusters(const Configuration& c) {
    uf_.reset(domain_->vertex_count());
    wiring_->merge_into(uf_);
    for (int e = 0; e < domain_->edge_count(); ++e) {
        if (c.open(e)) uf_.unite(domain_->edge_source(e), domain_->edge_target(e));
    }
    for (int v = 0; v < domain_->vertex_count(); ++v) root_[static_cast<std::size_t>(v)] = uf_.find(v);
}

void Sweeper::swendsen_wang(ChainState& s) {
    if (!integer_q(params_.q)) throw UnsupportedAlgorithm("Swendsen-Wang needs q in {2, 3, 4}");
    label_clusters(s.config);
    const int q = static_cast<int>(params_.q);
    for (int v = 0; v < domain_->vertex_count(); ++v) {
        const int r = root_[static_cast<std::size_t>(v)];
        if (r == v) {
            const double u = s.rng.uniform(s.counter, static_cast<std::uint32_t>(v), kLaneColour);
            tag_[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(std::min(q - 1, static_cast<int>(u * q)));
        }
    }
    for (int e = 0; e < domain_->edge_count(); ++e) {
        const int a = root_[static_cast<std::size_t>(domain_->edge_source(e))];
        const int b = root_[static_cast<std::size_t>(domain_->edge_target(e))];
        const bool same = tag_[static_cast<std::size_t>(a)] == tag_[static_cast<std::size_t>(b)];
        const double u = s.rng.uniform(s.counter, static_cast<std::uint32_t>(e), kLaneEdge);
        s.config.set(e, same && u < params_.p);
    }
    ++s.counter;
    ++s.sweeps;
}

void Sweeper::chayes_machta(ChainState& s) {
    if (params_.q < 1.0) throw UnsupportedAlgorithm("Chayes-Machta needs q >= 1");
    label_clusters(s.config);
    const double activate = 1.0 / params_.q;
    for (int v = 0; v < domain_->vertex_count(); ++v) {
        if (root_[static_cast<std::size_t>(v)] == v) {
            const double u = s.rng.uniform(s.counter, static_cast<std::uint32_t>(v), kLaneActive);
            tag_[static_cast<std::size_t>(v)] = u < activate ? 1 : 0;
        }
    }
    for (int e = 0; e < domain_->edge_count(); ++e) {
        const int a = root_[static_cast<std::size_t>(domain_->edge_source(e))];
        const int b = root_[static_cast<std::size_t>(domain_->edge_target(e))];
        if (tag_[static_cast<std::size_t>(a)] && tag_[static_cast<std::size_t>(b)]) {
            const double u = s.rng.uniform(s.counter, static_cast<std::uint32_t>(e), kLaneEdge);
            s.config.set(e, u < params_.p);
        }
    }
    ++s.counter;
    ++s.sweeps;
}

void Sweeper::exact(ChainState& s) {
    if (!table_) table_ = std::make_unique<ExactTable>(domain_, params_, bc_);
    const double u = s.rng.uniform(s.counter, 0, kLaneExact);
    const std::uint64_t mask = table_->sample_index(u);
    for (int e = 0; e < domain_->edge_count(); ++e) s.config.set(e, (mask >> e) & 1U);
    ++s.counter;
    ++s.sweeps;
}

void Sweeper::step(ChainState& s, Algorithm a) {
    switch (a) {
        case Algorithm::HeatBath: heat_bath(s); break;
        case Algorithm::SwendsenWang: swendsen_wang(s); break;
        case Algorithm::ChayesMachta: chayes_machta(s); break;
        case Algorithm::ExactTiny: exact(s); break;
    }
}

ChainState heat_bath_sweep(ChainState state, const Params& params, const BoundaryCondition& bc) {
    Sweeper(state.config.domain_ptr(), params, bc).heat_bath(state);
    return state;
}

ChainState swendsen_wang_sweep(ChainState state, const Params& params, const BoundaryCondition& bc) {
    Sweeper(state.config.domain_ptr(), params, bc).swendsen_wang(state);
    return state;
}

ChainState chayes_machta_sweep(ChainState state, const Params& params, const BoundaryCondition& bc) {
    Sweeper(state.config.domain_ptr(), params, bc).chayes_machta(state);
    return state;
}

Configuration exact_sample_tiny(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc,
                                const CounterRng& rng, std::uint64_t counter) {
    const ExactTable table(domain, params, bc);
    return table.configuration(table.sample_index(rng.uniform(counter, 0, kLaneExact)));
}

// ---------------------------------------------------------- autocorrelation

double autocorrelation(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 100) throw DomainError("autocorrelation needs at least 100 points");
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);
    double c0 = 0.0;
    for (double x : series) c0 += (x - mean) * (x - mean);
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0)) throw DomainError("autocorrelation of a constant series is undefined");
    double tau = 0.5;
    const std::size_t max_lag = n / 2;
    for (std::size_t t = 1; t < max_lag; ++t) {
        double ct = 0.0;
        for (std::size_t i = 0; i + t < n; ++i) ct += (series[i] - mean) * (series[i + t] - mean);
        ct /= static_cast<double>(n);
        tau += ct / c0;
        if (static_cast<double>(t) >= 6.0 * tau) break;
    }
    return std::max(tau, 0.5);
}

// ------------------------------------------------------------------ chains

Chain::Chain(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
             const BoundaryCondition& bc, std::uint64_t seed, std::uint64_t replica, const Observable& pilot)
    : spec_(spec), sweeper_(domain, params, bc), state_(initial_state(domain, params, seed, replica)) {
    validate(spec_, *domain, params);
    if (spec_.burn_in) {
        burn_in_ = *spec_.burn_in;
    } else if (spec_.algorithm == Algorithm::ExactTiny) {
        burn_in_ = 0;
    } else {
        constexpr int kPilot = 1000;
        auto density = [](const Configuration& c) {
            return static_cast<double>(c.open_count()) / static_cast<double>(std::max<std::size_t>(1, c.size()));
        };
        std::vector<double> primary, fallback;
        for (int i = 0; i < kPilot; ++i) {
            sweeper_.step(state_, spec_.algorithm);
            if (pilot) primary.push_back(pilot(state_.config));
            fallback.push_back(density(state_.config));
        }
        double tau = 0.5;
        try {
            tau = autocorrelation(pilot ? primary : fallback);
        } catch (const DomainError&) {
            try {
                tau = autocorrelation(fallback);
            } catch (const DomainError&) {
                tau = 0.5;
            }
        }
        pilot_tau_ = tau;
        burn_in_ = static_cast<int>(std::ceil(20.0 * tau));
    }
    for (int i = 0; i < burn_in_; ++i) sweeper_.step(state_, spec_.algorithm);
}

const Configuration& Chain::next() {
    for (int i = 0; i < spec_.thinning; ++i) sweeper_.step(state_, spec_.algorithm);
    return state_.config;
}

std::vector<Chain> run_chain(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
                             const BoundaryCondition& bc, std::uint64_t seed, const Observable& pilot) {
    validate(spec, *domain, params);
    std::vector<Chain> chains;
    chains.reserve(static_cast<std::size_t>(spec.replicas));
    for (int r = 0; r < spec.replicas; ++r) chains.emplace_back(spec, domain, params, bc, seed, r, pilot);
    return chains;
}

int thread_budget() {
    if (const char* env = std::getenv("RCLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::size_t SampleSeries::total() const {
    std::size_t n = 0;
    for (const auto& r : replicas) n += r.size();
    return n;
}

std::vector<double> SampleSeries::column(std::size_t k) const {
    std::vector<double> out;
    out.reserve(total());
    for (const auto& r : replicas) {
        for (const auto& row : r) out.push_back(row.at(k));
    }
    return out;
}

SampleSeries sample_series(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
                           const BoundaryCondition& bc, std::uint64_t seed, std::size_t per_replica,
                           const Measurement& measure, const Observable& pilot) {
    return sample_series(spec, std::move(domain), params, bc, seed, per_replica,
                         std::function<Measurement()>([&measure] { return measure; }), pilot);
}

SampleSeries sample_series(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
                           const BoundaryCondition& bc, std::uint64_t seed, std::size_t per_replica,
                           const std::function<Measurement()>& factory, const Observable& pilot) {
    validate(spec, *domain, params);
    const auto R = static_cast<std::size_t>(spec.replicas);
    SampleSeries out;
    out.replicas.resize(R);
    out.burn_in.resize(R);
    out.pilot_tau.resize(R);
    std::vector<std::exception_ptr> errors(R);
    auto work = [&](std::size_t r) {
        try {
            Measurement m = factory();
            Chain chain(spec, domain, params, bc, seed, r, pilot);
            out.burn_in[r] = chain.burn_in();
            out.pilot_tau[r] = chain.pilot_tau();
            auto& rows = out.replicas[r];
            rows.reserve(per_replica);
            for (std::size_t i = 0; i < per_replica; ++i) rows.push_back(m(chain.next()));
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };
    const std::size_t threads = std::min<std::size_t>(R, static_cast<std::size_t>(thread_budget()));
    if (threads <= 1) {
        for (std::size_t r = 0; r < R; ++r) work(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < R; r = next++) work(r);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace rclab
