#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rclab/rcmodel.hpp"
#include "rclab/rng.hpp"

namespace rclab {

class UnsupportedAlgorithm : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Algorithm { HeatBath, SwendsenWang, ChayesMachta, ExactTiny };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct SamplerSpec {
    Algorithm algorithm = Algorithm::HeatBath;
    /// Unset: 20 x integrated autocorrelation time of a pilot run.
    std::optional<int> burn_in;
    int thinning = 1;
    int replicas = 1;
};

/// Throws UnsupportedAlgorithm / std::invalid_argument when `spec` cannot
/// target phi_{p,q,D}^xi on this domain.
void validate(const SamplerSpec& spec, const Domain& domain, const Params& params);

struct ChainState {
    Configuration config;
    CounterRng rng;
    std::uint64_t counter = 0;
    std::uint64_t sweeps = 0;

    bool operator==(const ChainState&) const = default;
};

ChainState initial_state(std::shared_ptr<const Domain> domain, const Params& params, std::uint64_t seed,
                         std::uint64_t stream);

/// Per-chain scratch (wiring, connectivity probe, union-find, exact table).
class Sweeper {
public:
    Sweeper(std::shared_ptr<const Domain> domain, Params params, BoundaryCondition bc);

    void heat_bath(ChainState& s);
    void swendsen_wang(ChainState& s);
    void chayes_machta(ChainState& s);
    void exact(ChainState& s);
    void step(ChainState& s, Algorithm a);

    const Params& params() const { return params_; }
    const BoundaryCondition& bc() const { return bc_; }

private:
    void label_clusters(const Configuration& c);

    std::shared_ptr<const Domain> domain_;
    Params params_;
    BoundaryCondition bc_;
    std::unique_ptr<Wiring> wiring_;
    std::unique_ptr<ConnectivityProbe> probe_;
    UnionFind uf_;
    std::vector<int> root_;
    std::vector<std::uint8_t> tag_;
    std::unique_ptr<ExactTable> table_;
};

ChainState heat_bath_sweep(ChainState state, const Params& params, const BoundaryCondition& bc);
ChainState swendsen_wang_sweep(ChainState state, const Params& params, const BoundaryCondition& bc);
ChainState chayes_machta_sweep(ChainState state, const Params& params, const BoundaryCondition& bc);
Configuration exact_sample_tiny(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc,
                                const CounterRng& rng, std::uint64_t counter);

/// Integrated autocorrelation time with a self-consistent window
/// (smallest W with W >= 6 tau(W)). Throws DomainError for series shorter than
/// 100 or with zero variance.
double autocorrelation(const std::vector<double>& series);

using Observable = std::function<double(const Configuration&)>;

/// One replica of a Markov chain, emitting a configuration every `thinning`
/// sweeps after burn-in.
class Chain {
public:
    Chain(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
          const BoundaryCondition& bc, std::uint64_t seed, std::uint64_t replica, const Observable& pilot = {});

    const Configuration& next();
    const ChainState& state() const { return state_; }
    int burn_in() const { return burn_in_; }
    /// Autocorrelation time measured by the pilot run (0 when burn-in was given).
    double pilot_tau() const { return pilot_tau_; }

private:
    SamplerSpec spec_;
    Sweeper sweeper_;
    ChainState state_;
    int burn_in_ = 0;
    double pilot_tau_ = 0.0;
};

/// All replicas of a run; replica r uses stream id r.
std::vector<Chain> run_chain(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
                             const BoundaryCondition& bc, std::uint64_t seed, const Observable& pilot = {});

/// Samples `per_replica` configurations from every replica (replicas run
/// concurrently, capped by RCLAB_THREADS) and evaluates `measure` on each.
/// Result[r][i] is the vector returned for sample i of replica r; the result is
/// independent of the thread schedule.
struct SampleSeries {
    std::vector<std::vector<std::vector<double>>> replicas;
    std::vector<int> burn_in;
    std::vector<double> pilot_tau;
    std::size_t total() const;
    /// Column `k` concatenated across replicas in replica order.
    std::vector<double> column(std::size_t k) const;
};

using Measurement = std::function<std::vector<double>(const Configuration&)>;

SampleSeries sample_series(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
                           const BoundaryCondition& bc, std::uint64_t seed, std::size_t per_replica,
                           const Measurement& measure, const Observable& pilot = {});
/// Same, with one measurement object per replica (for measurements that keep
/// scratch buffers).
SampleSeries sample_series(const SamplerSpec& spec, std::shared_ptr<const Domain> domain, const Params& params,
                           const BoundaryCondition& bc, std::uint64_t seed, std::size_t per_replica,
                           const std::function<Measurement()>& factory, const Observable& pilot = {});

int thread_budget();

// ------------------------------------------------------------- checkpoints

struct Checkpoint {
    std::shared_ptr<const Domain> domain;
    Params params;
    BoundaryCondition bc;
    ChainState state;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& cp);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace rclab
