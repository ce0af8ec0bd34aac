#include "rclab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "rclab/analysis.hpp"
#include "rclab/paths.hpp"
#include "rclab/records.hpp"
#include "rclab/verify.hpp"

namespace rclab {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

const std::set<std::string> kNumericKeys{"q", "n", "n1", "n2", "n3", "box", "m", "seed", "samples",
                                         "burn_in", "thinning", "replicas", "holes", "cap"};
const std::set<std::string> kPathKeys{"output", "csv", "config"};

/// Flags as given on the command line, before merging with a config file.
struct Flags {
    std::string command;
    std::map<std::string, std::string> values;
};

json flag_value(const std::string& key, const std::string& text) {
    if (key == "p" && text == "critical") return text;
    if (kNumericKeys.count(key) || key == "p") {
        try {
            std::size_t used = 0;
            if (key == "seed") {
                const unsigned long long v = std::stoull(text, &used);
                if (used == text.size()) return v;
            } else if (text.find_first_of(".eE") == std::string::npos && key != "q" && key != "p" && key != "holes") {
                const long long v = std::stoll(text, &used);
                if (used == text.size()) return v;
            } else {
                const double v = std::stod(text, &used);
                if (used == text.size()) return v;
            }
        } catch (const std::exception&) {
        }
        throw UsageError("--" + key + " expects a number, got '" + text + "'");
    }
    return text;
}

/// Resolved experiment configuration.
struct Config {
    json doc;  // canonical form, embedded in every record

    double number(const std::string& k) const { return doc.at(k).get<double>(); }
    int integer(const std::string& k) const { return doc.at(k).get<int>(); }
    std::string text(const std::string& k) const { return doc.at(k).get<std::string>(); }
    bool has(const std::string& k) const { return doc.contains(k) && !doc.at(k).is_null(); }
};

std::string default_algorithm(double q) {
    if (q == 1.0) return "heat-bath";
    if (q == 2.0 || q == 3.0 || q == 4.0) return "swendsen-wang";
    return "chayes-machta";
}

Config resolve(const Flags& flags, std::string& output, std::string& csv) {
    json doc = json::object();
    if (auto it = flags.values.find("config"); it != flags.values.end()) {
        std::ifstream in(it->second);
        if (!in) throw UsageError("cannot read config file " + it->second);
        try {
            doc = json::parse(in);
        } catch (const std::exception& ex) {
            throw UsageError("config file " + it->second + ": " + ex.what());
        }
        if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
        if (doc.contains("command") && doc["command"] != flags.command) {
            throw UsageError("config file is for command '" + doc["command"].get<std::string>() + "'");
        }
    }
    for (const auto& [k, v] : flags.values) {
        if (k != "config") doc[k] = flag_value(k, v);
    }
    doc["command"] = flags.command;
    if (doc.contains("output")) output = doc["output"].get<std::string>();
    if (doc.contains("csv")) csv = doc["csv"].get<std::string>();
    for (const auto& k : kPathKeys) doc.erase(k);

    auto set_default = [&](const std::string& k, json v) {
        if (!doc.contains(k) || doc[k].is_null()) doc[k] = std::move(v);
    };
    set_default("q", 1.0);
    doc["q"] = doc["q"].get<double>();
    set_default("p", "critical");
    set_default("bc", "free");
    set_default("algorithm", default_algorithm(doc["q"].get<double>()));
    set_default("samples", 10000);
    set_default("thinning", flags.command == "verify" ? 10 : 1);
    set_default("replicas", 1);
    set_default("sigma", "OOC");
    if (!doc.contains("seed")) {
        std::random_device rd;
        doc["seed"] = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
    const double q = doc["q"].get<double>();
    const double p = doc["p"].is_string() ? (doc["p"] == "critical" ? critical_point(q) : -1.0) : doc["p"].get<double>();
    try {
        Params::make(p, q);
    } catch (const std::exception& ex) {
        throw UsageError(ex.what());
    }
    if (doc["bc"] != "free" && doc["bc"] != "wired") throw UsageError("--bc must be free or wired");
    try {
        parse_algorithm(doc["algorithm"].get<std::string>());
        parse_sigma(doc["sigma"].get<std::string>());
    } catch (const std::exception& ex) {
        throw UsageError(ex.what());
    }
    for (const char* k : {"samples", "thinning", "replicas"}) {
        if (doc[k].get<long long>() < 1) throw UsageError(std::string("--") + k + " must be positive");
    }
    return Config{doc};
}

Params params_of(const Config& c) {
    const double q = c.number("q");
    return c.doc["p"].is_string() ? Params::critical(q) : Params::make(c.number("p"), q);
}

RunSpec run_of(const Config& c) {
    RunSpec r;
    r.sampler.algorithm = parse_algorithm(c.text("algorithm"));
    if (c.has("burn_in")) r.sampler.burn_in = c.integer("burn_in");
    r.sampler.thinning = c.integer("thinning");
    r.sampler.replicas = c.integer("replicas");
    r.seed = c.doc.at("seed").get<std::uint64_t>();
    r.samples_per_replica = c.doc.at("samples").get<std::size_t>();
    return r;
}

int need(const Config& c, const std::string& k) {
    if (!c.has(k)) throw UsageError("--" + k + " is required for " + c.text("command"));
    return c.integer(k);
}

bool wired_of(const Config& c) { return c.text("bc") == "wired"; }

BoundaryCondition bc_of(const Config& c, const Domain& d) {
    return wired_of(c) ? BoundaryCondition::wired(d) : BoundaryCondition::free(d);
}

std::vector<int> parse_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("bad integer list '" + s + "'");
        }
    }
    if (out.empty()) throw UsageError("empty integer list");
    return out;
}

// ------------------------------------------------------------------ commands

std::vector<EstimateRecord> cmd_sample(const Config& c) {
    const int n = need(c, "n");
    auto box = build_box(n);
    const Params params = params_of(c);
    const auto bc = bc_of(c, *box);
    const RunSpec run = run_of(c);
    validate(run.sampler, *box, params);
    SampleSeries series;
    std::optional<ChainState> last;
    for (int r = 0; r < run.sampler.replicas; ++r) {
        Chain chain(run.sampler, box, params, bc, run.seed, static_cast<std::uint64_t>(r), edge_density);
        series.replicas.emplace_back();
        for (std::size_t i = 0; i < run.samples_per_replica; ++i) {
            series.replicas.back().push_back({edge_density(chain.next())});
        }
        series.burn_in.push_back(chain.burn_in());
        series.pilot_tau.push_back(chain.pilot_tau());
        if (r == 0) last = chain.state();
    }
    if (c.has("checkpoint")) save_checkpoint(c.text("checkpoint"), Checkpoint{box, params, bc, *last});
    const BatchStats s = batch_stats(series);
    EstimateRecord rec;
    rec.name = "edge_density";
    rec.value = s.mean[0];
    rec.std_error = s.std_error(0);
    rec.n_samples = s.n;
    rec.n_effective = s.n_effective(0);
    rec.context = {params.q, params.p, n, 0, 0, bc.name(), run.seed, to_string(run.sampler.algorithm)};
    rec.extra["burn_in"] = series.burn_in[0];
    rec.extra["pilot_tau"] = series.pilot_tau[0];
    return {rec};
}

std::vector<EstimateRecord> cmd_estimate(const Config& c) {
    if (!c.has("target")) throw UsageError("estimate needs a target");
    const std::string target = c.text("target");
    const Params params = params_of(c);
    const RunSpec run = run_of(c);
    const Sigma sigma = parse_sigma(c.text("sigma"));

    if (target == "arm") {
        const int n1 = need(c, "n1"), n2 = need(c, "n2");
        const int box_n = c.has("box") ? c.integer("box") : 2 * n2;
        validate(run.sampler, *build_box(box_n), params);
        return {estimate_arm_probability(n1, n2, sigma, box_n, params, wired_of(c), run)};
    }
    if (target == "quasi-mult") {
        const int n1 = need(c, "n1"), n3 = need(c, "n3"), n2 = need(c, "n2");
        const int box_n = c.has("box") ? c.integer("box") : 2 * n2;
        validate(run.sampler, *build_box(box_n), params);
        return {quasi_mult_ratio(n1, n3, n2, sigma, params, wired_of(c), run, box_n)};
    }

    const int n = need(c, "n");
    if (target == "self-dual-crossing") {
        auto rect = build_crossing_rectangle(n);
        validate(run.sampler, *rect, params);
        std::atomic<std::size_t> violations{0};
        EstimateRecord rec = estimate_probability(
            [&](const Configuration& cfg) {
                const bool h = has_horizontal_crossing(cfg, *rect);
                if (h == has_dual_vertical_crossing(cfg, *rect)) ++violations;
                return h;
            },
            rect, params, bc_of(c, *rect), run);
        rec.name = "self_dual_crossing_probability";
        rec.context.n = n;
        rec.extra["dichotomy_violations"] = static_cast<double>(violations.load());
        return {rec};
    }

    auto box = build_box(n);
    const auto bc = bc_of(c, *box);
    validate(run.sampler, *box, params);
    const Predicate crossing = [box](const Configuration& cfg) { return has_horizontal_crossing(cfg, *box); };
    const Predicate always = [](const Configuration&) { return true; };
    EstimateRecord rec;
    if (target == "crossing") {
        rec = estimate_probability(crossing, box, params, bc, run);
        rec.name = "crossing_probability";
    } else if (target == "edge-density") {
        rec = estimate_conditional_mean(edge_density, always, box, params, bc, run);
        rec.name = "edge_density";
    } else if (target == "chemical-distance") {
        rec = estimate_conditional_mean(
            [box](const Configuration& cfg) { return static_cast<double>(*chemical_distance(cfg, *box)); }, crossing,
            box, params, bc, run);
        rec.name = "chemical_distance_given_crossing";
    } else if (target == "lowest-crossing") {
        rec = estimate_conditional_mean(
            [box](const Configuration& cfg) { return static_cast<double>(lowest_crossing(cfg, *box)->path.size()); },
            crossing, box, params, bc, run);
        rec.name = "lowest_crossing_length_given_crossing";
    } else if (target == "radial-distance") {
        rec = estimate_conditional_mean(
            [box](const Configuration& cfg) { return static_cast<double>(*radial_chemical_distance(cfg, *box)); },
            [box](const Configuration& cfg) { return radial_chemical_distance(cfg, *box).has_value(); }, box, params,
            bc, run);
        rec.name = "radial_distance_given_connection";
    } else if (target == "three-arm") {
        const int cap = c.has("cap") ? c.integer("cap") : n;
        rec = estimate_conditional_mean(
            [box, cap](const Configuration& cfg) {
                const auto lc = lowest_crossing(cfg, *box);
                return static_cast<double>(three_arm_point_count(cfg, *box, *lc, cap)) /
                       static_cast<double>(lc->path.size());
            },
            crossing, box, params, bc, run);
        rec.name = "three_arm_pass_fraction";
        rec.extra["cap"] = cap;
    } else {
        throw UsageError("unknown estimate target '" + target + "'");
    }
    return {rec};
}

EstimateRecord check_record(const std::string& name, double value, bool pass, const Config& c) {
    EstimateRecord rec;
    rec.name = name;
    rec.value = value;
    rec.context.q = c.number("q");
    rec.context.p = params_of(c).p;
    rec.context.bc = c.text("bc");
    rec.context.seed = c.doc.at("seed").get<std::uint64_t>();
    rec.extra["pass"] = pass ? 1.0 : 0.0;
    return rec;
}

std::vector<EstimateRecord> cmd_verify(const Config& c, bool& all_pass) {
    const std::string target = c.has("target") ? c.text("target") : "oracle";
    if (target != "oracle") throw UsageError("unknown verify suite '" + target + "'");
    const Params params = params_of(c);
    const RunSpec run = run_of(c);
    std::vector<EstimateRecord> out;
    auto add = [&](EstimateRecord r) {
        if (r.extra.at("pass") == 0.0) all_pass = false;
        out.push_back(std::move(r));
    };
    auto edge = build_custom({make_edge({0, 0}, {1, 0})});
    auto b1 = build_box(1);
    std::uint64_t stream = 0;
    for (bool wired : {false, true}) {
        for (const auto& d : {std::shared_ptr<const Domain>(edge), std::shared_ptr<const Domain>(b1)}) {
            const auto bc = wired ? BoundaryCondition::wired(*d) : BoundaryCondition::free(*d);
            for (Algorithm a : applicable_algorithms(params.q)) {
                const ChiSquareResult r =
                    sampler_vs_exact(d, params, bc, a, run.samples_per_replica, run.sampler.thinning, run.seed + stream++);
                auto rec = check_record("verify_chi_square", r.p_value, r.p_value > 0.01, c);
                rec.context.algorithm = to_string(a);
                rec.context.bc = bc.name();
                rec.context.n = d == edge ? 0 : 1;
                rec.n_samples = r.samples;
                rec.extra["statistic"] = r.statistic;
                rec.extra["dof"] = r.dof;
                rec.extra["edges"] = d->edge_count();
                add(rec);
            }
        }
        const double cov = fkg_min_covariance(params, wired);
        auto fkg = check_record("verify_fkg_min_covariance", cov, cov >= -1e-12, c);
        fkg.context.bc = wired ? "wired" : "free";
        add(fkg);
        const double dm = domain_markov_max_error(params, wired, 20, run.seed);
        auto markov = check_record("verify_domain_markov_max_error", dm, dm <= 1e-10, c);
        markov.context.bc = wired ? "wired" : "free";
        add(markov);
    }
    const auto arms = arm_oracle_exhaustive({parse_sigma("O"), parse_sigma("C"), parse_sigma("OC"), parse_sigma("OOC")});
    auto arm = check_record("verify_arm_oracle_agreement", static_cast<double>(arms.agree) / static_cast<double>(arms.cases),
                            arms.all_good(), c);
    arm.n_samples = arms.cases;
    add(arm);
    const std::size_t bad = dichotomy_violations_exhaustive();
    add(check_record("verify_dichotomy_violations", static_cast<double>(bad), bad == 0, c));
    return out;
}

std::vector<EstimateRecord> cmd_fit(const Config& c) {
    if (!c.has("input")) throw UsageError("fit needs --input");
    const std::string x = c.has("x") ? c.text("x") : "n1_over_n2";
    std::vector<PowerPoint> pts;
    for (const auto& r : read_records(c.text("input"))) {
        const auto& e = r.estimate;
        if (c.has("name") && e.name != c.text("name")) continue;
        if (e.error) continue;
        double xv = 0.0;
        if (x == "n1_over_n2") xv = double(e.context.n1) / e.context.n2;
        else if (x == "n2_over_n1") xv = double(e.context.n2) / e.context.n1;
        else if (x == "n") xv = e.context.n;
        else if (x == "n2") xv = e.context.n2;
        else throw UsageError("--x must be n1_over_n2, n2_over_n1, n or n2");
        pts.push_back({xv, e.value, e.std_error});
    }
    const PowerLawFit f = fit_power_law(pts, 2000, c.doc.at("seed").get<std::uint64_t>());
    EstimateRecord rec;
    rec.name = "power_law_fit";
    rec.value = f.exponent;
    rec.std_error = (f.ci_high - f.ci_low) / (2.0 * 1.959963984540054);
    rec.n_samples = pts.size();
    rec.n_effective = static_cast<double>(pts.size());
    rec.context.seed = c.doc.at("seed").get<std::uint64_t>();
    rec.extra["ci_low"] = f.ci_low;
    rec.extra["ci_high"] = f.ci_high;
    rec.extra["intercept_log"] = f.intercept_log;
    rec.extra["r_squared"] = f.r_squared;
    return {rec};
}

std::vector<EstimateRecord> cmd_extremal(const Config& c) {
    const int n = need(c, "n"), m = need(c, "m");
    Quad quad = Quad::rectangle(n, m);
    const double holes = c.has("holes") ? c.number("holes") : 0.0;
    if (holes < 0.0 || holes >= 1.0) throw UsageError("--holes must lie in [0, 1)");
    if (holes > 0.0) {
        std::mt19937_64 gen(c.doc.at("seed").get<std::uint64_t>());
        std::bernoulli_distribution drop(holes);
        std::vector<Edge> kept;
        for (const Edge& e : quad.domain->edges()) {
            const bool interior = e.a.x > 0 && e.b.x < n && e.a.y > 0 && e.b.y < m;
            if (!(interior && drop(gen))) kept.push_back(e);
        }
        quad.domain = build_custom(kept);
    }
    const ExtremalSolution s = solve_extremal(quad);
    EstimateRecord rec;
    rec.name = "extremal_distance";
    rec.value = s.value;
    rec.context.seed = c.doc.at("seed").get<std::uint64_t>();
    rec.extra["residual"] = s.residual;
    rec.extra["iterations"] = s.iterations;
    rec.extra["aspect_ratio"] = double(n) / m;
    rec.extra["holes"] = holes;
    return {rec};
}

std::vector<EstimateRecord> cmd_bound_series(const Config& c) {
    if (!c.has("n_list")) throw UsageError("bound-series needs --n-list");
    const auto ns = parse_list(c.text("n_list"));
    const Params params = params_of(c);
    const RunSpec run = run_of(c);
    validate(run.sampler, *build_box(ns.front()), params);
    return bound_ratio_series(ns, params, wired_of(c), run);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rclab: random-cluster experiments on Z^2", "rclab"};
    app.require_subcommand(1);
    Flags flags;
    struct Spec {
        const char* name;
        const char* help;
    };
    const std::vector<Spec> commands{{"sample", "run chains on B(n), report edge density, optionally checkpoint"},
                                     {"estimate", "Monte Carlo estimate of a target observable"},
                                     {"verify", "exact-oracle suite (chi-square, FKG, domain Markov, arms, duality)"},
                                     {"fit", "power-law fit over records in a JSON Lines file"},
                                     {"extremal", "extremal distance of an n x m rectangle, optionally with holes"},
                                     {"bound-series", "E[S|H] and E[#l|H] over n^2 pi3(1,n) for a list of n"}};
    struct OptSpec {
        const char* key;
        const char* flag;
        const char* help;
    };
    const std::vector<OptSpec> options{
        {"config", "--config", "JSON file with any of these options; flags override it"},
        {"q", "--q", "cluster weight in [1, 4] (default 1)"},
        {"p", "--p", "edge weight or 'critical' (default critical)"},
        {"n", "--n", "box half-side (rectangle length for extremal)"},
        {"n1", "--n1", "inner annulus radius"},
        {"n2", "--n2", "outer annulus radius"},
        {"n3", "--n3", "middle radius for quasi-mult"},
        {"box", "--box", "half-side of the sampling box for arm events (default 2 n2)"},
        {"m", "--m", "rectangle width for extremal"},
        {"bc", "--bc", "free or wired (default free)"},
        {"algorithm", "--algorithm", "heat-bath, swendsen-wang, chayes-machta or exact"},
        {"seed", "--seed", "64-bit seed (generated and recorded when absent)"},
        {"samples", "--samples", "samples per replica (default 10000)"},
        {"burn_in", "--burn-in", "burn-in sweeps (default 20 x pilot autocorrelation time)"},
        {"thinning", "--thinning", "sweeps between samples (default 1; 10 for verify)"},
        {"replicas", "--replicas", "independent chains (default 1)"},
        {"sigma", "--sigma", "arm colour sequence, e.g. OOC (default OOC)"},
        {"n_list", "--n-list", "comma-separated box sizes for bound-series"},
        {"holes", "--holes", "fraction of interior edges removed for extremal"},
        {"cap", "--cap", "cap radius of the three-arm check (default n)"},
        {"input", "--input", "records file for fit"},
        {"x", "--x", "fit abscissa: n1_over_n2, n2_over_n1, n or n2"},
        {"name", "--name", "only fit records with this name"},
        {"checkpoint", "--checkpoint", "checkpoint path written by sample"},
        {"output", "--output", "append records to this file instead of stdout"},
        {"csv", "--csv", "also write a CSV summary here"},
    };
    std::map<std::string, std::string> raw;
    std::string target;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->callback([&flags, name = std::string(cmd.name)] { flags.command = name; });
        if (std::string(cmd.name) == "estimate" || std::string(cmd.name) == "verify") {
            sub->add_option("target", target,
                            std::string(cmd.name) == "estimate"
                                ? "crossing, self-dual-crossing, chemical-distance, lowest-crossing, radial-distance, "
                                  "three-arm, edge-density, arm or quasi-mult"
                                : "oracle");
        }
        for (const auto& o : options) {
            sub->add_option_function<std::string>(
                o.flag, [&raw, key = std::string(o.key)](const std::string& v) { raw[key] = v; }, o.help);
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "rclab: " << e.what() << "\n";
        return kExitUsage;
    }
    flags.values = raw;
    if (!target.empty()) flags.values["target"] = target;

    std::string output, csv;
    Config config;
    try {
        config = resolve(flags, output, csv);
    } catch (const std::exception& e) {
        err << "rclab: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    std::vector<EstimateRecord> estimates;
    bool verified = true;
    try {
        const std::string& cmd = flags.command;
        if (cmd == "sample") estimates = cmd_sample(config);
        else if (cmd == "estimate") estimates = cmd_estimate(config);
        else if (cmd == "verify") estimates = cmd_verify(config, verified);
        else if (cmd == "fit") estimates = cmd_fit(config);
        else if (cmd == "extremal") estimates = cmd_extremal(config);
        else estimates = cmd_bound_series(config);
    } catch (const std::invalid_argument& e) {
        err << "rclab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "rclab: " << e.what() << "\n";
        return kExitFailure;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<MeasurementRecord> records;
    const std::string hash = config_hash(config.doc);
    for (auto& e : estimates) {
        MeasurementRecord r;
        r.estimate = std::move(e);
        r.config = config.doc;
        r.config_hash = hash;
        r.wall_clock_seconds = wall;
        records.push_back(std::move(r));
    }
    try {
        if (output.empty()) {
            for (const auto& r : records) out << serialize_record(r);
            out.flush();
        } else {
            write_records(records, output);
        }
        if (!csv.empty()) write_csv(records, csv);
    } catch (const std::exception& e) {
        err << "rclab: " << e.what() << "\n";
        return kExitFailure;
    }
    bool errored = false;
    for (const auto& r : records) errored |= r.estimate.error.has_value();
    if (!verified) err << "rclab: verification failed\n";
    return verified && !errored ? kExitOk : kExitFailure;
}

}  // namespace rclab
