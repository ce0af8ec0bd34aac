// Runs the acceptance criteria at their stated tolerances and prints one
// PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rclab/analysis.hpp"
#include "rclab/cli.hpp"
#include "rclab/paths.hpp"
#include "rclab/records.hpp"
#include "rclab/verify.hpp"

using namespace rclab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void note(const std::string& s) {
    std::printf("    %s\n", s.c_str());
    std::fflush(stdout);
}

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t k) { return splitmix64(base ^ splitmix64(k)); }

// ---------------------------------------------------------------------- 1

// Thinning so that successive samples are close to independent, from the
// integrated autocorrelation time of two observables on a pilot run.
int choose_thinning(std::shared_ptr<const Domain> d, const Params& pr, const BoundaryCondition& bc, Algorithm a,
                    std::uint64_t seed) {
    SamplerSpec s;
    s.algorithm = a;
    s.burn_in = 1000;
    Chain chain(s, d, pr, bc, seed, 99);
    std::vector<double> open, clusters;
    for (int i = 0; i < 20000; ++i) {
        const Configuration& c = chain.next();
        open.push_back(c.open_count());
        clusters.push_back(cluster_count(c, bc));
    }
    double tau = 0.5;
    for (const auto* series : {&open, &clusters}) {
        try {
            tau = std::max(tau, autocorrelation(*series));
        } catch (const DomainError&) {
            // constant observable
        }
    }
    return tau <= 0.6 ? 1 : static_cast<int>(std::ceil(10.0 * tau));
}

Outcome criterion_oracle_agreement() {
    const std::vector<std::pair<std::string, std::shared_ptr<const Domain>>> domains{
        {"edge", build_rect(0, 1, 0, 0)}, {"B(1)", build_box(1)}};
    int cells = 0, good = 0;
    double worst_p = 1.0, slowest = 0.0;
    std::uint64_t k = 0;
    for (const auto& [dname, d] : domains) {
        for (double q : {1.0, 1.5, 2.0, 3.0, 4.0}) {
            const Params pr = Params::critical(q);
            for (bool wired : {false, true}) {
                const auto bc = wired ? BoundaryCondition::wired(*d) : BoundaryCondition::free(*d);
                for (Algorithm a : applicable_algorithms(q)) {
                    const auto t = Clock::now();
                    const std::uint64_t seed = cell_seed(1, ++k);
                    const int thinning = choose_thinning(d, pr, bc, a, seed);
                    const ChiSquareResult r = sampler_vs_exact(d, pr, bc, a, 1000000, thinning, seed);
                    const double secs = seconds_since(t);
                    const bool ok = r.p_value > 0.01 && secs < 300.0;
                    ++cells;
                    good += ok ? 1 : 0;
                    worst_p = std::min(worst_p, r.p_value);
                    slowest = std::max(slowest, secs);
                    if (!ok) {
                        note(fmt("cell %s q=%g %s %s: chi2=%.1f dof=%d p=%.3g thinning=%d %.1fs", dname.c_str(), q,
                                 bc.name(), to_string(a).c_str(), r.statistic, r.dof, r.p_value, thinning, secs));
                    }
                }
            }
        }
    }
    return {good == cells, fmt("%d/%d cells with p > 0.01 at 1e6 samples; min p = %.3g; slowest cell %.1f s", good,
                               cells, worst_p, slowest)};
}

// ---------------------------------------------------------------------- 2

Outcome criterion_bernoulli_reduction() {
    auto box = build_box(16);
    const Params pr = Params::critical(1.0);
    const auto bc = BoundaryCondition::free(*box);
    const int m = box->edge_count();
    const std::size_t samples = 20000;
    SamplerSpec spec;
    spec.algorithm = Algorithm::HeatBath;
    spec.burn_in = 100;
    Chain chain(spec, box, pr, bc, 2, 0);

    std::vector<std::uint32_t> single(static_cast<std::size_t>(m), 0);
    std::vector<std::uint32_t> pair(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0);
    std::vector<int> open;
    for (std::size_t s = 0; s < samples; ++s) {
        const Configuration& c = chain.next();
        open.clear();
        for (int e = 0; e < m; ++e) {
            if (c.open(e)) open.push_back(e);
        }
        for (std::size_t i = 0; i < open.size(); ++i) {
            ++single[static_cast<std::size_t>(open[i])];
            std::uint32_t* row = &pair[static_cast<std::size_t>(open[i]) * static_cast<std::size_t>(m)];
            for (std::size_t j = i + 1; j < open.size(); ++j) ++row[open[j]];
        }
    }
    const double n = static_cast<double>(samples);
    double worst_marginal = 0.0;
    for (int e = 0; e < m; ++e) {
        const double f = single[static_cast<std::size_t>(e)] / n;
        const double se = std::sqrt(pr.p * (1 - pr.p) / n);
        worst_marginal = std::max(worst_marginal, std::abs(f - pr.p) / se);
    }
    // z-score of each sample covariance; its standard error comes from the
    // empirical variance of (x - mean x)(y - mean y)
    std::size_t pairs = 0, beyond = 0, adjacent = 0, adjacent_beyond = 0;
    double worst_cov = 0.0;
    for (int a = 0; a < m; ++a) {
        const double fa = single[static_cast<std::size_t>(a)] / n;
        for (int b = a + 1; b < m; ++b) {
            const double fb = single[static_cast<std::size_t>(b)] / n;
            const double f11 = pair[static_cast<std::size_t>(a) * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)] / n;
            const double f10 = fa - f11, f01 = fb - f11, f00 = 1.0 - fa - fb + f11;
            const double cov = f11 - fa * fb;
            const double z11 = (1 - fa) * (1 - fb), z10 = -(1 - fa) * fb, z01 = -fa * (1 - fb), z00 = fa * fb;
            const double ez2 = f11 * z11 * z11 + f10 * z10 * z10 + f01 * z01 * z01 + f00 * z00 * z00;
            const double se = std::sqrt(std::max(ez2 - cov * cov, 1e-300) / n);
            const double z = std::abs(cov) / se;
            ++pairs;
            beyond += z > 4.0 ? 1 : 0;
            worst_cov = std::max(worst_cov, z);
            const Edge& ea = box->edges()[static_cast<std::size_t>(a)];
            const Edge& eb = box->edges()[static_cast<std::size_t>(b)];
            if (ea.a == eb.a || ea.a == eb.b || ea.b == eb.a || ea.b == eb.b) {
                ++adjacent;
                adjacent_beyond += z > 4.0 ? 1 : 0;
            }
        }
    }
    const double tail = std::erfc(4.0 / std::sqrt(2.0));
    note(fmt("%zu pairs, %zu beyond 4 sigma (%.1f expected for exactly independent edges); "
             "%zu/%zu adjacent pairs beyond 4 sigma",
             pairs, beyond, tail * static_cast<double>(pairs), adjacent_beyond, adjacent));
    const bool ok = worst_marginal <= 4.0 && beyond == 0;
    return {ok, fmt("n=16, %d edges, %zu samples: max marginal |z| = %.2f; max covariance |z| = %.2f over %zu pairs", m,
                    samples, worst_marginal, worst_cov, pairs)};
}

// ---------------------------------------------------------------------- 3

Outcome criterion_fkg_domain_markov() {
    double worst_markov = 0.0, worst_cov = INFINITY;
    for (double q : {1.0, 1.5, 2.0, 3.0, 4.0}) {
        for (double p : {critical_point(q), 0.3, 0.7}) {
            const Params pr = Params::make(p, q);
            for (bool wired : {false, true}) {
                worst_markov = std::max(worst_markov, domain_markov_max_error(pr, wired, 10, 5));
                worst_cov = std::min(worst_cov, fkg_min_covariance(pr, wired));
            }
        }
    }
    return {worst_markov <= 1e-10 && worst_cov >= -1e-12,
            fmt("q in {1,1.5,2,3,4}, p in {p_c,0.3,0.7}, free/wired: max domain-Markov error %.2e, min covariance %.2e",
                worst_markov, worst_cov)};
}

// ---------------------------------------------------------------------- 4

Outcome criterion_dichotomy() {
    const std::size_t exhaustive_bad = dichotomy_violations_exhaustive();
    std::size_t sampled = 0, bad = 0;
    double estimate = 0.0, se = 0.0;
    for (double q : {1.0, 2.0, 4.0}) {
        auto rect = build_crossing_rectangle(16);
        const Params pr = Params::critical(q);
        SamplerSpec spec;
        spec.algorithm = q == 1.0 ? Algorithm::HeatBath : Algorithm::SwendsenWang;
        const std::size_t per = q == 1.0 ? 100000 : 20000;
        const SampleSeries s = sample_series(spec, rect, pr, BoundaryCondition::free(*rect), 4, per,
                                             Measurement([rect](const Configuration& c) {
                                                 const bool h = has_horizontal_crossing(c, *rect);
                                                 const bool v = has_dual_vertical_crossing(c, *rect);
                                                 return std::vector<double>{h ? 1.0 : 0.0, h == v ? 1.0 : 0.0};
                                             }));
        sampled += s.total();
        for (double x : s.column(1)) bad += x != 0.0 ? 1 : 0;
        if (q == 1.0) {
            const BatchStats b = batch_stats(s);
            estimate = b.mean[0];
            se = b.std_error(0);
        }
    }
    const bool ok = exhaustive_bad == 0 && bad == 0 && std::abs(estimate - 0.5) <= 4.0 * se;
    return {ok, fmt("%zu violations in all 2^17 configurations, %zu in %zu sampled (q=1,2,4, n=16); "
                    "q=1 crossing %.4f +- %.4f (|z| = %.2f)",
                    exhaustive_bad, bad, sampled, estimate, se, std::abs(estimate - 0.5) / se)};
}

// ---------------------------------------------------------------------- 5

Outcome criterion_three_arm() {
    std::size_t edges = 0, passed = 0, crossings = 0;
    for (double q : {1.0, 2.0}) {
        for (int n : {8, 16, 32}) {
            auto box = build_box(n);
            const Params pr = Params::critical(q);
            SamplerSpec spec;
            spec.algorithm = q == 1.0 ? Algorithm::HeatBath : Algorithm::SwendsenWang;
            const std::size_t per = n == 8 ? 1000 : n == 16 ? 400 : 150;
            const SampleSeries s = sample_series(
                spec, box, pr, BoundaryCondition::free(*box), 6, per, Measurement([box, n](const Configuration& c) {
                    const auto lc = lowest_crossing(c, *box);
                    if (!lc) return std::vector<double>{0.0, 0.0};
                    return std::vector<double>{static_cast<double>(lc->path.size()),
                                               static_cast<double>(three_arm_point_count(c, *box, *lc, n))};
                }));
            const auto total = s.column(0), ok = s.column(1);
            for (std::size_t i = 0; i < total.size(); ++i) {
                crossings += total[i] > 0 ? 1 : 0;
                edges += static_cast<std::size_t>(total[i]);
                passed += static_cast<std::size_t>(ok[i]);
            }
        }
    }
    return {crossings > 0 && passed == edges,
            fmt("%zu/%zu edges on %zu lowest crossings are three-arm points (n=8,16,32, q=1,2)", passed, edges,
                crossings)};
}

// ---------------------------------------------------------------------- 6

Outcome criterion_five_arm() {
    const auto t = Clock::now();
    const Sigma sigma = parse_sigma("OCOCO");
    const int n1 = 1;
    bool ok = true;
    std::string detail;
    for (double q : {1.0, 2.0}) {
        const Params pr = Params::critical(q);
        std::vector<PowerPoint> pts;
        double min_neff = INFINITY;
        for (int ratio : {4, 8, 16}) {
            RunSpec run;
            run.sampler.algorithm = q == 1.0 ? Algorithm::HeatBath : Algorithm::SwendsenWang;
            run.seed = cell_seed(6, static_cast<std::uint64_t>(ratio) * 10 + static_cast<std::uint64_t>(q));
            run.samples_per_replica = q == 1.0 ? 115000 : 160000;
            EstimateRecord r = estimate_arm_probability(n1, n1 * ratio, sigma, 2 * n1 * ratio, pr, false, run);
            if (r.n_effective < 1e5) {
                run.samples_per_replica = static_cast<std::size_t>(
                    std::ceil(static_cast<double>(run.samples_per_replica) * 1.15e5 / std::max(r.n_effective, 1.0)));
                r = estimate_arm_probability(n1, n1 * ratio, sigma, 2 * n1 * ratio, pr, false, run);
            }
            note(fmt("q=%g n2/n1=%d: pi5 = %.5f +- %.5f, n_eff = %.0f", q, ratio, r.value, r.std_error,
                     r.n_effective));
            pts.push_back({static_cast<double>(ratio), r.value, r.std_error});
            min_neff = std::min(min_neff, r.n_effective);
        }
        const PowerLawFit f = fit_power_law(pts, 2000, 6);
        const double beta = -f.exponent;
        const bool q_ok = std::abs(beta - 2.0) <= 0.4 && min_neff >= 1e5;
        ok = ok && q_ok;
        detail += fmt("q=%g: beta = %.3f [%.3f, %.3f], min n_eff %.0f; ", q, beta, -f.ci_high, -f.ci_low, min_neff);
    }
    const double secs = seconds_since(t);
    ok = ok && secs <= 3600.0;
    return {ok, detail + fmt("%.0f s", secs)};
}

// ---------------------------------------------------------------------- 7

Outcome criterion_quasi_multiplicativity() {
    const Sigma sigma = parse_sigma("OOC");
    bool ok = true;
    std::string detail;
    for (double q : {1.0, 2.0, 4.0}) {
        const Params pr = Params::critical(q);
        RunSpec run;
        run.sampler.algorithm = q == 1.0 ? Algorithm::HeatBath : Algorithm::SwendsenWang;
        run.samples_per_replica = 20000;
        run.seed = cell_seed(7, static_cast<std::uint64_t>(q));
        const EstimateRecord a = quasi_mult_ratio(2, 4, 8, sigma, pr, false, run);
        run.seed = cell_seed(7, 100 + static_cast<std::uint64_t>(q));
        const EstimateRecord b = quasi_mult_ratio(4, 8, 16, sigma, pr, false, run);
        const double sigma_c = std::hypot(a.std_error, b.std_error);
        const double z = std::abs(a.value - b.value) / sigma_c;
        ok = ok && z <= 3.0;
        detail += fmt("q=%g: %.4f +- %.4f vs %.4f +- %.4f (%.2f sigma); ", q, a.value, a.std_error, b.value,
                      b.std_error, z);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------- 8

Outcome criterion_bound_series() {
    bool ok = true;
    std::string detail;
    for (double q : {1.0, 2.0}) {
        RunSpec run;
        run.sampler.algorithm = q == 1.0 ? Algorithm::HeatBath : Algorithm::SwendsenWang;
        run.samples_per_replica = 4000;
        run.seed = cell_seed(8, static_cast<std::uint64_t>(q));
        const std::vector<int> ns{16, 32, 64};
        const auto recs = bound_ratio_series(ns, Params::critical(q), false, run);
        std::vector<const EstimateRecord*> s, l;
        for (const auto& r : recs) (r.name == "S_ratio" ? s : l).push_back(&r);
        bool exceed = false;
        for (const auto* r : s) exceed = exceed || r->extra.at("s_exceeds_l_samples") != 0.0;
        // a blow-up is a strictly increasing L ratio whose total rise exceeds 2 combined sigma
        const bool rising = l[0]->value < l[1]->value && l[1]->value < l[2]->value;
        const bool blow_up = rising && l[2]->value - l[0]->value > 2.0 * std::hypot(l[0]->std_error, l[2]->std_error);
        bool s_monotone = true;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            s_monotone = s_monotone && s[i + 1]->value <= s[i]->value + 2.0 * std::hypot(s[i]->std_error, s[i + 1]->std_error);
        }
        ok = ok && !exceed && !blow_up && s_monotone;
        std::string ls, ss;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            ls += fmt("%s%.3f+-%.3f", i ? "," : "", l[i]->value, l[i]->std_error);
            ss += fmt("%s%.3f+-%.3f", i ? "," : "", s[i]->value, s[i]->std_error);
        }
        detail += fmt("q=%g: L ratio %s, S ratio %s, S>#l in %s; ", q, ls.c_str(), ss.c_str(),
                      exceed ? "some samples" : "no sample");
    }
    return {ok, detail + "n = 16, 32, 64"};
}

// ---------------------------------------------------------------------- 9

Outcome criterion_arm_oracle() {
    std::vector<Sigma> sigmas;
    for (const char* s : {"O", "C", "OC", "OOC"}) sigmas.push_back(parse_sigma(s));
    const AgreementSummary ex = arm_oracle_exhaustive(sigmas, 4, 9);
    AgreementSummary rnd;
    std::uint64_t k = 0;
    for (auto [n1, n2] : {std::pair{1, 3}, std::pair{2, 4}}) {
        for (double p : {0.4, 0.5, 0.6}) {
            const int count = p == 0.5 ? 168 : 166;
            const AgreementSummary r = arm_oracle_random(n1, n2, parse_sigma("OCOCO"), count, p, cell_seed(9, ++k));
            rnd.cases += r.cases;
            rnd.agree += r.agree;
            rnd.occurring += r.occurring;
            rnd.witnesses_valid += r.witnesses_valid;
        }
    }
    return {ex.all_good() && rnd.all_good() && rnd.cases == 1000,
            fmt("exhaustive Ann(1,2): %zu/%zu agree, %zu/%zu witnesses valid; random OCOCO on Ann(1,3), Ann(2,4): "
                "%zu/%zu agree, %zu/%zu witnesses valid",
                ex.agree, ex.cases, ex.witnesses_valid, ex.occurring, rnd.agree, rnd.cases, rnd.witnesses_valid,
                rnd.occurring)};
}

// --------------------------------------------------------------------- 10

Outcome criterion_extremal() {
    double worst_rel = 0.0, worst_res = 0.0;
    for (auto [n, m] : {std::pair{8, 4}, {4, 8}, {6, 6}, {12, 3}, {10, 7}, {16, 8}, {5, 15}}) {
        const ExtremalSolution s = solve_extremal(Quad::rectangle(n, m));
        worst_rel = std::max(worst_rel, std::abs(s.value - static_cast<double>(n) / m) / (static_cast<double>(n) / m));
        worst_res = std::max(worst_res, s.residual);
    }
    std::mt19937_64 gen(10);
    int monotone = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> side(3, 12);
        const int n = side(gen), m = side(gen);
        const Quad full = Quad::rectangle(n, m);
        std::bernoulli_distribution drop(0.12);
        auto interior = [&](const Edge& e) { return e.a.x > 0 && e.b.x < n && e.a.y > 0 && e.b.y < m; };
        std::vector<Edge> outer_edges, inner_edges;
        for (const Edge& e : full.domain->edges()) {
            if (interior(e) && drop(gen)) continue;
            outer_edges.push_back(e);
            if (!(interior(e) && drop(gen))) inner_edges.push_back(e);
        }
        Quad d = full, sub = full;
        d.domain = build_custom(outer_edges);
        sub.domain = build_custom(inner_edges);
        const ExtremalSolution a = solve_extremal(d), b = solve_extremal(sub);
        if (std::isfinite(a.value)) worst_res = std::max(worst_res, a.residual);
        if (std::isfinite(b.value)) worst_res = std::max(worst_res, b.residual);
        // the solver converges to 1e-10; compare at 1e-9 relative
        if (b.value >= a.value * (1.0 - 1e-9)) ++monotone;
    }
    return {worst_rel <= 0.15 && monotone == 100 && worst_res <= 1e-9,
            fmt("rectangles: max relative error %.2e; subdomain monotonicity %d/100; max residual %.2e", worst_rel,
                monotone, worst_res)};
}

// --------------------------------------------------------------------- 11

std::string without_wall_clock(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        j.erase("wall_clock_seconds");
        out += dump_json(j) + "\n";
    }
    return out;
}

Outcome criterion_reproducibility() {
    const std::vector<std::vector<std::string>> commands{
        {"estimate", "crossing", "--n", "8", "--q", "2", "--samples", "500", "--replicas", "3"},
        {"estimate", "self-dual-crossing", "--n", "6", "--q", "1.5", "--samples", "500"},
        {"estimate", "chemical-distance", "--n", "8", "--q", "1", "--samples", "500", "--bc", "wired"},
        {"estimate", "lowest-crossing", "--n", "8", "--q", "3", "--samples", "300"},
        {"estimate", "radial-distance", "--n", "8", "--q", "4", "--samples", "300", "--algorithm", "chayes-machta"},
        {"estimate", "three-arm", "--n", "8", "--q", "2", "--samples", "100"},
        {"estimate", "edge-density", "--n", "4", "--q", "1.5", "--samples", "500", "--replicas", "2"},
        {"estimate", "arm", "--n1", "1", "--n2", "4", "--sigma", "OCOCO", "--q", "2", "--samples", "500"},
        {"estimate", "quasi-mult", "--n1", "1", "--n3", "2", "--n2", "4", "--q", "1", "--samples", "500"},
    };
    int identical = 0, ran = 0;
    for (auto args : commands) {
        args.insert(args.end(), {"--seed", "20261016"});
        std::ostringstream o1, o2, e1, e2;
        const int c1 = run_command(args, o1, e1);
        const int c2 = run_command(args, o2, e2);
        ++ran;
        if (c1 == kExitOk && c2 == kExitOk && !o1.str().empty() && without_wall_clock(o1.str()) == without_wall_clock(o2.str())) {
            ++identical;
        } else {
            note("not reproduced: " + args[1] + " " + e1.str());
        }
    }
    return {identical == ran, fmt("%d/%d estimate commands byte-identical on rerun (wall-clock field excluded)",
                                  identical, ran)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("acceptance criteria");
    std::vector<int> only, known;
    app.add_option("--only", only, "criterion numbers to run");
    app.add_option("--known-failures", known, "criteria whose failure is documented; they do not set the exit code")
        ->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle agreement", criterion_oracle_agreement},
        {"Bernoulli reduction", criterion_bernoulli_reduction},
        {"exact FKG and domain Markov", criterion_fkg_domain_markov},
        {"duality dichotomy", criterion_dichotomy},
        {"lowest-crossing three-arm points", criterion_three_arm},
        {"five-arm exponent", criterion_five_arm},
        {"quasi-multiplicativity", criterion_quasi_multiplicativity},
        {"bound ratio trend", criterion_bound_series},
        {"arm detector vs oracle", criterion_arm_oracle},
        {"extremal distance", criterion_extremal},
        {"reproducibility", criterion_reproducibility},
    };
    int failed = 0, unexpected = 0, run = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        const auto t = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        ++run;
        const bool is_known = std::find(known.begin(), known.end(), number) != known.end();
        failed += o.pass ? 0 : 1;
        unexpected += o.pass || is_known ? 0 : 1;
        std::printf("[%s] %2d %s: %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(t),
                    is_known ? (o.pass ? " [listed as a known failure]" : " [known failure, see README]") : "");
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed, %d unexpected failures\n", run - failed, run, unexpected);
    return unexpected == 0 ? 0 : 1;
}
