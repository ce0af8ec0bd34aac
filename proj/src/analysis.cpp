#include "rclab/analysis.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>

#include "rclab/paths.hpp"

namespace rclab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quad_form(const std::vector<double>& g, const std::vector<std::vector<double>>& cov) {
    double v = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) v += g[i] * cov[i][j] * g[j];
    }
    return std::max(v, 0.0);
}

EstimateContext make_context(const Domain& domain, const Params& params, const BoundaryCondition& bc,
                             const RunSpec& run) {
    EstimateContext ctx;
    ctx.q = params.q;
    ctx.p = params.p;
    ctx.bc = bc.name();
    ctx.seed = run.seed;
    ctx.algorithm = to_string(run.sampler.algorithm);
    if (const auto* r = dynamic_cast<const RectDomain*>(&domain); r && r->is_box()) ctx.n = r->half_side();
    if (const auto* a = dynamic_cast<const AnnulusDomain*>(&domain)) {
        ctx.n1 = a->n1();
        ctx.n2 = a->n2();
    }
    return ctx;
}

SampleSeries run_series(std::shared_ptr<const Domain> domain, const Params& params, const BoundaryCondition& bc,
                        const RunSpec& run, const std::function<Measurement()>& factory) {
    if (run.samples_per_replica == 0 || run.sampler.replicas < 1) throw DomainError("zero effective samples");
    return sample_series(run.sampler, std::move(domain), params, bc, run.seed, run.samples_per_replica, factory,
                         edge_density);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

BoundaryCondition make_bc(const Domain& d, bool wired) {
    return wired ? BoundaryCondition::wired(d) : BoundaryCondition::free(d);
}

}  // namespace

// ------------------------------------------------------------ batch means

double BatchStats::std_error(std::size_t k) const { return std::sqrt(std::max(cov[k][k], 0.0)); }

double BatchStats::n_effective(std::size_t k) const {
    const double nd = static_cast<double>(n);
    if (cov[k][k] <= 0.0) return nd;
    return std::clamp(variance[k] / cov[k][k], 0.0, nd);
}

BatchStats batch_stats(const SampleSeries& series, int min_batches) {
    BatchStats s;
    const std::size_t replicas = series.replicas.size();
    std::size_t cols = 0;
    for (const auto& r : series.replicas) {
        if (!r.empty()) cols = r.front().size();
    }
    s.mean.assign(cols, 0.0);
    s.variance.assign(cols, 0.0);
    s.cov.assign(cols, std::vector<double>(cols, 0.0));
    for (const auto& r : series.replicas) {
        for (const auto& row : r) {
            for (std::size_t k = 0; k < cols; ++k) s.mean[k] += row[k];
        }
        s.n += r.size();
    }
    if (s.n == 0) return s;
    for (double& m : s.mean) m /= static_cast<double>(s.n);
    for (const auto& r : series.replicas) {
        for (const auto& row : r) {
            for (std::size_t k = 0; k < cols; ++k) s.variance[k] += (row[k] - s.mean[k]) * (row[k] - s.mean[k]);
        }
    }
    if (s.n > 1) {
        for (double& v : s.variance) v /= static_cast<double>(s.n - 1);
    }

    const std::size_t per = (static_cast<std::size_t>(min_batches) + replicas - 1) / std::max<std::size_t>(replicas, 1);
    std::vector<std::vector<double>> means;
    for (const auto& r : series.replicas) {
        std::size_t nb = std::min(per, r.size());
        if (nb == 0) continue;
        const std::size_t size = r.size() / nb;
        for (std::size_t b = 0; b < nb; ++b) {
            std::vector<double> m(cols, 0.0);
            for (std::size_t i = b * size; i < (b + 1) * size; ++i) {
                for (std::size_t k = 0; k < cols; ++k) m[k] += r[i][k];
            }
            for (double& x : m) x /= static_cast<double>(size);
            means.push_back(std::move(m));
        }
    }
    s.batches = means.size();
    if (s.batches < 2) {
        for (std::size_t k = 0; k < cols; ++k) s.cov[k][k] = s.variance[k] / static_cast<double>(s.n);
        return s;
    }
    std::vector<double> centre(cols, 0.0);
    for (const auto& m : means) {
        for (std::size_t k = 0; k < cols; ++k) centre[k] += m[k];
    }
    for (double& c : centre) c /= static_cast<double>(s.batches);
    const double scale = 1.0 / (static_cast<double>(s.batches - 1) * static_cast<double>(s.batches));
    for (const auto& m : means) {
        for (std::size_t i = 0; i < cols; ++i) {
            for (std::size_t j = 0; j < cols; ++j) s.cov[i][j] += (m[i] - centre[i]) * (m[j] - centre[j]) * scale;
        }
    }
    return s;
}

// ------------------------------------------------------------- estimators

double edge_density(const Configuration& config) {
    return config.size() == 0 ? 0.0 : static_cast<double>(config.open_count()) / static_cast<double>(config.size());
}

EstimateRecord estimate_probability(const std::function<Predicate()>& event_factory,
                                    std::shared_ptr<const Domain> domain, const Params& params,
                                    const BoundaryCondition& bc, const RunSpec& run) {
    EstimateRecord rec;
    rec.name = "probability";
    rec.context = make_context(*domain, params, bc, run);
    const SampleSeries series = run_series(domain, params, bc, run, [&]() -> Measurement {
        auto event = std::make_shared<Predicate>(event_factory());
        return [event](const Configuration& c) { return std::vector<double>{(*event)(c) ? 1.0 : 0.0}; };
    });
    const BatchStats s = batch_stats(series);
    rec.value = s.mean[0];
    rec.std_error = s.std_error(0);
    rec.n_samples = s.n;
    rec.n_effective = s.n_effective(0);
    return rec;
}

EstimateRecord estimate_probability(const Predicate& event, std::shared_ptr<const Domain> domain,
                                    const Params& params, const BoundaryCondition& bc, const RunSpec& run) {
    return estimate_probability([&] { return event; }, std::move(domain), params, bc, run);
}

EstimateRecord estimate_conditional_mean(const Statistic& statistic, const Predicate& condition,
                                         std::shared_ptr<const Domain> domain, const Params& params,
                                         const BoundaryCondition& bc, const RunSpec& run) {
    EstimateRecord rec;
    rec.name = "conditional_mean";
    rec.context = make_context(*domain, params, bc, run);
    const SampleSeries series = run_series(domain, params, bc, run, [&]() -> Measurement {
        return [&](const Configuration& c) {
            const bool hit = condition(c);
            return std::vector<double>{hit ? 1.0 : 0.0, hit ? statistic(c) : 0.0};
        };
    });
    const BatchStats s = batch_stats(series);
    rec.n_samples = s.n;
    if (s.mean[0] <= 0.0) {
        rec.value = kNaN;
        rec.std_error = kNaN;
        rec.error = "conditioning event never occurred";
        return rec;
    }
    const double r = s.mean[1] / s.mean[0];
    rec.value = r;
    const double var = quad_form({-r / s.mean[0], 1.0 / s.mean[0]}, s.cov);
    rec.std_error = std::sqrt(var);
    // per-sample variance of the statistic given the condition
    double m2 = 0.0, hits = 0.0;
    for (const auto& rep : series.replicas) {
        for (const auto& row : rep) {
            if (row[0] > 0.0) {
                m2 += (row[1] - r) * (row[1] - r);
                hits += 1.0;
            }
        }
    }
    const double cond_var = hits > 1.0 ? m2 / (hits - 1.0) : 0.0;
    rec.n_effective = var > 0.0 ? std::clamp(cond_var / var, 0.0, hits) : hits;
    rec.extra["condition_probability"] = s.mean[0];
    return rec;
}

AnnulusEvent::AnnulusEvent(const Domain& host, Vertex center, int n1, int n2, Sigma sigma)
    : detector_(build_annulus(center, n1, n2)), sigma_(std::move(sigma)) {
    ArmSpec{std::shared_ptr<const AnnulusDomain>(std::shared_ptr<void>(), &detector_.annulus()), sigma_}.validate();
    for (const Edge& e : detector_.annulus().edges()) {
        const int h = host.find_edge(e);
        if (h < 0) throw InvalidGeometry("annulus is not contained in the host domain");
        host_edge_.push_back(h);
    }
    bits_.resize(host_edge_.size());
}

bool AnnulusEvent::operator()(const Configuration& config) {
    for (std::size_t i = 0; i < host_edge_.size(); ++i) bits_[i] = config.open(host_edge_[i]) ? 1 : 0;
    return detector_.detect(bits_, sigma_).occurs;
}

EstimateRecord estimate_arm_probability(int n1, int n2, const Sigma& sigma, int box_n, const Params& params,
                                        bool wired, const RunSpec& run) {
    if (box_n < n2) throw InvalidGeometry("box must contain the annulus");
    auto box = build_box(box_n);
    EstimateRecord rec = estimate_probability(
        std::function<Predicate()>([&]() -> Predicate {
            auto ev = std::make_shared<AnnulusEvent>(*box, Vertex{0, 0}, n1, n2, sigma);
            return [ev](const Configuration& c) { return (*ev)(c); };
        }),
        box, params, make_bc(*box, wired), run);
    rec.name = "arm_probability_" + to_string(sigma);
    rec.context.n1 = n1;
    rec.context.n2 = n2;
    return rec;
}

EstimateRecord quasi_mult_ratio(int n1, int n3, int n2, const Sigma& sigma, const Params& params, bool wired,
                                const RunSpec& run, int box_n) {
    if (!(n1 <= n3 && n3 <= n2)) throw InvalidGeometry("need n1 <= n3 <= n2");
    if (box_n == 0) box_n = 2 * n2;
    auto box = build_box(box_n);
    const auto bc = make_bc(*box, wired);
    EstimateRecord rec;
    rec.name = "quasi_mult_ratio_" + to_string(sigma);
    rec.context = make_context(*box, params, bc, run);
    rec.context.n1 = n1;
    rec.context.n2 = n2;
    rec.extra["n3"] = n3;
    if (n1 == n2) {
        rec.value = 1.0;
        return rec;
    }
    const SampleSeries series = run_series(box, params, bc, run, [&]() -> Measurement {
        std::shared_ptr<AnnulusEvent> inner, outer;
        if (n3 > n1) inner = std::make_shared<AnnulusEvent>(*box, Vertex{0, 0}, n1, n3, sigma);
        if (n2 > n3) outer = std::make_shared<AnnulusEvent>(*box, Vertex{0, 0}, n3, n2, sigma);
        auto whole = std::make_shared<AnnulusEvent>(*box, Vertex{0, 0}, n1, n2, sigma);
        return [inner, outer, whole](const Configuration& c) {
            return std::vector<double>{inner ? ((*inner)(c) ? 1.0 : 0.0) : 1.0,
                                       outer ? ((*outer)(c) ? 1.0 : 0.0) : 1.0, (*whole)(c) ? 1.0 : 0.0};
        };
    });
    const BatchStats s = batch_stats(series);
    const double a = s.mean[0], b = s.mean[1], c = s.mean[2];
    if (c <= 0.0) throw DomainError("pi(n1, n2) estimated as zero");
    rec.value = a * b / c;
    rec.std_error = std::sqrt(quad_form({b / c, a / c, -a * b / (c * c)}, s.cov));
    rec.n_samples = s.n;
    rec.n_effective = s.n_effective(2);
    rec.extra["pi_n1_n3"] = a;
    rec.extra["pi_n3_n2"] = b;
    rec.extra["pi_n1_n2"] = c;
    return rec;
}

namespace {

struct Line {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

Line weighted_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
        syy += w[i] * (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw DomainError("power-law fit needs distinct x values");
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    l.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return l;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<PowerPoint>& points, int bootstrap, std::uint64_t seed,
                          double confidence) {
    if (points.size() < 3) throw DomainError("power-law fit needs at least 3 points");
    std::vector<double> lx, ly, sl;
    bool weighted = true;
    for (const auto& p : points) {
        if (!(p.y > 0.0) || !(p.x > 0.0)) throw DomainError("power-law fit needs positive values");
        if (!(p.std_error >= 0.0)) throw DomainError("negative standard error");
        lx.push_back(std::log(p.x));
        ly.push_back(std::log(p.y));
        sl.push_back(p.std_error / p.y);
        if (p.std_error == 0.0) weighted = false;
    }
    std::vector<double> w(points.size(), 1.0);
    if (weighted) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / (sl[i] * sl[i]);
    }
    const Line fit = weighted_fit(lx, ly, w);
    PowerLawFit out;
    out.exponent = fit.slope;
    out.intercept_log = fit.intercept;
    out.r_squared = fit.r2;

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<double> residual(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) residual[i] = ly[i] - (fit.intercept + fit.slope * lx[i]);
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    std::vector<double> slopes, yb(points.size());
    for (int b = 0; b < bootstrap; ++b) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            // weighted: redraw each point within its error; otherwise resample residuals
            yb[i] = weighted ? ly[i] + sl[i] * normal(gen) : fit.intercept + fit.slope * lx[i] + residual[pick(gen)];
        }
        slopes.push_back(weighted_fit(lx, yb, w).slope);
    }
    out.ci_low = out.ci_high = out.exponent;
    if (!slopes.empty()) {
        const double tail = (1.0 - confidence) / 2.0;
        out.ci_low = std::min(out.exponent, quantile(slopes, tail));
        out.ci_high = std::max(out.exponent, quantile(slopes, 1.0 - tail));
    }
    return out;
}

EstimateRecord mixing_coefficient(const Predicate& a, const Predicate& b, std::shared_ptr<const Domain> domain,
                                  const Params& params, const BoundaryCondition& bc, const RunSpec& run) {
    EstimateRecord rec;
    rec.name = "mixing_coefficient";
    rec.context = make_context(*domain, params, bc, run);
    const SampleSeries series = run_series(domain, params, bc, run, [&]() -> Measurement {
        return [&](const Configuration& c) {
            const double x = a(c) ? 1.0 : 0.0, y = b(c) ? 1.0 : 0.0;
            return std::vector<double>{x, y, x * y};
        };
    });
    const BatchStats s = batch_stats(series);
    const double pa = s.mean[0], pb = s.mean[1], pab = s.mean[2];
    if (pa <= 0.0 || pb <= 0.0) throw DomainError("mixing coefficient needs nonzero marginals");
    rec.value = std::abs(pab - pa * pb) / (pa * pb);
    rec.std_error = std::sqrt(quad_form({-pab / (pa * pa * pb), -pab / (pa * pb * pb), 1.0 / (pa * pb)}, s.cov));
    rec.n_samples = s.n;
    rec.n_effective = std::min(s.n_effective(0), s.n_effective(1));
    rec.extra["p_a"] = pa;
    rec.extra["p_b"] = pb;
    rec.extra["p_ab"] = pab;
    return rec;
}

bool is_increasing(const Predicate& event, std::shared_ptr<const Domain> domain) {
    const int m = domain->edge_count();
    if (m > kMonotoneCheckMaxEdges) throw SizeCapExceeded("monotonicity check is limited to 12 edges");
    std::vector<char> value(std::size_t{1} << m);
    for (std::uint64_t mask = 0; mask < value.size(); ++mask) {
        value[mask] = event(Configuration::from_mask(domain, mask)) ? 1 : 0;
    }
    for (std::uint64_t mask = 0; mask < value.size(); ++mask) {
        if (!value[mask]) continue;
        for (int e = 0; e < m; ++e) {
            if (!value[mask | (std::uint64_t{1} << e)]) return false;
        }
    }
    return true;
}

double exact_covariance(const ExactTable& table, const Predicate& a, const Predicate& b) {
    double pa = 0, pb = 0, pab = 0;
    for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
        const double w = table.probability(mask);
        if (w == 0.0) continue;
        const Configuration c = table.configuration(mask);
        const bool x = a(c), y = b(c);
        if (x) pa += w;
        if (y) pb += w;
        if (x && y) pab += w;
    }
    return pab - pa * pb;
}

EstimateRecord fkg_covariance(const Predicate& a, const Predicate& b, std::shared_ptr<const Domain> domain,
                              const Params& params, const BoundaryCondition& bc, const RunSpec& run) {
    if (domain->edge_count() <= kMonotoneCheckMaxEdges && !(is_increasing(a, domain) && is_increasing(b, domain))) {
        throw DomainError("FKG covariance needs increasing events");
    }
    EstimateRecord rec;
    rec.name = "fkg_covariance";
    rec.context = make_context(*domain, params, bc, run);
    const SampleSeries series = run_series(domain, params, bc, run, [&]() -> Measurement {
        return [&](const Configuration& c) {
            const double x = a(c) ? 1.0 : 0.0, y = b(c) ? 1.0 : 0.0;
            return std::vector<double>{x, y, x * y};
        };
    });
    const BatchStats s = batch_stats(series);
    const double pa = s.mean[0], pb = s.mean[1], pab = s.mean[2];
    rec.value = pab - pa * pb;
    rec.std_error = std::sqrt(quad_form({-pb, -pa, 1.0}, s.cov));
    rec.n_samples = s.n;
    rec.n_effective = std::min(s.n_effective(0), s.n_effective(1));
    return rec;
}

// ------------------------------------------------------- extremal distance

Quad Quad::rectangle(int n, int m) {
    if (n < 1 || m < 1) throw InvalidGeometry("quad rectangle needs n, m >= 1");
    Quad q;
    q.domain = build_rect(0, n, 0, m);
    for (int y = 0; y <= m; ++y) {
        q.ab.push_back({0, y});
        q.cd.push_back({n, y});
    }
    for (int x = 1; x < n; ++x) {
        q.bc.push_back({x, 0});
        q.da.push_back({x, m});
    }
    return q;
}

void Quad::validate() const {
    if (!domain) throw InvalidGeometry("quad without domain");
    if (ab.empty() || cd.empty()) throw InvalidGeometry("quad arcs (ab) and (cd) must be nonempty");
    std::set<Vertex> seen;
    for (const auto* arc : {&ab, &bc, &cd, &da}) {
        for (const Vertex& v : *arc) {
            if (domain->find_vertex(v) < 0) throw InvalidGeometry("quad arc vertex outside the domain");
            if (!seen.insert(v).second) throw InvalidGeometry("quad arcs overlap");
        }
    }
}

ExtremalSolution solve_extremal(const Quad& quad, double tolerance) {
    quad.validate();
    const Domain& d = *quad.domain;
    const int nv = d.vertex_count();
    auto has = [&](Vertex u, Vertex v) { return d.find_vertex(u) >= 0 && d.find_vertex(v) >= 0 && d.find_edge(u, v) >= 0; };
    auto face = [&](Vertex ll) {
        const Vertex lr{ll.x + 1, ll.y}, ul{ll.x, ll.y + 1}, ur{ll.x + 1, ll.y + 1};
        return has(ll, lr) && has(ll, ul) && has(lr, ur) && has(ul, ur);
    };
    std::vector<double> g(static_cast<std::size_t>(d.edge_count()), 0.0);
    for (int e = 0; e < d.edge_count(); ++e) {
        const Edge& ed = d.edges()[static_cast<std::size_t>(e)];
        const Vertex other = ed.horizontal() ? Vertex{ed.a.x, ed.a.y - 1} : Vertex{ed.a.x - 1, ed.a.y};
        g[static_cast<std::size_t>(e)] = 0.5 * ((face(ed.a) ? 1 : 0) + (face(other) ? 1 : 0));
    }

    // 0 = free, 1 = (ab) at potential 0, 2 = (cd) at potential 1
    std::vector<int> role(static_cast<std::size_t>(nv), 0);
    for (const Vertex& v : quad.ab) role[static_cast<std::size_t>(d.find_vertex(v))] = 1;
    for (const Vertex& v : quad.cd) role[static_cast<std::size_t>(d.find_vertex(v))] = 2;

    ExtremalSolution sol;
    {
        std::vector<char> seen(static_cast<std::size_t>(nv), 0);
        std::deque<int> queue;
        for (int v = 0; v < nv; ++v) {
            if (role[static_cast<std::size_t>(v)] == 1) {
                seen[static_cast<std::size_t>(v)] = 1;
                queue.push_back(v);
            }
        }
        bool reached = false;
        while (!queue.empty() && !reached) {
            const int v = queue.front();
            queue.pop_front();
            for (int dir = 0; dir < 4; ++dir) {
                const int e = d.incident(v, dir);
                if (e < 0 || g[static_cast<std::size_t>(e)] <= 0.0) continue;
                const int w = d.neighbour(v, dir);
                if (seen[static_cast<std::size_t>(w)]) continue;
                if (role[static_cast<std::size_t>(w)] == 2) reached = true;
                seen[static_cast<std::size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
        if (!reached) return sol;
    }

    std::vector<int> index(static_cast<std::size_t>(nv), -1);
    int nf = 0;
    for (int v = 0; v < nv; ++v) {
        if (role[static_cast<std::size_t>(v)] == 0) index[static_cast<std::size_t>(v)] = nf++;
    }
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    std::vector<double> diag(static_cast<std::size_t>(nf), 0.0);
    for (int e = 0; e < d.edge_count(); ++e) {
        const double c = g[static_cast<std::size_t>(e)];
        if (c <= 0.0) continue;
        const int u = d.edge_source(e), v = d.edge_target(e);
        const int iu = index[static_cast<std::size_t>(u)], iv = index[static_cast<std::size_t>(v)];
        if (iu >= 0) diag[static_cast<std::size_t>(iu)] += c;
        if (iv >= 0) diag[static_cast<std::size_t>(iv)] += c;
        if (iu >= 0 && iv >= 0) {
            trip.emplace_back(iu, iv, -c);
            trip.emplace_back(iv, iu, -c);
        } else if (iu >= 0 && role[static_cast<std::size_t>(v)] == 2) {
            rhs[iu] += c;
        } else if (iv >= 0 && role[static_cast<std::size_t>(u)] == 2) {
            rhs[iv] += c;
        }
    }
    for (int i = 0; i < nf; ++i) trip.emplace_back(i, i, diag[static_cast<std::size_t>(i)] > 0.0 ? diag[static_cast<std::size_t>(i)] : 1.0);
    Eigen::SparseMatrix<double> a(nf, nf);
    a.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(nf);
    if (nf > 0) {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(tolerance);
        cg.setMaxIterations(std::max(1000, 20 * nf));
        cg.compute(a);
        phi = cg.solve(rhs);
        sol.iterations = static_cast<int>(cg.iterations());
        sol.residual = nf > 0 ? (a * phi - rhs).cwiseAbs().maxCoeff() : 0.0;
    }
    auto potential = [&](int v) {
        const int r = role[static_cast<std::size_t>(v)];
        return r == 1 ? 0.0 : r == 2 ? 1.0 : phi[index[static_cast<std::size_t>(v)]];
    };
    double energy = 0.0;
    for (int e = 0; e < d.edge_count(); ++e) {
        const double diff = potential(d.edge_target(e)) - potential(d.edge_source(e));
        energy += g[static_cast<std::size_t>(e)] * diff * diff;
    }
    sol.value = energy > 0.0 ? 1.0 / energy : std::numeric_limits<double>::infinity();
    return sol;
}

double extremal_distance(const Quad& quad) { return solve_extremal(quad).value; }

// ------------------------------------------------------ bound ratio series

std::vector<EstimateRecord> bound_ratio_series(const std::vector<int>& n_list, const Params& params, bool wired,
                                               const RunSpec& run) {
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
        if (n_list[i] >= n_list[i + 1]) throw DomainError("n list must be increasing");
    }
    static const Sigma ooc = parse_sigma("OOC");
    struct Link {
        double value, rel_var;
    };
    std::map<std::pair<int, int>, Link> links;  // inner links, each on its own box
    std::vector<EstimateRecord> out;
    std::uint64_t tag = 0;
    for (int n : n_list) {
        if (n < 2) throw DomainError("bound ratio series needs n >= 2");
        std::vector<int> radii{1};
        while (radii.back() < n) radii.push_back(std::min(8 * radii.back(), n));
        const int last_inner = radii[radii.size() - 2];

        double chained_other = 1.0, other_rel_var = 0.0;
        for (std::size_t k = 0; k + 2 < radii.size(); ++k) {
            const auto key = std::make_pair(radii[k], radii[k + 1]);
            if (!links.count(key)) {
                RunSpec sub = run;
                sub.seed = derive_seed(run.seed, 1000 + tag++);
                const EstimateRecord r = estimate_arm_probability(key.first, key.second, ooc, key.second, params, wired, sub);
                if (r.value <= 0.0) throw DomainError("three-arm link estimated as zero");
                links[key] = {r.value, (r.std_error / r.value) * (r.std_error / r.value)};
            }
            chained_other *= links[key].value;
            other_rel_var += links[key].rel_var;
        }

        auto box = build_box(n);
        const auto bc = make_bc(*box, wired);
        RunSpec main = run;
        main.seed = derive_seed(run.seed, static_cast<std::uint64_t>(n));
        const SampleSeries series = run_series(box, params, bc, main, [&]() -> Measurement {
            auto direct = std::make_shared<AnnulusEvent>(*box, Vertex{0, 0}, 1, n, ooc);
            auto last = last_inner == 1 ? direct : std::make_shared<AnnulusEvent>(*box, Vertex{0, 0}, last_inner, n, ooc);
            return [box, direct, last](const Configuration& c) {
                const auto s = chemical_distance(c, *box);
                std::vector<double> row{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
                if (s) {
                    const auto lc = lowest_crossing(c, *box);
                    const double len = static_cast<double>(lc->path.size());
                    row[0] = 1.0;
                    row[1] = *s;
                    row[2] = len;
                    row[5] = *s > len ? 1.0 : 0.0;
                }
                row[3] = (*last)(c) ? 1.0 : 0.0;
                row[4] = direct == last ? row[3] : ((*direct)(c) ? 1.0 : 0.0);
                return row;
            };
        });
        const BatchStats s = batch_stats(series);
        const double h = s.mean[0], hs = s.mean[1], hl = s.mean[2], al = s.mean[3];
        const double chained = al * chained_other;
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        for (int which = 0; which < 2; ++which) {
            EstimateRecord rec;
            rec.name = which == 0 ? "S_ratio" : "L_ratio";
            rec.context = make_context(*box, params, bc, main);
            rec.context.seed = run.seed;
            rec.n_samples = s.n;
            rec.extra["pi3_chained"] = chained;
            rec.extra["pi3_direct"] = s.mean[4];
            rec.extra["pi3_direct_stderr"] = s.std_error(4);
            rec.extra["chaining_constant"] = chained > 0.0 ? s.mean[4] / chained : kNaN;
            rec.extra["chain_links"] = static_cast<double>(radii.size() - 1);
            rec.extra["crossing_probability"] = h;
            rec.extra["s_exceeds_l_samples"] = s.mean[5] * static_cast<double>(s.n);
            const double num = which == 0 ? hs : hl;
            if (h <= 0.0 || chained <= 0.0) {
                rec.value = rec.std_error = kNaN;
                rec.error = h <= 0.0 ? "crossing never occurred" : "three-arm probability estimated as zero";
                out.push_back(rec);
                continue;
            }
            const double cm = num / h;
            rec.extra[which == 0 ? "mean_S_given_H" : "mean_L_given_H"] = cm;
            rec.value = cm / (n2 * chained);
            // log-derivatives over the columns (H, HS, HL, A_last)
            std::vector<double> grad(6, 0.0);
            grad[0] = -1.0 / h;
            grad[which == 0 ? 1 : 2] = 1.0 / num;
            grad[3] = al > 0.0 ? -1.0 / al : 0.0;
            const double rel = quad_form(grad, s.cov) + other_rel_var;
            rec.std_error = rec.value * std::sqrt(rel);
            rec.n_effective = s.n_effective(which == 0 ? 1 : 2);
            out.push_back(rec);
        }
    }
    return out;
}

}  // namespace rclab
