#include "flagmirror/integrate.hpp"

#include "flagmirror/crit.hpp"
#include "flagmirror/error.hpp"
#include "flagmirror/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace flagmirror {

namespace {

constexpr std::int64_t kChunk = 2048;
constexpr std::int64_t kMaxNodes = 1'000'000'000;

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int k = 0; k < e; ++k) {
        if (r > kMaxNodes / std::max<std::int64_t>(b, 1)) return kMaxNodes + 1;
        r *= b;
    }
    return r;
}

// Node coordinates and weight for one grid; shared by the integrator and the CSV dump.
struct Grid {
    CycleKind kind;
    int N, n;
    std::vector<double> radii;
    std::vector<std::pair<double, double>> window;

    void point(std::int64_t idx, CVector& a, Eigen::VectorXd& param) const {
        for (int j = N - 1; j >= 0; --j) {
            const int k = static_cast<int>(idx % n);
            idx /= n;
            if (kind == CycleKind::Torus) {
                const double theta = 2 * std::numbers::pi * k / n;
                param(j) = theta;
                a(j) = std::polar(radii[j], theta);
            } else {
                const auto [lo, hi] = window[j];
                const double t = lo + (k + 0.5) * (hi - lo) / n;
                param(j) = t;
                a(j) = std::exp(t);
            }
        }
    }

    Complex weight() const {
        Complex w = 1.0;
        for (int j = 0; j < N; ++j) {
            if (kind == CycleKind::Torus)
                w *= Complex(0, 2 * std::numbers::pi / n);
            else
                w *= (window[j].second - window[j].first) / n;
        }
        return w;
    }
};

Grid make_grid(const CycleSpec& r, int N, int nodes) {
    if (nodes < 1) throw DomainError("node count must be positive");
    return Grid{r.kind, N, nodes, r.radii, r.log_window};
}

void check_h(const CycleSpec& spec, const CVector& h, int rank) {
    if (h.size() != rank) throw DomainError("h has " + std::to_string(h.size()) + " entries, expected " + std::to_string(rank));
    if (spec.kind == CycleKind::Positive && h.imag().cwiseAbs().maxCoeff() > 0)
        throw DomainError("the positive cycle is defined for real h only");
}

}  // namespace

std::string to_string(CycleKind k) { return k == CycleKind::Torus ? "torus" : "positive"; }

CycleKind parse_cycle_kind(std::string_view s) {
    if (s == "torus") return CycleKind::Torus;
    if (s == "positive") return CycleKind::Positive;
    throw DomainError("unknown cycle kind '" + std::string(s) + "' (torus | positive)");
}

DecayReport decay_scan(const ChevalleyGroup& G, const WeylWord& word, const Eigen::VectorXd& h, double z,
                       double margin, double range, double step, std::optional<CVector> base) {
    ChartEvaluator ev(G, word);
    const int N = ev.N();
    DecayReport rep;
    rep.base = base ? *base : CVector::Ones(N);
    const CVector q = ev.root_exponentials(h.cast<Complex>());
    auto sample = [&](const CVector& a, double& max_summand) {
        CVector ratio, minors;
        if (!ev.ratios(a, ratio, minors)) throw OffChartError("decay_scan left the chart", -1, 0.0);
        const CVector e = -estar_from_chart(G, word, a);
        const CVector f = -q.cwiseProduct(ratio);
        max_summand = std::max(e.real().maxCoeff(), f.real().maxCoeff()) / z;
        return (e.sum() + f.sum()).real() / z;
    };
    rep.window.assign(N, {0.0, 0.0});
    rep.all_diverge = true;
    const int steps = static_cast<int>(std::ceil(range / step));
    for (int j = 0; j < N; ++j) {
        for (int dir : {-1, 1}) {
            RayReport ray;
            ray.coordinate = j;
            ray.direction = dir;
            std::vector<double> vals;
            double ms = -std::numeric_limits<double>::infinity();
            // Walk outwards until the ray is well past the knee or leaves the range.
            double top = -std::numeric_limits<double>::infinity();
            for (int k = 0; k <= steps; ++k) {
                CVector a = rep.base;
                a(j) *= std::exp(dir * k * step);
                double s = 0;
                vals.push_back(sample(a, s));
                ms = std::max(ms, s);
                top = std::max(top, vals.back());
                if (vals.back() < top - 2 * margin) break;
            }
            const int taken = static_cast<int>(vals.size()) - 1;
            ray.max_summand = ms;
            ray.final_value = vals.back();
            // knee: last sample still above top - margin, plus one step
            int last_above = 0;
            for (int k = 0; k <= taken; ++k)
                if (vals[k] >= top - margin) last_above = k;
            bool monotone = true;
            for (int k = last_above + 1; k <= taken; ++k)
                if (vals[k] > vals[k - 1]) monotone = false;
            ray.diverges = monotone && last_above < taken && vals.back() < top - margin;
            ray.knee = dir * (last_above + 1) * step;
            rep.all_diverge = rep.all_diverge && ray.diverges;
            const double logb = std::log(std::abs(rep.base(j)));
            if (dir < 0)
                rep.window[j].first = logb + ray.knee;
            else
                rep.window[j].second = logb + ray.knee;
            rep.rays.push_back(ray);
        }
    }
    return rep;
}

CycleSpec resolve_cycle(const ChevalleyGroup& G, const CycleSpec& spec, const CVector& h, double z) {
    CycleSpec r = spec;
    if (r.word.letters.empty()) r.word = G.w0_word();
    if (static_cast<int>(r.word.length()) != G.N() || !is_reduced(G.datum(), r.word))
        throw DomainError("cycle word " + r.word.str() + " is not a reduced word for w0");
    const int N = G.N();
    if (N > kMaxQuadratureDimension)
        throw DomainError("product quadrature limited to " + std::to_string(kMaxQuadratureDimension) + " dimensions");
    if (r.orientation != 1 && r.orientation != -1) throw DomainError("orientation must be +1 or -1");
    if (!(z > 0)) throw DomainError("z must be positive");
    check_h(r, h, G.rank());
    if (r.kind == CycleKind::Torus) {
        if (r.radii.empty() && r.saddle_radii) {
            // The torus through the saddle of |e^F| keeps the integrand's dynamic range small.
            const auto cp = find_negative_critical(G, h.real(), z, r.word);
            for (int j = 0; j < N; ++j) r.radii.push_back(std::abs(cp.params(j)));
        }
        if (r.radii.empty()) r.radii.assign(N, 1.0);
        if (static_cast<int>(r.radii.size()) != N) throw DomainError("need one radius per chart coordinate");
        for (double x : r.radii)
            if (!(x > 0)) throw DomainError("radii must be positive");
        return r;
    }
    if (!r.log_window.empty()) {
        if (static_cast<int>(r.log_window.size()) != N) throw DomainError("need one log window per chart coordinate");
        for (auto [lo, hi] : r.log_window)
            if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw DomainError("bad log window");
        return r;
    }
    const Eigen::VectorXd hr = h.real();
    auto rep = decay_scan(G, r.word, hr, z, r.window_margin);
    if (!rep.all_diverge) throw DomainError("decay_scan: Re F does not diverge to -infinity along every ray");
    r.log_window = rep.window;

    // Widen until the boundary faces sit well below the interior maximum.
    ChartEvaluator ev(G, r.word);
    const CVector q = ev.root_exponentials(h);
    const int coarse = N <= 3 ? 9 : 5;
    for (int round = 0; round < 12; ++round) {
        const std::int64_t total = ipow(coarse, N);
        double interior = -std::numeric_limits<double>::infinity();
        std::vector<double> lo_face(N, interior), hi_face(N, interior);
        CVector a(N);
        for (std::int64_t idx = 0; idx < total; ++idx) {
            std::int64_t rem = idx;
            std::vector<int> digit(N);
            for (int j = N - 1; j >= 0; --j) {
                digit[j] = static_cast<int>(rem % coarse);
                rem /= coarse;
                const auto [lo, hi] = r.log_window[j];
                a(j) = std::exp(lo + (hi - lo) * digit[j] / (coarse - 1));
            }
            const double v = (ev.zF(a, q) / z).real();
            interior = std::max(interior, v);
            for (int j = 0; j < N; ++j) {
                if (digit[j] == 0) lo_face[j] = std::max(lo_face[j], v);
                if (digit[j] == coarse - 1) hi_face[j] = std::max(hi_face[j], v);
            }
        }
        bool widened = false;
        for (int j = 0; j < N; ++j) {
            auto& [lo, hi] = r.log_window[j];
            const double grow = 0.25 * (hi - lo);
            if (lo_face[j] > interior - r.window_margin) {
                lo -= grow;
                widened = true;
            }
            if (hi_face[j] > interior - r.window_margin) {
                hi += grow;
                widened = true;
            }
        }
        if (!widened) return r;
    }
    throw DomainError("positive cycle window did not settle; integrand mass reaches the scan boundary");
}

Complex integrate_once(const ChevalleyGroup& G, const CycleSpec& r, const CVector& h, double z, int nodes,
                       unsigned threads) {
    ChartEvaluator ev(G, r.word);
    const int N = ev.N();
    const std::int64_t total = ipow(nodes, N);
    if (total > kMaxNodes) throw DomainError("quadrature grid exceeds " + std::to_string(kMaxNodes) + " nodes");
    const Grid grid = make_grid(r, N, nodes);
    const CVector q = ev.root_exponentials(h);
    const std::int64_t chunks = (total + kChunk - 1) / kChunk;
    std::vector<Complex> partial(chunks);
    std::atomic<std::int64_t> failures{0};
    std::atomic<std::int64_t> first_failure{std::numeric_limits<std::int64_t>::max()};
    parallel_for_chunks(chunks, threads, [&](std::int64_t c) {
        CVector a(N), ratio, minors;
        Eigen::VectorXd param(N);
        std::vector<Complex> vals;
        vals.reserve(kChunk);
        const std::int64_t end = std::min(total, (c + 1) * kChunk);
        for (std::int64_t idx = c * kChunk; idx < end; ++idx) {
            grid.point(idx, a, param);
            if (r.bare_form) {
                vals.push_back(1.0);
                continue;
            }
            if (!ev.ratios(a, ratio, minors)) {
                ++failures;
                std::int64_t prev = first_failure.load();
                while (idx < prev && !first_failure.compare_exchange_weak(prev, idx)) {
                }
                vals.push_back(0.0);
                continue;
            }
            const Complex zF = -a.sum() - q.cwiseProduct(ratio).sum();
            vals.push_back(std::exp(zF / z));
        }
        partial[c] = pairwise_sum(std::move(vals));
    });
    if (failures > 0) {
        CVector a(N);
        Eigen::VectorXd param(N);
        grid.point(first_failure, a, param);
        std::string where;
        for (int j = 0; j < N; ++j) where += (j ? "," : "") + std::to_string(param(j));
        throw OffChartError(std::to_string(failures.load()) + " quadrature nodes left the chart; first at parameter (" +
                                where + ")",
                            -1, static_cast<double>(failures.load()));
    }
    return pairwise_sum(std::move(partial)) * grid.weight() * static_cast<double>(r.orientation);
}

QuadratureResult s_gamma(const ChevalleyGroup& G, const CycleSpec& spec, const CVector& h, double z,
                         const QuadOptions& opts) {
    QuadratureResult res;
    res.resolved = resolve_cycle(G, spec, h, z);
    const int n = spec.kind == CycleKind::Torus ? spec.nodes_per_dim : spec.positive_nodes;
    res.value = integrate_once(G, res.resolved, h, z, n, opts.threads);
    res.node_count = ipow(n, G.N());
    if (opts.refine) {
        res.reference_nodes = spec.reference_nodes > 0 ? spec.reference_nodes : std::max(1, n / 2);
        res.reference_value = integrate_once(G, res.resolved, h, z, res.reference_nodes, opts.threads);
        res.refinement_delta = std::abs(res.value - res.reference_value) / std::abs(res.value);
    }
    return res;
}

BraidComparison braid_compare(const ChevalleyGroup& G, const CVector& h, double z, const WeylWord& w1,
                              const WeylWord& w2, const CycleSpec& base, const QuadOptions& opts) {
    if (!same_element(G.datum(), w1, w2)) throw DomainError("words " + w1.str() + " and " + w2.str() + " differ in W");
    BraidComparison out;
    CycleSpec s = base;
    s.kind = CycleKind::Torus;
    QuadOptions o = opts;
    o.refine = false;
    s.word = w1;
    out.s1 = s_gamma(G, s, h, z, o).value;
    s.word = w2;
    out.s2 = s_gamma(G, s, h, z, o).value;
    for (int p : braid_positions(G.datum(), w1)) {
        auto mv = braid_move(G.datum(), w1, p);
        if (mv.word == w2) out.braid_m = mv.m;
    }
    // The sign (-1)^{m+1} of the form and of the cycle cancel.
    out.predicted_sign = 1;
    out.relative_difference = std::abs(out.s1 - static_cast<double>(out.predicted_sign) * out.s2) / std::abs(out.s1);
    return out;
}

nlohmann::json to_json(const CycleSpec& s) {
    nlohmann::json j;
    j["kind"] = to_string(s.kind);
    j["word"] = s.word.str();
    j["orientation"] = s.orientation;
    if (s.kind == CycleKind::Torus) {
        j["radii"] = s.radii;
        j["nodes_per_dim"] = s.nodes_per_dim;
    } else {
        nlohmann::json w = nlohmann::json::array();
        for (auto [lo, hi] : s.log_window) w.push_back({lo, hi});
        j["log_window"] = w;
        j["positive_nodes"] = s.positive_nodes;
        j["window_margin"] = s.window_margin;
    }
    if (s.bare_form) j["bare_form"] = true;
    if (s.saddle_radii) j["saddle_radii"] = true;
    return j;
}

nlohmann::json to_json(const QuadratureResult& r) {
    return {{"value", {{"re", r.value.real()}, {"im", r.value.imag()}}},
            {"node_count", r.node_count},
            {"reference_nodes", r.reference_nodes},
            {"reference_value", {{"re", r.reference_value.real()}, {"im", r.reference_value.imag()}}},
            {"refinement_delta", r.refinement_delta},
            {"failures", r.failures},
            {"cycle", to_json(r.resolved)}};
}

nlohmann::json to_json(const DecayReport& r) {
    nlohmann::json rays = nlohmann::json::array();
    for (const auto& ray : r.rays)
        rays.push_back({{"coordinate", ray.coordinate + 1},
                        {"direction", ray.direction > 0 ? "infinity" : "zero"},
                        {"diverges", ray.diverges},
                        {"knee", ray.knee},
                        {"max_summand", ray.max_summand},
                        {"final_value", ray.final_value}});
    nlohmann::json w = nlohmann::json::array();
    for (auto [lo, hi] : r.window) w.push_back({lo, hi});
    return {{"rays", rays}, {"window", w}, {"all_diverge", r.all_diverge}};
}

void write_integrand_csv(std::ostream& os, const ChevalleyGroup& G, const CycleSpec& r, const CVector& h, double z,
                         int nodes, std::int64_t max_rows) {
    ChartEvaluator ev(G, r.word);
    const int N = ev.N();
    const Grid grid = make_grid(r, N, nodes);
    const CVector q = ev.root_exponentials(h);
    const std::int64_t total = ipow(nodes, N);
    const std::int64_t stride = std::max<std::int64_t>(1, (total + max_rows - 1) / max_rows);
    const char* pname = r.kind == CycleKind::Torus ? "theta" : "t";
    for (int j = 0; j < N; ++j) os << pname << j + 1 << ',';
    os << "F_re,F_im,integrand_re,integrand_im\n";
    CVector a(N);
    Eigen::VectorXd param(N);
    for (std::int64_t idx = 0; idx < total; idx += stride) {
        grid.point(idx, a, param);
        const Complex F = ev.zF(a, q) / z;
        const Complex e = std::exp(F);
        for (int j = 0; j < N; ++j) os << param(j) << ',';
        os << F.real() << ',' << F.imag() << ',' << e.real() << ',' << e.imag() << '\n';
    }
}

}  // namespace flagmirror
