#include "flagmirror/crit.hpp"

#include "flagmirror/error.hpp"
#include "flagmirror/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace flagmirror {

namespace {

WeylWord reversed(const WeylWord& w) { return WeylWord{std::vector<int>(w.letters.rbegin(), w.letters.rend())}; }

// z F and its gradient in log coordinates t (params = e^t), for either parameterization.
class LogObjective {
public:
    LogObjective(const ChevalleyGroup& G, const WeylWord& word, bool positive, const CVector& root_exp)
        : ev_(G, positive ? reversed(word) : word), positive_(positive), q_(root_exp) {}

    int N() const { return ev_.N(); }

    Complex value(const CVector& t) const { return ev_.zF(chart_point(t), q_); }

    Complex value_grad(const CVector& t, CVector& g) const {
        const CVector a = chart_point(t);
        CVector ga;
        const Complex v = ev_.zF_gradient(a, q_, ga);
        g.resize(N());
        if (positive_) {
            // a_{N-1-j} = -c_j, dc_j / dt_j = c_j
            for (int j = 0; j < N(); ++j) g(j) = -ga(N() - 1 - j) * std::exp(t(j));
        } else {
            g = ga.cwiseProduct(a);
        }
        return v;
    }

    // Central differences of the analytic gradient.
    CMatrix hessian(const CVector& t) const {
        const int n = N();
        CMatrix H(n, n);
        CVector gp, gm;
        const double d = 1e-5;
        for (int k = 0; k < n; ++k) {
            CVector tp = t, tm = t;
            tp(k) += d;
            tm(k) -= d;
            value_grad(tp, gp);
            value_grad(tm, gm);
            H.col(k) = (gp - gm) / (2 * d);
        }
        return (H + H.transpose()) / 2.0;
    }

private:
    CVector chart_point(const CVector& t) const {
        const CVector p = t.array().exp();
        return positive_ ? CVector(-p.reverse()) : p;
    }

    ChartEvaluator ev_;
    bool positive_;
    CVector q_;
};

WeylWord resolve_word(const ChevalleyGroup& G, const WeylWord& word) {
    return word.letters.empty() ? G.w0_word() : word;
}

void fill_terms(const ChevalleyGroup& G, CriticalPoint& cp, const CVector& q) {
    const bool positive = cp.kind == CritKind::Positive;
    const WeylWord chart_word = positive ? reversed(cp.word) : cp.word;
    const CVector a = positive ? CVector(-cp.params.reverse()) : cp.params;
    ChartEvaluator ev(G, chart_word);
    CVector ratio, minors;
    ev.ratios(a, ratio, minors);
    cp.e_terms = CVector::Zero(G.rank());
    for (int j = 0; j < ev.N(); ++j) cp.e_terms(chart_word.letters[j]) -= a(j);
    cp.e_terms /= cp.z;
    cp.f_terms = -q.cwiseProduct(ratio) / cp.z;
}

CriticalPoint real_search(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z, const WeylWord& word_in,
                          const CritOptions& opts, bool positive) {
    if (!(z > 0)) throw DomainError("z must be positive");
    if (h.size() != G.rank()) throw DomainError("h has the wrong number of entries");
    const WeylWord word = resolve_word(G, word_in);
    if (!is_reduced(G.datum(), word) || static_cast<int>(word.length()) != G.N())
        throw DomainError("word " + word.str() + " is not a reduced word of w0");
    const Eigen::VectorXd ah = simple_root_values(G.datum(), h);
    const CVector q = ah.array().exp().cast<Complex>();
    LogObjective obj(G, word, positive, q);
    const int N = obj.N();
    const double sigma = positive ? 1.0 : -1.0;  // minimize sigma * zF

    Eigen::VectorXd t(N);
    if (opts.start) {
        if (opts.start->size() != N) throw DomainError("start has the wrong length");
        for (int j = 0; j < N; ++j) {
            if (!((*opts.start)(j).real() > 0)) throw DomainError("start parameters must be positive");
            t(j) = std::log((*opts.start)(j).real());
        }
    } else {
        for (int j = 0; j < N; ++j) t(j) = std::max(0.0, ah(word.letters[j]) / 2);
    }

    auto phi = [&](const Eigen::VectorXd& x) { return sigma * obj.value(x.cast<Complex>()).real(); };
    CVector gc;
    double f = sigma * obj.value_grad(t.cast<Complex>(), gc).real();
    Eigen::VectorXd g = sigma * gc.real();
    int it = 0;
    double prev_norm = std::numeric_limits<double>::infinity();
    for (; it < opts.max_iterations; ++it) {
        const double scale = std::max(1.0, std::abs(f));
        if (g.norm() <= opts.gradient_tolerance * scale) break;
        // Stalled at roundoff level: no further progress is possible.
        if (g.norm() < 1e-9 * scale && g.norm() > 0.5 * prev_norm) break;
        prev_norm = g.norm();
        Eigen::MatrixXd H = sigma * obj.hessian(t.cast<Complex>()).real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().cwiseAbs().maxCoeff();
        if (lo <= 1e-8 * std::max(1.0, hi)) H += (std::abs(lo) + 1e-3 * std::max(1.0, hi)) * Eigen::MatrixXd::Identity(N, N);
        Eigen::VectorXd p = -H.ldlt().solve(g);
        // Keep steps in log coordinates moderate.
        if (p.cwiseAbs().maxCoeff() > 2) p *= 2 / p.cwiseAbs().maxCoeff();
        double beta = 1;
        bool accepted = false;
        // Close to a nondegenerate minimum the objective is flat to roundoff; take plain Newton steps.
        if (g.norm() < 1e-6 * scale && lo > 0) {
            try {
                phi(t + p);
                t += p;
                accepted = true;
            } catch (const OffChartError&) {
            }
        }
        for (int ls = 0; !accepted && ls < 60; ++ls, beta /= 2) {
            const Eigen::VectorXd tn = t + beta * p;
            double fn;
            try {
                fn = phi(tn);
            } catch (const OffChartError&) {
                continue;
            }
            if (fn <= f + 1e-4 * beta * g.dot(p) || (ls > 40 && fn <= f)) {
                t = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        f = sigma * obj.value_grad(t.cast<Complex>(), gc).real();
        g = sigma * gc.real();
    }

    CriticalPoint cp;
    cp.kind = positive ? CritKind::Positive : CritKind::Negative;
    cp.word = word;
    cp.h = h;
    cp.z = z;
    cp.iterations = it;
    cp.params = t.array().exp().cast<Complex>();
    cp.value = obj.value_grad(t.cast<Complex>(), gc) / z;
    cp.gradient_norm = (gc.real().array() / t.array().exp()).matrix().norm() / z;
    const Eigen::MatrixXd H = obj.hessian(t.cast<Complex>()).real() / z;
    cp.hessian_eigenvalues = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
    cp.hessian_definite = positive ? cp.hessian_eigenvalues.minCoeff() > 0 : cp.hessian_eigenvalues.maxCoeff() < 0;
    fill_terms(G, cp, q);
    const double scale = std::max(1.0, std::abs(cp.value));
    if (!(cp.gradient_norm <= 1e-8 * scale)) {
        std::ostringstream os;
        os << to_string(cp.kind) << " critical search did not converge after " << it
           << " iterations; best gradient norm " << cp.gradient_norm << " at params";
        for (int j = 0; j < N; ++j) os << ' ' << cp.params(j).real();
        throw ConvergenceError(os.str(), cp.gradient_norm);
    }
    return cp;
}

}  // namespace

std::string to_string(CritKind k) {
    switch (k) {
        case CritKind::Positive: return "positive";
        case CritKind::Negative: return "negative";
        case CritKind::Complex: return "complex";
    }
    return "?";
}

Complex positive_zF(const ChevalleyGroup& G, const WeylWord& word, const CVector& c, const CVector& root_exp) {
    ChartEvaluator ev(G, reversed(word));
    return ev.zF(-c.reverse(), root_exp);
}

CriticalPoint find_positive_critical(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z,
                                     const WeylWord& word, const CritOptions& opts) {
    return real_search(G, h, z, word, opts, true);
}

CriticalPoint find_negative_critical(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z,
                                     const WeylWord& word, const CritOptions& opts) {
    return real_search(G, h, z, word, opts, false);
}

std::vector<CriticalPoint> critical_census(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z,
                                           const WeylWord& word_in, const CensusOptions& opts) {
    if (!(z > 0)) throw DomainError("z must be positive");
    if (opts.starts < 1) throw DomainError("census needs at least one start");
    const WeylWord word = resolve_word(G, word_in);
    const CVector q = simple_root_values(G.datum(), h).array().exp().cast<Complex>();
    const int N = static_cast<int>(word.length());

    std::vector<std::optional<CVector>> found(opts.starts);
    parallel_for_chunks(opts.starts, resolve_threads(opts.threads), [&](std::int64_t s) {
        LogObjective obj(G, word, false, q);
        std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s));
        std::normal_distribution<double> radial(0.0, opts.spread);
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        CVector t(N);
        for (int j = 0; j < N; ++j) t(j) = Complex(radial(rng), angle(rng));
        // Newton on the gradient with backtracking on |grad|^2.
        CVector g;
        try {
            Complex v = obj.value_grad(t, g);
            for (int it = 0; it < opts.max_iterations; ++it) {
                const double scale = std::max(1.0, std::abs(v));
                if (g.norm() <= 1e-12 * scale) break;
                const CVector p = -obj.hessian(t).fullPivLu().solve(g);
                if (!p.allFinite()) return;
                double beta = 1;
                bool accepted = false;
                for (int ls = 0; ls < 30; ++ls, beta /= 2) {
                    CVector gn;
                    try {
                        const CVector tn = t + beta * p;
                        const Complex vn = obj.value_grad(tn, gn);
                        if (gn.norm() < (1 - 1e-4 * beta) * g.norm()) {
                            t = tn;
                            g = gn;
                            v = vn;
                            accepted = true;
                            break;
                        }
                    } catch (const OffChartError&) {
                    }
                }
                if (!accepted) break;
            }
            if (g.norm() <= 1e-9 * std::max(1.0, std::abs(v))) found[s] = CVector(t.array().exp());
        } catch (const OffChartError&) {
        }
    });

    std::vector<CriticalPoint> out;
    for (const auto& a : found) {
        if (!a) continue;
        bool dup = false;
        for (const auto& cp : out)
            if ((cp.params - *a).norm() <= opts.cluster_tolerance * std::max(1.0, a->norm())) dup = true;
        if (dup) continue;
        CriticalPoint cp;
        cp.kind = CritKind::Complex;
        cp.word = word;
        cp.params = *a;
        cp.h = h;
        cp.z = z;
        ChartEvaluator ev(G, word);
        CVector ga;
        cp.value = ev.zF_gradient(*a, q, ga) / z;
        cp.gradient_norm = ga.norm() / z;
        fill_terms(G, cp, q);
        out.push_back(std::move(cp));
    }
    return out;
}

CMatrix kim_matrix(const CVector& q, const CVector& hstar) {
    const int n = static_cast<int>(q.size());
    if (hstar.size() != n + 1) throw DomainError("hstar needs rank + 1 diagonal entries");
    CMatrix L = CMatrix::Zero(n + 1, n + 1);
    L.diagonal() = hstar;
    for (int i = 0; i < n; ++i) {
        if (q(i) == 0.0) throw DomainError("q_i must be nonzero");
        L(i + 1, i) = 1;
        L(i, i + 1) = -q(i);
    }
    return L;
}

CVector kim_invariants(const CVector& q, const CVector& hstar) {
    const CMatrix L = kim_matrix(q, hstar);
    const int m = static_cast<int>(L.rows());
    // Faddeev-LeVerrier: det(lambda - L) = lambda^m + c_1 lambda^{m-1} + ... + c_m
    CVector out(m);
    CMatrix M = CMatrix::Identity(m, m);
    for (int k = 1; k <= m; ++k) {
        const CMatrix AM = L * M;
        const Complex c = -AM.trace() / static_cast<double>(k);
        out(k - 1) = -c;
        M = AM + c * CMatrix::Identity(m, m);
    }
    return out;
}

PetersonReport peterson_check(const ChevalleyGroup& G, const CriticalPoint& cp, double tolerance) {
    if (G.datum().series != Series::A) throw DomainError("peterson_check supports type A only");
    if (cp.kind == CritKind::Complex) throw DomainError("peterson_check needs a positive or negative critical point");
    const int n = G.rank();
    const WeightModule& V = G.module(0);
    CMatrix F = CMatrix::Zero(V.dim, V.dim);
    for (int i = 0; i < n; ++i) F += V.Fd[i].cast<Complex>();
    const CMatrix X = x_word(G, cp.word, cp.params).blocks[0];
    const CMatrix Xinv = X.triangularView<Eigen::UnitUpper>().solve(CMatrix::Identity(V.dim, V.dim));
    PetersonReport r;
    r.tolerance = tolerance;
    // positive: u = x(c); negative: u^{-1} = x(a)
    r.L = cp.kind == CritKind::Positive ? CMatrix(Xinv * F * X) : CMatrix(X * F * Xinv);
    const double scale = std::max(1.0, r.L.cwiseAbs().maxCoeff());
    for (int a = 0; a <= n; ++a)
        for (int b = a + 2; b <= n; ++b) r.upper_max = std::max(r.upper_max, std::abs(r.L(a, b)) / scale);
    r.q_extracted.resize(n);
    r.q_expected = simple_root_values(G.datum(), cp.h).array().exp();
    for (int i = 0; i < n; ++i) {
        r.q_extracted(i) = -r.L(i, i + 1);
        r.q_error = std::max(r.q_error, std::abs(r.q_extracted(i) - r.q_expected(i)) / r.q_expected(i));
    }
    r.invariants = kim_invariants(r.q_expected.cast<Complex>(), r.L.diagonal());
    for (int k = 0; k <= n; ++k)
        r.invariant_max = std::max(r.invariant_max, std::abs(r.invariants(k)) / std::pow(scale, k + 1));
    r.pass_upper = r.upper_max <= tolerance;
    r.pass_q = r.q_error <= tolerance;
    r.pass_invariants = r.invariant_max <= tolerance;
    return r;
}

namespace {

nlohmann::json cjson(const CVector& v, bool with_imag) {
    auto j = nlohmann::json::array();
    for (int k = 0; k < v.size(); ++k) {
        if (with_imag)
            j.push_back({{"re", v(k).real()}, {"im", v(k).imag()}});
        else
            j.push_back(v(k).real());
    }
    return j;
}

}  // namespace

nlohmann::json to_json(const CriticalPoint& cp) {
    const bool cplx = cp.kind == CritKind::Complex;
    nlohmann::json j{{"kind", to_string(cp.kind)},
                     {"word", cp.word.str()},
                     {"params", cjson(cp.params, cplx)},
                     {"h", std::vector<double>(cp.h.data(), cp.h.data() + cp.h.size())},
                     {"z", cp.z},
                     {"F", {{"re", cp.value.real()}, {"im", cp.value.imag()}}},
                     {"e_terms", cjson(cp.e_terms, cplx)},
                     {"f_terms", cjson(cp.f_terms, cplx)},
                     {"gradient_norm", cp.gradient_norm}};
    if (!cplx) {
        j["hessian_definite"] = cp.hessian_definite;
        j["hessian_eigenvalues"] =
            std::vector<double>(cp.hessian_eigenvalues.data(), cp.hessian_eigenvalues.data() + cp.hessian_eigenvalues.size());
        j["iterations"] = cp.iterations;
    }
    return j;
}

nlohmann::json to_json(const PetersonReport& r) {
    auto L = nlohmann::json::array();
    for (int a = 0; a < r.L.rows(); ++a) L.push_back(cjson(r.L.row(a).transpose(), false));
    return {{"L", L},
            {"upper_max", r.upper_max},
            {"q_extracted", cjson(r.q_extracted, false)},
            {"q_expected", std::vector<double>(r.q_expected.data(), r.q_expected.data() + r.q_expected.size())},
            {"q_error", r.q_error},
            {"invariants", cjson(r.invariants, true)},
            {"invariant_max", r.invariant_max},
            {"tolerance", r.tolerance},
            {"pass_upper", r.pass_upper},
            {"pass_q", r.pass_q},
            {"pass_invariants", r.pass_invariants},
            {"verdict", r.pass() ? "pass" : "fail"}};
}

}  // namespace flagmirror
