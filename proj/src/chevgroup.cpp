#include "flagmirror/chevgroup.hpp"

#include "flagmirror/error.hpp"

#include <random>

namespace flagmirror {

namespace {

void require_node(const ChevalleyGroup& G, int i) {
    if (i < 0 || i >= G.rank()) throw DomainError("node " + std::to_string(i + 1) + " out of range");
}

double lower_defect(const CMatrix& m) {
    double d = 0;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c <= r; ++c) d = std::max(d, std::abs(m(r, c) - (r == c ? 1.0 : 0.0)));
    return d;
}

CMatrix reversed(const CMatrix& m) { return m.reverse(); }

// Doolittle LU without pivoting: m = L U, L unit lower triangular.
void lu_no_pivot(const CMatrix& m, CMatrix& L, CMatrix& U, int node) {
    const int n = static_cast<int>(m.rows());
    L = CMatrix::Identity(n, n);
    U = m;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
        if (std::abs(U(k, k)) <= kMinorTolerance * scale)
            throw OffChartError("vanishing leading minor in V(omega_" + std::to_string(node + 1) + ")", node,
                                std::abs(U(k, k)));
        for (int r = k + 1; r < n; ++r) {
            const Complex f = U(r, k) / U(k, k);
            L(r, k) = f;
            U.row(r) -= f * U.row(k);
            U(r, k) = 0;
        }
    }
}

}  // namespace

Complex estar(const ChevalleyGroup& G, const GroupElement& u, int i) {
    require_node(G, i);
    const CMatrix& m = u.blocks[i];
    if (std::abs(m(0, 0) - 1.0) > 1e-9 || std::abs(m(1, 1) - 1.0) > 1e-9 ||
        std::abs(m(1, 0)) > 1e-9 * std::max(1.0, m.norm()))
        throw DomainError("estar: argument is not in U+");
    return m(0, 1);
}

Complex fstar(const ChevalleyGroup& G, const GroupElement& ubar, int i) {
    require_node(G, i);
    const CMatrix& m = ubar.blocks[i];
    if (std::abs(m(0, 0) - 1.0) > 1e-9 || std::abs(m(1, 1) - 1.0) > 1e-9 ||
        std::abs(m(0, 1)) > 1e-9 * std::max(1.0, m.norm()))
        throw DomainError("fstar: argument is not in U-");
    return m(1, 0);
}

CVector estar_from_chart(const ChevalleyGroup& G, const WeylWord& word, const CVector& a) {
    CVector e = CVector::Zero(G.rank());
    for (std::size_t k = 0; k < word.length(); ++k) e(word.letters[k]) += a(k);
    return e;
}

GaussFactors gauss_minus_plus(const ChevalleyGroup& G, const std::vector<CVector>& m_vplus) {
    GaussFactors g;
    g.success = true;
    for (int i = 0; i < G.rank(); ++i) {
        const CVector& v = m_vplus[i];
        const Complex minor0 = v(0);
        g.principal_minors.push_back(minor0);
        const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
        if (std::abs(minor0) <= kMinorTolerance * scale) {
            if (g.success) {
                g.failed_node = i;
                g.failed_magnitude = std::abs(minor0);
            }
            g.success = false;
            g.fstar.push_back(Complex(std::nan(""), std::nan("")));
            continue;
        }
        g.fstar.push_back(v(1) / minor0);
    }
    return g;
}

GaussFactors gauss_minus_plus(const ChevalleyGroup& G, const GroupElement& M) {
    std::vector<CVector> cols;
    for (const auto& b : M.blocks) cols.push_back(b.col(0));
    return gauss_minus_plus(G, cols);
}

LowerUpper recover_lower_upper(const ChevalleyGroup& G, const GroupElement& M) {
    LowerUpper out;
    for (int i = 0; i < G.rank(); ++i) {
        CMatrix L, U;
        lu_no_pivot(M.blocks[i], L, U, i);
        out.lower.blocks.push_back(std::move(L));
        out.upper.blocks.push_back(std::move(U));
    }
    return out;
}

UpperLower uplus_bminus(const ChevalleyGroup& G, const GroupElement& g) {
    // Reversing the basis swaps upper and lower triangular.
    UpperLower out;
    for (int i = 0; i < G.rank(); ++i) {
        CMatrix L, U;
        lu_no_pivot(reversed(g.blocks[i]), L, U, i);
        out.upper.blocks.push_back(reversed(L));
        out.lower.blocks.push_back(reversed(U));
    }
    return out;
}

UpperTorusLower uplus_torus_uminus(const ChevalleyGroup& G, const GroupElement& g) {
    UpperTorusLower out;
    auto ul = uplus_bminus(G, g);
    out.upper = std::move(ul.upper);
    for (auto& b : ul.lower.blocks) {
        CVector d = b.diagonal();
        out.torus.blocks.push_back(d.asDiagonal());
        out.lower.blocks.push_back(d.cwiseInverse().asDiagonal() * b);
    }
    return out;
}

BigCellCharacters big_cell_characters(const ChevalleyGroup& G, const GroupElement& g) {
    const int n = G.rank();
    BigCellCharacters out{CVector::Zero(n), CVector::Zero(n)};
    for (int i = 0; i < n; ++i) {
        const CVector& vm = G.v_minus(i);
        const WeightModule& m = G.module(i);
        int j = 0;
        double best = -1;
        for (int k = 0; k < n; ++k) {
            const double nk = (m.Ed[k] * vm).norm();
            if (nk > best) {
                best = nk;
                j = k;
            }
        }
        const CVector x = m.Ed[j].cast<Complex>() * vm;
        const int last = m.lowest_index();
        // g v- = t^{w0 omega_i} (v- + e_j^*(u+) e_j v- + ...)
        const CVector gv = g.blocks[i] * vm;
        const Complex lowest = gv(last) / vm(last);
        out.e(j) = extremal_coeff(gv, x) / lowest;
        // <v-| g x = t^{w0 omega_i} f_j^*(u-) <v-| f_j e_j v-> and f_j e_j v- = v-
        const Complex gx = (g.blocks[i].row(last) * x)(0) / vm(last);
        out.f(j) = gx / lowest;
    }
    return out;
}

double uplus_defect(const GroupElement& g) {
    double d = 0;
    for (const auto& b : g.blocks) d = std::max(d, lower_defect(b));
    return d;
}

double uminus_defect(const GroupElement& g) {
    double d = 0;
    for (const auto& b : g.blocks) d = std::max(d, lower_defect(b.transpose()));
    return d;
}

GroupElement unipotent_log(const GroupElement& u) {
    GroupElement out;
    for (const auto& b : u.blocks) {
        const int n = static_cast<int>(b.rows());
        const CMatrix X = b - CMatrix::Identity(n, n);
        CMatrix term = X, acc = CMatrix::Zero(n, n);
        for (int k = 1; k < n; ++k) {
            acc += term * ((k % 2 ? 1.0 : -1.0) / k);
            term = term * X;
        }
        out.blocks.push_back(acc);
    }
    return out;
}

GroupElement nilpotent_exp(const GroupElement& X) {
    GroupElement out;
    for (const auto& b : X.blocks) {
        const int n = static_cast<int>(b.rows());
        CMatrix term = CMatrix::Identity(n, n), acc = term;
        for (int k = 1; k < n; ++k) {
            term = term * b / static_cast<double>(k);
            acc += term;
        }
        out.blocks.push_back(acc);
    }
    return out;
}

namespace {

// Strictly upper entries of every block, stacked.
CVector upper_entries(const GroupElement& g) {
    std::vector<Complex> v;
    for (const auto& b : g.blocks)
        for (int r = 0; r < b.rows(); ++r)
            for (int c = r + 1; c < b.cols(); ++c) v.push_back(b(r, c));
    return Eigen::Map<CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct NewtonOutcome {
    CVector a;
    double residual;
    bool converged;
};

NewtonOutcome newton_factor(const ChevalleyGroup& G, const GroupElement& u, const WeylWord& word, CVector a,
                            int max_iter, double tol) {
    const int N = static_cast<int>(word.length());
    const CVector target = upper_entries(u);
    const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
    double lambda = 1e-8;
    auto eval = [&](const CVector& p) { return (upper_entries(x_word(G, word, p)) - target).eval(); };
    CVector r = eval(a);
    double res = r.norm();
    for (int it = 0; it < max_iter && res > tol * scale; ++it) {
        // J_k = (x_1 ... x_k) E_{i_k} (x_{k+1} ... x_N)
        std::vector<GroupElement> factors;
        for (int k = 0; k < N; ++k) factors.push_back(x_elem(G, word.letters[k], a(k)));
        std::vector<GroupElement> suffix(N + 1);
        suffix[N] = G.identity();
        for (int k = N - 1; k >= 0; --k) suffix[k] = factors[k] * suffix[k + 1];
        CMatrix J(target.size(), N);
        GroupElement prefix = G.identity();
        for (int k = 0; k < N; ++k) {
            prefix = prefix * factors[k];
            GroupElement d;
            for (int m = 0; m < G.rank(); ++m)
                d.blocks.push_back(prefix.blocks[m] * G.module(m).Ed[word.letters[k]].cast<Complex>() *
                                   suffix[k + 1].blocks[m]);
            J.col(k) = upper_entries(d);
        }
        // Levenberg-Marquardt step
        const CMatrix JhJ = J.adjoint() * J;
        const CVector g = J.adjoint() * r;
        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            CMatrix A = JhJ;
            A.diagonal().array() += lambda * (1.0 + JhJ.diagonal().real().array());
            const CVector step = A.ldlt().solve(-g);
            const CVector trial = a + step;
            const CVector rt = eval(trial);
            const double rest = rt.norm();
            if (std::isfinite(rest) && rest < res) {
                a = trial;
                r = rt;
                res = rest;
                lambda = std::max(lambda * 0.1, 1e-15);
                improved = true;
                break;
            }
            lambda *= 10;
        }
        if (!improved) break;
    }
    return {a, res, res <= tol * scale};
}

}  // namespace

CVector factorize_unipotent(const ChevalleyGroup& G, const GroupElement& u, const WeylWord& word,
                            const FactorizeOptions& opts) {
    const int N = static_cast<int>(word.length());
    if (N != G.N() || !is_reduced(G.datum(), word))
        throw DomainError("factorize_unipotent needs a reduced word for w0, got " + word.str());
    if (uplus_defect(u) > 1e-9) throw DomainError("factorize_unipotent: argument is not in U+");

    auto finish = [&](const NewtonOutcome& out) {
        const double scale = std::max(1.0, out.a.cwiseAbs().maxCoeff());
        for (int k = 0; k < N; ++k)
            if (std::abs(out.a(k)) < opts.stratum_tolerance * scale)
                throw OffChartError("coordinate " + std::to_string(k + 1) + " vanishes: off the open stratum", k,
                                    std::abs(out.a(k)));
        return out.a;
    };

    double last = std::numeric_limits<double>::infinity();
    if (opts.hint) {
        auto out = newton_factor(G, u, word, *opts.hint, opts.max_iterations, opts.tolerance);
        if (out.converged) return finish(out);
        last = out.residual;
    }

    // Homotopy u(t) = exp((1-t) log u0 + t log u) from a point with known coordinates.
    const GroupElement logu = unipotent_log(u);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> phase(0.3, 1.2);
    for (int attempt = 0; attempt < 4; ++attempt) {
        CVector a0 = CVector::Ones(N);
        if (attempt > 0)
            for (int k = 0; k < N; ++k) a0(k) = std::polar(1.0, phase(rng) * (k % 2 ? 1 : -1));
        const GroupElement log0 = unipotent_log(x_word(G, word, a0));
        const int steps = 8 << attempt;
        CVector a = a0;
        bool ok = true;
        for (int s = 1; s <= steps && ok; ++s) {
            const double t = static_cast<double>(s) / steps;
            GroupElement X;
            for (int m = 0; m < G.rank(); ++m)
                X.blocks.push_back((1 - t) * log0.blocks[m] + t * logu.blocks[m]);
            const double tol = s == steps ? opts.tolerance : 1e-9;
            auto out = newton_factor(G, s == steps ? u : nilpotent_exp(X), word, a, opts.max_iterations, tol);
            ok = out.converged;
            a = out.a;
            last = out.residual;
            if (ok && s == steps) return finish(out);
        }
    }
    throw ConvergenceError("factorize_unipotent did not converge along " + word.str(), last);
}

LemmaYi lemma_yi(const ChevalleyGroup& G, const GroupElement& u, int i, Complex s) {
    const Complex p = 1.0 + s * estar(G, u, i);
    if (std::abs(p) < 1e-12) throw DomainError("lemma_yi: 1 + s e_i^*(u) vanishes");
    LemmaYi out;
    out.factor = p;
    out.b = coroot_power(G, i, p) * y_elem(G, i, s * p);
    out.u = y_elem(G, i, -s * p) * coroot_power(G, i, 1.0 / p) * u * y_elem(G, i, s);
    return out;
}

PositivityResult is_totally_positive(const ChevalleyGroup& G, const GroupElement& u, const WeylWord& word,
                                     const FactorizeOptions& opts) {
    PositivityResult r;
    r.coordinates = factorize_unipotent(G, u, word, opts);
    const double scale = std::max(1.0, r.coordinates.cwiseAbs().maxCoeff());
    r.positive = true;
    for (int k = 0; k < r.coordinates.size(); ++k)
        if (std::abs(r.coordinates(k).imag()) > 1e-9 * scale || r.coordinates(k).real() <= 0) r.positive = false;
    return r;
}

}  // namespace flagmirror
