#include "flagmirror/reps.hpp"

#include "flagmirror/error.hpp"

#include <nlohmann/json.hpp>

#include <map>

namespace flagmirror {

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
    RationalMatrix out(rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const Rational& a = (*this)(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols; ++j) out(i, j) += a * o(k, j);
        }
    return out;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& o) const {
    RationalMatrix out = *this;
    for (std::size_t k = 0; k < data.size(); ++k) out.data[k] -= o.data[k];
    return out;
}

bool RationalMatrix::is_zero() const {
    for (const auto& x : data)
        if (x != 0) return false;
    return true;
}

Eigen::MatrixXd RationalMatrix::to_double() const {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = static_cast<double>((*this)(i, j));
    return m;
}

int rational_rank(RationalMatrix m) {
    int rank = 0;
    for (int c = 0; c < m.cols && rank < m.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < m.rows; ++r)
            if (m(r, c) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        for (int j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(rank, j));
        for (int r = rank + 1; r < m.rows; ++r) {
            if (m(r, c) == 0) continue;
            const Rational f = m(r, c) / m(rank, c);
            for (int j = c; j < m.cols; ++j) m(r, j) -= f * m(rank, j);
        }
        ++rank;
    }
    return rank;
}

namespace {

using Sparse = std::map<int, Rational>;

void axpy(Sparse& y, const Rational& a, const Sparse& x) {
    if (a == 0) return;
    for (const auto& [k, v] : x) {
        Rational& t = y[k];
        t += a * v;
        if (t == 0) y.erase(k);
    }
}

// Solves g x = b exactly for a nonsingular g.
std::vector<Rational> solve_exact(RationalMatrix g, std::vector<Rational> b) {
    const int n = g.rows;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        while (g(piv, c) == 0) ++piv;
        for (int j = 0; j < n; ++j) std::swap(g(piv, j), g(c, j));
        std::swap(b[piv], b[c]);
        for (int r = 0; r < n; ++r) {
            if (r == c || g(r, c) == 0) continue;
            const Rational f = g(r, c) / g(c, c);
            for (int j = c; j < n; ++j) g(r, j) -= f * g(c, j);
            b[r] -= f * b[c];
        }
    }
    for (int i = 0; i < n; ++i) b[i] /= g(i, i);
    return b;
}

struct Candidate {
    int j;       // generator f_j
    int parent;  // basis index it is applied to
};

}  // namespace

WeightModule build_fundamental(const CartanDatum& datum, int node, const BuildOptions& opts) {
    const int n = datum.rank;
    if (node < 0 || node >= n)
        throw DomainError("node " + std::to_string(node + 1) + " out of range for " + datum.name());

    std::vector<IntVector> weights;
    std::vector<int> level;
    std::vector<std::vector<Sparse>> Ecol(n), Fcol(n);  // [generator][basis index]
    std::map<IntVector, std::vector<int>> space;        // weight -> basis indices
    std::map<int, Rational> gram;                       // key a*cap+b, same weight only
    const int cap = opts.dimension_cap;
    auto gram_at = [&](int a, int b) -> Rational {
        auto it = gram.find(a * (cap + 1) + b);
        return it == gram.end() ? Rational(0) : it->second;
    };

    auto alpha = [&](int j) {
        IntVector a(n);
        for (int k = 0; k < n; ++k) a[k] = datum.cartan[k][j];
        return a;
    };

    IntVector top(n, 0);
    top[node] = 1;
    weights.push_back(top);
    level.push_back(0);
    space[top] = {0};
    gram[0] = 1;
    for (int k = 0; k < n; ++k) {
        Ecol[k].emplace_back();
        Fcol[k].emplace_back();
    }

    std::vector<int> prev = {0};
    for (int L = 1; !prev.empty(); ++L) {
        // Candidates f_j b, grouped by weight in order of first appearance.
        std::vector<IntVector> order;
        std::map<IntVector, std::vector<Candidate>> groups;
        for (int b : prev)
            for (int j = 0; j < n; ++j) {
                IntVector mu = weights[b];
                const IntVector a = alpha(j);
                for (int k = 0; k < n; ++k) mu[k] -= a[k];
                if (!groups.count(mu)) order.push_back(mu);
                groups[mu].push_back({j, b});
            }

        std::vector<int> fresh;
        for (const auto& mu : order) {
            const auto& cands = groups[mu];
            const int m = static_cast<int>(cands.size());
            // e_k (f_j b) = f_j (e_k b) + delta_jk <wt b, alpha_j^vee> b
            std::vector<std::vector<Sparse>> ec(m, std::vector<Sparse>(n));
            for (int c = 0; c < m; ++c) {
                const auto [j, b] = cands[c];
                for (int k = 0; k < n; ++k) {
                    Sparse v;
                    for (const auto& [idx, coef] : Ecol[k][b]) axpy(v, coef, Fcol[j][idx]);
                    if (j == k) axpy(v, Rational(weights[b][j]), Sparse{{b, Rational(1)}});
                    ec[c][k] = std::move(v);
                }
            }
            // <f_j b, c'> = <b, e_j c'>
            RationalMatrix G(m, m);
            for (int c = 0; c < m; ++c)
                for (int c2 = 0; c2 < m; ++c2) {
                    Rational s = 0;
                    for (const auto& [idx, coef] : ec[c2][cands[c].j]) s += coef * gram_at(cands[c].parent, idx);
                    G(c, c2) = s;
                }
            std::vector<int> kept;
            for (int c = 0; c < m; ++c) {
                std::vector<int> trial = kept;
                trial.push_back(c);
                RationalMatrix sub(static_cast<int>(trial.size()), static_cast<int>(trial.size()));
                for (std::size_t a = 0; a < trial.size(); ++a)
                    for (std::size_t b = 0; b < trial.size(); ++b) sub(a, b) = G(trial[a], trial[b]);
                if (rational_rank(sub) == static_cast<int>(trial.size())) kept = std::move(trial);
            }
            if (kept.empty()) continue;
            if (static_cast<int>(weights.size() + kept.size()) > cap)
                throw DomainError("V(omega_" + std::to_string(node + 1) + ") of " + datum.name() +
                                  " exceeds the dimension cap " + std::to_string(cap));

            const int base = static_cast<int>(weights.size());
            const int r = static_cast<int>(kept.size());
            RationalMatrix Gk(r, r);
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) Gk(a, b) = G(kept[a], kept[b]);
            for (int a = 0; a < r; ++a) {
                weights.push_back(mu);
                level.push_back(L);
                space[mu].push_back(base + a);
                fresh.push_back(base + a);
                for (int k = 0; k < n; ++k) {
                    Ecol[k].push_back(ec[kept[a]][k]);
                    Fcol[k].emplace_back();
                }
                for (int b = 0; b < r; ++b) gram[(base + a) * (cap + 1) + base + b] = Gk(a, b);
            }
            // Every candidate, kept or not, in terms of the kept ones.
            for (int c = 0; c < m; ++c) {
                std::vector<Rational> rhs(r);
                for (int a = 0; a < r; ++a) rhs[a] = G(kept[a], c);
                const auto x = solve_exact(Gk, rhs);
                Sparse col;
                for (int a = 0; a < r; ++a)
                    if (x[a] != 0) col[base + a] = x[a];
                axpy(Fcol[cands[c].j][cands[c].parent], Rational(1), col);
            }
        }
        prev = std::move(fresh);
    }

    WeightModule mod;
    mod.node = node;
    mod.dim = static_cast<int>(weights.size());
    mod.weights = weights;
    mod.level = level;
    for (int k = 0; k < n; ++k) {
        RationalMatrix Em(mod.dim, mod.dim), Fm(mod.dim, mod.dim), Hm(mod.dim, mod.dim);
        for (int b = 0; b < mod.dim; ++b) {
            for (const auto& [idx, coef] : Ecol[k][b]) Em(idx, b) = coef;
            for (const auto& [idx, coef] : Fcol[k][b]) Fm(idx, b) = coef;
            Hm(b, b) = weights[b][k];
        }
        mod.E.push_back(std::move(Em));
        mod.F.push_back(std::move(Fm));
        mod.H.push_back(std::move(Hm));
    }
    mod.contravariant = RationalMatrix(mod.dim, mod.dim);
    for (int a = 0; a < mod.dim; ++a)
        for (int b = 0; b < mod.dim; ++b) mod.contravariant(a, b) = gram_at(a, b);
    for (int k = 0; k < n; ++k) {
        mod.Ed.push_back(mod.E[k].to_double());
        mod.Fd.push_back(mod.F[k].to_double());
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(mod.dim, mod.dim);
        int nil = 0;
        while (!P.isZero(0.0)) {
            P = P * mod.Ed[k];
            ++nil;
        }
        mod.nilpotency.push_back(nil);
    }
    return mod;
}

nlohmann::json module_to_json(const WeightModule& m) {
    auto mat = [](const RationalMatrix& r) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < r.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < r.cols; ++j) row.push_back(r(i, j).str());
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json j;
    j["fundamental_label"] = m.node + 1;
    j["dim"] = m.dim;
    j["weights"] = m.weights;
    j["levels"] = m.level;
    for (std::size_t k = 0; k < m.E.size(); ++k) {
        j["E"].push_back(mat(m.E[k]));
        j["F"].push_back(mat(m.F[k]));
    }
    j["contravariant_form"] = mat(m.contravariant);
    return j;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
    GroupElement out;
    out.blocks.reserve(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) out.blocks.push_back(blocks[k] * o.blocks[k]);
    return out;
}

GroupElement GroupElement::inverse() const {
    GroupElement out;
    for (const auto& b : blocks) out.blocks.push_back(b.partialPivLu().inverse());
    return out;
}

double GroupElement::distance(const GroupElement& o) const {
    double d = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const double scale = std::max({1.0, blocks[k].norm(), o.blocks[k].norm()});
        d = std::max(d, (blocks[k] - o.blocks[k]).norm() / scale);
    }
    return d;
}

double GroupElement::norm() const {
    double d = 0;
    for (const auto& b : blocks) d = std::max(d, b.norm());
    return d;
}

void apply_exp_nilpotent(const Eigen::MatrixXd& X, int nilpotency, Complex t, CVector& v) {
    CVector term = v;
    for (int k = 1; k < nilpotency; ++k) {
        term = (X * term) * (t / static_cast<double>(k));
        v += term;
    }
}

namespace {

CMatrix exp_nilpotent(const Eigen::MatrixXd& X, int nilpotency, Complex t) {
    const int d = static_cast<int>(X.rows());
    CMatrix out = CMatrix::Identity(d, d);
    CMatrix term = out;
    for (int k = 1; k < nilpotency; ++k) {
        term = term * X.cast<Complex>() * (t / static_cast<double>(k));
        out += term;
    }
    return out;
}

}  // namespace

ChevalleyGroup::ChevalleyGroup(CartanDatum datum, const BuildOptions& opts)
    : datum_(std::move(datum)), roots_(positive_roots(datum_)) {
    for (int i = 0; i < datum_.rank; ++i) modules_.push_back(build_fundamental(datum_, i, opts));
    w0_word_ = reduced_word_w0(datum_);
    w0_ = weyl_rep(*this, w0_word_);
    for (int i = 0; i < datum_.rank; ++i) v_minus_.push_back(w0_.blocks[i].col(0));
}

CVector ChevalleyGroup::v_plus(int i) const {
    CVector v = CVector::Zero(modules_[i].dim);
    v(0) = 1.0;
    return v;
}

GroupElement ChevalleyGroup::identity() const {
    GroupElement g;
    for (const auto& m : modules_) g.blocks.push_back(CMatrix::Identity(m.dim, m.dim));
    return g;
}

GroupPtr make_group(std::string_view type_name) {
    return std::make_shared<const ChevalleyGroup>(parse_cartan(type_name));
}

GroupElement one_param(const ChevalleyGroup& G, Sign sign, int i, Complex t) {
    if (i < 0 || i >= G.rank()) throw DomainError("node out of range");
    GroupElement g;
    for (const auto& m : G.modules())
        g.blocks.push_back(exp_nilpotent(sign == Sign::Plus ? m.Ed[i] : m.Fd[i], m.nilpotency[i], t));
    return g;
}

GroupElement x_word(const ChevalleyGroup& G, const WeylWord& word, const CVector& a) {
    if (static_cast<int>(word.length()) != a.size()) throw DomainError("word and coordinate lengths differ");
    GroupElement g = G.identity();
    for (std::size_t k = 0; k < word.length(); ++k) g = g * x_elem(G, word.letters[k], a(k));
    return g;
}

GroupElement torus(const ChevalleyGroup& G, const CVector& h) {
    GroupElement g;
    for (const auto& m : G.modules()) {
        CVector diag(m.dim);
        for (int b = 0; b < m.dim; ++b) {
            Complex mu_h = 0;
            for (int k = 0; k < G.rank(); ++k) mu_h += static_cast<double>(m.weights[b][k]) * h(k);
            diag(b) = std::exp(mu_h);
        }
        g.blocks.push_back(diag.asDiagonal());
    }
    return g;
}

GroupElement coroot_power(const ChevalleyGroup& G, int i, Complex t) {
    GroupElement g;
    for (const auto& m : G.modules()) {
        CVector diag(m.dim);
        for (int b = 0; b < m.dim; ++b) diag(b) = std::pow(t, m.weights[b][i]);
        g.blocks.push_back(diag.asDiagonal());
    }
    return g;
}

GroupElement weyl_rep(const ChevalleyGroup& G, const WeylWord& word) {
    if (!is_reduced(G.datum(), word)) throw DomainError("word " + word.str() + " is not reduced");
    GroupElement g = G.identity();
    for (int i : word.letters) g = g * x_elem(G, i, -1.0) * y_elem(G, i, 1.0) * x_elem(G, i, -1.0);
    return g;
}

Complex extremal_coeff(const CVector& v, const CVector& extremal) {
    Eigen::Index idx = 0;
    extremal.cwiseAbs().maxCoeff(&idx);
    return v(idx) / extremal(idx);
}

Complex minor(const ChevalleyGroup& G, const GroupElement& g, int i, const WeylWord& w_left,
              const WeylWord& w_right) {
    const CVector top = G.v_plus(i);
    const CVector right = weyl_rep(G, w_right).blocks[i] * top;
    const CVector left = weyl_rep(G, w_left).blocks[i] * top;
    return extremal_coeff(g.blocks[i] * right, left);
}

Complex fundamental_lowest_minor(const ChevalleyGroup& G, const GroupElement& g, int i) {
    return (g.blocks[i].row(0) * G.v_minus(i))(0);
}

Complex rho_minor(const ChevalleyGroup& G, const GroupElement& g) {
    Complex p = 1.0;
    for (int i = 0; i < G.rank(); ++i) p *= fundamental_lowest_minor(G, g, i);
    return p;
}

}  // namespace flagmirror
