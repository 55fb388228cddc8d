#include "flagmirror/mirror.hpp"

#include "flagmirror/error.hpp"

namespace flagmirror {

namespace {

void check_word(const ChevalleyGroup& G, const WeylWord& word) {
    if (static_cast<int>(word.length()) != G.N() || !is_reduced(G.datum(), word))
        throw DomainError("chart word " + word.str() + " is not a reduced word for w0 of " + G.datum().name());
}

}  // namespace

MirrorPoint make_point(const ChevalleyGroup& G, const WeylWord& word, const CVector& a, const CVector& h,
                       double z) {
    check_word(G, word);
    if (a.size() != G.N() || h.size() != G.rank()) throw DomainError("make_point: dimension mismatch");
    if (!(z > 0)) throw DomainError("z must be positive");
    for (int k = 0; k < a.size(); ++k)
        if (a(k) == 0.0) throw OffChartError("chart coordinate " + std::to_string(k + 1) + " is zero", k, 0.0);
    MirrorPoint p{word, a, h, z, {}};
    p.gauss = gauss_minus_plus(G, torus(G, -h) * x_word(G, word, a) * G.w0());
    if (!p.gauss.success)
        throw OffChartError("e^{-h} x(a) w0 is off the big cell at node " + std::to_string(p.gauss.failed_node + 1),
                            p.gauss.failed_node, p.gauss.failed_magnitude);
    return p;
}

SuperpotentialValue superpotential(const ChevalleyGroup& G, const MirrorPoint& p) {
    SuperpotentialValue v;
    v.e_part = -estar_from_chart(G, p.word, p.a);
    v.f_part = CVector(G.rank());
    for (int i = 0; i < G.rank(); ++i) v.f_part(i) = -p.gauss.fstar[i];
    v.total = (v.e_part.sum() + v.f_part.sum()) / p.z;
    return v;
}

FiberElements fiber_elements(const ChevalleyGroup& G, const MirrorPoint& p) {
    const GroupElement xa = x_word(G, p.word, p.a);
    const auto lu = recover_lower_upper(G, torus(G, -p.h) * xa * G.w0());
    FiberElements f;
    CVector minus_a = -p.a.reverse();
    WeylWord reversed{std::vector<int>(p.word.letters.rbegin(), p.word.letters.rend())};
    f.u = G.identity();
    for (std::size_t k = 0; k < reversed.length(); ++k) f.u = f.u * x_elem(G, reversed.letters[k], minus_a(k));
    for (const auto& L : lu.lower.blocks)
        f.ubar.blocks.push_back(L.triangularView<Eigen::UnitLower>().solve(CMatrix::Identity(L.rows(), L.cols())));
    f.g = f.u * torus(G, p.h) * lu.lower;
    return f;
}

double fiber_defect(const ChevalleyGroup& G, const MirrorPoint& p) {
    // g v+ in C v- is tested as e^h ybar v+ in C u^{-1} v-, which avoids the
    // cancellation in applying u to a large vector.
    const GroupElement xa = x_word(G, p.word, p.a);
    const auto lu = recover_lower_upper(G, torus(G, -p.h) * xa * G.w0());
    const GroupElement eh = torus(G, p.h);
    double d = 0;
    for (int i = 0; i < G.rank(); ++i) {
        const CVector lhs = eh.blocks[i] * lu.lower.blocks[i].col(0);
        const CVector rhs = xa.blocks[i] * G.v_minus(i);
        const Complex c = lhs(0) / rhs(0);
        d = std::max(d, (lhs - c * rhs).norm() / std::max(lhs.norm(), 1e-300));
    }
    return d;
}

MirrorPoint translate(const ChevalleyGroup& G, const MirrorPoint& p, const CVector& h) {
    return make_point(G, p.word, p.a, p.h + h, p.z);
}

ChartEvaluator::ChartEvaluator(const ChevalleyGroup& G, WeylWord word) : G_(&G), word_(std::move(word)) {
    check_word(G, word_);
    for (const auto& m : G.modules()) {
        Et_.emplace_back();
        for (const auto& E : m.Ed) Et_.back().push_back(E.transpose());
    }
}

bool ChartEvaluator::ratios(const CVector& a, CVector& ratio, CVector& minors) const {
    const int n = G_->rank();
    ratio.resize(n);
    minors.resize(n);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
        const WeightModule& m = G_->module(i);
        CVector v = G_->v_minus(i);
        for (int k = N() - 1; k >= 0; --k) {
            const int l = word_.letters[k];
            apply_exp_nilpotent(m.Ed[l], m.nilpotency[l], a(k), v);
        }
        minors(i) = v(0);
        if (std::abs(v(0)) <= kMinorTolerance * std::max(1.0, v.cwiseAbs().maxCoeff())) ok = false;
        ratio(i) = v(1) / v(0);
    }
    return ok;
}

CVector ChartEvaluator::root_exponentials(const CVector& h) const {
    return simple_root_values(G_->datum(), h).array().exp();
}

Complex ChartEvaluator::zF(const CVector& a, const CVector& root_exp) const {
    CVector ratio, minors;
    if (!ratios(a, ratio, minors)) throw OffChartError("chart point off the big cell", -1, minors.cwiseAbs().minCoeff());
    return -a.sum() - root_exp.cwiseProduct(ratio).sum();
}

Complex ChartEvaluator::zF_gradient(const CVector& a, const CVector& root_exp, CVector& grad) const {
    const int n = G_->rank(), N = this->N();
    grad = CVector::Constant(N, -1.0);
    Complex total = -a.sum();
    std::vector<CVector> suffix(N + 1);
    for (int i = 0; i < n; ++i) {
        const WeightModule& m = G_->module(i);
        // suffix[k] = x_{i_k}(a_k) ... x_{i_N}(a_N) v-
        suffix[N] = G_->v_minus(i);
        for (int k = N - 1; k >= 0; --k) {
            suffix[k] = suffix[k + 1];
            const int l = word_.letters[k];
            apply_exp_nilpotent(m.Ed[l], m.nilpotency[l], a(k), suffix[k]);
        }
        const CVector& v = suffix[0];
        if (std::abs(v(0)) <= kMinorTolerance * std::max(1.0, v.cwiseAbs().maxCoeff()))
            throw OffChartError("chart point off the big cell", i, std::abs(v(0)));
        const Complex R = v(1) / v(0);
        total -= root_exp(i) * R;
        // rows 0 and 1 of x_{i_1}(a_1) ... x_{i_{k-1}}(a_{k-1})
        CVector r0 = CVector::Zero(m.dim), r1 = CVector::Zero(m.dim);
        r0(0) = 1;
        r1(1) = 1;
        for (int k = 0; k < N; ++k) {
            const int l = word_.letters[k];
            const CVector Es = m.Ed[l] * suffix[k];
            const Complex d0 = r0.cwiseProduct(Es).sum(), d1 = r1.cwiseProduct(Es).sum();
            grad(k) -= root_exp(i) * (d1 * v(0) - v(1) * d0) / (v(0) * v(0));
            apply_exp_nilpotent(Et_[i][l], m.nilpotency[l], a(k), r0);
            apply_exp_nilpotent(Et_[i][l], m.nilpotency[l], a(k), r1);
        }
    }
    return total;
}

Complex gklo_weight(const ChevalleyGroup& G, const GroupElement& u) { return rho_minor(G, u); }

namespace {

CVector flag_image(const ChevalleyGroup& G, const WeylWord& word, const GroupElement& g, const CVector& a,
                   const CVector& hint) {
    const auto ul = uplus_bminus(G, g * x_word(G, word, a));
    FactorizeOptions opts;
    opts.hint = hint;
    return factorize_unipotent(G, ul.upper, word, opts);
}

}  // namespace

JacobianComparison chart_jacobian_ratio(const ChevalleyGroup& G, const WeylWord& word, const CVector& a,
                                        const ChartTransform& t, bool gklo, double fd_step) {
    check_word(G, word);
    GroupElement g;
    const GroupElement U = x_word(G, word, a);
    JacobianComparison out;
    switch (t.kind) {
        case TransformKind::Torus: {
            g = torus(G, t.h);
            const CVector ah = simple_root_values(G.datum(), t.h);
            // e^{2 rho(h)} = prod e^{alpha(h)} over positive roots
            Complex two_rho = 0;
            for (const auto& beta : G.roots().positive_roots)
                for (int i = 0; i < G.rank(); ++i) two_rho += static_cast<double>(beta[i]) * ah(i);
            out.predicted = gklo ? std::exp(two_rho) : Complex(1.0);
            break;
        }
        case TransformKind::LeftY: {
            if (gklo) throw DomainError("no closed form for the GKLO form under y_i translation");
            g = y_elem(G, t.node, t.s);
            out.predicted = 1.0 / (1.0 + estar(G, U, t.node) * t.s);
            break;
        }
        case TransformKind::LeftX: {
            g = x_elem(G, t.node, t.s);
            const CVector v = U.blocks[t.node] * G.v_minus(t.node);
            out.predicted = gklo ? Complex(1.0) : 1.0 / (1.0 + v(1) / v(0) * t.s);
            break;
        }
    }
    const int N = static_cast<int>(a.size());
    out.image = flag_image(G, word, g, a, a);
    CMatrix J(N, N);
    for (int k = 0; k < N; ++k) {
        const double d = fd_step * std::max(1.0, std::abs(a(k)));
        CVector ap = a, am = a;
        ap(k) += d;
        am(k) -= d;
        J.col(k) = (flag_image(G, word, g, ap, out.image) - flag_image(G, word, g, am, out.image)) / (2 * d);
    }
    Complex f = J.determinant();
    for (int k = 0; k < N; ++k) f *= a(k) / out.image(k);
    if (gklo) f *= gklo_weight(G, x_word(G, word, out.image)) / gklo_weight(G, U);
    out.numeric = f;
    return out;
}

namespace {

void require_h_zero(const MirrorPoint& p) {
    if (p.h.norm() > 1e-14) throw DomainError("psi functions live on Z_0 (h = 0)");
}

Complex psi_minus_from_U(const ChevalleyGroup& G, const GroupElement& U, double z) {
    const Complex rho = rho_minor(G, U);
    if (std::abs(rho) < 1e-300) throw OffChartError("rho-minor vanishes: pole of psi-", -1, 0.0);
    const auto gauss = gauss_minus_plus(G, U * G.w0());
    if (!gauss.success) throw OffChartError("off the big cell", gauss.failed_node, gauss.failed_magnitude);
    Complex chi = 0;
    for (const auto& f : gauss.fstar) chi -= f;
    return std::exp(chi / z) / rho;
}

template <typename F>
Complex five_point(F&& f, double h) {
    return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12 * h);
}

}  // namespace

Complex psi_plus(const ChevalleyGroup& G, const MirrorPoint& p) {
    require_h_zero(p);
    return std::exp(-estar_from_chart(G, p.word, p.a).sum() / p.z);
}

Complex psi_minus(const ChevalleyGroup& G, const MirrorPoint& p) {
    require_h_zero(p);
    return psi_minus_from_U(G, x_word(G, p.word, p.a), p.z);
}

double whittaker_vector_check(const ChevalleyGroup& G, WhittakerSide side, int i, const MirrorPoint& p,
                              double fd_step) {
    require_h_zero(p);
    const GroupElement U = x_word(G, p.word, p.a);
    Complex psi, deriv;
    if (side == WhittakerSide::Plus) {
        // e_k^* is additive on U+, so e_k^*(U'^{-1}) = -e_k^*(U').
        auto f = [&](double s) {
            const GroupElement Us = x_elem(G, i, -s) * U;
            Complex chi = 0;
            for (int k = 0; k < G.rank(); ++k) chi -= estar(G, Us, k);
            return std::exp(chi / p.z);
        };
        psi = psi_plus(G, p);
        deriv = five_point(f, fd_step);
    } else {
        // y_i(-s) U = u_(s)^{-1} b_(s)^{-1}; the B- part contributes 1/(1 + s e_i^*(u)).
        // u_(s)^{-1} = y_i(-s) U b_(s), formed without a matrix inverse.
        const Complex e = -estar(G, U, i);
        auto f = [&](double s) {
            const Complex factor = 1.0 + s * e;
            if (std::abs(factor) < 1e-12) throw DomainError("whittaker_vector_check: 1 + s e_i^*(u) vanishes");
            const GroupElement Us = y_elem(G, i, -s) * U * coroot_power(G, i, factor) * y_elem(G, i, s * factor);
            return psi_minus_from_U(G, Us, p.z) / factor;
        };
        psi = psi_minus(G, p);
        deriv = five_point(f, fd_step);
    }
    return std::abs(deriv - psi / p.z) / std::abs(psi);
}

Complex whittaker_w0(const ChevalleyGroup& G, const GroupElement& g, double z) {
    const auto c = big_cell_characters(G, g);
    return std::exp((c.e.sum() - c.f.sum()) / z);
}

}  // namespace flagmirror
