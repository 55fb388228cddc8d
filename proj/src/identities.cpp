#include "flagmirror/identities.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace flagmirror {

namespace {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    CVector real(int n, double lo, double hi) {
        std::uniform_real_distribution<double> U(lo, hi);
        CVector v(n);
        for (int k = 0; k < n; ++k) v(k) = U(rng_);
        return v;
    }

    CVector complex(int n, double lo, double hi) {
        std::uniform_real_distribution<double> U(lo, hi);
        CVector v(n);
        for (int k = 0; k < n; ++k) v(k) = Complex(U(rng_), U(rng_));
        return v;
    }

    GroupElement lower(const ChevalleyGroup& G, double r) {
        const CVector c = complex(G.N(), -r, r);
        GroupElement g = G.identity();
        for (int k = 0; k < G.N(); ++k) g = g * y_elem(G, G.w0_word().letters[k], c(k));
        return g;
    }

private:
    std::mt19937_64 rng_;
};

struct Tracker {
    IdentityCheck c;
    Tracker(std::string name, double tol) {
        c.name = std::move(name);
        c.tolerance = tol;
    }
    void add(double d) {
        c.max_defect = std::max(c.max_defect, std::isfinite(d) ? d : std::numeric_limits<double>::infinity());
        ++c.samples;
    }
    IdentityCheck done() {
        c.pass = c.max_defect <= c.tolerance;
        return c;
    }
};

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

std::vector<IdentityCheck> run_identity_suite(const ChevalleyGroup& G, const IdentityOptions& opts) {
    Sampler S(opts.seed);
    const auto& w = G.w0_word();
    const int n = G.rank(), N = G.N();
    std::vector<IdentityCheck> out;

    {
        Tracker t("lemma_yi_product", 1e-12);
        for (int k = 0; k < opts.samples; ++k) {
            const GroupElement v = x_word(G, w, S.complex(N, -1, 1));
            const int i = k % n;
            const Complex s = S.complex(1, -0.5, 0.5)(0);
            const auto r = lemma_yi(G, v, i, s);
            double d = (v * y_elem(G, i, s)).distance(r.b * r.u);
            d = std::max(d, uplus_defect(r.u));
            d = std::max(d, uminus_defect(coroot_power(G, i, 1.0 / r.factor) * r.b));
            t.add(d);
        }
        out.push_back(t.done());
    }

    {
        Tracker ty("pullback_left_y", 1e-6), tx("pullback_left_x", 1e-6), gx("gklo_left_x_invariance", 1e-6),
            tt("pullback_torus", 1e-6), gt("gklo_torus_factor", 1e-6);
        for (int k = 0; k < opts.jacobian_samples; ++k) {
            const CVector a = S.real(N, 0.3, 1.5);
            for (int i = 0; i < n; ++i) {
                const auto ry = chart_jacobian_ratio(G, w, a, {TransformKind::LeftY, i, 0.1, {}});
                ty.add(rel(ry.numeric, ry.predicted));
                const ChartTransform x{TransformKind::LeftX, i, 0.17, {}};
                const auto rx = chart_jacobian_ratio(G, w, a, x);
                tx.add(rel(rx.numeric, rx.predicted));
                gx.add(std::abs(chart_jacobian_ratio(G, w, a, x, true).numeric - 1.0));
            }
            const ChartTransform tor{TransformKind::Torus, 0, 0.0, S.real(n, -0.4, 0.4)};
            tt.add(std::abs(chart_jacobian_ratio(G, w, a, tor).numeric - 1.0));
            const auto rg = chart_jacobian_ratio(G, w, a, tor, true);
            gt.add(rel(rg.numeric, rg.predicted));
        }
        for (auto* t : {&ty, &tx, &gx, &tt, &gt}) out.push_back(t->done());
    }

    {
        Tracker t("translation_f_scaling", 1e-12);
        for (int k = 0; k < opts.samples; ++k) {
            const auto p0 = make_point(G, w, S.complex(N, 0.3, 1.5), CVector::Zero(n), 1.0);
            const CVector h = S.real(n, -0.7, 0.7);
            const auto F0 = superpotential(G, p0);
            const auto F = superpotential(G, translate(G, p0, h));
            const CVector ah = simple_root_values(G.datum(), h);
            double d = 0;
            for (int i = 0; i < n; ++i) {
                d = std::max(d, std::abs(F.e_part(i) - F0.e_part(i)) / std::max(1.0, std::abs(F0.e_part(i))));
                d = std::max(d, std::abs(F.f_part(i) - std::exp(ah(i)) * F0.f_part(i)) /
                                    std::max(1.0, std::abs(F.f_part(i))));
            }
            t.add(d);
        }
        out.push_back(t.done());
    }

    {
        Tracker fac("psi_factorization", 1e-12), wp("whittaker_vector_plus", 1e-8), wm("whittaker_vector_minus", 1e-6);
        for (int k = 0; k < std::max(1, opts.samples / 4); ++k) {
            const auto p = make_point(G, w, S.real(N, 0.4, 1.6), CVector::Zero(n), 1.2);
            const Complex eF = std::exp(superpotential(G, p).total);
            fac.add(rel(psi_plus(G, p) * psi_minus(G, p) * rho_minor(G, x_word(G, p.word, p.a)), eF));
            for (int i = 0; i < n; ++i) {
                wp.add(whittaker_vector_check(G, WhittakerSide::Plus, i, p));
                wm.add(whittaker_vector_check(G, WhittakerSide::Minus, i, p));
            }
        }
        for (auto* t : {&fac, &wp, &wm}) out.push_back(t->done());
    }

    {
        Tracker t("whittaker_condition_w0", 1e-10);
        for (int k = 0; k < std::max(1, opts.samples / 4); ++k) {
            const std::vector<CVector> hs{S.complex(n, -0.5, 0.5)};
            const std::vector<GroupElement> up{x_word(G, w, S.complex(N, -1, 1)), x_word(G, w, S.complex(N, -1, 1))};
            const std::vector<GroupElement> um{S.lower(G, 0.8), S.lower(G, 0.8)};
            const double z = 0.5 + S.real(1, 0, 1)(0).real();
            t.add(whittaker_condition_check(G, hs, up, um, z));
        }
        out.push_back(t.done());
    }
    return out;
}

nlohmann::json to_json(const IdentityCheck& c) {
    return {{"name", c.name},
            {"max_defect", c.max_defect},
            {"tolerance", c.tolerance},
            {"samples", c.samples},
            {"verdict", c.pass ? "pass" : "fail"}};
}

}  // namespace flagmirror
