#include "flagmirror/error.hpp"
#include "flagmirror/reps.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace flagmirror;

namespace {

const char* kTypes[] = {"A1", "A2", "A3", "B2", "C2", "G2"};

// Weyl dimension formula for a fundamental weight.
Rational weyl_dimension(const CartanDatum& d, int node) {
    const auto rs = positive_roots(d);
    Rational num = 1, den = 1;
    for (const auto& beta : rs.positive_roots) {
        Rational norm = 0;
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j) norm += beta[i] * beta[j] * d.gram_hstar[i][j];
        // <lambda, beta^vee> = sum_j c_j |alpha_j|^2/|beta|^2 lambda_j
        Rational lam = 0, rho = 0;
        for (int j = 0; j < d.rank; ++j) {
            const Rational w = beta[j] * d.gram_hstar[j][j] / norm;
            rho += w;
            if (j == node) lam += w;
        }
        num *= lam + rho;
        den *= rho;
    }
    return num / den;
}

RationalMatrix commutator(const RationalMatrix& a, const RationalMatrix& b) { return a * b - b * a; }

}  // namespace

TEST_CASE("dimensions match the Weyl dimension formula") {
    for (const char* t : kTypes) {
        auto d = parse_cartan(t);
        for (int i = 0; i < d.rank; ++i) {
            auto m = build_fundamental(d, i);
            CHECK(Rational(m.dim) == weyl_dimension(d, i));
        }
    }
    auto g2 = parse_cartan("G2");
    CHECK(build_fundamental(g2, 0).dim == 7);
    CHECK(build_fundamental(g2, 1).dim == 14);
    auto b2 = parse_cartan("B2");
    CHECK(build_fundamental(b2, 0).dim == 5);
    CHECK(build_fundamental(b2, 1).dim == 4);
    auto c2 = parse_cartan("C2");
    CHECK(build_fundamental(c2, 0).dim == 4);
    CHECK(build_fundamental(c2, 1).dim == 5);
    CHECK(build_fundamental(parse_cartan("A2"), 0).dim == 3);
}

TEST_CASE("dimension cap and node range") {
    BuildOptions small;
    small.dimension_cap = 10;
    CHECK_THROWS_AS(build_fundamental(parse_cartan("G2"), 1, small), DomainError);
    CHECK_THROWS_AS(build_fundamental(parse_cartan("A2"), 2), DomainError);
}

TEST_CASE("generator relations hold exactly") {
    for (const char* t : kTypes) {
        auto d = parse_cartan(t);
        for (int node = 0; node < d.rank; ++node) {
            auto m = build_fundamental(d, node);
            for (int i = 0; i < d.rank; ++i)
                for (int j = 0; j < d.rank; ++j) {
                    auto c = commutator(m.E[i], m.F[j]);
                    if (i == j) c = c - m.H[i];
                    CHECK(c.is_zero());
                    // [H_i, E_j] = a_ij E_j
                    auto he = commutator(m.H[i], m.E[j]);
                    RationalMatrix scaled = m.E[j];
                    for (auto& x : scaled.data) x *= d.cartan[i][j];
                    CHECK((he - scaled).is_zero());
                    if (i == j) continue;
                    // Serre: (ad E_i)^{1 - a_ij} E_j = 0
                    RationalMatrix s = m.E[j], sf = m.F[j];
                    for (int k = 0; k < 1 - d.cartan[i][j]; ++k) {
                        s = commutator(m.E[i], s);
                        sf = commutator(m.F[i], sf);
                    }
                    CHECK(s.is_zero());
                    CHECK(sf.is_zero());
                }
            // contravariance <f_j u, v> = <u, e_j v> and non-degeneracy
            for (int j = 0; j < d.rank; ++j) {
                RationalMatrix Ft(m.dim, m.dim);
                for (int a = 0; a < m.dim; ++a)
                    for (int b = 0; b < m.dim; ++b) Ft(a, b) = m.F[j](b, a);
                CHECK((Ft * m.contravariant - m.contravariant * m.E[j]).is_zero());
            }
            CHECK(rational_rank(m.contravariant) == m.dim);
            // weights are omega_node minus non-negative root sums: levels agree
            CHECK(m.level[0] == 0);
            CHECK(m.weights[0][node] == 1);
        }
    }
}

TEST_CASE("A1 defining block") {
    auto G = make_group("A1");
    auto x = x_elem(*G, 0, 0.7);
    CHECK(std::abs(x.blocks[0](0, 1) - Complex(0.7)) < 1e-15);
    CHECK(std::abs(x.blocks[0](0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(x.blocks[0](1, 0)) < 1e-15);
    CHECK(x_elem(*G, 0, 0.0).distance(G->identity()) == 0.0);

    auto s = weyl_rep(*G, parse_word("1"));
    CMatrix expect(2, 2);
    expect << 0, -1, 1, 0;
    CHECK((s.blocks[0] - expect).norm() < 1e-15);
    CHECK(((s * s).blocks[0] + CMatrix::Identity(2, 2)).norm() < 1e-15);

    // coefficient extraction
    CVector fv = G->module(0).Fd[0].cast<Complex>() * G->v_plus(0);
    CHECK(std::abs(coeff(x.blocks[0] * fv, 0) - Complex(0.7)) < 1e-15);
    CHECK(std::abs(fundamental_lowest_minor(*G, x, 0) - Complex(0.7)) < 1e-15);
    CHECK(std::abs(minor(*G, G->identity(), 0, WeylWord{}, WeylWord{}) - 1.0) < 1e-15);
    CHECK(std::abs(rho_minor(*G, G->identity())) < 1e-15);
    CHECK_THROWS_AS(weyl_rep(*G, parse_word("1,1")), DomainError);
}

TEST_CASE("one-parameter subgroups and group relations") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (const char* t : kTypes) {
        auto G = make_group(t);
        const auto& d = G->datum();
        for (int trial = 0; trial < 200 / 6 + 1; ++trial) {
            const int i = trial % d.rank;
            const Complex s(U(rng), U(rng)), u(U(rng), U(rng));
            CHECK((x_elem(*G, i, s) * x_elem(*G, i, u)).distance(x_elem(*G, i, s + u)) < 1e-13);
            CHECK((y_elem(*G, i, s) * y_elem(*G, i, u)).distance(y_elem(*G, i, s + u)) < 1e-13);
            // e^h x_j(t) e^{-h} = x_j(e^{alpha_j(h)} t)
            CVector h(d.rank);
            for (int k = 0; k < d.rank; ++k) h(k) = Complex(U(rng), U(rng));
            const CVector ah = simple_root_values(d, h);
            for (int j = 0; j < d.rank; ++j) {
                auto lhs = torus(*G, h) * x_elem(*G, j, s) * torus(*G, -h);
                CHECK(lhs.distance(x_elem(*G, j, std::exp(ah(j)) * s)) < 1e-12);
            }
            // t^{alpha_i^vee} = e^{log(t) alpha_i^vee}
            CVector hi = CVector::Zero(d.rank);
            hi(i) = std::log(u);
            CHECK(coroot_power(*G, i, u).distance(torus(*G, hi)) < 1e-12);
            // inverse and associativity
            auto g = x_elem(*G, i, s) * y_elem(*G, (i + 1) % d.rank, u) * torus(*G, h);
            CHECK((g * g.inverse()).distance(G->identity()) < 1e-11);
        }
    }
}

TEST_CASE("A2 braid relation in every block") {
    auto G = make_group("A2");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double a1 = U(rng), a2 = U(rng), a3 = U(rng);
        CVector a(3), b(3);
        a << a1, a2, a3;
        b << a2 * a3 / (a1 + a3), a1 + a3, a1 * a2 / (a1 + a3);
        CHECK(x_word(*G, parse_word("1,2,1"), a).distance(x_word(*G, parse_word("2,1,2"), b)) < 1e-12);
    }
}

TEST_CASE("longest element") {
    auto a2 = make_group("A2");
    CHECK(weyl_rep(*a2, parse_word("1,2,1")).distance(weyl_rep(*a2, parse_word("2,1,2"))) < 1e-14);
    for (const char* t : kTypes) {
        auto G = make_group(t);
        for (int i = 0; i < G->rank(); ++i) {
            const CVector& v = G->v_minus(i);
            int support = 0;
            for (int b = 0; b < v.size(); ++b)
                if (std::abs(v(b)) > 1e-12) ++support;
            CHECK(support == 1);
            CHECK(std::abs(v(G->module(i).lowest_index())) > 1e-6);
            // w0-dot is unitary for the contravariant form, so <v-, v-> = 1
            const Eigen::MatrixXd C = G->module(i).contravariant.to_double();
            CHECK(std::abs((v.transpose() * C * v)(0) - 1.0) < 1e-12);
            // w0 omega_i is antidominant
            for (int k = 0; k < G->rank(); ++k) CHECK(G->module(i).weights.back()[k] <= 0);
        }
        // every reduced word gives the same w0-dot
        const auto w = G->w0_word();
        for (int p : braid_positions(G->datum(), w)) {
            auto other = braid_move(G->datum(), w, p).word;
            CHECK(weyl_rep(*G, other).distance(G->w0()) < 1e-13);
        }
    }
}

TEST_CASE("rho minor equals the tensor-product coefficient") {
    auto G = make_group("A2");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        CVector a(3);
        for (int j = 0; j < 3; ++j) a(j) = Complex(U(rng), U(rng));
        auto u = x_word(*G, G->w0_word(), a);
        // V(omega_1) (x) V(omega_2), v+ = v+ (x) v+, v- = v- (x) v-
        const CMatrix& A = u.blocks[0];
        const CMatrix& B = u.blocks[1];
        CMatrix K(9, 9);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) K.block(3 * r, 3 * c, 3, 3) = A(r, c) * B;
        CVector vm(9);
        for (int r = 0; r < 3; ++r) vm.segment(3 * r, 3) = G->v_minus(0)(r) * G->v_minus(1);
        const Complex direct = (K * vm)(0);
        CHECK(std::abs(direct - rho_minor(*G, u)) < 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("module JSON dump") {
    auto m = build_fundamental(parse_cartan("B2"), 1);
    auto j = module_to_json(m);
    CHECK(j["dim"] == 4);
    CHECK(j["E"].size() == 2);
    CHECK(j["weights"][0] == nlohmann::json::array({0, 1}));
}
