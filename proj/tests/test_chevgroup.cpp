#include "flagmirror/chevgroup.hpp"
#include "flagmirror/error.hpp"

#include <doctest.h>

#include <random>

using namespace flagmirror;

namespace {

const char* kTypes[] = {"A1", "A2", "A3", "B2", "C2", "G2"};

CVector random_coords(std::mt19937_64& rng, int n, double lo, double hi, bool complex = false) {
    std::uniform_real_distribution<double> U(lo, hi);
    CVector v(n);
    for (int k = 0; k < n; ++k) v(k) = complex ? Complex(U(rng), U(rng)) : Complex(U(rng));
    return v;
}

GroupElement y_word(const ChevalleyGroup& G, const WeylWord& w, const CVector& c) {
    GroupElement g = G.identity();
    for (std::size_t k = 0; k < w.length(); ++k) g = g * y_elem(G, w.letters[k], c(k));
    return g;
}

// Plain Gaussian elimination without pivoting, written out independently.
CMatrix dense_lower_factor(CMatrix A) {
    const int n = static_cast<int>(A.rows());
    CMatrix L = CMatrix::Identity(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) {
            L(i, k) = A(i, k) / A(k, k);
            for (int j = k; j < n; ++j) A(i, j) -= L(i, k) * A(k, j);
        }
    return L;
}

}  // namespace

TEST_CASE("estar and fstar") {
    auto G = make_group("A2");
    CVector a(3);
    a << 0.3, -1.1, 2.5;
    auto u = x_word(*G, G->w0_word(), a);
    CHECK(std::abs(estar(*G, u, 0) - Complex(0.3 + 2.5)) < 1e-13);
    CHECK(std::abs(estar(*G, u, 1) - Complex(-1.1)) < 1e-13);
    CHECK(std::abs(estar(*G, G->identity(), 0)) == 0.0);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(estar(*G, u.inverse(), i) + estar(*G, u, i)) < 1e-12);
    CHECK_THROWS_AS(estar(*G, y_elem(*G, 0, 1.0), 0), DomainError);

    auto A1 = make_group("A1");
    CHECK(std::abs(fstar(*A1, y_elem(*A1, 0, 0.4), 0) - Complex(0.4)) < 1e-15);

    std::mt19937_64 rng(5);
    for (const char* t : kTypes) {
        auto H = make_group(t);
        for (int k = 0; k < 20; ++k) {
            CVector c = random_coords(rng, H->N(), -2, 2, true);
            auto x = x_word(*H, H->w0_word(), c);
            CVector e = estar_from_chart(*H, H->w0_word(), c);
            for (int i = 0; i < H->rank(); ++i) {
                CHECK(std::abs(estar(*H, x, i) - e(i)) < 1e-12 * (1 + std::abs(e(i))));
                CHECK(std::abs(estar(*H, x.inverse(), i) + e(i)) < 1e-11 * (1 + std::abs(e(i))));
            }
        }
    }
}

TEST_CASE("gauss_minus_plus basics") {
    auto G = make_group("A1");
    CVector h(1);
    h << 0.35;
    auto M = y_elem(*G, 0, 0.6) * torus(*G, h) * x_elem(*G, 0, -1.3);
    auto g = gauss_minus_plus(*G, M);
    CHECK(g.success);
    CHECK(std::abs(g.fstar[0] - Complex(0.6)) < 1e-14);

    // e^{-h} x(a) w0: f^* = e^{alpha(h)} / a
    const double a = 0.8;
    auto M2 = torus(*G, -h) * x_elem(*G, 0, a) * G->w0();
    auto g2 = gauss_minus_plus(*G, M2);
    CHECK(g2.success);
    CHECK(std::abs(g2.fstar[0] - std::exp(2 * 0.35) / a) < 1e-13);

    auto g3 = gauss_minus_plus(*G, G->w0());
    CHECK_FALSE(g3.success);
    CHECK(g3.failed_node == 0);
    CHECK_THROWS_AS(recover_lower_upper(*G, G->w0()), OffChartError);
}

TEST_CASE("fstar agrees with dense triangular factorization in type A") {
    std::mt19937_64 rng(17);
    for (const char* t : {"A1", "A2", "A3"}) {
        auto G = make_group(t);
        for (int k = 0; k < 50; ++k) {
            const auto& w = G->w0_word();
            auto M = y_word(*G, w, random_coords(rng, G->N(), -1, 1, true)) *
                     torus(*G, random_coords(rng, G->rank(), -0.5, 0.5, true)) *
                     x_word(*G, w, random_coords(rng, G->N(), -1, 1, true));
            auto g = gauss_minus_plus(*G, M);
            REQUIRE(g.success);
            const CMatrix L = dense_lower_factor(M.blocks[0]);  // defining representation
            for (int i = 0; i < G->rank(); ++i)
                CHECK(std::abs(g.fstar[i] - L(i + 1, i)) < 1e-12 * std::max(1.0, std::abs(L(i + 1, i))));
        }
    }
}

TEST_CASE("full decompositions reconstruct the input") {
    std::mt19937_64 rng(23);
    for (const char* t : kTypes) {
        auto G = make_group(t);
        const auto& w = G->w0_word();
        for (int k = 0; k < 20; ++k) {
            auto M = y_word(*G, w, random_coords(rng, G->N(), -1, 1, true)) *
                     torus(*G, random_coords(rng, G->rank(), -0.5, 0.5, true)) *
                     x_word(*G, w, random_coords(rng, G->N(), -1, 1, true));
            auto lu = recover_lower_upper(*G, M);
            CHECK(uminus_defect(lu.lower) < 1e-12);
            CHECK((lu.lower * lu.upper).distance(M) < 1e-10);
            auto g = gauss_minus_plus(*G, M);
            for (int i = 0; i < G->rank(); ++i) CHECK(std::abs(fstar(*G, lu.lower, i) - g.fstar[i]) < 1e-10);

            auto ul = uplus_bminus(*G, M);
            CHECK(uplus_defect(ul.upper) < 1e-12);
            CHECK((ul.upper * ul.lower).distance(M) < 1e-10);

            auto utl = uplus_torus_uminus(*G, M);
            auto chars = big_cell_characters(*G, M);
            for (int i = 0; i < G->rank(); ++i) {
                CHECK(std::abs(chars.e(i) - estar(*G, utl.upper, i)) < 1e-9);
                CHECK(std::abs(chars.f(i) - fstar(*G, utl.lower, i)) < 1e-9);
            }
            CHECK(uplus_defect(utl.upper) < 1e-12);
            CHECK(uminus_defect(utl.lower) < 1e-10);
            CHECK((utl.upper * utl.torus * utl.lower).distance(M) < 1e-10);
        }
    }
}

TEST_CASE("factorize_unipotent") {
    std::mt19937_64 rng(29);
    for (const char* t : kTypes) {
        auto G = make_group(t);
        const auto& w = G->w0_word();
        for (int k = 0; k < 10; ++k) {
            CVector a = random_coords(rng, G->N(), 0.1, 2.0);
            auto rec = factorize_unipotent(*G, x_word(*G, w, a), w);
            CHECK((rec - a).norm() < 1e-10 * a.norm());
        }
    }
    auto A2 = make_group("A2");
    for (int k = 0; k < 20; ++k) {
        CVector a = random_coords(rng, 3, 0.1, 2.0);
        auto b = factorize_unipotent(*A2, x_word(*A2, parse_word("1,2,1"), a), parse_word("2,1,2"));
        CVector expect(3);
        expect << a(1) * a(2) / (a(0) + a(2)), a(0) + a(2), a(0) * a(1) / (a(0) + a(2));
        CHECK((b - expect).norm() < 1e-10 * expect.norm());
    }
    CVector off(3);
    off << 0.0, 1.0, 1.0;
    CHECK_THROWS_AS(factorize_unipotent(*A2, x_word(*A2, parse_word("1,2,1"), off), parse_word("1,2,1")), Error);
    CHECK_THROWS_AS(factorize_unipotent(*A2, A2->identity(), parse_word("1,2")), DomainError);
}

TEST_CASE("total positivity") {
    auto A2 = make_group("A2");
    CVector ones = CVector::Ones(3);
    CHECK(is_totally_positive(*A2, x_word(*A2, parse_word("1,2,1"), ones), parse_word("1,2,1")).positive);
    auto A1 = make_group("A1");
    CHECK_FALSE(is_totally_positive(*A1, x_elem(*A1, 0, -1.0), parse_word("1")).positive);
    std::mt19937_64 rng(31);
    for (int k = 0; k < 20; ++k) {
        CVector a = random_coords(rng, 3, 0.05, 3.0);
        auto r = is_totally_positive(*A2, x_word(*A2, parse_word("1,2,1"), a), parse_word("2,1,2"));
        CHECK(r.positive);
    }
}

TEST_CASE("lemma_yi") {
    auto A1 = make_group("A1");
    auto u = x_elem(*A1, 0, 0.7);
    auto l0 = lemma_yi(*A1, u, 0, 0.0);
    CHECK(l0.b.distance(A1->identity()) < 1e-15);
    CHECK(l0.u.distance(u) < 1e-15);
    auto l = lemma_yi(*A1, u, 0, 0.3);
    const double p = 1 + 0.3 * 0.7;
    CHECK(std::abs(l.b.blocks[0](0, 0) - p) < 1e-14);
    CHECK(std::abs(l.b.blocks[0](1, 1) - 1 / p) < 1e-14);
    CHECK_THROWS_AS(lemma_yi(*A1, u, 0, -1 / 0.7), DomainError);

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (const char* t : {"A2", "B2", "G2"}) {
        auto G = make_group(t);
        for (int k = 0; k < 100; ++k) {
            auto v = x_word(*G, G->w0_word(), random_coords(rng, G->N(), -1, 1, true));
            const int i = k % G->rank();
            const Complex s(U(rng), U(rng));
            auto r = lemma_yi(*G, v, i, s);
            CHECK((v * y_elem(*G, i, s)).distance(r.b * r.u) < 1e-12);
            CHECK(uplus_defect(r.u) < 1e-12);
            CHECK(uminus_defect(coroot_power(*G, i, 1.0 / r.factor) * r.b) < 1e-12);
        }
    }
}
