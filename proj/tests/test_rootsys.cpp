#include "flagmirror/error.hpp"
#include "flagmirror/rootsys.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace flagmirror;

namespace {

const char* kTypes[] = {"A1", "A2", "A3", "B2", "C2", "G2"};

// All words of the given length over the nodes, filtered to reduced
// expressions of w0.
std::set<std::vector<int>> all_reduced_w0(const CartanDatum& d) {
    const WeylWord w0 = reduced_word_w0(d);
    const int N = static_cast<int>(w0.length());
    std::set<std::vector<int>> out;
    std::vector<int> letters(N, 0);
    while (true) {
        WeylWord w{letters};
        if (is_reduced(d, w) && same_element(d, w, w0)) out.insert(letters);
        int k = N - 1;
        while (k >= 0 && letters[k] == d.rank - 1) letters[k--] = 0;
        if (k < 0) break;
        ++letters[k];
    }
    return out;
}

}  // namespace

TEST_CASE("cartan matrices and gram normalization") {
    auto a2 = build_cartan(Series::A, 2);
    CHECK(a2.cartan == IntMatrix{{2, -1}, {-1, 2}});
    CHECK(a2.gram_hstar[0][1] == Rational(-1));
    CHECK(build_cartan(Series::A, 1).gram_hstar[0][0] == Rational(2));

    // G2 with d = (1,3): <a_i,a_j> = d_i a_ij / 3
    auto g2 = build_cartan(Series::G, 2);
    CHECK(g2.gram_hstar[0][0] == Rational(2, 3));
    CHECK(g2.gram_hstar[1][1] == Rational(2));
    CHECK(g2.gram_hstar[0][1] == Rational(-1));

    for (const char* t : kTypes) {
        auto d = parse_cartan(t);
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j) {
                CHECK(d.d[i] * d.cartan[i][j] == d.d[j] * d.cartan[j][i]);
                CHECK(d.gram_hstar[i][j] == d.gram_hstar[j][i]);
            }
        Rational longest = 0;
        for (int i = 0; i < d.rank; ++i) longest = std::max(longest, d.gram_hstar[i][i]);
        CHECK(longest == Rational(2));
    }
}

TEST_CASE("B2 and C2 labeling is pinned") {
    auto b2 = parse_cartan("B2");
    CHECK(b2.root_norm2(0) == Rational(2));
    CHECK(b2.root_norm2(1) == Rational(1));
    auto c2 = parse_cartan("C2");
    CHECK(c2.root_norm2(0) == Rational(1));
    CHECK(c2.root_norm2(1) == Rational(2));
}

TEST_CASE("unsupported types are rejected") {
    CHECK_THROWS_AS(parse_cartan("D4"), DomainError);
    CHECK_THROWS_AS(parse_cartan("A7"), DomainError);
    CHECK_THROWS_AS(parse_cartan("Q2"), DomainError);
    CHECK_THROWS_AS(parse_cartan("B3"), DomainError);
}

TEST_CASE("positive root counts") {
    CHECK(positive_roots(parse_cartan("A1")).N == 1);
    CHECK(positive_roots(parse_cartan("A2")).N == 3);
    CHECK(positive_roots(parse_cartan("B2")).N == 4);
    CHECK(positive_roots(parse_cartan("C2")).N == 4);
    CHECK(positive_roots(parse_cartan("G2")).N == 6);
    auto a3 = positive_roots(parse_cartan("A3"));
    CHECK(a3.N == 6);
    CHECK(a3.highest_root == IntVector{1, 1, 1});
    CHECK(positive_roots(parse_cartan("G2")).highest_root == IntVector{3, 2});
    for (const char* t : kTypes) {
        auto d = parse_cartan(t);
        auto rs = positive_roots(d);
        CHECK(static_cast<int>(reduced_word_w0(d).length()) == rs.N);
        // s_i permutes the positive roots other than alpha_i
        for (int i = 0; i < d.rank; ++i)
            for (const auto& beta : rs.positive_roots) {
                auto img = reflect(d, beta, i);
                IntVector simple(d.rank, 0);
                simple[i] = 1;
                if (beta == simple) {
                    for (auto& c : img) c = -c;
                    CHECK(img == simple);
                } else {
                    CHECK(rs.index_of(img) >= 0);
                }
            }
    }
}

TEST_CASE("reduced words and braid moves") {
    auto a2 = parse_cartan("A2");
    CHECK(reduced_word_w0(a2).str() == "(1,2,1)");
    auto mv = braid_move(a2, parse_word("1,2,1"), 0);
    CHECK(mv.word.str() == "(2,1,2)");
    CHECK(mv.m == 3);
    CHECK_THROWS_AS(braid_move(parse_cartan("A1"), parse_word("1"), 0), DomainError);

    auto b2 = parse_cartan("B2");
    auto mb = braid_move(b2, parse_word("(1,2,1,2)"), 0);
    CHECK(mb.word.str() == "(2,1,2,1)");
    CHECK(mb.m == 4);
    CHECK(reduced_word_w0(parse_cartan("G2")).length() == 6);

    CHECK_FALSE(is_reduced(a2, parse_word("1,1")));
    CHECK(is_reduced(a2, parse_word("2,1,2")));
    CHECK(weyl_length(a2, parse_word("1,2,1,2")) == 2);
    CHECK_THROWS_AS(parse_word("1,x"), DomainError);
    CHECK_THROWS_AS(weyl_length(a2, parse_word("3")), DomainError);
}

TEST_CASE("braid moves are involutions and connect all reduced words of w0") {
    for (const char* t : {"A2", "B2", "C2", "G2", "A3"}) {
        auto d = parse_cartan(t);
        const auto target = all_reduced_w0(d);
        std::set<std::vector<int>> seen{reduced_word_w0(d).letters};
        std::vector<WeylWord> queue{reduced_word_w0(d)};
        while (!queue.empty()) {
            WeylWord w = queue.back();
            queue.pop_back();
            for (int p : braid_positions(d, w)) {
                auto mv = braid_move(d, w, p);
                CHECK(is_reduced(d, mv.word));
                CHECK(same_element(d, mv.word, w));
                CHECK(braid_move(d, mv.word, p).word == w);
                if (seen.insert(mv.word.letters).second) queue.push_back(mv.word);
            }
        }
        CHECK(seen == target);
    }
    // rank-two counts: 2 reduced words for w0 in each rank-2 type
    CHECK(all_reduced_w0(parse_cartan("G2")).size() == 2);
    CHECK(all_reduced_w0(parse_cartan("A3")).size() == 16);
}

TEST_CASE("invariant form on h") {
    auto a1 = invariant_form_h(parse_cartan("A1"));
    CHECK(a1.gram_coroot(0, 0) == doctest::Approx(2.0));
    // alpha(h) = sqrt(2) s
    CHECK(a1.root_rows(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    auto a2 = invariant_form_h(parse_cartan("A2"));
    CHECK(a2.gram_coroot(0, 1) == doctest::Approx(-1.0));

    for (const char* t : kTypes) {
        auto d = parse_cartan(t);
        auto f = invariant_form_h(d);
        const int n = d.rank;
        Eigen::MatrixXd I = f.basis.transpose() * f.gram_coroot * f.basis;
        CHECK((I - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
        // simple roots in orthonormal coordinates reproduce the gram on h*
        Eigen::MatrixXd G = f.root_rows * f.root_rows.transpose();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(std::abs(G(i, j) - static_cast<double>(d.gram_hstar[i][j])) < 1e-12);
    }
}

TEST_CASE("coroot coordinates from root values") {
    auto d = parse_cartan("G2");
    Eigen::VectorXd vals(2);
    vals << 0.2, -0.3;
    auto h = coroot_coords_from_root_values(d, vals);
    auto back = simple_root_values(d, h);
    CHECK((back - vals).norm() < 1e-14);
}
