#include "flagmirror/error.hpp"
#include "flagmirror/integrate.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace flagmirror;

namespace {

const Complex kTwoPiI(0, 2 * std::numbers::pi);

// I0 by its power series in long double.
double oracle_i0(double x) {
    long double term = 1, sum = 1, y = static_cast<long double>(x) * x / 4;
    for (int k = 1; k < 200; ++k) {
        term *= y / (static_cast<long double>(k) * k);
        sum += term;
    }
    return static_cast<double>(sum);
}

// K0(x) = int_0^inf exp(-x cosh t) dt by the trapezoid rule.
double oracle_k0(double x) {
    const double h = 1.0 / 64;
    double sum = 0.5 * std::exp(-x);
    for (int k = 1; k < 64 * 40; ++k) {
        const double v = std::exp(-x * std::cosh(k * h));
        sum += v;
        if (v < 1e-300) break;
    }
    return sum * h;
}

CVector vec(std::initializer_list<Complex> xs) {
    CVector v(static_cast<int>(xs.size()));
    int k = 0;
    for (auto x : xs) v(k++) = x;
    return v;
}

CVector h_from_roots(const ChevalleyGroup& G, std::initializer_list<double> alphas) {
    Eigen::VectorXd v(static_cast<int>(alphas.size()));
    int k = 0;
    for (double x : alphas) v(k++) = x;
    return coroot_coords_from_root_values(G.datum(), v).cast<Complex>();
}

}  // namespace

TEST_CASE("A1 torus cycle gives 2 pi i I0") {
    auto G = make_group("A1");
    CycleSpec s;
    s.nodes_per_dim = 64;
    for (double alpha : {-1.0, 0.0, 0.5, 1.0}) {
        const auto r = s_gamma(*G, s, vec({alpha / 2}), 1.0);
        const Complex expect = kTwoPiI * oracle_i0(2 * std::exp(alpha / 2));
        CHECK(std::abs(r.value - expect) <= 1e-10 * std::abs(expect));
        CHECK(r.failures == 0);
        CHECK(r.node_count == 64);
        CHECK(r.reference_nodes == 32);
    }
    // z enters through the argument 2 sqrt(q) / z
    const auto r = s_gamma(*G, s, vec({0.3}), 0.7);
    const Complex expect = kTwoPiI * oracle_i0(2 * std::exp(0.3) / 0.7);
    CHECK(std::abs(r.value - expect) <= 1e-10 * std::abs(expect));
}

TEST_CASE("A1 positive cycle gives 2 K0") {
    auto G = make_group("A1");
    CycleSpec s;
    s.kind = CycleKind::Positive;
    for (double alpha : {-1.0, 0.0, 0.5, 1.0}) {
        const auto r = s_gamma(*G, s, vec({alpha / 2}), 1.0);
        const double expect = 2 * oracle_k0(2 * std::exp(alpha / 2));
        CHECK(std::abs(r.value - expect) <= 1e-8 * expect);
        CHECK(r.resolved.log_window.size() == 1);
    }
    s.orientation = -1;
    const auto r = s_gamma(*G, s, vec({0.0}), 1.0);
    CHECK(std::abs(r.value + 2 * oracle_k0(2.0)) <= 1e-8);
    CHECK_THROWS_AS(s_gamma(*G, s, vec({Complex(0, 0.1)}), 1.0), DomainError);
}

TEST_CASE("radius invariance") {
    auto A1 = make_group("A1");
    CycleSpec s;
    s.nodes_per_dim = 64;
    const Complex v1 = s_gamma(*A1, s, vec({0.2}), 1.0).value;
    s.radii = {0.5};
    const Complex v2 = s_gamma(*A1, s, vec({0.2}), 1.0).value;
    CHECK(std::abs(v1 - v2) <= 1e-10 * std::abs(v1));

    auto A2 = make_group("A2");
    const CVector h = h_from_roots(*A2, {0.3, -0.2});
    CycleSpec t;
    t.nodes_per_dim = 48;
    const QuadOptions once{0, false};
    const Complex w1 = s_gamma(*A2, t, h, 1.0, once).value;
    t.radii = {0.7, 1.3, 1.0};
    const Complex w2 = s_gamma(*A2, t, h, 1.0, once).value;
    CHECK(std::abs(w1 - w2) <= 1e-8 * std::abs(w1));
}

TEST_CASE("bare form integrates to (2 pi i)^N") {
    for (const char* t : {"A1", "A2", "B2", "C2"}) {
        auto G = make_group(t);
        CycleSpec s;
        s.bare_form = true;
        s.nodes_per_dim = 6;
        const auto r = s_gamma(*G, s, CVector::Zero(G->rank()), 1.0);
        const Complex expect = std::pow(kTwoPiI, G->N());
        CHECK(std::abs(r.value - expect) <= 1e-12 * std::abs(expect));
    }
}

TEST_CASE("word independence under braid moves") {
    auto A2 = make_group("A2");
    const CVector h = h_from_roots(*A2, {0.2, 0.1});
    const auto b = braid_compare(*A2, h, 1.0, parse_word("1,2,1"), parse_word("2,1,2"));
    CHECK(b.braid_m == 3);
    CHECK(b.predicted_sign == 1);
    CHECK(b.relative_difference <= 1e-10);

    auto A1 = make_group("A1");
    const auto self = braid_compare(*A1, vec({0.1}), 1.0, parse_word("1"), parse_word("1"));
    CHECK(self.relative_difference == 0.0);

    auto B2 = make_group("B2");
    CycleSpec s;
    s.saddle_radii = true;
    s.nodes_per_dim = 24;
    const auto bb = braid_compare(*B2, vec({0.1, -0.2}), 1.0, parse_word("1,2,1,2"), parse_word("2,1,2,1"), s);
    CHECK(bb.braid_m == 4);
    CHECK(bb.relative_difference <= 1e-9);

    CHECK_THROWS_AS(braid_compare(*A2, h, 1.0, parse_word("1,2,1"), parse_word("1,2")), DomainError);
}

TEST_CASE("torus rule converges geometrically") {
    for (const char* t : {"A1", "A2"}) {
        auto G = make_group(t);
        const CVector h = G->rank() == 1 ? vec({0.5}) : h_from_roots(*G, {0.5, -1.0});
        CycleSpec s;
        double prev = 0;
        for (int n : {8, 16, 32, 64}) {
            s.nodes_per_dim = n;
            const double delta = s_gamma(*G, s, h, 1.0).refinement_delta;
            if (n > 8 && prev > 1e-13) CHECK((delta <= prev / 10 || delta < 1e-14));
            prev = delta;
        }
        CHECK(prev < 1e-13);
    }
}

TEST_CASE("S is entire in h: Cauchy-Taylor model on a circle") {
    auto G = make_group("A1");
    CycleSpec s;
    s.nodes_per_dim = 48;
    const Complex h0 = 0.1, rho = 0.5;
    const int M = 32;
    std::vector<Complex> coef(M, 0.0);
    for (int k = 0; k < M; ++k) {
        const Complex e = std::polar(1.0, 2 * std::numbers::pi * k / M);
        const Complex v = s_gamma(*G, s, vec({h0 + rho * e}), 1.0, {0, false}).value;
        for (int m = 0; m < M; ++m) coef[m] += v * std::pow(std::conj(e), m) / static_cast<double>(M);
    }
    for (Complex off : {Complex(0.2, 0.1), Complex(-0.15, -0.25), Complex(0, 0)}) {
        Complex model = 0;
        for (int m = M - 1; m >= 0; --m) model = model * (off / rho) + coef[m];
        const Complex direct = s_gamma(*G, s, vec({h0 + off}), 1.0, {0, false}).value;
        CHECK(std::abs(model - direct) <= 1e-10 * std::abs(direct));
    }
    // coefficients decay: the model is convergent
    CHECK(std::abs(coef[M - 1]) < 1e-12 * std::abs(coef[0]));
}

TEST_CASE("results do not depend on the thread count") {
    auto G = make_group("A2");
    const CVector h = h_from_roots(*G, {0.3, -0.4});
    CycleSpec s;
    s.nodes_per_dim = 24;
    const auto r1 = s_gamma(*G, s, h, 1.0, {1, true});
    const auto r3 = s_gamma(*G, s, h, 1.0, {3, true});
    const auto r8 = s_gamma(*G, s, h, 1.0, {8, true});
    CHECK(r1.value == r3.value);
    CHECK(r1.value == r8.value);
    CHECK(r1.reference_value == r8.reference_value);
}

TEST_CASE("decay scan along coordinate rays") {
    auto A1 = make_group("A1");
    const auto r1 = decay_scan(*A1, parse_word("1"), Eigen::VectorXd::Constant(1, 0.2), 1.0);
    CHECK(r1.rays.size() == 2);
    CHECK(r1.all_diverge);
    for (const auto& ray : r1.rays) {
        CHECK(ray.max_summand <= 0);
        CHECK(ray.final_value < -40);
    }
    CHECK(r1.window[0].first < 0);
    CHECK(r1.window[0].second > 0);

    auto A2 = make_group("A2");
    const auto r2 = decay_scan(*A2, A2->w0_word(), Eigen::VectorXd::Zero(2), 1.0);
    CHECK(r2.rays.size() == 6);
    CHECK(r2.all_diverge);
    for (const auto& ray : r2.rays) CHECK(ray.max_summand <= 0);
}

TEST_CASE("input validation") {
    auto G = make_group("A2");
    CycleSpec s;
    CHECK_THROWS_AS(s_gamma(*G, s, CVector::Zero(3), 1.0), DomainError);
    CHECK_THROWS_AS(s_gamma(*G, s, CVector::Zero(2), -1.0), DomainError);
    s.word = parse_word("1,2,2");
    CHECK_THROWS_AS(s_gamma(*G, s, CVector::Zero(2), 1.0), DomainError);
    s.word = {};
    s.radii = {1.0, -1.0, 1.0};
    CHECK_THROWS_AS(s_gamma(*G, s, CVector::Zero(2), 1.0), DomainError);
    s.radii = {};
    s.orientation = 0;
    CHECK_THROWS_AS(s_gamma(*G, s, CVector::Zero(2), 1.0), DomainError);
    CHECK_THROWS_AS(parse_cycle_kind("sphere"), DomainError);
    CHECK(parse_cycle_kind("positive") == CycleKind::Positive);
}

TEST_CASE("reports") {
    auto G = make_group("A2");
    CycleSpec s;
    s.nodes_per_dim = 8;
    const auto r = s_gamma(*G, s, CVector::Zero(2), 1.0);
    const auto j = to_json(r);
    CHECK(j.contains("value"));
    CHECK(j["node_count"] == 512);
    CHECK(j["cycle"]["word"] == "(1,2,1)");
    std::ostringstream os;
    write_integrand_csv(os, *G, r.resolved, CVector::Zero(2), 1.0, 4);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 1 + 64);
}
