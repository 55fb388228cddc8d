#include "flagmirror/toda.hpp"

#include "flagmirror/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

namespace flagmirror {

namespace {

constexpr double kEuler = 0.57721566490153286061;
constexpr double kEps = 1e-17;

void check_arg(double x, const char* name) {
    if (!(x >= 0)) throw DomainError(std::string(name) + ": argument must be non-negative");
    if (x > 700) throw DomainError(std::string(name) + ": argument beyond the supported range (x <= 700)");
}

// K0 and K1 for x > 2 by Steed's method on the second continued fraction.
void bessel_k_cf(double x, double& k0, double& k1) {
    double b = 2 * (1 + x), d = 1 / b, h = d, delh = d;
    double q1 = 0, q2 = 1;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1 + q * delh;
    for (int i = 2; i < 100000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2;
        d = 1 / (b + a * d);
        delh = (b * d - 1) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    k0 = std::sqrt(std::numbers::pi / (2 * x)) * std::exp(-x) / s;
    k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace

double bessel_i0(double x) {
    check_arg(x, "bessel_i0");
    const double y = x * x / 4;
    double term = 1, sum = 1;
    for (int k = 1; term > kEps * sum; ++k) {
        term *= y / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

double bessel_i1(double x) {
    check_arg(x, "bessel_i1");
    const double y = x * x / 4;
    double term = x / 2, sum = term;
    for (int k = 1; term > kEps * sum; ++k) {
        term *= y / (static_cast<double>(k) * (k + 1));
        sum += term;
    }
    return sum;
}

double bessel_k0(double x) {
    check_arg(x, "bessel_k0");
    if (x == 0) return std::numeric_limits<double>::infinity();
    if (x > 2) {
        double k0, k1;
        bessel_k_cf(x, k0, k1);
        return k0;
    }
    // K0 = -(log(x/2) + gamma) I0 + sum_k H_k (x^2/4)^k / (k!)^2
    const double y = x * x / 4;
    double term = 1, harmonic = 0, sum = 0;
    for (int k = 1; k < 200; ++k) {
        term *= y / (static_cast<double>(k) * k);
        harmonic += 1.0 / k;
        sum += term * harmonic;
        if (term * harmonic < kEps * std::abs(sum)) break;
    }
    return -(std::log(x / 2) + kEuler) * bessel_i0(x) + sum;
}

double bessel_k1(double x) {
    check_arg(x, "bessel_k1");
    if (x == 0) return std::numeric_limits<double>::infinity();
    if (x > 2) {
        double k0, k1;
        bessel_k_cf(x, k0, k1);
        return k1;
    }
    // K1 = 1/x + log(x/2) I1 - (x/4) sum (psi(k+1) + psi(k+2)) (x^2/4)^k / (k! (k+1)!)
    const double y = x * x / 4;
    double term = 1, psi1 = -kEuler, psi2 = 1 - kEuler;
    double sum = psi1 + psi2;
    for (int k = 1; k < 200; ++k) {
        term *= y / (static_cast<double>(k) * (k + 1));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1);
        const double t = term * (psi1 + psi2);
        sum += t;
        if (std::abs(t) < kEps * std::abs(sum)) break;
    }
    return 1 / x + std::log(x / 2) * bessel_i1(x) - x / 4 * sum;
}

TodaOperator make_toda(const CartanDatum& datum, double z, double fd_step) {
    if (!(z > 0)) throw DomainError("z must be positive");
    if (!(fd_step > 0)) throw DomainError("fd_step must be positive");
    return TodaOperator{datum, invariant_form_h(datum), z, fd_step};
}

HamiltonianTerms apply_hamiltonian_terms(const HFunction& S, const Eigen::VectorXd& h0, const TodaOperator& op) {
    HamiltonianTerms t;
    const int n = op.datum.rank;
    t.S0 = S(h0);
    const double d = op.fd_step;
    Complex lap = 0;
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd dir = op.form.basis.col(k);
        lap += (S(h0 + d * dir) - 2.0 * t.S0 + S(h0 - d * dir)) / (d * d);
    }
    t.half_laplacian = 0.5 * lap;
    const Eigen::VectorXd ah = simple_root_values(op.datum, h0);
    t.potential = ah.array().exp().sum() / (op.z * op.z) * t.S0;
    t.value = t.half_laplacian - t.potential;
    return t;
}

Complex apply_hamiltonian(const HFunction& S, const Eigen::VectorXd& h0, const TodaOperator& op) {
    return apply_hamiltonian_terms(S, h0, op).value;
}

ResidualReport verify(const ChevalleyGroup& G, const CycleSpec& spec, const Eigen::VectorXd& h0, double z,
                      const VerifyOptions& opts) {
    ResidualReport r;
    const auto& datum = G.datum();
    r.type = datum.name();
    r.rank = datum.rank;
    r.h = h0;
    r.z = z;
    r.fd_step = opts.fd_step;
    r.tolerance = opts.tolerance;

    // Resolve once so every stencil point uses the same grid.
    const CVector hc = h0.cast<Complex>();
    auto q = s_gamma(G, spec, hc, z, opts.quad);
    r.cycle = q.resolved;
    r.word = q.resolved.word;
    r.nodes = q.node_count;
    r.S = q.value;
    r.refinement_delta = q.refinement_delta;
    const int n = spec.kind == CycleKind::Torus ? spec.nodes_per_dim : spec.positive_nodes;

    const TodaOperator op = make_toda(datum, z, opts.fd_step);
    r.h_orthonormal = op.form.basis.fullPivLu().solve(h0);
    auto S = [&](const Eigen::VectorXd& h) {
        if ((h - h0).norm() == 0) return r.S;
        return integrate_once(G, q.resolved, h.cast<Complex>(), z, n, opts.quad.threads);
    };
    const auto full = apply_hamiltonian_terms(S, h0, op);
    TodaOperator half = op;
    half.fd_step = opts.fd_step / 2;
    const auto halfstep = apply_hamiltonian_terms(S, h0, half);

    r.half_laplacian = (4.0 * halfstep.half_laplacian - full.half_laplacian) / 3.0;
    r.potential = full.potential;
    const Complex HS = r.half_laplacian - r.potential;
    const double scale = std::max(std::abs(r.S) / (z * z), std::abs(r.potential));
    r.residual_abs = std::abs(HS);
    r.residual_rel = r.residual_abs / scale;
    r.raw_residual_rel = std::abs(full.value) / scale;
    r.raw_residual_rel_half = std::abs(halfstep.value) / scale;
    r.richardson_ratio = r.raw_residual_rel / r.raw_residual_rel_half;
    r.pass = r.residual_rel <= r.tolerance;
    return r;
}

nlohmann::json to_json(const ResidualReport& r) {
    std::vector<double> h(r.h.data(), r.h.data() + r.h.size());
    std::vector<double> s(r.h_orthonormal.data(), r.h_orthonormal.data() + r.h_orthonormal.size());
    return {{"type", r.type},
            {"rank", r.rank},
            {"word", r.word.str()},
            {"h", h},
            {"h_orthonormal", s},
            {"z", r.z},
            {"cycle", to_json(r.cycle)},
            {"nodes", r.nodes},
            {"fd_step", r.fd_step},
            {"S", {{"re", r.S.real()}, {"im", r.S.imag()}}},
            {"refinement_delta", r.refinement_delta},
            {"half_laplacian", {{"re", r.half_laplacian.real()}, {"im", r.half_laplacian.imag()}}},
            {"potential", {{"re", r.potential.real()}, {"im", r.potential.imag()}}},
            {"residual_abs", r.residual_abs},
            {"residual_rel", r.residual_rel},
            {"raw_residual_rel", r.raw_residual_rel},
            {"raw_residual_rel_half_step", r.raw_residual_rel_half},
            {"richardson_ratio", r.richardson_ratio},
            {"tolerance", r.tolerance},
            {"verdict", r.pass ? "pass" : "fail"}};
}

double whittaker_condition_check(const ChevalleyGroup& G, const std::vector<CVector>& hs,
                                 const std::vector<GroupElement>& u_plus, const std::vector<GroupElement>& u_minus,
                                 double z, GroupFunction f) {
    if (!f) f = [&](const GroupElement& g) { return whittaker_w0(G, g, z); };
    double worst = 0;
    for (const auto& h : hs) {
        const GroupElement t = torus(G, h);
        const Complex ft = f(t);
        for (const auto& up : u_plus) {
            Complex chi_p = 0;
            for (int i = 0; i < G.rank(); ++i) chi_p += estar(G, up, i);
            for (const auto& um : u_minus) {
                Complex chi_m = 0;
                for (int i = 0; i < G.rank(); ++i) chi_m -= fstar(G, um, i);
                const Complex rhs = std::exp(chi_p / z) * ft * std::exp(chi_m / z);
                const Complex lhs = f(up * t * um);
                worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
            }
        }
    }
    return worst;
}

}  // namespace flagmirror
