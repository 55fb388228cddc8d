#pragma once

#include "flagmirror/integrate.hpp"

#include <functional>

namespace flagmirror {

// Modified Bessel functions of orders 0 and 1 for x >= 0. Power series for I,
// series (x <= 2) or Steed's continued fraction (x > 2) for K. Arguments beyond
// the double range of I0 throw DomainError.
double bessel_i0(double x);
double bessel_i1(double x);
double bessel_k0(double x);
double bessel_k1(double x);

// 1/2 Laplacian - (1/z^2) sum e^{alpha_i} on functions of h, with the
// Laplacian in orthonormal coordinates of the invariant form.
struct TodaOperator {
    CartanDatum datum;
    InvariantForm form;
    double z = 1.0;
    double fd_step = 1e-2;
};

TodaOperator make_toda(const CartanDatum& datum, double z, double fd_step = 1e-2);

using HFunction = std::function<Complex(const Eigen::VectorXd& h)>;  // h in coroot coordinates

struct HamiltonianTerms {
    Complex S0;
    Complex half_laplacian;
    Complex potential;  // (1/z^2) sum e^{alpha_i(h0)} S(h0)
    Complex value;      // half_laplacian - potential
};

// Central second differences with step op.fd_step along each orthonormal direction.
HamiltonianTerms apply_hamiltonian_terms(const HFunction& S, const Eigen::VectorXd& h0, const TodaOperator& op);
Complex apply_hamiltonian(const HFunction& S, const Eigen::VectorXd& h0, const TodaOperator& op);

struct ResidualReport {
    std::string type;
    int rank = 0;
    WeylWord word;
    Eigen::VectorXd h;              // coroot coordinates
    Eigen::VectorXd h_orthonormal;  // s with h = basis s
    double z = 1.0;
    CycleSpec cycle;
    std::int64_t nodes = 0;
    double fd_step = 1e-2;
    Complex S;
    double refinement_delta = 0.0;
    Complex half_laplacian;  // Richardson-extrapolated from fd_step and fd_step / 2
    Complex potential;
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    double raw_residual_rel = 0.0;       // plain central differences at fd_step
    double raw_residual_rel_half = 0.0;  // at fd_step / 2
    double richardson_ratio = 0.0;       // raw / raw_half, about 4 when the stencil error dominates
    double tolerance = 1e-6;
    bool pass = false;
};

struct VerifyOptions {
    double fd_step = 1e-2;
    double tolerance = 1e-6;
    QuadOptions quad;
};

// Computes S over the cycle on the stencil around h0 and the Toda residual.
// relative residual = |H S| / max(|S| / z^2, |potential term|).
ResidualReport verify(const ChevalleyGroup& G, const CycleSpec& spec, const Eigen::VectorXd& h0, double z,
                      const VerifyOptions& opts = {});

nlohmann::json to_json(const ResidualReport& r);

using GroupFunction = std::function<Complex(const GroupElement& g)>;

// max |f(u+ e^h u-) - e^{chi+(u+)} f(e^h) e^{chi-(u-)}| / |rhs| over all
// combinations of samples, chi+(e_i) = 1/z, chi-(f_i) = -1/z. f defaults to W_0.
double whittaker_condition_check(const ChevalleyGroup& G, const std::vector<CVector>& hs,
                                 const std::vector<GroupElement>& u_plus, const std::vector<GroupElement>& u_minus,
                                 double z, GroupFunction f = nullptr);

}  // namespace flagmirror
