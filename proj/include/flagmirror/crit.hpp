#pragma once

#include "flagmirror/mirror.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>

namespace flagmirror {

// Positive: u = x_{i_1}(c_1) ... x_{i_N}(c_N) with c > 0 (F minimized).
// Negative: the chart u^{-1} = x_{i_1}(a_1) ... x_{i_N}(a_N) with a > 0 (F maximized).
// Complex: a point of the chart found by the unconstrained census.
enum class CritKind { Positive, Negative, Complex };

std::string to_string(CritKind k);

struct CriticalPoint {
    CritKind kind = CritKind::Positive;
    WeylWord word;
    CVector params;  // c or a
    Eigen::VectorXd h;
    double z = 1.0;
    Complex value;                        // F
    CVector e_terms, f_terms;             // per-node summands of F
    double gradient_norm = 0.0;           // |dF/dparams|
    bool hessian_definite = false;        // positive definite (Positive) or negative definite (Negative)
    Eigen::VectorXd hessian_eigenvalues;  // of the Hessian in log coordinates, real kinds only
    int iterations = 0;
};

struct CritOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-13;  // on the log-coordinate gradient, relative to max(1, |zF|)
    std::optional<CVector> start;       // parameters; default c_j = max(1, e^{alpha_{i_j}(h)/2})
};

// z F on the positive parameterization, via the chart of the reversed word.
Complex positive_zF(const ChevalleyGroup& G, const WeylWord& word, const CVector& c, const CVector& root_exp);

CriticalPoint find_positive_critical(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z,
                                     const WeylWord& word = {}, const CritOptions& opts = {});
CriticalPoint find_negative_critical(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z,
                                     const WeylWord& word = {}, const CritOptions& opts = {});

struct CensusOptions {
    int starts = 64;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double spread = 1.0;         // standard deviation of log|a| at the starts
    double cluster_tolerance = 1e-6;
    int max_iterations = 100;
};

// Critical points of F on the complex chart from random starts, duplicates merged.
std::vector<CriticalPoint> critical_census(const ChevalleyGroup& G, const Eigen::VectorXd& h, double z,
                                           const WeylWord& word = {}, const CensusOptions& opts = {});

// Type A: F + h* + sum_i (-q_i) E_i in the defining representation, with
// F = sum_i E_{i+1,i}. hstar holds the n+1 diagonal entries.
CMatrix kim_matrix(const CVector& q, const CVector& hstar);
// Non-leading coefficients of det(lambda - L), negated. In A1 with
// hstar = (x, -x) they are (0, x^2 - q).
CVector kim_invariants(const CVector& q, const CVector& hstar);

struct PetersonReport {
    CMatrix L;                    // u^{-1} F u in the defining representation
    double upper_max = 0.0;       // (i) largest entry above the superdiagonal
    CVector q_extracted;          // (ii) -L(i, i+1)
    Eigen::VectorXd q_expected;   // e^{alpha_i(h)}
    double q_error = 0.0;
    CVector invariants;           // (iii) at (q_expected, diag L)
    double invariant_max = 0.0;
    double tolerance = 1e-8;
    bool pass_upper = false, pass_q = false, pass_invariants = false;
    bool pass() const { return pass_upper && pass_q && pass_invariants; }
};

// Type A only; throws DomainError otherwise.
PetersonReport peterson_check(const ChevalleyGroup& G, const CriticalPoint& cp, double tolerance = 1e-8);

nlohmann::json to_json(const CriticalPoint& cp);
nlohmann::json to_json(const PetersonReport& r);

}  // namespace flagmirror
