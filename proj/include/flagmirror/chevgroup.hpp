#pragma once

#include "flagmirror/reps.hpp"

#include <optional>

namespace flagmirror {

// Relative size below which a minor counts as zero.
inline constexpr double kMinorTolerance = 1e-12;

// e_i^*(u) = <u f_i v+, v+> in V(omega_i). Throws DomainError when u is not
// unipotent upper triangular.
Complex estar(const ChevalleyGroup& G, const GroupElement& u, int i);
// f_i^*(ubar) = <ubar v+, f_i v+> in V(omega_i), for ubar in U-.
Complex fstar(const ChevalleyGroup& G, const GroupElement& ubar, int i);

// Sum of e_i^* over the word coordinates, no matrices involved.
CVector estar_from_chart(const ChevalleyGroup& G, const WeylWord& word, const CVector& a);

struct GaussFactors {
    std::vector<Complex> fstar;             // f_i^*(ybar)
    std::vector<Complex> principal_minors;  // <M v+_i, v+_i>
    bool success = false;
    int failed_node = -1;
    double failed_magnitude = 0.0;
};

// M = ybar b with ybar in U-, b in B+. Only the first column of each block
// enters, so the vector form is the cheap path.
GaussFactors gauss_minus_plus(const ChevalleyGroup& G, const GroupElement& M);
GaussFactors gauss_minus_plus(const ChevalleyGroup& G, const std::vector<CVector>& m_vplus);

// Full factors. Block LU without pivoting in the level-ordered weight basis;
// throws OffChartError when a pivot vanishes.
struct LowerUpper {
    GroupElement lower;  // in U-
    GroupElement upper;  // in B+
};
LowerUpper recover_lower_upper(const ChevalleyGroup& G, const GroupElement& M);

// g = u b with u in U+, b in B-.
struct UpperLower {
    GroupElement upper;  // in U+
    GroupElement lower;  // in B-
};
UpperLower uplus_bminus(const ChevalleyGroup& G, const GroupElement& g);

// g = u+ t u- with unipotent u+, u- and diagonal t.
struct UpperTorusLower {
    GroupElement upper, torus, lower;
};
UpperTorusLower uplus_torus_uminus(const ChevalleyGroup& G, const GroupElement& g);

// For g = u+ t u-, the characters e_j^*(u+) and f_j^*(u-) read off from
// g v-_i and the v- row of g in V(omega_i), where j = i^* is the one node with
// e_j v-_i != 0. Only matrix-vector products with g are needed.
struct BigCellCharacters {
    CVector e;  // e_j^*(u+)
    CVector f;  // f_j^*(u-)
};
BigCellCharacters big_cell_characters(const ChevalleyGroup& G, const GroupElement& g);

// Distance of g from U+ (resp. U-): largest entry that breaks unitriangularity.
double uplus_defect(const GroupElement& g);
double uminus_defect(const GroupElement& g);

struct FactorizeOptions {
    std::optional<CVector> hint;
    int max_iterations = 100;
    double tolerance = 1e-13;
    double stratum_tolerance = 1e-9;  // |a_j| below this (relative) is off the open stratum
};

// Coordinates a with u = x_{i_1}(a_1) ... x_{i_N}(a_N). Gauss-Newton on the
// matrix entries of x(a) - u, seeded by the hint or by a homotopy from x(1,...,1).
CVector factorize_unipotent(const ChevalleyGroup& G, const GroupElement& u, const WeylWord& word,
                            const FactorizeOptions& opts = {});

// u y_i(s) = b_(s) u_(s) with b_(s) in B- and u_(s) in U+.
struct LemmaYi {
    GroupElement b, u;
    Complex factor;  // 1 + s e_i^*(u)
};
LemmaYi lemma_yi(const ChevalleyGroup& G, const GroupElement& u, int i, Complex s);

struct PositivityResult {
    bool positive = false;
    CVector coordinates;
};
PositivityResult is_totally_positive(const ChevalleyGroup& G, const GroupElement& u, const WeylWord& word,
                                     const FactorizeOptions& opts = {});

// Matrix logarithm and exponential of unipotent elements (finite series).
GroupElement unipotent_log(const GroupElement& u);
GroupElement nilpotent_exp(const GroupElement& X);

}  // namespace flagmirror
