#pragma once

#include "flagmirror/rootsys.hpp"

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <complex>
#include <memory>
#include <vector>

namespace flagmirror {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Dense exact matrix, small sizes only.
struct RationalMatrix {
    int rows = 0, cols = 0;
    std::vector<Rational> data;

    RationalMatrix() = default;
    RationalMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}
    Rational& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const Rational& operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    RationalMatrix operator*(const RationalMatrix& o) const;
    RationalMatrix operator-(const RationalMatrix& o) const;
    bool is_zero() const;
    Eigen::MatrixXd to_double() const;
};

// Rank by exact elimination.
int rational_rank(RationalMatrix m);

// The fundamental representation V(omega_i) in a weight basis.
//
// Basis vectors are F-monomials applied to the highest weight vector, taken in
// breadth-first order and kept when independent modulo the radical of the
// contravariant form. Index 0 is v+; index 1 is f_i v+.
struct WeightModule {
    int node = 0;
    int dim = 0;
    std::vector<IntVector> weights;  // Dynkin labels <mu, alpha_j^vee>
    std::vector<int> level;          // depth below the highest weight
    std::vector<RationalMatrix> E, F, H;
    RationalMatrix contravariant;  // <u, v> with <f_j u, v> = <u, e_j v>, <v+, v+> = 1

    // Frozen floating-point copies used for group arithmetic.
    std::vector<Eigen::MatrixXd> Ed, Fd;
    std::vector<int> nilpotency;  // smallest k with E_i^k = 0 (same for F_i)

    int highest_index() const { return 0; }
    int fi_index() const { return 1; }
    int lowest_index() const { return dim - 1; }
};

struct BuildOptions {
    int dimension_cap = 64;
};

WeightModule build_fundamental(const CartanDatum& datum, int node, const BuildOptions& opts = {});

// Debug dump: weights, levels and exact action matrices.
nlohmann::json module_to_json(const WeightModule& m);

// A point of G stored as its matrix in every fundamental representation.
struct GroupElement {
    std::vector<CMatrix> blocks;

    GroupElement operator*(const GroupElement& o) const;
    GroupElement inverse() const;
    // Max over blocks of the Frobenius distance, relative to the larger norm.
    double distance(const GroupElement& o) const;
    double norm() const;
};
using RepElement = GroupElement;

// The matrix model: all fundamental modules of one Cartan type plus the data
// every group-level algorithm needs (w0, its reduced word, v- vectors).
class ChevalleyGroup {
public:
    explicit ChevalleyGroup(CartanDatum datum, const BuildOptions& opts = {});

    const CartanDatum& datum() const { return datum_; }
    const RootSystem& roots() const { return roots_; }
    int rank() const { return datum_.rank; }
    int N() const { return roots_.N; }
    const WeightModule& module(int i) const { return modules_[i]; }
    const std::vector<WeightModule>& modules() const { return modules_; }
    const WeylWord& w0_word() const { return w0_word_; }
    const GroupElement& w0() const { return w0_; }
    // v-_{omega_i} = w0-dot v+_{omega_i}
    const CVector& v_minus(int i) const { return v_minus_[i]; }
    CVector v_plus(int i) const;

    GroupElement identity() const;

private:
    CartanDatum datum_;
    RootSystem roots_;
    std::vector<WeightModule> modules_;
    WeylWord w0_word_;
    GroupElement w0_;
    std::vector<CVector> v_minus_;
};

using GroupPtr = std::shared_ptr<const ChevalleyGroup>;
GroupPtr make_group(std::string_view type_name);

enum class Sign { Plus, Minus };

// x_i(t) = exp(t e_i) for Sign::Plus, y_i(t) = exp(t f_i) for Sign::Minus.
GroupElement one_param(const ChevalleyGroup& G, Sign sign, int i, Complex t);
inline GroupElement x_elem(const ChevalleyGroup& G, int i, Complex t) { return one_param(G, Sign::Plus, i, t); }
inline GroupElement y_elem(const ChevalleyGroup& G, int i, Complex t) { return one_param(G, Sign::Minus, i, t); }

// x_{i_1}(a_1) ... x_{i_N}(a_N)
GroupElement x_word(const ChevalleyGroup& G, const WeylWord& word, const CVector& a);

// e^h for h in coroot coordinates.
GroupElement torus(const ChevalleyGroup& G, const CVector& h);
// t^{alpha_i^vee}
GroupElement coroot_power(const ChevalleyGroup& G, int i, Complex t);

// s_i-dot = x_i(-1) y_i(1) x_i(-1), multiplied along the word. Throws on a
// non-reduced word.
GroupElement weyl_rep(const ChevalleyGroup& G, const WeylWord& word);

// exp(t X) v for nilpotent X applied in place, without forming exp(t X).
void apply_exp_nilpotent(const Eigen::MatrixXd& X, int nilpotency, Complex t, CVector& v);

// Coefficient of basis vector b in v.
inline Complex coeff(const CVector& v, int b) { return v(b); }
// <v, w-dot v+>: the coefficient of v along an extremal weight vector.
Complex extremal_coeff(const CVector& v, const CVector& extremal);

// <g w_right-dot v+_{omega_i}, w_left-dot v+_{omega_i}>
Complex minor(const ChevalleyGroup& G, const GroupElement& g, int i, const WeylWord& w_left,
              const WeylWord& w_right);
// <g v-_{omega_i}, v+_{omega_i}>
Complex fundamental_lowest_minor(const ChevalleyGroup& G, const GroupElement& g, int i);
// <g v-_rho, v+_rho> as the product of the fundamental ones.
Complex rho_minor(const ChevalleyGroup& G, const GroupElement& g);

}  // namespace flagmirror
