#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace flagmirror {

using Rational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<int>;
using IntMatrix = std::vector<IntVector>;

enum class Series { A, B, C, D, G };

// Cartan data of a simple Lie algebra.
//
// Conventions (pinned by tests):
//   cartan[i][j] = <alpha_i^vee, alpha_j>, so column j holds the Dynkin labels
//   of the simple root alpha_j.
//   B2: node 0 long, node 1 short.  C2: node 0 short, node 1 long.
//   G2: node 0 short, node 1 long.
//   gram_hstar[i][j] = <alpha_i, alpha_j>, normalized so long roots have norm 2.
struct CartanDatum {
    Series series = Series::A;
    int rank = 0;
    IntMatrix cartan;
    IntVector d;  // integer symmetrizers: d_i a_ij = d_j a_ji
    std::vector<std::vector<Rational>> gram_hstar;

    std::string name() const;
    // Squared length of the simple root alpha_i (2 for long roots).
    Rational root_norm2(int i) const { return gram_hstar[i][i]; }
};

CartanDatum build_cartan(Series series, int rank);
// Parses "A1", "B2", "G2", ... (case-insensitive series letter).
CartanDatum parse_cartan(std::string_view name);

struct RootSystem {
    std::vector<IntVector> positive_roots;  // simple-root coordinates, sorted by height
    int N = 0;
    IntVector highest_root;

    int index_of(const IntVector& root) const;  // -1 when absent
};

RootSystem positive_roots(const CartanDatum& datum);

// <beta, alpha_i^vee> for beta given in simple-root coordinates.
int pair_with_coroot(const CartanDatum& datum, const IntVector& beta, int i);
// s_i(beta) in simple-root coordinates.
IntVector reflect(const CartanDatum& datum, const IntVector& beta, int i);

// A word in the simple reflections. Letters are 0-based node indices;
// text I/O uses 1-based labels.
struct WeylWord {
    std::vector<int> letters;

    std::size_t length() const { return letters.size(); }
    bool operator==(const WeylWord&) const = default;
    std::string str() const;  // "(1,2,1)"
};

// Parses "1,2,1" or "(1,2,1)" with 1-based labels.
WeylWord parse_word(std::string_view text);

// Length of the Weyl group element the word represents, computed by counting
// positive roots sent negative.
int weyl_length(const CartanDatum& datum, const WeylWord& word);
bool is_reduced(const CartanDatum& datum, const WeylWord& word);
// True when both words represent the same Weyl group element.
bool same_element(const CartanDatum& datum, const WeylWord& a, const WeylWord& b);

// Greedy reduced word for the longest element (smallest admissible letter first).
WeylWord reduced_word_w0(const CartanDatum& datum);

// Order of s_i s_j.
int braid_length(const CartanDatum& datum, int i, int j);

struct BraidMove {
    WeylWord word;
    int m = 0;  // length of the braid relation that was applied
};

// Applies the braid relation starting at `position` (0-based). Throws
// DomainError when the letters there do not form a braid pattern.
BraidMove braid_move(const CartanDatum& datum, const WeylWord& word, int position);
// All positions at which a braid move applies.
std::vector<int> braid_positions(const CartanDatum& datum, const WeylWord& word);

// The W-invariant form on h, written on the coroot basis, together with a
// change of basis to orthonormal coordinates s (h = basis * s).
struct InvariantForm {
    Eigen::MatrixXd gram_coroot;  // <alpha_i^vee, alpha_j^vee>
    Eigen::MatrixXd basis;        // columns: orthonormal vectors in coroot coordinates
    Eigen::MatrixXd root_rows;    // row i: alpha_i as a functional of s
};

InvariantForm invariant_form_h(const CartanDatum& datum);

// alpha_i(h) for h in coroot coordinates; works for real or complex h.
template <typename Vec>
Vec simple_root_values(const CartanDatum& datum, const Vec& h) {
    Vec out = Vec::Zero(datum.rank);
    for (int i = 0; i < datum.rank; ++i)
        for (int k = 0; k < datum.rank; ++k) out(i) += static_cast<double>(datum.cartan[k][i]) * h(k);
    return out;
}

// Coroot coordinates of the h with alpha_i(h) = values_i.
Eigen::VectorXd coroot_coords_from_root_values(const CartanDatum& datum,
                                               const Eigen::VectorXd& values);

}  // namespace flagmirror
