#include "flagmirror/rootsys.hpp"

#include "flagmirror/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace flagmirror {

std::string CartanDatum::name() const {
    static const char letters[] = {'A', 'B', 'C', 'D', 'G'};
    return std::string(1, letters[static_cast<int>(series)]) + std::to_string(rank);
}

CartanDatum build_cartan(Series series, int rank) {
    CartanDatum c;
    c.series = series;
    c.rank = rank;
    auto fail = [&] {
        throw DomainError("unsupported Cartan type " + std::string(1, "ABCDG"[static_cast<int>(series)]) +
                          std::to_string(rank) + " (supported: A1, A2, A3, B2, C2, G2)");
    };
    if (rank < 1) fail();
    c.cartan.assign(rank, IntVector(rank, 0));
    for (int i = 0; i < rank; ++i) c.cartan[i][i] = 2;
    switch (series) {
        case Series::A:
            if (rank > 3) fail();
            for (int i = 0; i + 1 < rank; ++i) c.cartan[i][i + 1] = c.cartan[i + 1][i] = -1;
            c.d.assign(rank, 1);
            break;
        case Series::B:
            if (rank != 2) fail();
            c.cartan = {{2, -1}, {-2, 2}};
            c.d = {2, 1};
            break;
        case Series::C:
            if (rank != 2) fail();
            c.cartan = {{2, -2}, {-1, 2}};
            c.d = {1, 2};
            break;
        case Series::G:
            if (rank != 2) fail();
            c.cartan = {{2, -3}, {-1, 2}};
            c.d = {1, 3};
            break;
        case Series::D:
            fail();
    }
    const int dmax = *std::max_element(c.d.begin(), c.d.end());
    c.gram_hstar.assign(rank, std::vector<Rational>(rank));
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            c.gram_hstar[i][j] = Rational(2 * c.d[i] * c.cartan[i][j], 2 * dmax);
    return c;
}

CartanDatum parse_cartan(std::string_view name) {
    if (name.size() < 2) throw DomainError("bad Cartan type '" + std::string(name) + "'");
    Series s;
    switch (std::toupper(static_cast<unsigned char>(name[0]))) {
        case 'A': s = Series::A; break;
        case 'B': s = Series::B; break;
        case 'C': s = Series::C; break;
        case 'D': s = Series::D; break;
        case 'G': s = Series::G; break;
        default: throw DomainError("bad Cartan type '" + std::string(name) + "'");
    }
    int rank = 0;
    for (char ch : name.substr(1)) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw DomainError("bad Cartan type '" + std::string(name) + "'");
        rank = rank * 10 + (ch - '0');
    }
    return build_cartan(s, rank);
}

int pair_with_coroot(const CartanDatum& datum, const IntVector& beta, int i) {
    int v = 0;
    for (int j = 0; j < datum.rank; ++j) v += beta[j] * datum.cartan[i][j];
    return v;
}

IntVector reflect(const CartanDatum& datum, const IntVector& beta, int i) {
    IntVector out = beta;
    out[i] -= pair_with_coroot(datum, beta, i);
    return out;
}

int RootSystem::index_of(const IntVector& root) const {
    auto it = std::find(positive_roots.begin(), positive_roots.end(), root);
    return it == positive_roots.end() ? -1 : static_cast<int>(it - positive_roots.begin());
}

RootSystem positive_roots(const CartanDatum& datum) {
    const int n = datum.rank;
    std::set<IntVector> roots;
    std::vector<IntVector> frontier;
    for (int i = 0; i < n; ++i) {
        IntVector e(n, 0);
        e[i] = 1;
        roots.insert(e);
        frontier.push_back(e);
    }
    // Grow by alpha-strings: beta + alpha_i is a root iff p > 0 where
    // p - q = -<beta, alpha_i^vee> and q is the downward string length.
    while (!frontier.empty()) {
        std::vector<IntVector> next;
        for (const auto& beta : frontier) {
            for (int i = 0; i < n; ++i) {
                int q = 0;
                IntVector down = beta;
                while (true) {
                    down[i] -= 1;
                    if (!roots.count(down)) break;
                    ++q;
                }
                const int p = q - pair_with_coroot(datum, beta, i);
                if (p > 0) {
                    IntVector up = beta;
                    up[i] += 1;
                    if (roots.insert(up).second) next.push_back(up);
                }
            }
        }
        frontier = std::move(next);
    }
    RootSystem rs;
    rs.positive_roots.assign(roots.begin(), roots.end());
    auto height = [](const IntVector& v) { return std::accumulate(v.begin(), v.end(), 0); };
    std::stable_sort(rs.positive_roots.begin(), rs.positive_roots.end(),
                     [&](const IntVector& a, const IntVector& b) { return height(a) < height(b); });
    rs.N = static_cast<int>(rs.positive_roots.size());
    rs.highest_root = rs.positive_roots.back();
    return rs;
}

std::string WeylWord::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < letters.size(); ++k) os << (k ? "," : "") << letters[k] + 1;
    os << ')';
    return os.str();
}

WeylWord parse_word(std::string_view text) {
    WeylWord w;
    int cur = -1;
    for (char ch : text) {
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            cur = (cur < 0 ? 0 : cur * 10) + (ch - '0');
        } else if (ch == ',' || ch == ' ' || ch == '(' || ch == ')') {
            if (cur >= 0) w.letters.push_back(cur - 1);
            cur = -1;
        } else {
            throw DomainError("bad word '" + std::string(text) + "'");
        }
    }
    if (cur >= 0) w.letters.push_back(cur - 1);
    for (int l : w.letters)
        if (l < 0) throw DomainError("word labels are 1-based: '" + std::string(text) + "'");
    return w;
}

namespace {

void check_letters(const CartanDatum& datum, const WeylWord& word) {
    for (int l : word.letters)
        if (l < 0 || l >= datum.rank)
            throw DomainError("letter " + std::to_string(l + 1) + " out of range for " + datum.name());
}

// Image of every positive root under the element the word represents.
std::vector<IntVector> act_on_roots(const CartanDatum& datum, const RootSystem& rs, const WeylWord& word) {
    std::vector<IntVector> images = rs.positive_roots;
    for (auto& beta : images)
        for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) beta = reflect(datum, beta, *it);
    return images;
}

bool is_negative(const IntVector& v) {
    return std::any_of(v.begin(), v.end(), [](int c) { return c < 0; });
}

}  // namespace

int weyl_length(const CartanDatum& datum, const WeylWord& word) {
    check_letters(datum, word);
    const RootSystem rs = positive_roots(datum);
    // l(w) = #{beta > 0 : w^{-1} beta < 0} = #{beta > 0 : w beta < 0}
    const auto images = act_on_roots(datum, rs, word);
    return static_cast<int>(std::count_if(images.begin(), images.end(), is_negative));
}

bool is_reduced(const CartanDatum& datum, const WeylWord& word) {
    return weyl_length(datum, word) == static_cast<int>(word.length());
}

bool same_element(const CartanDatum& datum, const WeylWord& a, const WeylWord& b) {
    check_letters(datum, a);
    check_letters(datum, b);
    const RootSystem rs = positive_roots(datum);
    // Compare actions on the simple roots, which determine the element.
    for (int i = 0; i < datum.rank; ++i) {
        IntVector e(datum.rank, 0);
        e[i] = 1;
        IntVector va = e, vb = e;
        for (auto it = a.letters.rbegin(); it != a.letters.rend(); ++it) va = reflect(datum, va, *it);
        for (auto it = b.letters.rbegin(); it != b.letters.rend(); ++it) vb = reflect(datum, vb, *it);
        if (va != vb) return false;
    }
    return true;
}

WeylWord reduced_word_w0(const CartanDatum& datum) {
    const RootSystem rs = positive_roots(datum);
    WeylWord w;
    while (true) {
        bool grew = false;
        for (int i = 0; i < datum.rank; ++i) {
            // l(w s_i) > l(w) iff w(alpha_i) > 0
            IntVector e(datum.rank, 0);
            e[i] = 1;
            for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) e = reflect(datum, e, *it);
            if (!is_negative(e)) {
                w.letters.push_back(i);
                grew = true;
                break;
            }
        }
        if (!grew) break;
    }
    return w;
}

int braid_length(const CartanDatum& datum, int i, int j) {
    if (i == j) return 1;
    switch (datum.cartan[i][j] * datum.cartan[j][i]) {
        case 0: return 2;
        case 1: return 3;
        case 2: return 4;
        case 3: return 6;
        default: throw DomainError("not a finite-type Cartan matrix");
    }
}

namespace {

bool braid_at(const CartanDatum& datum, const WeylWord& word, int pos, int& m) {
    const int len = static_cast<int>(word.length());
    if (pos < 0 || pos + 1 >= len) return false;
    const int i = word.letters[pos], j = word.letters[pos + 1];
    if (i == j) return false;
    m = braid_length(datum, i, j);
    if (pos + m > len) return false;
    for (int k = 0; k < m; ++k)
        if (word.letters[pos + k] != (k % 2 == 0 ? i : j)) return false;
    return true;
}

}  // namespace

BraidMove braid_move(const CartanDatum& datum, const WeylWord& word, int position) {
    check_letters(datum, word);
    int m = 0;
    if (!braid_at(datum, word, position, m))
        throw DomainError("no braid relation applies to " + word.str() + " at position " +
                          std::to_string(position + 1));
    BraidMove out{word, m};
    const int i = word.letters[position], j = word.letters[position + 1];
    for (int k = 0; k < m; ++k) out.word.letters[position + k] = (k % 2 == 0 ? j : i);
    return out;
}

std::vector<int> braid_positions(const CartanDatum& datum, const WeylWord& word) {
    std::vector<int> out;
    int m = 0;
    for (int p = 0; p + 1 < static_cast<int>(word.length()); ++p)
        if (braid_at(datum, word, p, m)) out.push_back(p);
    return out;
}

InvariantForm invariant_form_h(const CartanDatum& datum) {
    const int n = datum.rank;
    InvariantForm f;
    f.gram_coroot.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // alpha^vee <-> 2 alpha / <alpha, alpha> under the form
            const Rational g = 4 * datum.gram_hstar[i][j] / (datum.gram_hstar[i][i] * datum.gram_hstar[j][j]);
            f.gram_coroot(i, j) = static_cast<double>(g);
        }
    Eigen::LLT<Eigen::MatrixXd> llt(f.gram_coroot);
    const Eigen::MatrixXd L = llt.matrixL();
    f.basis = L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) A(k, i) = datum.cartan[k][i];
    f.root_rows = A.transpose() * f.basis;
    return f;
}

Eigen::VectorXd coroot_coords_from_root_values(const CartanDatum& datum, const Eigen::VectorXd& values) {
    const int n = datum.rank;
    Eigen::MatrixXd At(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) At(i, k) = datum.cartan[k][i];
    return At.fullPivLu().solve(values);
}

}  // namespace flagmirror
