#pragma once

#include "flagmirror/chevgroup.hpp"

namespace flagmirror {

// A point of the fiber Z_h in reduced-word chart coordinates:
// u^{-1} = x_{i_1}(a_1) ... x_{i_N}(a_N), g = u e^h ubar^{-1}.
struct MirrorPoint {
    WeylWord word;
    CVector a;
    CVector h;  // coroot coordinates
    double z = 1.0;
    GaussFactors gauss;  // of e^{-h} x(a) w0
};

// Validates a != 0 and that e^{-h} x(a) w0 lies in U- B+. Throws OffChartError.
MirrorPoint make_point(const ChevalleyGroup& G, const WeylWord& word, const CVector& a, const CVector& h,
                       double z);

struct SuperpotentialValue {
    Complex total;
    CVector e_part;  // e_i^*(u)
    CVector f_part;  // f_i^*(ubar)
};

SuperpotentialValue superpotential(const ChevalleyGroup& G, const MirrorPoint& p);

// u, ubar and g = u e^h ubar^{-1} as group elements.
struct FiberElements {
    GroupElement u, ubar, g;
};
FiberElements fiber_elements(const ChevalleyGroup& G, const MirrorPoint& p);
// Largest relative component of g v+_i off the line of v-_i (g B+ = B-),
// measured after moving u to the other side; zero on the fiber.
double fiber_defect(const ChevalleyGroup& G, const MirrorPoint& p);

// h . (h', g) = (h + h', g e^h): chart coordinates are unchanged.
MirrorPoint translate(const ChevalleyGroup& G, const MirrorPoint& p, const CVector& h);

// Matrix-free evaluation of the superpotential on one chart; used by the
// quadrature and the critical-point solvers.
class ChartEvaluator {
public:
    ChartEvaluator(const ChevalleyGroup& G, WeylWord word);

    const ChevalleyGroup& group() const { return *G_; }
    const WeylWord& word() const { return word_; }
    int N() const { return static_cast<int>(word_.length()); }

    // <x(a) v-_i, f_i v+_i> / <x(a) v-_i, v+_i> for every i, plus the
    // denominators. Returns false when a denominator vanishes.
    bool ratios(const CVector& a, CVector& ratio, CVector& minors) const;
    // z F = -sum a_j - sum_i e^{alpha_i(h)} ratio_i. Throws OffChartError off the chart.
    Complex zF(const CVector& a, const CVector& root_exp) const;
    // z F and its holomorphic gradient in a. Throws OffChartError off the chart.
    Complex zF_gradient(const CVector& a, const CVector& root_exp, CVector& grad) const;
    // e^{alpha_i(h)}
    CVector root_exponentials(const CVector& h) const;

private:
    const ChevalleyGroup* G_;
    WeylWord word_;
    std::vector<std::vector<Eigen::MatrixXd>> Et_;  // transposed E_j per module
};

// Generalized minor product <u v-_rho, v+_rho>.
Complex gklo_weight(const ChevalleyGroup& G, const GroupElement& u);

enum class TransformKind { LeftY, LeftX, Torus };

struct ChartTransform {
    TransformKind kind = TransformKind::Torus;
    int node = 0;
    Complex s = 0.0;
    CVector h;  // torus kind
};

struct JacobianComparison {
    Complex numeric;    // det(da'/da) * prod a_j / a'_j (times the GKLO weight ratio when asked)
    Complex predicted;  // closed form
    CVector image;      // a'
};

// Pullback factor of omega (or of omega_GKLO) under left translation of the
// flag u B- with u = x_{i_1}(a_1) ... x_{i_N}(a_N).
JacobianComparison chart_jacobian_ratio(const ChevalleyGroup& G, const WeylWord& word, const CVector& a,
                                        const ChartTransform& t, bool gklo = false, double fd_step = 1e-5);

// Whittaker functions on Z_0 (h = 0), chi(e_i) = chibar(f_i) = 1/z.
Complex psi_plus(const ChevalleyGroup& G, const MirrorPoint& p);
Complex psi_minus(const ChevalleyGroup& G, const MirrorPoint& p);

enum class WhittakerSide { Plus, Minus };

// |d/ds psi(exp(-sX) u^{-1}) - psi/z| / |psi| for X = e_i (Plus) or f_i (Minus),
// derivative by a five-point stencil.
double whittaker_vector_check(const ChevalleyGroup& G, WhittakerSide side, int i, const MirrorPoint& p,
                              double fd_step = 1e-3);

// W_0(u+ t u-) = exp(chi+(u+) + chi-(u-)), chi+(e_i) = 1/z, chi-(f_i) = -1/z.
Complex whittaker_w0(const ChevalleyGroup& G, const GroupElement& g, double z);

}  // namespace flagmirror
