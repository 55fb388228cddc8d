#pragma once

#include "flagmirror/mirror.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <optional>
#include <utility>

namespace flagmirror {

enum class CycleKind { Torus, Positive };

std::string to_string(CycleKind k);
CycleKind parse_cycle_kind(std::string_view s);

struct CycleSpec {
    CycleKind kind = CycleKind::Torus;
    WeylWord word;               // empty: the pinned reduced word of w0
    std::vector<double> radii;   // torus kind; empty means all 1 (or the saddle radii below)
    bool saddle_radii = false;   // torus kind with empty radii: |a| at the real critical point of F
    int nodes_per_dim = 32;      // torus kind
    int positive_nodes = 200;    // positive kind, per dimension
    std::vector<std::pair<double, double>> log_window;  // positive kind; empty: from decay_scan
    double window_margin = 40.0;  // decay below the ray maximum that bounds the window, in units of Re F
    int orientation = 1;
    int reference_nodes = 0;      // node count for refinement_delta; 0 means half
    bool bare_form = false;       // integrate omega alone (F replaced by 0)
};

struct QuadratureResult {
    Complex value;
    std::int64_t node_count = 0;
    Complex reference_value;
    int reference_nodes = 0;
    double refinement_delta = 0.0;  // |S(n) - S(n_ref)| / |S(n)|
    std::int64_t failures = 0;
    CycleSpec resolved;             // word, radii and window actually used
};

struct QuadOptions {
    unsigned threads = 0;
    bool refine = true;
};

// Caps the number of positive roots a product rule is allowed to cover.
inline constexpr int kMaxQuadratureDimension = 6;

// Fills in the default word, radii and (positive kind) log window.
CycleSpec resolve_cycle(const ChevalleyGroup& G, const CycleSpec& spec, const CVector& h, double z);

// S = integral of e^F omega over the cycle, at one node count. Throws
// OffChartError naming the first failing node when any node leaves the chart.
Complex integrate_once(const ChevalleyGroup& G, const CycleSpec& resolved, const CVector& h, double z, int nodes,
                       unsigned threads);

QuadratureResult s_gamma(const ChevalleyGroup& G, const CycleSpec& spec, const CVector& h, double z,
                         const QuadOptions& opts = {});

struct RayReport {
    int coordinate = 0;
    int direction = 1;         // +1: a_j -> infinity, -1: a_j -> 0
    bool diverges = false;     // Re F monotone to below max - margin
    double knee = 0.0;         // offset in log a_j where Re F crosses max - margin
    double max_summand = 0.0;  // largest e_part or f_part term along the ray
    double final_value = 0.0;  // Re F at the end of the scan
};

struct DecayReport {
    std::vector<RayReport> rays;
    CVector base;  // base point of the rays
    std::vector<std::pair<double, double>> window;
    bool all_diverge = false;
};

// Samples Re F along coordinate rays a_j -> 0+ and a_j -> infinity from a base
// point on the positive chart (h real).
DecayReport decay_scan(const ChevalleyGroup& G, const WeylWord& word, const Eigen::VectorXd& h, double z,
                       double margin = 40.0, double range = 60.0, double step = 0.25,
                       std::optional<CVector> base = std::nullopt);

struct BraidComparison {
    Complex s1, s2;
    int predicted_sign = 1;
    double relative_difference = 0.0;  // |S1 - sign S2| / |S1|
    int braid_m = 0;
};

// S over the torus cycle through two reduced words of w0.
BraidComparison braid_compare(const ChevalleyGroup& G, const CVector& h, double z, const WeylWord& w1,
                              const WeylWord& w2, const CycleSpec& base = {}, const QuadOptions& opts = {});

nlohmann::json to_json(const QuadratureResult& r);
nlohmann::json to_json(const CycleSpec& s);
nlohmann::json to_json(const DecayReport& r);

// Plot-ready integrand samples on the cycle grid, at most max_rows lines.
void write_integrand_csv(std::ostream& os, const ChevalleyGroup& G, const CycleSpec& resolved, const CVector& h,
                         double z, int nodes, std::int64_t max_rows = 100000);

}  // namespace flagmirror
