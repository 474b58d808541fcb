#pragma once

#include <string>
#include <vector>

#include "cpb/steenrod.hpp"
#include "cpb/stunted.hpp"

namespace cpb {

struct ResGenerator {
    int t;           // internal degree
    std::string id;  // e_{s,t}, with ASCII primes distinguishing repeats
};

// Element of a free module over the algebra: one coefficient per generator
// of the stage it lives in.
using FreeElement = std::vector<SteenrodElement>;

struct ResolutionStage {
    int s = 0;
    std::vector<ResGenerator> generators;
    // Differential values, one per generator. Stage 0 maps into the module
    // (d_aug); stages s >= 1 map into the free module of stage s-1 (d_free).
    std::vector<FreeElement> d_free;
    std::vector<ModuleVec> d_aug;
};

struct Resolution {
    explicit Resolution(ModulePresentation m) : module(std::move(m)) {}

    ModulePresentation module;
    int t_max = 0;
    int s_max = 0;
    int degree_cap = kDefaultDegreeCap;
    std::vector<ResolutionStage> stages;  // indexed by filtration, size s_max+1
};

// Minimal free resolution of m over the Steenrod algebra in the window
// t <= t_max, s <= s_max. Stage-s generators are introduced lowest degree
// first, exactly where the kernel of the previous differential is not yet
// covered. The result is verified exact in the window before returning.
Resolution resolve_minimal(const ModulePresentation& m, int t_max, int s_max,
                           int degree_cap = kDefaultDegreeCap);

// Recheck d(d(x)) = 0 and image = kernel at every bidegree of the window,
// and minimality of every differential. Raises contract_violation on any
// failure; never returns a bad resolution silently.
void verify_resolution(const Resolution& res);

struct ChartDot {
    int s;
    int t;
    std::string id;
    bool operator==(const ChartDot&) const = default;
};

// p = 2: h0/h1/h2 detect Sq1/Sq2/Sq4; p = 3: a0/h0 detect b/P1.
enum class LineLabel { h0, h1, h2, a0 };

std::string line_label_name(LineLabel label);
// Internal-degree jump of the line: 1, 2, 4 for h0, h1, h2 at p = 2;
// 1, 4 for a0, h0 at p = 3.
int line_label_degree(int prime, LineLabel label);

struct ChartLine {
    int from;  // dot index at filtration s+1 (source of the differential)
    int to;    // dot index at filtration s
    LineLabel label;
    bool operator==(const ChartLine&) const = default;
};

struct ExtChart {
    int prime = 2;
    int t_max = 0;
    int s_max = 0;
    std::vector<ChartDot> dots;
    std::vector<ChartLine> lines;
    // Stems holding a vertical string that reaches filtration s_max.
    std::vector<int> towers;

    // Stems at or below this are complete: every bidegree with s <= s_max
    // lies inside the computed window.
    int complete_stem_max() const { return t_max - s_max; }

    bool operator==(const ExtChart&) const = default;
};

// Reads the chart off a minimal resolution: one dot per generator, a line
// per single-generator coefficient in a differential. Non-minimal input is
// a contract violation.
ExtChart chart_of(const Resolution& res);

}  // namespace cpb
