#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpb/steenrod.hpp"

namespace cpb {

struct ModuleMeta {
    int n = 0;
    int k = 0;
    int shift = 0;
};

// Dense coefficient vector over the module's cell basis.
using ModuleVec = std::vector<std::uint8_t>;

// token -> cell index -> terms (target cell, coefficient).  Absent entries act by zero.
using TokenActionTable = std::map<int, std::map<int, std::vector<std::pair<int, std::uint8_t>>>>;

class ModulePresentation {
  public:
    ModulePresentation(int prime, std::vector<int> degrees, TokenActionTable action,
                       ModuleMeta meta = {});

    int prime() const { return prime_; }
    const std::vector<int>& degrees() const { return degrees_; }
    int size() const { return static_cast<int>(degrees_.size()); }
    bool empty() const { return degrees_.empty(); }
    const ModuleMeta& meta() const { return meta_; }

    int degree_of(int cell) const;
    std::optional<int> cell_at_degree(int degree) const;
    std::string cell_name(int cell) const;

    ModuleVec zero() const { return ModuleVec(degrees_.size(), 0); }
    ModuleVec unit_cell(int cell) const;
    // Words act token-wise, rightmost factor first.
    ModuleVec apply_token(int token, const ModuleVec& v) const;
    ModuleVec apply_word(const OpWord& w, const ModuleVec& v) const;
    ModuleVec apply_element(const SteenrodElement& e, const ModuleVec& v) const;

    struct Arc {
        std::string op;
        int from;  // cell degree
        int to;    // cell degree
    };
    // Arcs of the algebra generators (Sq^{2^i}; b, P^{3^i}) between cells present.
    std::vector<Arc> generator_arcs() const;

  private:
    int prime_;
    std::vector<int> degrees_;
    TokenActionTable action_;
    ModuleMeta meta_;
};

// Cohomology of a suspended stunted projective space: one generator y_{2m+1}
// for n <= m <= min(n+k, (t_max-1)/2), with the binomial action rule.
ModulePresentation stunted_module(int prime, int n, int k, int t_max);

struct DiagramRow {
    std::string op;
    int from_degree;
    bool expected;
    bool computed;
    bool match;
};

struct DiagramReport {
    int residue;
    std::vector<DiagramRow> rows;
    bool all_match;
};

// Compare the first five cells' Sq2/Sq4/Sq8 (P1 at p=3) arcs against the
// tabulated pattern for the given residue class (n mod 8, resp. n mod 3).
DiagramReport verify_action_against_diagram(const ModulePresentation& m, int residue);

}  // namespace cpb
