#include "cpb/stunted.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "cpb/errors.hpp"

namespace cpb {

ModulePresentation::ModulePresentation(int prime, std::vector<int> degrees, TokenActionTable action,
                                       ModuleMeta meta)
    : prime_(prime), degrees_(std::move(degrees)), action_(std::move(action)), meta_(meta) {
    if (prime_ != 2 && prime_ != 3) throw config_error("prime must be 2 or 3");
    for (std::size_t i = 1; i < degrees_.size(); ++i)
        CPB_CHECK(degrees_[i - 1] < degrees_[i], "cell degrees must be strictly increasing");
    for (const auto& [token, per_cell] : action_) {
        for (const auto& [cell, terms] : per_cell) {
            CPB_CHECK(cell >= 0 && cell < size(), "action source cell out of range");
            for (const auto& [target, coeff] : terms) {
                CPB_CHECK(target >= 0 && target < size(), "action target cell out of range");
                CPB_CHECK(coeff >= 1 && coeff < prime_, "action coefficient out of range");
                CPB_CHECK(degrees_[static_cast<std::size_t>(target)] ==
                              degrees_[static_cast<std::size_t>(cell)] + token_degree(prime_, token),
                          "action must raise degree by the operation degree");
            }
        }
    }
}

int ModulePresentation::degree_of(int cell) const {
    CPB_CHECK(cell >= 0 && cell < size(), "cell index out of range");
    return degrees_[static_cast<std::size_t>(cell)];
}

std::optional<int> ModulePresentation::cell_at_degree(int degree) const {
    auto it = std::lower_bound(degrees_.begin(), degrees_.end(), degree);
    if (it == degrees_.end() || *it != degree) return std::nullopt;
    return static_cast<int>(it - degrees_.begin());
}

std::string ModulePresentation::cell_name(int cell) const {
    return "y" + std::to_string(degree_of(cell));
}

ModuleVec ModulePresentation::unit_cell(int cell) const {
    CPB_CHECK(cell >= 0 && cell < size(), "cell index out of range");
    ModuleVec v = zero();
    v[static_cast<std::size_t>(cell)] = 1;
    return v;
}

ModuleVec ModulePresentation::apply_token(int token, const ModuleVec& v) const {
    CPB_CHECK(static_cast<int>(v.size()) == size(), "module vector has wrong length");
    ModuleVec out = zero();
    auto it = action_.find(token);
    if (it == action_.end()) return out;
    for (const auto& [cell, terms] : it->second) {
        std::uint8_t c = v[static_cast<std::size_t>(cell)];
        if (c == 0) continue;
        for (const auto& [target, coeff] : terms) {
            auto& slot = out[static_cast<std::size_t>(target)];
            slot = static_cast<std::uint8_t>((slot + c * coeff) % prime_);
        }
    }
    return out;
}

ModuleVec ModulePresentation::apply_word(const OpWord& w, const ModuleVec& v) const {
    ModuleVec cur = v;
    for (auto it = w.rbegin(); it != w.rend(); ++it) cur = apply_token(*it, cur);
    return cur;
}

ModuleVec ModulePresentation::apply_element(const SteenrodElement& e, const ModuleVec& v) const {
    CPB_CHECK(e.prime() == prime_, "prime mismatch between element and module");
    ModuleVec out = zero();
    for (const auto& [word, coeff] : e.terms()) {
        ModuleVec part = apply_word(word, v);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<std::uint8_t>((out[i] + coeff * part[i]) % prime_);
    }
    return out;
}

std::vector<ModulePresentation::Arc> ModulePresentation::generator_arcs() const {
    std::vector<int> gen_tokens;
    if (empty()) return {};
    int span = degrees_.back() - degrees_.front();
    if (prime_ == 2) {
        for (int i = 1; i <= span; i *= 2) gen_tokens.push_back(i);
    } else {
        gen_tokens.push_back(0);
        for (int i = 1; 4 * i <= span; i *= 3) gen_tokens.push_back(i);
    }
    std::vector<Arc> arcs;
    for (int token : gen_tokens) {
        std::string op = prime_ == 2  ? "Sq" + std::to_string(token)
                         : token == 0 ? "b"
                                      : "P" + std::to_string(token);
        for (int c = 0; c < size(); ++c) {
            ModuleVec img = apply_token(token, unit_cell(c));
            for (int t = 0; t < size(); ++t)
                if (img[static_cast<std::size_t>(t)] != 0)
                    arcs.push_back({op, degree_of(c), degree_of(t)});
        }
    }
    return arcs;
}

ModulePresentation stunted_module(int prime, int n, int k, int t_max) {
    if (prime != 2 && prime != 3) throw config_error("prime must be 2 or 3");
    if (n < 1) throw range_error("bottom index n must be at least 1");
    if (k < 0) throw range_error("width k must be nonnegative");
    int top_m = std::min(n + k, (t_max - 1) / 2);
    std::vector<int> degrees;
    for (int m = n; m <= top_m; ++m) degrees.push_back(2 * m + 1);
    TokenActionTable action;
    for (int c = 0; c < static_cast<int>(degrees.size()); ++c) {
        int m = n + c;
        if (prime == 2) {
            for (int i = 1; m + i <= top_m; ++i) {
                int coeff = binom_mod(m, i, 2);
                if (coeff != 0) action[2 * i][c] = {{c + i, static_cast<std::uint8_t>(coeff)}};
            }
        } else {
            for (int i = 1; m + 2 * i <= top_m; ++i) {
                int coeff = binom_mod(m, i, 3);
                if (coeff != 0) action[i][c] = {{c + 2 * i, static_cast<std::uint8_t>(coeff)}};
            }
        }
    }
    return ModulePresentation(prime, std::move(degrees), std::move(action), {n, k, 1});
}

namespace {

// Arc patterns of the residue diagrams on the first five cells, as source
// offsets j (cell y_{2(n+j)+1}); targets stay inside the five-cell window.
const std::array<std::set<int>, 8> kSq2Offsets = {{
    {1, 3}, {0, 2}, {1, 3}, {0, 2}, {1, 3}, {0, 2}, {1, 3}, {0, 2},
}};
const std::array<std::set<int>, 8> kSq4Offsets = {{
    {2}, {1, 2}, {0, 1}, {0}, {2}, {1, 2}, {0, 1}, {0},
}};
const std::array<std::set<int>, 8> kSq8Offsets = {{
    {}, {}, {}, {}, {0}, {0}, {0}, {0},
}};
const std::array<std::set<int>, 3> kP1Offsets = {{
    {1, 2}, {0, 1}, {0, 2},
}};

}  // namespace

DiagramReport verify_action_against_diagram(const ModulePresentation& m, int residue) {
    const int p = m.prime();
    CPB_CHECK(m.size() >= 5, "diagram comparison needs at least five cells");
    CPB_CHECK(residue >= 0 && residue < (p == 2 ? 8 : 3), "residue out of range");

    struct OpRow {
        std::string op;
        int token;
        int target_offset;  // cells jumped inside the window
        const std::set<int>* table;
    };
    std::vector<OpRow> ops;
    if (p == 2) {
        ops.push_back({"Sq2", 2, 1, &kSq2Offsets[static_cast<std::size_t>(residue)]});
        ops.push_back({"Sq4", 4, 2, &kSq4Offsets[static_cast<std::size_t>(residue)]});
        ops.push_back({"Sq8", 8, 4, &kSq8Offsets[static_cast<std::size_t>(residue)]});
    } else {
        ops.push_back({"P1", 1, 2, &kP1Offsets[static_cast<std::size_t>(residue)]});
    }

    DiagramReport report{residue, {}, true};
    for (const auto& op : ops) {
        for (int j = 0; j + op.target_offset <= 4; ++j) {
            bool expected = op.table->count(j) > 0;
            ModuleVec img = m.apply_token(op.token, m.unit_cell(j));
            bool computed = img[static_cast<std::size_t>(j + op.target_offset)] != 0;
            bool match = expected == computed;
            report.rows.push_back({op.op, m.degree_of(j), expected, computed, match});
            if (!match) report.all_match = false;
        }
    }
    return report;
}

}  // namespace cpb
