#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "cpb/errors.hpp"
#include "cpb/steenrod.hpp"
#include "cpb/stunted.hpp"
#include "test_util.hpp"

using namespace cpb;

namespace {

// Coefficients of (x + x^p)^m over F_p by repeated polynomial multiplication,
// indexed by the exponent of x.  The total operation on the degree-2 class x
// is x + x^p, and it is multiplicative, so this computes every single
// operation on x^m without touching the binomial rule under test.
std::vector<int> total_op_on_power(int p, int m) {
    std::vector<int> poly{1};
    for (int step = 0; step < m; ++step) {
        std::vector<int> next(poly.size() + static_cast<std::size_t>(p), 0);
        for (std::size_t e = 0; e < poly.size(); ++e) {
            if (poly[e] == 0) continue;
            next[e + 1] = (next[e + 1] + poly[e]) % p;
            next[e + static_cast<std::size_t>(p)] =
                (next[e + static_cast<std::size_t>(p)] + poly[e]) % p;
        }
        poly = std::move(next);
    }
    return poly;
}

// Expected coefficient of the token action on cell x^m inside [n, top_m].
int oracle_token_coeff(int p, int token, int m, int top_m) {
    if (p == 2) {
        if (token % 2 != 0) return 0;  // odd squares vanish on even-degree classes
        int i = token / 2;
        if (m + i > top_m) return 0;
        auto poly = total_op_on_power(2, m);
        std::size_t idx = static_cast<std::size_t>(m + i);
        return idx < poly.size() ? poly[idx] : 0;
    }
    if (token == 0) return 0;  // integral classes, no Bockstein
    int i = token;
    if (m + 2 * i > top_m) return 0;
    auto poly = total_op_on_power(3, m);
    std::size_t idx = static_cast<std::size_t>(m + 2 * i);
    return idx < poly.size() ? poly[idx] : 0;
}

OpWord random_raw_word(int prime, int len, int max_power) {
    OpWord w;
    for (int i = 0; i < len; ++i) {
        if (prime == 3 && rand_int(0, 3) == 0)
            w.push_back(0);
        else
            w.push_back(rand_int(1, max_power));
    }
    return w;
}

}  // namespace

TEST_CASE("cell layout: one generator in each odd degree of the window") {
    ModulePresentation m = stunted_module(2, 2, 6, 17);
    CHECK(m.degrees() == std::vector<int>{5, 7, 9, 11, 13, 15, 17});
    CHECK(m.meta().n == 2);
    CHECK(m.meta().k == 6);
    CHECK(m.meta().shift == 1);
    CHECK(m.cell_name(0) == "y5");
    CHECK(m.cell_at_degree(9) == 2);
    CHECK_FALSE(m.cell_at_degree(8).has_value());

    // t_max truncation beats k.
    CHECK(stunted_module(2, 3, 100, 13).degrees() == std::vector<int>{7, 9, 11, 13});
    // t_max below the bottom cell: empty module, not an error.
    CHECK(stunted_module(2, 5, 3, 10).empty());
    CHECK(stunted_module(3, 1, 0, 3).degrees() == std::vector<int>{3});

    CHECK_THROWS_AS(stunted_module(5, 1, 1, 10), config_error);
    CHECK_THROWS_AS(stunted_module(2, 0, 1, 10), range_error);
    CHECK_THROWS_AS(stunted_module(2, 1, -1, 10), range_error);
}

TEST_CASE("fixed actions on the bottom cells") {
    ModulePresentation m = stunted_module(2, 2, 6, 17);
    auto hits = [&](int token, int from_deg, int to_deg) {
        ModuleVec img = m.apply_token(token, m.unit_cell(*m.cell_at_degree(from_deg)));
        return img[static_cast<std::size_t>(*m.cell_at_degree(to_deg))] != 0;
    };
    CHECK(hits(2, 7, 9));
    CHECK_FALSE(hits(2, 5, 7));
    CHECK(hits(4, 5, 9));
    CHECK(hits(8, 9, 17));
    for (int c = 0; c < m.size(); ++c) {
        CHECK(m.apply_token(1, m.unit_cell(c)) == m.zero());
        CHECK(m.apply_token(3, m.unit_cell(c)) == m.zero());
    }

    ModulePresentation m3 = stunted_module(3, 3, 4, 100);
    CHECK(m3.degrees() == std::vector<int>{7, 9, 11, 13, 15});
    ModuleVec p1_y9 = m3.apply_token(1, m3.unit_cell(1));
    CHECK(p1_y9[3] == 1);  // P1 y9 = y13
    CHECK(m3.apply_token(1, m3.unit_cell(0)) == m3.zero());  // P1 y7 = 0
    for (int c = 0; c < m3.size(); ++c) CHECK(m3.apply_token(0, m3.unit_cell(c)) == m3.zero());
}

TEST_CASE("every single operation matches the total-operation oracle") {
    for (int iter = 0; iter < 60; ++iter) {
        int p = iter % 2 == 0 ? 2 : 3;
        int n = rand_int(1, 40);
        int k = rand_int(0, 9);
        int t_max = 2 * n + 1 + 2 * rand_int(0, 12);
        ModulePresentation m = stunted_module(p, n, k, t_max);
        if (m.empty()) continue;
        int top_m = (m.degrees().back() - 1) / 2;
        int span = m.degrees().back() - m.degrees().front();
        for (int c = 0; c < m.size(); ++c) {
            int cell_m = (m.degree_of(c) - 1) / 2;
            for (int token = (p == 3 ? 0 : 1); token_degree(p, token) <= span + 2; ++token) {
                ModuleVec img = m.apply_token(token, m.unit_cell(c));
                int target_deg = m.degree_of(c) + token_degree(p, token);
                for (int t = 0; t < m.size(); ++t) {
                    int expect = m.degree_of(t) == target_deg
                                     ? oracle_token_coeff(p, token, cell_m, top_m)
                                     : 0;
                    CHECK(img[static_cast<std::size_t>(t)] == expect);
                }
            }
        }
    }
}

TEST_CASE("word action factors through admissible normalization") {
    for (int iter = 0; iter < 800; ++iter) {
        int p = iter % 2 == 0 ? 2 : 3;
        int n = rand_int(1, 30);
        ModulePresentation m = stunted_module(p, n, rand_int(2, 8), 2 * n + 25);
        OpWord raw = random_raw_word(p, rand_int(1, 3), p == 2 ? 7 : 3);
        SteenrodElement normalized = adem_normalize(p, raw);
        ModuleVec v = m.unit_cell(rand_int(0, m.size() - 1));
        CHECK(m.apply_word(raw, v) == m.apply_element(normalized, v));
    }
}

TEST_CASE("action is degree-correct") {
    for (int iter = 0; iter < 40; ++iter) {
        int p = iter % 2 == 0 ? 2 : 3;
        int n = rand_int(1, 50);
        ModulePresentation m = stunted_module(p, n, rand_int(0, 8), 2 * n + 1 + rand_int(0, 20));
        for (int c = 0; c < m.size(); ++c) {
            for (int token = (p == 3 ? 0 : 1); token <= 12; ++token) {
                ModuleVec img = m.apply_token(token, m.unit_cell(c));
                for (int t = 0; t < m.size(); ++t)
                    if (img[static_cast<std::size_t>(t)] != 0)
                        CHECK(m.degree_of(t) == m.degree_of(c) + token_degree(p, token));
            }
        }
    }
}

TEST_CASE("periodicity of the action tables") {
    auto same_arcs = [](const ModulePresentation& a, const ModulePresentation& b, int max_token) {
        REQUIRE(a.size() == b.size());
        for (int token = 0; token <= max_token; ++token)
            for (int c = 0; c < a.size(); ++c)
                if (a.apply_token(token, a.unit_cell(c)) != b.apply_token(token, b.unit_cell(c)))
                    return false;
        return true;
    };
    for (int n = 1; n <= 24; ++n) {
        ModulePresentation a2 = stunted_module(2, n, 4, 2 * n + 9);
        ModulePresentation b2 = stunted_module(2, n + 8, 4, 2 * (n + 8) + 9);
        CHECK(same_arcs(a2, b2, 8));
        ModulePresentation a3 = stunted_module(3, n, 4, 2 * n + 9);
        ModulePresentation b3 = stunted_module(3, n + 3, 4, 2 * (n + 3) + 9);
        CHECK(same_arcs(a3, b3, 2));
    }
}

TEST_CASE("residue diagrams match the computed action") {
    for (int r = 0; r < 8; ++r) {
        int n = 8 + r;
        DiagramReport rep = verify_action_against_diagram(stunted_module(2, n, 4, 100), r);
        CHECK(rep.all_match);
        CHECK(rep.residue == r);
        // A deliberately wrong residue is detected (Sq2 arcs alternate parity).
        DiagramReport wrong =
            verify_action_against_diagram(stunted_module(2, n, 4, 100), (r + 1) % 8);
        CHECK_FALSE(wrong.all_match);
    }
    for (int r = 0; r < 3; ++r) {
        int n = 3 + r;
        DiagramReport rep = verify_action_against_diagram(stunted_module(3, n, 4, 100), r);
        CHECK(rep.all_match);
        DiagramReport wrong =
            verify_action_against_diagram(stunted_module(3, n, 4, 100), (r + 1) % 3);
        CHECK_FALSE(wrong.all_match);
    }

    // Window patterns quoted for the two-cell-spaced arcs.
    auto present = [](const DiagramReport& rep, const std::string& op, int from_deg) {
        for (const auto& row : rep.rows)
            if (row.op == op && row.from_degree == from_deg) return row.computed;
        return false;
    };
    ModulePresentation m2 = stunted_module(2, 10, 4, 100);  // n = 2 mod 8, cells y21..y29
    DiagramReport rep2 = verify_action_against_diagram(m2, 2);
    CHECK(present(rep2, "Sq2", 23));
    CHECK(present(rep2, "Sq2", 27));
    CHECK_FALSE(present(rep2, "Sq2", 21));
    CHECK(present(rep2, "Sq4", 21));
    CHECK(present(rep2, "Sq4", 23));
    CHECK_FALSE(present(rep2, "Sq8", 21));
    ModulePresentation m3 = stunted_module(2, 11, 4, 100);  // n = 3 mod 8
    DiagramReport rep3 = verify_action_against_diagram(m3, 3);
    CHECK(present(rep3, "Sq2", 23));
    CHECK(present(rep3, "Sq4", 23));
    CHECK_FALSE(present(rep3, "Sq4", 25));
    ModulePresentation m4 = stunted_module(2, 12, 4, 100);  // n = 4 mod 8
    CHECK(present(verify_action_against_diagram(m4, 4), "Sq8", 25));
}

TEST_CASE("generator arcs listing") {
    ModulePresentation m = stunted_module(2, 2, 6, 17);
    auto arcs = m.generator_arcs();
    auto has = [&](const std::string& op, int from, int to) {
        for (const auto& a : arcs)
            if (a.op == op && a.from == from && a.to == to) return true;
        return false;
    };
    CHECK(has("Sq2", 7, 9));
    CHECK(has("Sq4", 5, 9));
    CHECK(has("Sq8", 9, 17));
    CHECK_FALSE(has("Sq2", 5, 7));
    for (const auto& a : arcs) CHECK(a.op != "Sq1");

    ModulePresentation m3 = stunted_module(3, 3, 4, 100);
    auto arcs3 = m3.generator_arcs();
    bool p1 = false;
    for (const auto& a : arcs3) {
        CHECK(a.op != "b");
        if (a.op == "P1" && a.from == 9 && a.to == 13) p1 = true;
    }
    CHECK(p1);
}

TEST_CASE("hand-built module: constructor validation") {
    // A one-cell module with zero action is fine (the sphere).
    ModulePresentation sphere(2, {0}, {}, {});
    CHECK(sphere.size() == 1);
    CHECK(sphere.apply_token(1, sphere.unit_cell(0)) == sphere.zero());

    // Degree-incorrect action entries are rejected.
    TokenActionTable bad;
    bad[2][0] = {{1, 1}};
    CHECK_THROWS_AS(ModulePresentation(2, {0, 1}, bad, {}), contract_violation);
    TokenActionTable good;
    good[1][0] = {{1, 1}};
    CHECK_NOTHROW(ModulePresentation(2, {0, 1}, good, {}));
}
