#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cpb/cache.hpp"
#include "cpb/errors.hpp"
#include "cpb/resolution.hpp"
#include "cpb/stunted.hpp"
#include "test_util.hpp"

using namespace cpb;

namespace {

ModulePresentation sphere(int prime) { return ModulePresentation(prime, {0}, {}, {}); }

std::multiset<std::pair<int, int>> stem_dots(const ExtChart& chart, int stem_lo, int stem_hi) {
    std::multiset<std::pair<int, int>> out;  // (stem, s)
    for (const auto& d : chart.dots) {
        int stem = d.t - d.s;
        if (stem >= stem_lo && stem <= stem_hi) out.insert({stem, d.s});
    }
    return out;
}

bool has_line(const ExtChart& chart, int from_s, int from_t, int to_s, int to_t, LineLabel label) {
    for (const auto& line : chart.lines) {
        const auto& a = chart.dots[static_cast<std::size_t>(line.from)];
        const auto& b = chart.dots[static_cast<std::size_t>(line.to)];
        if (line.label == label && a.s == from_s && a.t == from_t && b.s == to_s && b.t == to_t)
            return true;
    }
    return false;
}

const SteenrodElement& diff_coeff(const Resolution& res, int s, const std::string& from_id,
                                  const std::string& to_id) {
    const auto& stage = res.stages[static_cast<std::size_t>(s)];
    const auto& prev = res.stages[static_cast<std::size_t>(s) - 1];
    for (std::size_t j = 0; j < stage.generators.size(); ++j) {
        if (stage.generators[j].id != from_id) continue;
        for (std::size_t i = 0; i < prev.generators.size(); ++i)
            if (prev.generators[i].id == to_id) return stage.d_free[j][i];
    }
    static SteenrodElement zero2(2);
    REQUIRE(false);
    return zero2;
}

}  // namespace

TEST_CASE("sphere at p=2: first stems of the classical chart") {
    Resolution res = resolve_minimal(sphere(2), 7, 4);
    ExtChart chart = chart_of(res);
    CHECK(chart.complete_stem_max() == 3);

    std::multiset<std::pair<int, int>> expected{
        {0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4},  // h0-tower on the zero stem
        {1, 1},                                  // eta
        {2, 2},                                  // eta^2
        {3, 1}, {3, 2}, {3, 3},                  // nu and its h0-multiples
    };
    CHECK(stem_dots(chart, 0, 3) == expected);

    CHECK(std::count(chart.towers.begin(), chart.towers.end(), 0) == 1);
    for (int stem : {1, 2, 3})
        CHECK(std::count(chart.towers.begin(), chart.towers.end(), stem) == 0);

    CHECK(has_line(chart, 1, 2, 0, 0, LineLabel::h1));
    CHECK(has_line(chart, 1, 4, 0, 0, LineLabel::h2));
    CHECK(has_line(chart, 2, 4, 1, 2, LineLabel::h1));
    CHECK(has_line(chart, 2, 5, 1, 4, LineLabel::h0));
    CHECK(has_line(chart, 3, 6, 2, 5, LineLabel::h0));
    CHECK(has_line(chart, 2, 5, 1, 1, LineLabel::h2));
}

TEST_CASE("sphere at p=3: a0-tower and the first alpha") {
    Resolution res = resolve_minimal(sphere(3), 6, 3);
    ExtChart chart = chart_of(res);
    std::multiset<std::pair<int, int>> expected{
        {0, 0}, {0, 1}, {0, 2}, {0, 3},  // a0-tower
        {3, 1},                          // alpha_1, detected by P1
    };
    CHECK(stem_dots(chart, 0, 3) == expected);
    CHECK(chart.towers == std::vector<int>{0});
    CHECK(has_line(chart, 1, 4, 0, 0, LineLabel::h0));
    CHECK(has_line(chart, 1, 1, 0, 0, LineLabel::a0));
}

TEST_CASE("width-two bottom segment: generator bidegrees of the worked resolution") {
    ModulePresentation m = stunted_module(2, 2, 100, 13);
    REQUIRE(m.degrees() == std::vector<int>{5, 7, 9, 11, 13});
    Resolution res = resolve_minimal(m, 13, 4);

    auto gens_at = [&](int s) {
        std::multiset<int> out;
        for (const auto& g : res.stages[static_cast<std::size_t>(s)].generators) out.insert(g.t);
        return out;
    };
    CHECK(gens_at(0) == std::multiset<int>{5, 7});
    CHECK(gens_at(1) == std::multiset<int>{6, 7, 8, 9, 13});
    CHECK(gens_at(2) == std::multiset<int>{7, 9, 9, 13});
    CHECK(gens_at(3) == std::multiset<int>{8, 10, 12});
    CHECK(gens_at(4) == std::multiset<int>{9, 11, 13});

    // Repeated bidegrees get primes.
    std::set<std::string> stage2_ids;
    for (const auto& g : res.stages[2].generators) stage2_ids.insert(g.id);
    CHECK(stage2_ids.count("e_{2,9}") == 1);
    CHECK(stage2_ids.count("e_{2,9}'") == 1);

    // Bottom differentials are forced exactly.
    CHECK(diff_coeff(res, 1, "e_{1,6}", "e_{0,5}") == parse_element(2, "Sq1"));
    CHECK(diff_coeff(res, 1, "e_{1,7}", "e_{0,5}") == parse_element(2, "Sq2"));
    CHECK(diff_coeff(res, 1, "e_{1,8}", "e_{0,7}") == parse_element(2, "Sq1"));
    CHECK(diff_coeff(res, 1, "e_{1,8}", "e_{0,5}").is_zero());
    CHECK(diff_coeff(res, 1, "e_{1,9}", "e_{0,5}") == parse_element(2, "Sq4"));
    CHECK(diff_coeff(res, 1, "e_{1,9}", "e_{0,7}") == parse_element(2, "Sq2"));
}

TEST_CASE("width-two bottom segment: chart matches the worked window") {
    ModulePresentation m = stunted_module(2, 2, 100, 13);
    ExtChart chart = chart_of(resolve_minimal(m, 13, 4));

    std::multiset<std::pair<int, int>> expected{
        {5, 0}, {5, 1}, {5, 2}, {5, 3}, {5, 4},          // tower on stem 5
        {6, 1},                                          // eta on the bottom cell
        {7, 0}, {7, 1}, {7, 2}, {7, 2}, {7, 3}, {7, 4},  // tower plus one extra dot
        {8, 1},
    };
    CHECK(stem_dots(chart, 5, 8) == expected);

    for (int stem : {5, 7})
        CHECK(std::count(chart.towers.begin(), chart.towers.end(), stem) == 1);
    for (int stem : {6, 8})
        CHECK(std::count(chart.towers.begin(), chart.towers.end(), stem) == 0);
    // The third cell's tower enters the window at filtration 3.
    CHECK(std::count(chart.towers.begin(), chart.towers.end(), 9) == 1);

    // The four structure lines of the window, besides the vertical strings.
    CHECK(has_line(chart, 1, 7, 0, 5, LineLabel::h1));
    CHECK(has_line(chart, 2, 9, 1, 7, LineLabel::h1));
    CHECK(has_line(chart, 1, 9, 0, 7, LineLabel::h1));
    CHECK(has_line(chart, 1, 9, 0, 5, LineLabel::h2));
    int non_h0 = 0;
    for (const auto& line : chart.lines) {
        const auto& from = chart.dots[static_cast<std::size_t>(line.from)];
        if (line.label != LineLabel::h0 && from.t - from.s >= 5 && from.t - from.s <= 8) ++non_h0;
    }
    CHECK(non_h0 == 4);
}

TEST_CASE("bottom residue 3: two bare towers") {
    ModulePresentation m = stunted_module(2, 3, 100, 16);
    ExtChart chart = chart_of(resolve_minimal(m, 16, 6));
    std::map<int, std::multiset<int>> by_stem;
    for (const auto& d : chart.dots) {
        int stem = d.t - d.s;
        if (stem >= 7 && stem <= 10) by_stem[stem].insert(d.s);
    }
    CHECK(by_stem.count(8) == 0);
    CHECK(by_stem.count(10) == 0);
    CHECK(by_stem[7] == std::multiset<int>{0, 1, 2, 3, 4, 5, 6});
    CHECK(by_stem[9] == std::multiset<int>{1, 2, 3, 4, 5, 6});
    CHECK(std::count(chart.towers.begin(), chart.towers.end(), 7) == 1);
    CHECK(std::count(chart.towers.begin(), chart.towers.end(), 9) == 1);
}

TEST_CASE("chart lines land one filtration down with the label's degree") {
    for (int iter = 0; iter < 12; ++iter) {
        int p = iter % 2 == 0 ? 2 : 3;
        int n = rand_int(1, 20);
        ModulePresentation m = stunted_module(p, n, rand_int(1, 6), 2 * n + 1 + rand_int(4, 10));
        Resolution res = resolve_minimal(m, 2 * n + 1 + 10, rand_int(2, 5));
        ExtChart chart = chart_of(res);

        std::map<std::pair<int, int>, int> dot_count;
        for (const auto& d : chart.dots) ++dot_count[{d.s, d.t}];
        for (int s = 0; s <= res.s_max; ++s) {
            std::map<std::pair<int, int>, int> gen_count;
            for (const auto& g : res.stages[static_cast<std::size_t>(s)].generators)
                ++gen_count[{s, g.t}];
            for (const auto& [key, cnt] : gen_count) CHECK(dot_count[key] == cnt);
        }

        for (const auto& line : chart.lines) {
            const auto& from = chart.dots[static_cast<std::size_t>(line.from)];
            const auto& to = chart.dots[static_cast<std::size_t>(line.to)];
            CHECK(from.s == to.s + 1);
            CHECK(from.t == to.t + line_label_degree(p, line.label));
        }

        std::set<std::string> ids;
        for (const auto& d : chart.dots) CHECK(ids.insert(d.id).second);

        std::set<int> dot_stems;
        for (const auto& d : chart.dots) dot_stems.insert(d.t - d.s);
        for (int stem : chart.towers) CHECK(dot_stems.count(stem) == 1);
    }
}

TEST_CASE("resolution charts are periodic in the bottom index") {
    auto line_keys = [](const ExtChart& chart, int shift) {
        std::multiset<std::string> keys;
        for (const auto& line : chart.lines) {
            const auto& from = chart.dots[static_cast<std::size_t>(line.from)];
            const auto& to = chart.dots[static_cast<std::size_t>(line.to)];
            keys.insert(std::to_string(from.s) + "," + std::to_string(from.t - shift) + "->" +
                        std::to_string(to.s) + "," + std::to_string(to.t - shift) + ":" +
                        line_label_name(line.label));
        }
        return keys;
    };
    for (int n : {3, 4, 6, 9}) {
        ExtChart a = chart_of(resolve_minimal(stunted_module(2, n, 4, 2 * n + 9), 2 * n + 9, 4));
        ExtChart b = chart_of(
            resolve_minimal(stunted_module(2, n + 8, 4, 2 * (n + 8) + 9), 2 * (n + 8) + 9, 4));
        std::multiset<std::pair<int, int>> sa, sb;
        for (const auto& d : a.dots) sa.insert({d.s, d.t});
        for (const auto& d : b.dots) sb.insert({d.s, d.t - 16});
        CHECK(sa == sb);
        CHECK(line_keys(a, 0) == line_keys(b, 16));

        ExtChart a3 = chart_of(resolve_minimal(stunted_module(3, n, 4, 2 * n + 9), 2 * n + 9, 4));
        ExtChart b3 = chart_of(
            resolve_minimal(stunted_module(3, n + 3, 4, 2 * (n + 3) + 9), 2 * (n + 3) + 9, 4));
        std::multiset<std::pair<int, int>> ta, tb;
        for (const auto& d : a3.dots) ta.insert({d.s, d.t});
        for (const auto& d : b3.dots) tb.insert({d.s, d.t - 6});
        CHECK(ta == tb);
        CHECK(line_keys(a3, 0) == line_keys(b3, 6));
    }
}

TEST_CASE("degenerate windows") {
    // Empty module: empty resolution and chart.
    ModulePresentation empty_m = stunted_module(2, 5, 3, 10);
    REQUIRE(empty_m.empty());
    Resolution res = resolve_minimal(empty_m, 10, 3);
    for (const auto& stage : res.stages) CHECK(stage.generators.empty());
    ExtChart chart = chart_of(res);
    CHECK(chart.dots.empty());
    CHECK(chart.lines.empty());
    CHECK(chart.towers.empty());

    // Window below the bottom cell: no generators either.
    ModulePresentation m = stunted_module(2, 4, 2, 13);
    Resolution low = resolve_minimal(m, 7, 2);
    for (const auto& stage : low.stages) CHECK(stage.generators.empty());

    CHECK_THROWS_AS(resolve_minimal(m, 13, 0), range_error);
    // A window wider than the algebra degree cap is a configuration error.
    CHECK_THROWS_AS(resolve_minimal(stunted_module(2, 1, 40, 90), 90, 2), config_error);
}

TEST_CASE("verification rejects tampered resolutions") {
    ModulePresentation m = stunted_module(2, 2, 100, 13);
    Resolution res = resolve_minimal(m, 13, 4);
    CHECK_NOTHROW(verify_resolution(res));

    Resolution broken = res;
    broken.stages[1].d_free[0][0] = parse_element(2, "Sq2");  // replaces Sq1 on e_{0,5}
    CHECK_THROWS_AS(verify_resolution(broken), contract_violation);

    Resolution nonminimal = res;
    nonminimal.stages[2].d_free[0][1] += SteenrodElement::unit(2);
    CHECK_THROWS_AS(chart_of(nonminimal), contract_violation);
}

TEST_CASE("cache round-trips resolutions byte for byte") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cpb-cache-roundtrip";
    std::filesystem::remove_all(dir);

    for (const CacheKey key : {CacheKey{2, 2, 100, 13, 4}, CacheKey{3, 4, 9, 29, 5},
                               CacheKey{2, 5, 3, 21, 6}}) {
        Resolution res = resolve_minimal(
            stunted_module(key.prime, key.n, key.k, key.t_max), key.t_max, key.s_max);
        cache_store(key, res, dir);
        auto loaded = cache_load(key, dir);
        REQUIRE(loaded.has_value());
        CHECK(resolution_to_json(*loaded) == resolution_to_json(res));

        // The chart read off the loaded copy is identical too.
        ExtChart a = chart_of(res);
        ExtChart b = chart_of(*loaded);
        CHECK(a.dots == b.dots);
        CHECK(a.lines == b.lines);
        CHECK(a.towers == b.towers);
    }

    // Distinct keys land in distinct files, tracked by the index.
    CHECK(cache_stats(dir).entries == 3);
    std::ifstream index(dir / "index.txt");
    int lines = 0;
    for (std::string l; std::getline(index, l);) ++lines;
    CHECK(lines == 3);

    cache_clear(dir);
    CHECK(cache_stats(dir).entries == 0);
    CHECK_FALSE(cache_load(CacheKey{2, 2, 100, 13, 4}, dir).has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("cache misses on absence, corruption, and version mismatch") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cpb-cache-misses";
    std::filesystem::remove_all(dir);
    const CacheKey key{2, 3, 50, 17, 4};

    CHECK_FALSE(cache_load(key, dir).has_value());

    Resolution res = resolve_minimal(stunted_module(2, 3, 50, 17), 17, 4);
    cache_store(key, res, dir);
    REQUIRE(cache_load(key, dir).has_value());
    const std::filesystem::path file = dir / cache_file_name(key);

    // Truncated file.
    {
        std::string body = resolution_to_json(res);
        std::ofstream out(file, std::ios::trunc);
        out << body.substr(0, body.size() / 2);
    }
    CHECK_FALSE(cache_load(key, dir).has_value());

    // Well-formed JSON from a different engine version.
    {
        std::string body = resolution_to_json(res);
        const std::string tag = "\"version\": \"cpb-1\"";
        auto pos = body.find(tag);
        REQUIRE(pos != std::string::npos);
        body.replace(pos, tag.size(), "\"version\": \"cpb-0\"");
        std::ofstream out(file, std::ios::trunc);
        out << body;
    }
    CHECK_FALSE(cache_load(key, dir).has_value());

    // Intact JSON whose differentials were tampered with: verification
    // rejects it and the load is a miss rather than a wrong resolution.
    {
        std::string body = resolution_to_json(res);
        const std::string word = "\"Sq1\"";
        auto pos = body.find(word);
        REQUIRE(pos != std::string::npos);
        body.replace(pos, word.size(), "\"Sq2\"");
        std::ofstream out(file, std::ios::trunc);
        out << body;
    }
    CHECK_FALSE(cache_load(key, dir).has_value());

    // Store repairs the slot.
    cache_store(key, res, dir);
    CHECK(cache_load(key, dir).has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent stores of one key leave an intact file") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cpb-cache-race";
    std::filesystem::remove_all(dir);
    const CacheKey key{2, 2, 100, 13, 4};
    Resolution res = resolve_minimal(stunted_module(2, 2, 100, 13), 13, 4);

    std::vector<std::thread> writers;
    for (int i = 0; i < 8; ++i) {
        writers.emplace_back([&] {
            for (int round = 0; round < 5; ++round) cache_store(key, res, dir);
        });
    }
    for (auto& w : writers) w.join();

    auto loaded = cache_load(key, dir);
    REQUIRE(loaded.has_value());
    CHECK(resolution_to_json(*loaded) == resolution_to_json(res));
    CHECK(cache_stats(dir).entries == 1);

    // No stray temp files survive.
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        (void)entry;
        ++files;
    }
    CHECK(files == 2);  // data file + index.txt
    std::filesystem::remove_all(dir);
}

TEST_CASE("resolve_stunted_cached computes once and then hits") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cpb-cache-through";
    std::filesystem::remove_all(dir);
    const CacheKey key{3, 3, 20, 23, 5};

    Resolution cold = resolve_stunted_cached(key, true, dir);
    CHECK(cache_stats(dir).entries == 1);
    Resolution warm = resolve_stunted_cached(key, true, dir);
    CHECK(resolution_to_json(cold) == resolution_to_json(warm));

    Resolution off = resolve_stunted_cached(key, false, dir);
    CHECK(resolution_to_json(off) == resolution_to_json(cold));
    CHECK(cache_stats(dir).entries == 1);
    std::filesystem::remove_all(dir);
}
