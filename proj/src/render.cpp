#include "cpb/render.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "cpb/errors.hpp"
#include "json.hpp"

namespace cpb {

namespace {

using json = nlohmann::ordered_json;

constexpr int kCellWidth = 4;   // ascii columns per stem
constexpr int kPrefix = 6;      // "  4 | "
constexpr int kSvgStep = 40;    // svg pixels per stem or filtration

struct ChartBounds {
    int stem_min = 0;
    int stem_max = 0;
    int s_top = 0;
};

ChartBounds chart_bounds(const ExtChart& chart) {
    ChartBounds b;
    if (chart.dots.empty()) {
        b.stem_max = std::max(0, chart.t_max);
        b.s_top = std::max(0, chart.s_max);
        return b;
    }
    b.stem_min = chart.dots[0].t - chart.dots[0].s;
    for (const auto& d : chart.dots) {
        b.stem_min = std::min(b.stem_min, d.t - d.s);
        b.stem_max = std::max(b.stem_max, d.t - d.s);
        b.s_top = std::max(b.s_top, d.s);
    }
    return b;
}

// stem jump of a line: 0 draws vertically, 1 with slope 1, 3 with slope 1/3
int line_jump(const ExtChart& chart, const ChartLine& line) {
    return line_label_degree(chart.prime, line.label) - 1;
}

void put(std::string& row, std::size_t pos, char c) {
    if (row.size() <= pos) row.resize(pos + 1, ' ');
    row[pos] = c;
}

std::string rtrim(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

std::string chart_ascii(const ExtChart& chart) {
    ChartBounds b = chart_bounds(chart);
    auto x_of = [&](int stem) {
        return static_cast<std::size_t>(kPrefix + kCellWidth * (stem - b.stem_min));
    };
    std::map<std::pair<int, int>, int> counts;  // (stem, s) -> dots
    for (const auto& d : chart.dots) ++counts[{d.t - d.s, d.s}];

    std::ostringstream out;
    out << "p = " << chart.prime << ", t <= " << chart.t_max << ", s <= " << chart.s_max
        << "\n";
    if (!chart.towers.empty()) {
        std::string row = "    |";
        for (int stem : chart.towers) put(row, x_of(stem), '^');
        out << rtrim(row) << "\n";
    }
    for (int s = b.s_top; s >= 0; --s) {
        std::ostringstream label;
        label << std::setw(3) << s << " |";
        std::string row = label.str();
        for (const auto& [key, count] : counts) {
            if (key.second != s) continue;
            char glyph = count == 1 ? '*' : (count <= 9 ? static_cast<char>('0' + count) : '#');
            put(row, x_of(key.first), glyph);
        }
        out << rtrim(row) << "\n";
        if (s == 0) break;
        std::string conn = "    |";
        for (const auto& line : chart.lines) {
            const ChartDot& v = chart.dots[static_cast<std::size_t>(line.to)];
            if (v.s != s - 1) continue;
            std::size_t x = x_of(v.t - v.s);
            int jump = line_jump(chart, line);
            if (jump == 0) {
                put(conn, x, '|');
            } else if (jump == 1) {
                put(conn, x + 2, '/');
            } else {
                for (int i = 1; i < kCellWidth * jump - 1; ++i) put(conn, x + i, '-');
                put(conn, x + static_cast<std::size_t>(kCellWidth * jump) - 1, '/');
            }
        }
        out << rtrim(conn) << "\n";
    }
    int ncols = b.stem_max - b.stem_min + 1;
    out << "    +" << std::string(static_cast<std::size_t>(kCellWidth * ncols + 2), '-')
        << "\n";
    std::string labels(kPrefix, ' ');
    for (int stem = b.stem_min; stem <= b.stem_max; ++stem) {
        std::string text = std::to_string(stem);
        for (std::size_t i = 0; i < text.size(); ++i) put(labels, x_of(stem) + i, text[i]);
    }
    out << rtrim(labels) << "\n";
    return out.str();
}

std::string chart_svg(const ExtChart& chart) {
    ChartBounds b = chart_bounds(chart);
    int top = chart.towers.empty() ? 20 : 45;
    auto x_of = [&](int stem) { return 50 + kSvgStep * (stem - b.stem_min); };
    auto y_of = [&](int s) { return top + kSvgStep * (b.s_top - s); };
    int width = x_of(b.stem_max) + 30;
    int axis_y = y_of(0) + 20;
    int height = axis_y + 40;

    // per-dot coordinates, fanning out multiple dots in one bidegree
    std::map<std::pair<int, int>, int> counts, seen;
    for (const auto& d : chart.dots) ++counts[{d.t - d.s, d.s}];
    std::vector<std::pair<int, int>> pos;
    pos.reserve(chart.dots.size());
    for (const auto& d : chart.dots) {
        std::pair<int, int> key{d.t - d.s, d.s};
        int i = seen[key]++;
        pos.push_back({x_of(key.first) + 12 * i - 6 * (counts[key] - 1), y_of(d.s)});
    }

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<style>text{font:12px monospace;fill:#444}.axis{stroke:#999}"
           ".dot{fill:#111}.h0,.a0{stroke:#111;stroke-width:1.5}"
           ".h1{stroke:#1a56a0;stroke-width:1.5}.h2{stroke:#a0561a;stroke-width:1.5}"
           ".tower{stroke:#111;stroke-width:1.5;stroke-dasharray:2 3}</style>\n";
    out << "<line class=\"axis\" x1=\"" << 35 << "\" y1=\"" << axis_y << "\" x2=\""
        << width - 15 << "\" y2=\"" << axis_y << "\"/>\n";
    out << "<line class=\"axis\" x1=\"" << 35 << "\" y1=\"" << axis_y << "\" x2=\"" << 35
        << "\" y2=\"" << (chart.towers.empty() ? top - 10 : 10) << "\"/>\n";
    for (int stem = b.stem_min; stem <= b.stem_max; ++stem)
        out << "<text x=\"" << x_of(stem) - 4 << "\" y=\"" << axis_y + 16 << "\">" << stem
            << "</text>\n";
    for (int s = 0; s <= b.s_top; ++s)
        out << "<text x=\"" << 10 << "\" y=\"" << y_of(s) + 4 << "\">" << s << "</text>\n";
    for (const auto& line : chart.lines) {
        const auto& u = pos[static_cast<std::size_t>(line.from)];
        const auto& v = pos[static_cast<std::size_t>(line.to)];
        out << "<line class=\"" << line_label_name(line.label) << "\" x1=\"" << v.first
            << "\" y1=\"" << v.second << "\" x2=\"" << u.first << "\" y2=\"" << u.second
            << "\"/>\n";
    }
    for (int stem : chart.towers)
        out << "<line class=\"tower\" x1=\"" << x_of(stem) << "\" y1=\"" << y_of(b.s_top)
            << "\" x2=\"" << x_of(stem) << "\" y2=\"" << y_of(b.s_top) - 25 << "\"/>\n";
    for (std::size_t i = 0; i < chart.dots.size(); ++i) {
        out << "<circle class=\"dot\" cx=\"" << pos[i].first << "\" cy=\"" << pos[i].second
            << "\" r=\"5\"><title>" << chart.dots[i].id << "</title></circle>\n";
    }
    out << "</svg>\n";
    return out.str();
}

json chart_json(const ExtChart& chart) {
    json j;
    j["prime"] = chart.prime;
    j["t_max"] = chart.t_max;
    j["s_max"] = chart.s_max;
    j["dots"] = json::array();
    for (const auto& d : chart.dots)
        j["dots"].push_back({{"s", d.s}, {"t", d.t}, {"id", d.id}});
    j["lines"] = json::array();
    for (const auto& line : chart.lines)
        j["lines"].push_back({{"from", line.from},
                              {"to", line.to},
                              {"label", line_label_name(line.label)}});
    j["towers"] = chart.towers;
    return j;
}

json zmat_json(const ZMat& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

ZMat zmat_of(const json& j) {
    ZMat m(j.at("rows").get<int>(), j.at("cols").get<int>());
    auto data = j.at("data").get<std::vector<long long>>();
    if (data.size() != m.a.size()) throw parse_error("matrix data length mismatch");
    m.a = std::move(data);
    return m;
}

json zab_json(const ZabGroup& g) {
    return {{"gens", g.gens}, {"rels", zmat_json(g.rels)}};
}

ZabGroup zab_of(const json& j) {
    return ZabGroup(j.at("gens").get<int>(), zmat_of(j.at("rels")));
}

json page_json(const AHSSPage& page) {
    json j;
    j["prime"] = page.prime;
    j["l"] = page.l;
    j["r"] = page.r;
    j["page"] = page.page;
    j["cells"] = json::array();
    for (const auto& [key, cell] : page.cells) {
        j["cells"].push_back({{"column", key.first},
                              {"row", key.second},
                              {"group", group_to_string(cell.current)},
                              {"original", zab_json(cell.original)},
                              {"sub", zmat_json(cell.sub)},
                              {"current", zab_json(cell.current)}});
    }
    j["history"] = json::array();
    for (const auto& rec : page.history) {
        j["history"].push_back({{"r", rec.r},
                                {"from", {rec.from.first, rec.from.second}},
                                {"to", {rec.to.first, rec.to.second}},
                                {"matrix", zmat_json(rec.matrix)}});
    }
    return j;
}

std::string page_ascii(const AHSSPage& page) {
    std::set<int> columns;
    std::set<int, std::greater<int>> rows;
    std::size_t wcol = 8;
    for (const auto& [key, cell] : page.cells) {
        columns.insert(key.first);
        rows.insert(key.second);
        wcol = std::max(wcol, group_to_string(cell.current).size() + 2);
    }
    std::ostringstream out;
    out << "page " << page.page << "  (p = " << page.prime << ", l = " << page.l
        << ", r = " << page.r << ")\n";
    out << std::setw(9) << "q \\ col" << " |";
    for (int c : columns) out << std::setw(static_cast<int>(wcol)) << c;
    out << "\n";
    for (int q : rows) {
        out << std::setw(9) << q << " |";
        for (int c : columns) {
            auto it = page.cells.find({c, q});
            out << std::setw(static_cast<int>(wcol))
                << (it == page.cells.end() ? "" : group_to_string(it->second.current));
        }
        out << "\n";
    }
    out << "differentials:\n";
    if (page.history.empty()) out << "  none\n";
    for (const auto& rec : page.history)
        out << "  d" << rec.r << " (" << rec.from.first << "," << rec.from.second
            << ") -> (" << rec.to.first << "," << rec.to.second << ")\n";
    return out.str();
}

std::string page_svg(const AHSSPage& page) {
    std::set<int> columns;
    std::set<int> rows;  // ascending; drawn with high q on top
    for (const auto& [key, cell] : page.cells) {
        columns.insert(key.first);
        rows.insert(key.second);
    }
    std::map<int, int> col_x, row_y;
    int x = 80;
    for (int c : columns) col_x[c] = (x += 90);
    int y = 20;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) row_y[*it] = (y += 40);
    int width = x + 90;
    int height = y + 50;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    out << "<style>text{font:13px monospace;fill:#222}.hdr{fill:#666}"
           ".d2,.d4{stroke:#a0261a;stroke-width:1.5}</style>\n";
    out << "<text class=\"hdr\" x=\"15\" y=\"20\">page " << page.page << " (p = "
        << page.prime << ", l = " << page.l << ", r = " << page.r << ")</text>\n";
    for (int c : columns)
        out << "<text class=\"hdr\" x=\"" << col_x[c] << "\" y=\"40\">" << c
            << "</text>\n";
    for (int q : rows)
        out << "<text class=\"hdr\" x=\"15\" y=\"" << row_y[q] << "\">" << q
            << "</text>\n";
    for (const auto& [key, cell] : page.cells)
        out << "<text x=\"" << col_x[key.first] << "\" y=\"" << row_y[key.second] << "\">"
            << group_to_string(cell.current) << "</text>\n";
    for (const auto& rec : page.history)
        out << "<line class=\"d" << rec.r << "\" x1=\"" << col_x[rec.from.first] + 15
            << "\" y1=\"" << row_y[rec.from.second] - 5 << "\" x2=\""
            << col_x[rec.to.first] - 5 << "\" y2=\"" << row_y[rec.to.second] - 5
            << "\"/>\n";
    out << "</svg>\n";
    return out.str();
}

LineLabel label_of(const std::string& name) {
    if (name == "h0") return LineLabel::h0;
    if (name == "h1") return LineLabel::h1;
    if (name == "h2") return LineLabel::h2;
    if (name == "a0") return LineLabel::a0;
    throw parse_error("unknown line label: " + name);
}

}  // namespace

RenderFormat parse_render_format(const std::string& name) {
    if (name == "ascii") return RenderFormat::ascii;
    if (name == "svg") return RenderFormat::svg;
    if (name == "json") return RenderFormat::json;
    throw usage_error("unsupported format: " + name + " (expected ascii, svg, or json)");
}

std::string render_chart(const ExtChart& chart, RenderFormat format) {
    for (const auto& line : chart.lines) {
        CPB_CHECK(line.from >= 0 && line.to >= 0 &&
                      line.from < static_cast<int>(chart.dots.size()) &&
                      line.to < static_cast<int>(chart.dots.size()),
                  "chart line indices must point at dots");
    }
    switch (format) {
        case RenderFormat::ascii: return chart_ascii(chart);
        case RenderFormat::svg: return chart_svg(chart);
        case RenderFormat::json: return chart_json(chart).dump(2) + "\n";
    }
    throw usage_error("unsupported format");
}

std::string render_chart(const AHSSPage& page, RenderFormat format) {
    switch (format) {
        case RenderFormat::ascii: return page_ascii(page);
        case RenderFormat::svg: return page_svg(page);
        case RenderFormat::json: return page_json(page).dump(2) + "\n";
    }
    throw usage_error("unsupported format");
}

ExtChart chart_from_json(const std::string& text) {
    try {
        auto j = json::parse(text);
        ExtChart chart;
        chart.prime = j.at("prime").get<int>();
        chart.t_max = j.at("t_max").get<int>();
        chart.s_max = j.at("s_max").get<int>();
        for (const auto& d : j.at("dots"))
            chart.dots.push_back(
                {d.at("s").get<int>(), d.at("t").get<int>(), d.at("id").get<std::string>()});
        for (const auto& line : j.at("lines")) {
            ChartLine cl{line.at("from").get<int>(), line.at("to").get<int>(),
                         label_of(line.at("label").get<std::string>())};
            if (cl.from < 0 || cl.to < 0 || cl.from >= static_cast<int>(chart.dots.size()) ||
                cl.to >= static_cast<int>(chart.dots.size()))
                throw parse_error("line index out of range");
            chart.lines.push_back(cl);
        }
        chart.towers = j.at("towers").get<std::vector<int>>();
        return chart;
    } catch (const json::exception& e) {
        throw parse_error(std::string("chart json: ") + e.what());
    }
}

AHSSPage page_from_json(const std::string& text) {
    try {
        auto j = json::parse(text);
        AHSSPage page;
        page.prime = j.at("prime").get<int>();
        page.l = j.at("l").get<int>();
        page.r = j.at("r").get<int>();
        page.page = j.at("page").get<int>();
        for (const auto& c : j.at("cells")) {
            CellState cell{zab_of(c.at("original")), zmat_of(c.at("sub")),
                           zab_of(c.at("current"))};
            page.cells.emplace(
                std::pair{c.at("column").get<int>(), c.at("row").get<int>()},
                std::move(cell));
        }
        for (const auto& h : j.at("history")) {
            RecordedDifferential rec;
            rec.r = h.at("r").get<int>();
            rec.from = {h.at("from").at(0).get<int>(), h.at("from").at(1).get<int>()};
            rec.to = {h.at("to").at(0).get<int>(), h.at("to").at(1).get<int>()};
            rec.matrix = zmat_of(h.at("matrix"));
            page.history.push_back(std::move(rec));
        }
        return page;
    } catch (const json::exception& e) {
        throw parse_error(std::string("page json: ") + e.what());
    }
}

}  // namespace cpb
