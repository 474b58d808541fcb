#pragma once

#include <string>

#include "cpb/ahss.hpp"
#include "cpb/resolution.hpp"

namespace cpb {

enum class RenderFormat { ascii, svg, json };

// Accepts "ascii", "svg", "json"; anything else raises usage_error.
RenderFormat parse_render_format(const std::string& name);

// ASCII grid on (t-s, s) axes with slope-coded lines (vertical for degree-1
// detection, slope 1 for degree 2, slope 1/3 for degree 4), an SVG 1.1
// document with the same data, or the chart as JSON.
std::string render_chart(const ExtChart& chart, RenderFormat format);

// AHSS pages render as a column/row grid of group strings plus the
// recorded differentials; JSON carries the full subquotient state.
std::string render_chart(const AHSSPage& page, RenderFormat format);

// Inverses of the JSON renderings; malformed input raises parse_error.
ExtChart chart_from_json(const std::string& text);
AHSSPage page_from_json(const std::string& text);

}  // namespace cpb
