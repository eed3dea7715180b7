#ifndef PARKCP_COVERAGE_HPP
#define PARKCP_COVERAGE_HPP

#include "parkcp/channel.hpp"
#include "parkcp/error.hpp"
#include "parkcp/model.hpp"
#include "parkcp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace parkcp {

enum class DsrcClass { A, B, C, D };

/// Communication zone of each DSRC device class, meters.
inline double dsrc_radius(DsrcClass c)
{
    switch (c) {
    case DsrcClass::A: return 15.0;
    case DsrcClass::B: return 100.0;
    case DsrcClass::C: return 400.0;
    case DsrcClass::D: return 1000.0;
    }
    throw std::invalid_argument("unknown DSRC class");
}

inline std::optional<DsrcClass> dsrc_class_from_string(std::string_view s)
{
    if (s == "A" || s == "a") return DsrcClass::A;
    if (s == "B" || s == "b") return DsrcClass::B;
    if (s == "C" || s == "c") return DsrcClass::C;
    if (s == "D" || s == "d") return DsrcClass::D;
    return std::nullopt;
}

using Polygon = std::vector<Position2D>;

/// Area open to traffic. Membership is even-odd over all rings together, so a
/// hole is just another ring lying inside its outer polygon.
struct TransitArea
{
    std::vector<Polygon> polygons;
    double cell_size = 1.0;

    double perimeter() const
    {
        double p = 0.0;
        for (const auto &poly : polygons)
            for (std::size_t k = 0; k < poly.size(); ++k) p += distance(poly[k], poly[(k + 1) % poly.size()]);
        return p;
    }
};

/// Fractions of the transit area covered by 1, 2 and >= 3 stationary cars, and
/// by none.
struct CoverageReport
{
    double fraction_level1 = 0.0;
    double fraction_level2 = 0.0;
    double fraction_level3 = 0.0;
    double fraction_uncovered = 0.0;
    std::int64_t cells = 0; // rasterised cells inside the transit area

    double covered() const { return fraction_level1 + fraction_level2 + fraction_level3; }
};

/// Worst-case rasterisation error of any fraction: perimeter * cell / area.
inline double quantization_bound(const TransitArea &area, std::int64_t cells)
{
    const double cell_area = area.cell_size * area.cell_size;
    return area.perimeter() * area.cell_size / (static_cast<double>(cells) * cell_area);
}

/// Grid estimate of coverage levels. Every cell centre inside the transit area
/// counts the parked cars within `radius` (capped at 3); fractions are cell
/// counts over the number of inside cells. Rows are scanned with even-odd edge
/// crossings.
inline CoverageReport coverage_report(const TransitArea &area, const std::vector<Position2D> &parked, double radius)
{
    if (!(radius > 0.0)) throw std::domain_error("coverage radius must be positive");
    if (!(area.cell_size > 0.0)) throw std::domain_error("cell size must be positive");
    if (area.polygons.empty()) throw std::domain_error("transit area is empty");

    double x_min = std::numeric_limits<double>::infinity(), y_min = x_min;
    double x_max = -x_min, y_max = -x_min;
    for (const auto &poly : area.polygons) {
        if (poly.size() < 3) throw std::domain_error("transit polygon needs at least three vertices");
        for (const auto &p : poly) {
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            y_min = std::min(y_min, p.y);
            y_max = std::max(y_max, p.y);
        }
    }
    const double h = area.cell_size;
    const auto nx = static_cast<std::int64_t>(std::ceil((x_max - x_min) / h));
    const auto ny = static_cast<std::int64_t>(std::ceil((y_max - y_min) / h));

    NeighborGrid grid(radius);
    for (std::size_t k = 0; k < parked.size(); ++k) grid.insert(static_cast<int>(k), parked[k]);

    std::int64_t counts[4] = {0, 0, 0, 0};
    std::vector<double> crossings;
    for (std::int64_t j = 0; j < ny; ++j) {
        const double cy = y_min + (static_cast<double>(j) + 0.5) * h;
        crossings.clear();
        for (const auto &poly : area.polygons)
            for (std::size_t k = 0; k < poly.size(); ++k) {
                const auto &a = poly[k];
                const auto &b = poly[(k + 1) % poly.size()];
                if ((a.y > cy) != (b.y > cy)) crossings.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t c = 0; c + 1 < crossings.size(); c += 2) {
            // cells whose centre lies in [crossings[c], crossings[c+1])
            auto i0 = static_cast<std::int64_t>(std::ceil((crossings[c] - x_min) / h - 0.5));
            auto i1 = static_cast<std::int64_t>(std::ceil((crossings[c + 1] - x_min) / h - 0.5));
            i0 = std::clamp<std::int64_t>(i0, 0, nx);
            i1 = std::clamp<std::int64_t>(i1, 0, nx);
            for (std::int64_t i = i0; i < i1; ++i) {
                const Position2D centre{x_min + (static_cast<double>(i) + 0.5) * h, cy};
                ++counts[grid.count_within(centre, radius, 3)];
            }
        }
    }
    const std::int64_t total = counts[0] + counts[1] + counts[2] + counts[3];
    if (total == 0) throw std::domain_error("transit area contains no grid cells");
    const auto frac = [&](std::int64_t c) { return static_cast<double>(c) / static_cast<double>(total); };
    return {frac(counts[1]), frac(counts[2]), frac(counts[3]), frac(counts[0]), total};
}

// -- files --------------------------------------------------------------------

inline constexpr std::string_view area_header = "polygon,x,y";

/// Polygons as `polygon,x,y` rows; consecutive rows with the same polygon id
/// form one ring.
inline std::vector<Polygon> read_area(std::istream &in)
{
    std::vector<Polygon> out;
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    std::optional<std::int64_t> current;
    std::map<std::int64_t, bool> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!have_header) {
            if (line != area_header) throw ParseError(line_no, "expected header '" + std::string(area_header) + "'");
            have_header = true;
            continue;
        }
        auto f = detail::split_csv(line);
        if (f.size() != 3) throw ParseError(line_no, "expected 3 fields");
        auto id = detail::parse_number<std::int64_t>(f[0]);
        auto x = detail::parse_number<double>(f[1]);
        auto y = detail::parse_number<double>(f[2]);
        if (!id || !x || !y) throw ParseError(line_no, "bad numeric field");
        if (!current || *id != *current) {
            if (seen[*id]) throw ParseError(line_no, "polygon " + std::to_string(*id) + " rows are not contiguous");
            seen[*id] = true;
            current = *id;
            out.emplace_back();
        }
        out.back().push_back({*x, *y});
    }
    for (const auto &p : out)
        if (p.size() < 3) throw ValidationError("polygon with fewer than three vertices");
    return out;
}

/// Parked positions from either an `x,y` list or a trace file (parked rows).
inline std::vector<Position2D> read_parked(std::istream &in)
{
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::istringstream probe(text);
    std::string raw;
    std::string_view header;
    while (std::getline(probe, raw)) {
        header = detail::trim(raw);
        if (!header.empty() && header.front() != '#') break;
        header = {};
    }
    std::vector<Position2D> out;
    if (header == trace_header) {
        std::istringstream trace(text);
        for (const auto &rec : parse_trace(trace))
            if (rec.kind == MotionKind::Parked && !rec.trajectory.empty()) out.push_back(rec.trajectory.front().position);
        return out;
    }
    std::istringstream body(text);
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(body, raw)) {
        ++line_no;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!have_header) {
            if (line != "x,y") throw ParseError(line_no, "expected header 'x,y' or a trace header");
            have_header = true;
            continue;
        }
        auto f = detail::split_csv(line);
        if (f.size() != 2) throw ParseError(line_no, "expected 2 fields");
        auto x = detail::parse_number<double>(f[0]);
        auto y = detail::parse_number<double>(f[1]);
        if (!x || !y) throw ParseError(line_no, "bad numeric field");
        out.push_back({*x, *y});
    }
    return out;
}

inline constexpr std::string_view coverage_header = "radius,level3,level2,level1,uncovered";

inline void write_coverage_row(std::ostream &out, double radius, const CoverageReport &r)
{
    using detail::format_double;
    out << format_double(radius) << ',' << format_double(r.fraction_level3) << ',' << format_double(r.fraction_level2)
        << ',' << format_double(r.fraction_level1) << ',' << format_double(r.fraction_uncovered) << '\n';
}

} // namespace parkcp

#endif
