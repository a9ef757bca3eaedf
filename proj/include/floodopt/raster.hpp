#ifndef FLOODOPT_RASTER_HPP
#define FLOODOPT_RASTER_HPP

// Raster frames and ESRI ASCII grid I/O. Rows are stored north to south,
// matching the file layout; row 0 is the northernmost row.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "floodopt/errors.hpp"
#include "floodopt/geometry.hpp"
#include "floodopt/util.hpp"

namespace floodopt {

struct Cell {
    std::int64_t row = 0;
    std::int64_t col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridFrame {
    double xll = 0.0; // easting of the lower-left corner, m
    double yll = 0.0; // northing of the lower-left corner, m
    double cellsize = 1.0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    bool contains(const Cell& c) const
    {
        return c.row >= 0 && c.col >= 0 && static_cast<std::size_t>(c.row) < rows &&
               static_cast<std::size_t>(c.col) < cols;
    }
    std::size_t index(const Cell& c) const
    {
        return static_cast<std::size_t>(c.row) * cols + static_cast<std::size_t>(c.col);
    }
    Point centre(const Cell& c) const
    {
        return {xll + (static_cast<double>(c.col) + 0.5) * cellsize,
                yll + (static_cast<double>(rows) - static_cast<double>(c.row) - 0.5) * cellsize};
    }
    Box cell_box(const Cell& c) const
    {
        const double x0 = xll + static_cast<double>(c.col) * cellsize;
        const double y0 = yll + (static_cast<double>(rows) - static_cast<double>(c.row) - 1.0) * cellsize;
        return {x0, y0, x0 + cellsize, y0 + cellsize};
    }
    /// Cell containing a point, in unbounded index space (may lie outside the grid).
    Cell locate(const Point& p) const
    {
        const auto col = static_cast<std::int64_t>(std::floor((p.x - xll) / cellsize));
        const auto row_from_south = static_cast<std::int64_t>(std::floor((p.y - yll) / cellsize));
        return {static_cast<std::int64_t>(rows) - 1 - row_from_south, col};
    }

    friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

/// A georeferenced raster of doubles (water depth or ground elevation, m).
struct Raster {
    GridFrame frame;
    double nodata = -9999.0;
    std::vector<double> values; // row-major, north to south

    Raster() = default;
    Raster(GridFrame f, double fill, double nodata_value = -9999.0)
        : frame(f), nodata(nodata_value), values(f.rows * f.cols, fill)
    {
    }

    double& at(const Cell& c) { return values.at(frame.index(c)); }
    double at(const Cell& c) const { return values.at(frame.index(c)); }
    bool is_nodata(double v) const { return v == nodata || std::isnan(v); }

    void check_consistent() const
    {
        if (values.size() != frame.rows * frame.cols)
            throw InputError("raster holds " + std::to_string(values.size()) + " values for a " +
                             std::to_string(frame.rows) + "x" + std::to_string(frame.cols) + " frame");
    }
};

namespace detail {

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace detail

inline Raster parse_ascii_grid(const std::string& text, const std::string& origin = "<memory>")
{
    std::istringstream in(text);
    Raster r;
    bool have_cols = false, have_rows = false, have_x = false, have_y = false, have_size = false;
    bool x_centre = false, y_centre = false;
    std::string key;
    // Header lines start with a letter; the first numeric token starts the body.
    while (in >> std::ws && std::isalpha(in.peek())) {
        std::string value;
        in >> key >> value;
        key = detail::lower(key);
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size())
                throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw InputError(origin + ": bad header value '" + value + "' for key '" + key + "'");
        }
        if (key == "ncols") {
            r.frame.cols = static_cast<std::size_t>(v);
            have_cols = true;
        } else if (key == "nrows") {
            r.frame.rows = static_cast<std::size_t>(v);
            have_rows = true;
        } else if (key == "xllcorner" || key == "xllcenter") {
            r.frame.xll = v;
            x_centre = key == "xllcenter";
            have_x = true;
        } else if (key == "yllcorner" || key == "yllcenter") {
            r.frame.yll = v;
            y_centre = key == "yllcenter";
            have_y = true;
        } else if (key == "cellsize") {
            r.frame.cellsize = v;
            have_size = true;
        } else if (key == "nodata_value") {
            r.nodata = v;
        } else {
            throw InputError(origin + ": unknown header key '" + key + "'");
        }
    }
    if (!(have_cols && have_rows && have_x && have_y && have_size))
        throw InputError(origin + ": incomplete ESRI ASCII header");
    if (!(r.frame.cellsize > 0.0))
        throw InputError(origin + ": cellsize must be positive");
    if (x_centre)
        r.frame.xll -= r.frame.cellsize / 2.0;
    if (y_centre)
        r.frame.yll -= r.frame.cellsize / 2.0;
    const auto n = r.frame.rows * r.frame.cols;
    r.values.reserve(n);
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            r.values.push_back(v);
        } catch (const std::exception&) {
            throw InputError(origin + ": bad cell value '" + tok + "' at position " + std::to_string(r.values.size()));
        }
    }
    if (r.values.size() != n)
        throw InputError(origin + ": expected " + std::to_string(n) + " cell values, found " +
                         std::to_string(r.values.size()));
    return r;
}

inline Raster read_ascii_grid(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open raster '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ascii_grid(ss.str(), path);
}

inline std::string format_ascii_grid(const Raster& r)
{
    r.check_consistent();
    std::string out;
    out += "ncols " + std::to_string(r.frame.cols) + "\n";
    out += "nrows " + std::to_string(r.frame.rows) + "\n";
    out += "xllcorner " + format_number(r.frame.xll) + "\n";
    out += "yllcorner " + format_number(r.frame.yll) + "\n";
    out += "cellsize " + format_number(r.frame.cellsize) + "\n";
    out += "NODATA_value " + format_number(r.nodata) + "\n";
    for (std::size_t row = 0; row < r.frame.rows; ++row) {
        for (std::size_t col = 0; col < r.frame.cols; ++col) {
            if (col)
                out += ' ';
            out += format_number(r.values[row * r.frame.cols + col]);
        }
        out += '\n';
    }
    return out;
}

inline void write_ascii_grid(const Raster& r, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write raster '" + path + "'");
    out << format_ascii_grid(r);
    if (!out)
        throw InputError("failed writing raster '" + path + "'");
}

} // namespace floodopt

#endif
