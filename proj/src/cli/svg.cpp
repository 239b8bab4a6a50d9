#include <cmath>
#include <sstream>

#include "ddestab/cli/commands.hpp"

namespace ddestab::cli {

namespace {

const char* fill_for(const SweepCell& c) {
    if (c.verdict == "stable") return "#4c9f70";
    if (c.verdict == "unstable") return "#c8553d";
    return "#f2d06b";
}

}  // namespace

std::string sweep_svg(const SweepResult& r) {
    constexpr int cell = 20;
    constexpr int margin = 60;
    const int nx = static_cast<int>(r.xs.size());
    const int ny = static_cast<int>(r.ys.size());
    const int width = 2 * margin + nx * cell;
    const int height = 2 * margin + ny * cell;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const SweepCell& c = r.cells[static_cast<std::size_t>(i * ny + j)];
            const int x = margin + i * cell;
            const int y = margin + (ny - 1 - j) * cell;  // y grows upward
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
               << "\" fill=\"" << fill_for(c) << "\"";
            if (!c.agree) os << " stroke=\"black\" stroke-width=\"2\"";
            os << "><title>" << format_double(c.p1) << ", " << format_double(c.p2) << ": " << c.verdict
               << "</title></rect>\n";
        }
    }
    const int bottom = margin + ny * cell;
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    if (nx > 0) {
        os << "<text x=\"" << margin << "\" y=\"" << bottom + 15 << "\">" << format_double(r.xs.front())
           << "</text>\n";
        os << "<text x=\"" << margin + nx * cell << "\" y=\"" << bottom + 15 << "\" text-anchor=\"end\">"
           << format_double(r.xs.back()) << "</text>\n";
    }
    if (ny > 0) {
        os << "<text x=\"" << margin - 5 << "\" y=\"" << bottom << "\" text-anchor=\"end\">"
           << format_double(r.ys.front()) << "</text>\n";
        os << "<text x=\"" << margin - 5 << "\" y=\"" << margin + 12 << "\" text-anchor=\"end\">"
           << format_double(r.ys.back()) << "</text>\n";
    }
    os << "<text x=\"" << margin + nx * cell / 2 << "\" y=\"" << bottom + 35 << "\" text-anchor=\"middle\">"
       << r.x_name << "</text>\n";
    os << "<text x=\"" << margin - 40 << "\" y=\"" << margin + ny * cell / 2 << "\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 " << margin - 40 << ' ' << margin + ny * cell / 2 << ")\">" << r.y_name
       << "</text>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace ddestab::cli
