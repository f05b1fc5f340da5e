#include "eetsne/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace eetsne {

namespace {

constexpr int kCanvas = 640;
constexpr double kMargin = 48.0;
constexpr double kRadius = 3.0;

// Paul Tol's 12-color "muted"-adjacent palette; dark, distinguishable hues.
const char* const kPalette[12] = {
    "#332288", "#117733", "#44aa99", "#88ccee", "#ddcc77", "#cc6677",
    "#aa4499", "#882255", "#6699cc", "#661100", "#999933", "#888888",
};

void append_num(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    out += buf;
}

// Minimal escaping for title text.
std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const Points& y, const std::vector<int>& labels, const std::string& title) {
    validate_points(y, 1);
    if (y.dim != 2) {
        throw UnsupportedDimension("SVG scatter requires a 2-D embedding, got dimension " +
                                   std::to_string(y.dim));
    }
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(y.n)) {
        throw InvalidDataset("label count does not match point count");
    }

    double xlo = y[0][0], xhi = y[0][0], ylo = y[0][1], yhi = y[0][1];
    for (int i = 1; i < y.n; ++i) {
        xlo = std::min(xlo, y[i][0]);
        xhi = std::max(xhi, y[i][0]);
        ylo = std::min(ylo, y[i][1]);
        yhi = std::max(yhi, y[i][1]);
    }
    // One shared scale for both axes keeps the aspect ratio honest.
    const double span = std::max({xhi - xlo, yhi - ylo, 1e-300});
    const double scale = (kCanvas - 2.0 * kMargin) / span;
    const double xmid = 0.5 * (xlo + xhi);
    const double ymid = 0.5 * (ylo + yhi);

    std::string out;
    out.reserve(256 + static_cast<std::size_t>(y.n) * 64);
    char head[256];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  kCanvas, kCanvas, kCanvas, kCanvas);
    out += head;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!title.empty()) {
        out += "<text x=\"";
        append_num(out, kCanvas / 2.0);
        out += "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">";
        out += escape_xml(title);
        out += "</text>\n";
    }
    for (int i = 0; i < y.n; ++i) {
        const double px = kCanvas / 2.0 + (y[i][0] - xmid) * scale;
        // SVG y axis points down.
        const double py = kCanvas / 2.0 - (y[i][1] - ymid) * scale;
        const char* color = kPalette[0];
        if (!labels.empty()) {
            const int idx = ((labels[i] % 12) + 12) % 12;
            color = kPalette[idx];
        }
        out += "<circle cx=\"";
        append_num(out, px);
        out += "\" cy=\"";
        append_num(out, py);
        out += "\" r=\"";
        append_num(out, kRadius);
        out += "\" fill=\"";
        out += color;
        out += "\" fill-opacity=\"0.75\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void plot_svg(const std::string& path, const Points& y, const std::vector<int>& labels,
              const std::string& title) {
    const std::string body = render_svg(y, labels, title);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

}  // namespace eetsne
