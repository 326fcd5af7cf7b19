#pragma once

// Hand-rolled SVG writer for the sweep figure: |S| and P against the
// rotation frequency, with the classical bound |S| = 2 and the quantum
// maximum 2*sqrt(2) drawn as reference lines. No plotting dependency; the
// output is deterministic byte-for-byte for a given table.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sagbell/bell.hpp"

namespace sagbell::plot {

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

inline std::string sweep_svg(const std::vector<SweepRow>& rows) {
    const double width = 920.0, height = 560.0;
    const double ml = 70.0, mr = 80.0, mt = 40.0, mb = 60.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double f_min = rows.front().f_hz, f_max = rows.back().f_hz;
    const double s_max = 3.0;
    double p_max = 0.0;
    for (const auto& r : rows) p_max = std::max(p_max, r.P_coincidence);
    p_max *= 1.15;
    if (p_max <= 0.0) p_max = 1.0;

    auto x_of = [&](double f) { return ml + (f - f_min) / (f_max - f_min) * pw; };
    auto ys_of = [&](double s) { return mt + ph - s / s_max * ph; };
    auto yp_of = [&](double p) { return mt + ph - p / p_max * ph; };

    auto polyline = [&](auto value_of, auto y_of, const char* color) {
        std::string pts;
        for (const auto& r : rows) {
            pts += detail::fmt(x_of(r.f_hz));
            pts += ",";
            pts += detail::fmt(y_of(value_of(r)));
            pts += " ";
        }
        return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) +
           "\" height=\"" + detail::fmt(height) + "\" viewBox=\"0 0 " + detail::fmt(width) +
           " " + detail::fmt(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // frame
    svg += "<rect x=\"" + detail::fmt(ml) + "\" y=\"" + detail::fmt(mt) + "\" width=\"" +
           detail::fmt(pw) + "\" height=\"" + detail::fmt(ph) +
           "\" fill=\"none\" stroke=\"#333\"/>\n";

    // reference lines: classical bound and quantum maximum on the |S| axis
    for (auto [level, label, dash] :
         {std::tuple<double, const char*, const char*>{2.0, "|S| = 2", "6,4"},
          {2.0 * std::sqrt(2.0), "2*sqrt(2)", "2,3"}}) {
        double y = ys_of(level);
        svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(y) + "\" x2=\"" +
               detail::fmt(ml + pw) + "\" y2=\"" + detail::fmt(y) +
               "\" stroke=\"#888\" stroke-dasharray=\"" + dash + "\"/>\n";
        svg += "<text x=\"" + detail::fmt(ml + 6) + "\" y=\"" + detail::fmt(y - 4) +
               "\" font-size=\"12\" fill=\"#555\">" + label + "</text>\n";
    }

    svg += polyline([](const SweepRow& r) { return r.S_abs; }, ys_of, "#1f77b4");
    svg += polyline([](const SweepRow& r) { return r.P_coincidence; }, yp_of, "#ff7f0e");

    // x ticks
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        double f = f_min + (f_max - f_min) * i / n_ticks;
        double x = x_of(f);
        svg += "<line x1=\"" + detail::fmt(x) + "\" y1=\"" + detail::fmt(mt + ph) + "\" x2=\"" +
               detail::fmt(x) + "\" y2=\"" + detail::fmt(mt + ph + 5) +
               "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + detail::fmt(x) + "\" y=\"" + detail::fmt(mt + ph + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + detail::fmt(f) + "</text>\n";
    }
    // left axis ticks (|S|)
    for (int i = 0; i <= 3; ++i) {
        double y = ys_of(i);
        svg += "<text x=\"" + detail::fmt(ml - 10) + "\" y=\"" + detail::fmt(y + 4) +
               "\" font-size=\"12\" text-anchor=\"end\" fill=\"#1f77b4\">" + detail::fmt(i) +
               "</text>\n";
    }
    // right axis ticks (P)
    for (int i = 0; i <= 4; ++i) {
        double p = p_max * i / 4.0;
        double y = yp_of(p);
        svg += "<text x=\"" + detail::fmt(ml + pw + 8) + "\" y=\"" + detail::fmt(y + 4) +
               "\" font-size=\"12\" fill=\"#ff7f0e\">" + detail::fmt(p) + "</text>\n";
    }

    svg += "<text x=\"" + detail::fmt(ml + pw / 2) + "\" y=\"" + detail::fmt(height - 18) +
           "\" font-size=\"14\" text-anchor=\"middle\">rotation frequency f [Hz]</text>\n";
    svg += "<text x=\"20\" y=\"" + detail::fmt(mt - 14) +
           "\" font-size=\"14\" fill=\"#1f77b4\">|S|</text>\n";
    svg += "<text x=\"" + detail::fmt(width - 60) + "\" y=\"" + detail::fmt(mt - 14) +
           "\" font-size=\"14\" fill=\"#ff7f0e\">P(coincidence)</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace sagbell::plot
