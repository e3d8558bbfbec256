#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pcl/cli.hpp"
#include "pcl/errors.hpp"

namespace pcl::cli {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
        os << '\n';
    }
}

std::string svg_lines(const Table& t, const std::string& title, bool log_y) {
    const double W = 640, H = 400, ml = 70, mr = 20, mt = 30, mb = 50;
    auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool any = false;
    for (const auto& r : t.rows) {
        if (r.empty()) continue;
        for (std::size_t c = 1; c < r.size(); ++c) {
            if (!std::isfinite(r[c]) || (log_y && r[c] <= 0.0)) continue;
            const double y = ty(r[c]);
            if (!any) {
                x0 = x1 = r[0];
                y0 = y1 = y;
                any = true;
            }
            x0 = std::min(x0, r[0]);
            x1 = std::max(x1, r[0]);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (ty(y) - y0) / (y1 - y0) * (H - mt - mb); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    s << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s << "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << "</text>\n";
    s << "<line x1=\"" << fixed(ml) << "\" y1=\"" << fixed(H - mb) << "\" x2=\"" << fixed(W - mr) << "\" y2=\""
      << fixed(H - mb) << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << fixed(ml) << "\" y1=\"" << fixed(mt) << "\" x2=\"" << fixed(ml) << "\" y2=\"" << fixed(H - mb)
      << "\" stroke=\"black\"/>\n";
    auto label = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };
    s << "<text x=\"" << fixed(ml) << "\" y=\"" << fixed(H - mb + 18) << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << label(x0) << "</text>\n";
    s << "<text x=\"" << fixed(W - mr) << "\" y=\"" << fixed(H - mb + 18)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label(x1) << "</text>\n";
    s << "<text x=\"" << fixed(ml - 4) << "\" y=\"" << fixed(H - mb) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << label(log_y ? std::pow(10.0, y0) : y0) << "</text>\n";
    s << "<text x=\"" << fixed(ml - 4) << "\" y=\"" << fixed(mt + 8) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << label(log_y ? std::pow(10.0, y1) : y1) << "</text>\n";
    if (!t.columns.empty())
        s << "<text x=\"" << fixed((ml + W - mr) / 2) << "\" y=\"" << fixed(H - 10)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << t.columns[0] << "</text>\n";
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
        const char* color = kColors[(c - 1) % (sizeof kColors / sizeof kColors[0])];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& r : t.rows) {
            if (c >= r.size() || !std::isfinite(r[c]) || (log_y && r[c] <= 0.0)) continue;
            s << (first ? "" : " ") << fixed(px(r[0])) << ',' << fixed(py(r[c]));
            first = false;
        }
        s << "\"/>\n";
        s << "<text x=\"" << fixed(W - mr - 4) << "\" y=\"" << fixed(mt + 14.0 * static_cast<double>(c))
          << "\" text-anchor=\"end\" fill=\"" << color << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << t.columns[c] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void emit_plot_data(const Table& t, const std::string& csv_path, const std::string& svg_path,
                    const std::string& title) {
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw IoError("cannot write " + csv_path);
        write_csv(t, f);
        if (!f) throw IoError("write failed: " + csv_path);
    }
    if (!svg_path.empty()) {
        std::ofstream f(svg_path);
        if (!f) throw IoError("cannot write " + svg_path);
        f << svg_lines(t, title);
        if (!f) throw IoError("write failed: " + svg_path);
    }
}

Table table_from_report(const std::string& report_json) {
    Table t;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("report JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("results") || !j["results"].contains("plot")) return t;
    const auto& p = j["results"]["plot"];
    t.columns = p.value("columns", std::vector<std::string>{});
    for (const auto& r : p.value("rows", nlohmann::json::array())) t.rows.push_back(r.get<std::vector<double>>());
    return t;
}

}  // namespace pcl::cli
