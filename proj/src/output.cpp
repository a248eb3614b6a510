#include "tvortex/output.hpp"

#include <cmath>

#include "tvortex/io.hpp"

namespace tvortex::output {

using io::format_double;

std::string trajectory_csv(const TrajectoryRecord& rec) {
    std::string out = "t,j,x,y,lx,ly,qx,qy,W,xix,xiy,speed\n";
    for (std::size_t s = 0; s < rec.samples(); ++s) {
        const auto& c = rec.configurations[s];
        for (std::size_t j = 0; j < c.size(); ++j) {
            const TorusPoint p = c.position(j);
            const Vec2 l = c.lifted[j].vec();
            out += format_double(rec.times[s]) + ',' + std::to_string(j + 1) + ',' + format_double(p.x()) + ',' +
                   format_double(p.y()) + ',' + format_double(l.x) + ',' + format_double(l.y) + ',' +
                   format_double(c.q.x) + ',' + format_double(c.q.y) + ',' + format_double(rec.W_series[s]) + ',' +
                   format_double(rec.xi_series[s].x) + ',' + format_double(rec.xi_series[s].y) + ',' +
                   format_double(rec.speed_series[s][j]) + '\n';
        }
    }
    return out;
}

std::string energy_csv(const PdeRun& run) {
    std::string out = "t,E\n";
    for (std::size_t k = 0; k < run.energy.size(); ++k)
        out += format_double(run.energy_times[k]) + ',' + format_double(run.energy[k]) + '\n';
    return out;
}

std::string tracking_csv(const PdeRun& run) {
    std::string out = "t,j,x,y,degree\n";
    std::size_t frames = 0;
    for (const auto& tr : run.tracks) frames = std::max(frames, tr.times.size());
    for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t j = 0; j < run.tracks.size(); ++j) {
            const auto& tr = run.tracks[j];
            if (f >= tr.times.size()) continue;
            const TorusPoint p = wrap(tr.positions[f]);
            out += format_double(tr.times[f]) + ',' + std::to_string(j + 1) + ',' + format_double(p.x()) + ',' +
                   format_double(p.y()) + ',' + std::to_string(tr.degree) + '\n';
        }
    return out;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::string out = "eps,n,dt,max_err\n";
    for (const auto& r : rows)
        out += format_double(r.epsilon) + ',' + std::to_string(r.n) + ',' + format_double(r.dt) + ',' +
               format_double(r.max_err) + '\n';
    return out;
}

std::vector<std::vector<Vec2>> split_at_seams(const std::vector<Vec2>& lifted) {
    std::vector<std::vector<Vec2>> pieces;
    if (lifted.empty()) return pieces;
    auto cell = [](const Vec2& p) { return std::pair{std::floor(p.x), std::floor(p.y)}; };
    pieces.push_back({wrap(lifted.front()).vec()});
    auto current = cell(lifted.front());
    for (std::size_t k = 1; k < lifted.size(); ++k) {
        const auto c = cell(lifted[k]);
        if (c != current) {
            // finish the old piece at the seam and start the new one there
            const Vec2 a = lifted[k - 1], b = lifted[k];
            double s = 1.0;
            if (c.first != current.first) {
                const double edge = b.x > a.x ? current.first + 1.0 : current.first;
                s = std::min(s, (edge - a.x) / (b.x - a.x));
            }
            if (c.second != current.second) {
                const double edge = b.y > a.y ? current.second + 1.0 : current.second;
                s = std::min(s, (edge - a.y) / (b.y - a.y));
            }
            const Vec2 cross = a + s * (b - a);
            const Vec2 origin_old{current.first, current.second};
            const Vec2 origin_new{c.first, c.second};
            pieces.back().push_back(cross - origin_old);
            pieces.push_back({cross - origin_new});
            current = c;
        }
        pieces.back().push_back(lifted[k] - Vec2{current.first, current.second});
    }
    return pieces;
}

namespace {

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string point(const Vec2& p) { return coord(p.x) + ',' + coord(1.0 - p.y); }

}  // namespace

std::string svg_plot(const std::vector<SvgPath>& paths, const std::string& title) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"600\" height=\"600\">\n";
    std::string safe;
    for (char ch : title) {
        if (ch == '<') safe += "&lt;";
        else if (ch == '>') safe += "&gt;";
        else if (ch == '&') safe += "&amp;";
        else safe += ch;
    }
    out += "<title>" + safe + "</title>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\" stroke=\"black\" stroke-width=\"0.004\"/>\n";
    for (const auto& path : paths) {
        if (path.lifted.empty()) continue;
        const std::string dash = path.degree < 0 ? " stroke-dasharray=\"0.012 0.008\"" : "";
        for (const auto& piece : split_at_seams(path.lifted)) {
            if (piece.size() < 2) continue;
            out += "<polyline fill=\"none\" stroke=\"" + path.colour + "\" stroke-width=\"0.004\"" + dash +
                   " points=\"";
            for (std::size_t k = 0; k < piece.size(); ++k) {
                if (k) out += ' ';
                out += point(piece[k]);
            }
            out += "\"/>\n";
        }
        const Vec2 start = wrap(path.lifted.front()).vec();
        const std::string fill = path.degree > 0 ? path.colour : "white";
        out += "<circle cx=\"" + coord(start.x) + "\" cy=\"" + coord(1.0 - start.y) +
               "\" r=\"0.01\" fill=\"" + fill + "\" stroke=\"" + path.colour + "\" stroke-width=\"0.003\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

namespace {

const char* palette(std::size_t k) {
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colours[k % 6];
}

}  // namespace

std::vector<SvgPath> trajectory_paths(const TrajectoryRecord& rec) {
    std::vector<SvgPath> paths;
    if (rec.samples() == 0) return paths;
    const auto& first = rec.configurations.front();
    for (std::size_t j = 0; j < first.size(); ++j) {
        SvgPath p;
        p.degree = first.degrees[j];
        p.colour = palette(j);
        for (const auto& c : rec.configurations) p.lifted.push_back(c.lifted[j].vec());
        paths.push_back(std::move(p));
    }
    return paths;
}

std::vector<SvgPath> track_paths(const PdeRun& run) {
    std::vector<SvgPath> paths;
    for (std::size_t j = 0; j < run.tracks.size(); ++j) {
        SvgPath p;
        p.degree = run.tracks[j].degree;
        p.colour = palette(j + 3);
        p.lifted = run.tracks[j].positions;
        paths.push_back(std::move(p));
    }
    return paths;
}

}  // namespace tvortex::output
