#include "aclab/zeroset.hpp"

#include "aclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace aclab {

std::size_t ZeroSet::vertex_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.size();
    return n;
}

namespace {

struct Segment {
    std::size_t edge[2];
    bool used = false;
};

}  // namespace

ZeroSet zero_set_extract(const ScalarField2D& u) {
    const Grid2D& g = u.grid();
    const std::size_t side = g.side();
    auto positive = [&](std::size_t i, std::size_t j) { return u(i, j) > 0.0; };

    // Edge ids: 2 * node for the edge to the right, 2 * node + 1 for the edge upward.
    std::unordered_map<std::size_t, Vec2> crossing;
    auto edge_point = [&](std::size_t i, std::size_t j, bool upward) {
        const std::size_t id = 2 * g.index(i, j) + (upward ? 1 : 0);
        if (!crossing.count(id)) {
            const std::size_t i2 = upward ? i : i + 1, j2 = upward ? j + 1 : j;
            const double a = u(i, j), b = u(i2, j2);
            const double w = a / (a - b);
            crossing[id] = Vec2(g.coord(i) + w * (g.coord(i2) - g.coord(i)),
                                g.coord(j) + w * (g.coord(j2) - g.coord(j)));
        }
        return id;
    };

    std::vector<Segment> segs;
    for (std::size_t j = 0; j + 1 < side; ++j)
        for (std::size_t i = 0; i + 1 < side; ++i) {
            const bool p00 = positive(i, j), p10 = positive(i + 1, j);
            const bool p11 = positive(i + 1, j + 1), p01 = positive(i, j + 1);
            std::vector<std::size_t> e;
            // Edges in counterclockwise order: bottom, right, top, left.
            if (p00 != p10) e.push_back(edge_point(i, j, false));
            if (p10 != p11) e.push_back(edge_point(i + 1, j, true));
            if (p01 != p11) e.push_back(edge_point(i, j + 1, false));
            if (p00 != p01) e.push_back(edge_point(i, j, true));
            if (e.size() == 2) {
                segs.push_back({{e[0], e[1]}});
            } else if (e.size() == 4) {
                const double centre = 0.25 * (u(i, j) + u(i + 1, j) + u(i + 1, j + 1) + u(i, j + 1));
                // Join the edges around the corners whose sign differs from the centre.
                if ((centre > 0.0) == p00) {
                    segs.push_back({{e[0], e[1]}});
                    segs.push_back({{e[2], e[3]}});
                } else {
                    segs.push_back({{e[3], e[0]}});
                    segs.push_back({{e[1], e[2]}});
                }
            }
        }
    if (segs.empty()) throw DomainError("zero_set_extract: field has no zero crossing");

    std::unordered_multimap<std::size_t, std::size_t> by_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge.emplace(segs[s].edge[0], s);
        by_edge.emplace(segs[s].edge[1], s);
    }
    auto next_segment = [&](std::size_t edge, std::size_t from) -> long {
        auto range = by_edge.equal_range(edge);
        for (auto it = range.first; it != range.second; ++it)
            if (it->second != from && !segs[it->second].used) return static_cast<long>(it->second);
        return -1;
    };

    ZeroSet out;
    // Start chains at open ends first so components come out whole.
    std::vector<std::size_t> order(segs.size());
    for (std::size_t s = 0; s < segs.size(); ++s) order[s] = s;
    std::stable_partition(order.begin(), order.end(), [&](std::size_t s) {
        return by_edge.count(segs[s].edge[0]) == 1 || by_edge.count(segs[s].edge[1]) == 1;
    });
    for (std::size_t start : order) {
        if (segs[start].used) continue;
        Segment& s0 = segs[start];
        s0.used = true;
        std::size_t tail = by_edge.count(s0.edge[0]) == 1 ? s0.edge[0] : s0.edge[1];
        std::size_t head = tail == s0.edge[0] ? s0.edge[1] : s0.edge[0];
        Polyline line{crossing[tail], crossing[head]};
        std::size_t current = start;
        while (true) {
            const long nxt = next_segment(head, current);
            if (nxt < 0) break;
            Segment& sn = segs[static_cast<std::size_t>(nxt)];
            sn.used = true;
            head = sn.edge[0] == head ? sn.edge[1] : sn.edge[0];
            line.push_back(crossing[head]);
            current = static_cast<std::size_t>(nxt);
        }
        out.components.push_back(std::move(line));
    }
    return out;
}

ZeroSetDeviation zero_set_deviation(const ZeroSet& zero, const TubularMap& map, double d_max) {
    if (zero.components.empty()) throw InvalidArgument("zero_set_deviation: empty zero set");
    ZeroSetDeviation dev;
    std::vector<double> env;
    for (const auto& line : zero.components)
        for (const Vec2& p : line) {
            const TubePoint tp = map.locate(p);
            const double d = GeneratingCurve::d_gamma(tp.foot);
            dev.series.emplace_back(d, tp.t);
            if (d <= d_max) dev.max_dev = std::max(dev.max_dev, std::abs(tp.t));
            const std::size_t bin = static_cast<std::size_t>(std::floor(d - 1.0));
            if (bin >= env.size()) env.resize(bin + 1, 0.0);
            env[bin] = std::max(env[bin], std::abs(tp.t));
        }
    for (std::size_t b = 0; b < env.size(); ++b) dev.envelope.emplace_back(1.0 + b + 0.5, env[b]);
    return dev;
}

}  // namespace aclab
