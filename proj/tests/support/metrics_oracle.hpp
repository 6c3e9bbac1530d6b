// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "occtrack/metrics.hpp"

namespace occtrack::oracle {

// Independent oracle: per-frame exhaustive matching and exhaustive global identity mapping.
struct Counts {
    long matches = 0, fp = 0, fn = 0, ids = 0, idtp = 0, gt = 0, hyp = 0;
};

inline void best_frame_matching(const EvalFrame& f, double thr, const std::vector<char>& gt_fixed,
                                const std::vector<char>& hyp_fixed, std::size_t g, std::vector<int>& current,
                                std::vector<int>& best, std::size_t& best_count, double& best_cost,
                                std::size_t count, double cost, std::vector<char>& used) {
    if (g == f.gt.size()) {
        if (count > best_count || (count == best_count && cost < best_cost)) {
            best = current;
            best_count = count;
            best_cost = cost;
        }
        return;
    }
    best_frame_matching(f, thr, gt_fixed, hyp_fixed, g + 1, current, best, best_count, best_cost, count, cost, used);
    if (gt_fixed[g]) {
        return;
    }
    for (std::size_t h = 0; h < f.hyp.size(); ++h) {
        const double o = iou(f.gt[g].box, f.hyp[h].box);
        if (used[h] || hyp_fixed[h] || o < thr) {
            continue;
        }
        used[h] = 1;
        current[g] = static_cast<int>(h);
        best_frame_matching(f, thr, gt_fixed, hyp_fixed, g + 1, current, best, best_count, best_cost, count + 1,
                            cost + 1.0 - o, used);
        current[g] = -1;
        used[h] = 0;
    }
}

inline Counts clear_mot_and_identity(const std::vector<EvalFrame>& frames, double thr) {
    Counts out;
    std::map<int, int> last;
    for (const EvalFrame& f : frames) {
        std::vector<int> assigned(f.gt.size(), -1);
        std::vector<char> gt_fixed(f.gt.size(), 0), hyp_fixed(f.hyp.size(), 0);
        for (std::size_t g = 0; g < f.gt.size(); ++g) {
            const auto it = last.find(f.gt[g].identity);
            for (std::size_t h = 0; it != last.end() && h < f.hyp.size(); ++h) {
                if (f.hyp[h].track_id == it->second && iou(f.gt[g].box, f.hyp[h].box) >= thr) {
                    assigned[g] = static_cast<int>(h);
                    gt_fixed[g] = hyp_fixed[h] = 1;
                }
            }
        }
        std::vector<int> current(f.gt.size(), -1), best(f.gt.size(), -1);
        std::vector<char> used(f.hyp.size(), 0);
        std::size_t best_count = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        best_frame_matching(f, thr, gt_fixed, hyp_fixed, 0, current, best, best_count, best_cost, 0, 0.0, used);
        long matched = 0;
        for (std::size_t g = 0; g < f.gt.size(); ++g) {
            const int h = gt_fixed[g] ? assigned[g] : best[g];
            if (h < 0) {
                ++out.fn;
                continue;
            }
            ++matched;
            const int id = f.gt[g].identity;
            const int tid = f.hyp[static_cast<std::size_t>(h)].track_id;
            if (last.contains(id) && last[id] != tid) {
                ++out.ids;
            }
            last[id] = tid;
        }
        out.matches += matched;
        out.fp += static_cast<long>(f.hyp.size()) - matched;
        out.gt += static_cast<long>(f.gt.size());
        out.hyp += static_cast<long>(f.hyp.size());
    }

    std::vector<int> gids, hids;
    for (const EvalFrame& f : frames) {
        for (const GtEntry& g : f.gt) {
            if (std::find(gids.begin(), gids.end(), g.identity) == gids.end()) gids.push_back(g.identity);
        }
        for (const HypEntry& h : f.hyp) {
            if (std::find(hids.begin(), hids.end(), h.track_id) == hids.end()) hids.push_back(h.track_id);
        }
    }
    const auto overlap = [&](int gid, int hid) {
        long n = 0;
        for (const EvalFrame& f : frames) {
            for (const GtEntry& g : f.gt) {
                for (const HypEntry& h : f.hyp) {
                    n += (g.identity == gid && h.track_id == hid && iou(g.box, h.box) >= thr) ? 1 : 0;
                }
            }
        }
        return n;
    };
    // Every injective partial map from gt ids into hyp ids.
    std::vector<int> pick(gids.size(), -1);
    long best_tp = 0;
    const auto search = [&](auto&& self, std::size_t i, long tp) -> void {
        if (i == gids.size()) {
            best_tp = std::max(best_tp, tp);
            return;
        }
        self(self, i + 1, tp);
        for (std::size_t h = 0; h < hids.size(); ++h) {
            if (std::find(pick.begin(), pick.end(), static_cast<int>(h)) != pick.end()) continue;
            pick[i] = static_cast<int>(h);
            self(self, i + 1, tp + overlap(gids[i], hids[h]));
            pick[i] = -1;
        }
    };
    search(search, 0, 0);
    out.idtp = best_tp;
    return out;
}

}  // namespace occtrack::oracle
