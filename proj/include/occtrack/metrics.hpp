// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "occtrack/assignment.hpp"
#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"

namespace occtrack {

inline constexpr double kDefaultIouThreshold = 0.5;

struct GtEntry {
    int identity = 0;
    BoundingBox box;
    double visibility = 1.0;
};

struct HypEntry {
    int track_id = 0;
    BoundingBox box;
};

struct EvalFrame {
    int frame = 0;
    std::vector<GtEntry> gt;
    std::vector<HypEntry> hyp;
};

/// Half-open visibility interval [lo, hi); the last band of a partition also takes hi.
struct VisibilityBand {
    double lo = 0.0;
    double hi = 1.0;
};

struct BandReport {
    VisibilityBand band;
    long gt = 0;
    long matches = 0;
    long fn = 0;
    long ids = 0;
};

struct EvalReport {
    long frames = 0;
    long gt = 0;
    long hyp = 0;
    long matches = 0;
    long fp = 0;
    long fn = 0;
    long ids = 0;
    double mota = 1.0;
    long idtp = 0;
    long idfp = 0;
    long idfn = 0;
    double idf1 = 1.0;
    std::vector<BandReport> bands;
};

/// 1 - (FP + FN + IDs) / GT. With no GT boxes: 1 when error-free, otherwise -inf.
inline double mota_from_counts(long fp, long fn, long ids, long gt) {
    if (gt == 0) {
        return (fp + fn + ids) == 0 ? 1.0 : -std::numeric_limits<double>::infinity();
    }
    return 1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(gt);
}

/// 2 IDTP / (2 IDTP + IDFP + IDFN); 1 when both sides are empty.
inline double idf1_from_counts(long idtp, long idfp, long idfn) {
    const long denom = 2 * idtp + idfp + idfn;
    return denom == 0 ? 1.0 : 2.0 * static_cast<double>(idtp) / static_cast<double>(denom);
}

namespace detail {

inline void check_iou_threshold(double t) {
    if (!(t > 0.0 && t <= 1.0)) {
        throw InputError("IOU threshold must lie in (0,1]");
    }
}

}  // namespace detail

/**
 * One-to-one GT/hypothesis correspondence for a frame, as (gt index, hyp index)
 * pairs ascending by gt index.
 *
 * Pairs listed in `previous` (gt identity -> track id) are kept first when
 * both are present and still overlap at iou_threshold. The remaining boxes
 * are matched with maximum cardinality and then minimum total (1 - IOU).
 */
inline std::vector<std::pair<std::size_t, std::size_t>> match_frame(const std::vector<GtEntry>& gt,
                                                                    const std::vector<HypEntry>& hyp,
                                                                    double iou_threshold = kDefaultIouThreshold,
                                                                    const std::map<int, int>& previous = {}) {
    detail::check_iou_threshold(iou_threshold);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);

    for (std::size_t g = 0; g < gt.size(); ++g) {
        const auto it = previous.find(gt[g].identity);
        if (it == previous.end()) {
            continue;
        }
        for (std::size_t h = 0; h < hyp.size(); ++h) {
            if (!hyp_used[h] && hyp[h].track_id == it->second && iou(gt[g].box, hyp[h].box) >= iou_threshold) {
                pairs.emplace_back(g, h);
                gt_used[g] = 1;
                hyp_used[h] = 1;
                break;
            }
        }
    }

    std::vector<std::size_t> rows, cols;
    for (std::size_t g = 0; g < gt.size(); ++g) {
        if (!gt_used[g]) {
            rows.push_back(g);
        }
    }
    for (std::size_t h = 0; h < hyp.size(); ++h) {
        if (!hyp_used[h]) {
            cols.push_back(h);
        }
    }
    CostMatrix costs(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double o = iou(gt[rows[r]].box, hyp[cols[c]].box);
            if (o >= iou_threshold) {
                costs.set(r, c, 1.0 - o);
            }
        }
    }
    for (const auto& [r, c] : solve_assignment(costs).matches) {
        pairs.emplace_back(rows[r], cols[c]);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

namespace detail {

/// Per-GT-box outcome of CLEAR-MOT matching.
struct GtOutcome {
    double visibility = 1.0;
    bool matched = false;
    bool switched = false;
};

struct ClearMotTrace {
    std::vector<GtOutcome> outcomes;
    long fp = 0;
    long hyp = 0;
};

inline void validate_frames(const std::vector<EvalFrame>& frames) {
    std::optional<int> last;
    for (const EvalFrame& f : frames) {
        if (last && f.frame <= *last) {
            throw InputError("evaluation frames must be strictly increasing");
        }
        last = f.frame;
        std::set<int> gt_ids, hyp_ids;
        for (const GtEntry& g : f.gt) {
            if (!gt_ids.insert(g.identity).second) {
                throw InputError("duplicate ground-truth identity " + std::to_string(g.identity) + " in frame " +
                                 std::to_string(f.frame));
            }
            if (!(g.visibility >= 0.0 && g.visibility <= 1.0)) {
                throw InputError("visibility must lie in [0,1]");
            }
        }
        for (const HypEntry& h : f.hyp) {
            if (!hyp_ids.insert(h.track_id).second) {
                throw InputError("duplicate track id " + std::to_string(h.track_id) + " in frame " +
                                 std::to_string(f.frame));
            }
        }
    }
}

inline ClearMotTrace clear_mot_trace(const std::vector<EvalFrame>& frames, double iou_threshold) {
    check_iou_threshold(iou_threshold);
    ClearMotTrace trace;
    std::map<int, int> last_match;
    for (const EvalFrame& f : frames) {
        const auto pairs = match_frame(f.gt, f.hyp, iou_threshold, last_match);
        std::vector<std::optional<std::size_t>> hyp_of(f.gt.size());
        for (const auto& [g, h] : pairs) {
            hyp_of[g] = h;
        }
        for (std::size_t g = 0; g < f.gt.size(); ++g) {
            GtOutcome o;
            o.visibility = f.gt[g].visibility;
            if (hyp_of[g]) {
                o.matched = true;
                const int id = f.gt[g].identity;
                const int tid = f.hyp[*hyp_of[g]].track_id;
                const auto it = last_match.find(id);
                o.switched = it != last_match.end() && it->second != tid;
                last_match[id] = tid;
            }
            trace.outcomes.push_back(o);
        }
        trace.hyp += static_cast<long>(f.hyp.size());
        trace.fp += static_cast<long>(f.hyp.size() - pairs.size());
    }
    return trace;
}

struct IdentityCounts {
    long idtp = 0;
    long gt = 0;
    long hyp = 0;
};

/// Global identity matching: one-to-one gt identity <-> track id maximizing the overlap count.
inline IdentityCounts identity_counts(const std::vector<EvalFrame>& frames, double iou_threshold) {
    std::map<int, std::size_t> gt_index, hyp_index;
    IdentityCounts out;
    for (const EvalFrame& f : frames) {
        for (const GtEntry& g : f.gt) {
            gt_index.emplace(g.identity, gt_index.size());
        }
        for (const HypEntry& h : f.hyp) {
            hyp_index.emplace(h.track_id, hyp_index.size());
        }
        out.gt += static_cast<long>(f.gt.size());
        out.hyp += static_cast<long>(f.hyp.size());
    }
    std::vector<std::vector<long>> overlap(gt_index.size(), std::vector<long>(hyp_index.size(), 0));
    for (const EvalFrame& f : frames) {
        for (const GtEntry& g : f.gt) {
            for (const HypEntry& h : f.hyp) {
                if (iou(g.box, h.box) >= iou_threshold) {
                    ++overlap[gt_index.at(g.identity)][hyp_index.at(h.track_id)];
                }
            }
        }
    }
    // cost = top - overlap under threshold top: minimizing sum(cost - top) maximizes total overlap.
    long top = 0;
    for (const auto& row : overlap) {
        for (long o : row) {
            top = std::max(top, o);
        }
    }
    CostMatrix costs(gt_index.size(), hyp_index.size());
    for (std::size_t r = 0; r < gt_index.size(); ++r) {
        for (std::size_t c = 0; c < hyp_index.size(); ++c) {
            if (overlap[r][c] > 0) {
                costs.set(r, c, static_cast<double>(top - overlap[r][c]));
            }
        }
    }
    for (const auto& [r, c] : solve_assignment(costs, static_cast<double>(top)).matches) {
        out.idtp += overlap[r][c];
    }
    return out;
}

inline void check_bands(const std::vector<VisibilityBand>& bands) {
    if (bands.empty()) {
        throw InputError("at least one visibility band is required");
    }
    std::vector<VisibilityBand> sorted = bands;
    std::sort(sorted.begin(), sorted.end(),
              [](const VisibilityBand& a, const VisibilityBand& b) { return a.lo < b.lo; });
    for (const VisibilityBand& b : sorted) {
        if (!(b.lo >= 0.0 && b.hi <= 1.0 && b.lo < b.hi)) {
            throw InputError("visibility bands must be non-empty intervals inside [0,1]");
        }
    }
    if (sorted.front().lo != 0.0 || sorted.back().hi != 1.0) {
        throw InputError("visibility bands must cover [0,1]");
    }
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].lo < sorted[i - 1].hi) {
            throw InputError("visibility bands overlap");
        }
        if (sorted[i].lo > sorted[i - 1].hi) {
            throw InputError("visibility bands leave a gap");
        }
    }
}

inline bool in_band(double v, const VisibilityBand& b) {
    return (v >= b.lo && v < b.hi) || (b.hi == 1.0 && v == 1.0);
}

}  // namespace detail

/// CLEAR-MOT counts, MOTA and IDF1 over an ordered sequence.
inline EvalReport accumulate(const std::vector<EvalFrame>& frames, double iou_threshold = kDefaultIouThreshold) {
    detail::validate_frames(frames);
    const detail::ClearMotTrace trace = detail::clear_mot_trace(frames, iou_threshold);
    EvalReport r;
    r.frames = static_cast<long>(frames.size());
    r.gt = static_cast<long>(trace.outcomes.size());
    r.hyp = trace.hyp;
    r.fp = trace.fp;
    for (const detail::GtOutcome& o : trace.outcomes) {
        r.matches += o.matched ? 1 : 0;
        r.fn += o.matched ? 0 : 1;
        r.ids += o.switched ? 1 : 0;
    }
    r.mota = mota_from_counts(r.fp, r.fn, r.ids, r.gt);

    const detail::IdentityCounts ic = detail::identity_counts(frames, iou_threshold);
    r.idtp = ic.idtp;
    r.idfn = ic.gt - ic.idtp;
    r.idfp = ic.hyp - ic.idtp;
    r.idf1 = idf1_from_counts(r.idtp, r.idfp, r.idfn);
    return r;
}

/// GT boxes, matches, FN and IDs attributed to the visibility band of the GT box in that frame.
inline std::vector<BandReport> stratify_by_visibility(const std::vector<EvalFrame>& frames,
                                                      const std::vector<VisibilityBand>& bands,
                                                      double iou_threshold = kDefaultIouThreshold) {
    detail::check_bands(bands);
    detail::validate_frames(frames);
    const detail::ClearMotTrace trace = detail::clear_mot_trace(frames, iou_threshold);
    std::vector<BandReport> out;
    for (const VisibilityBand& b : bands) {
        BandReport br;
        br.band = b;
        for (const detail::GtOutcome& o : trace.outcomes) {
            if (!detail::in_band(o.visibility, b)) {
                continue;
            }
            ++br.gt;
            br.matches += o.matched ? 1 : 0;
            br.fn += o.matched ? 0 : 1;
            br.ids += o.switched ? 1 : 0;
        }
        out.push_back(br);
    }
    return out;
}

/// Parses "lo:hi,lo:hi,..." into bands, for example "0:0.5,0.5:1".
inline std::vector<VisibilityBand> parse_bands(const std::string& list) {
    std::vector<VisibilityBand> bands;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const std::size_t end = std::min(list.find(',', pos), list.size());
        const std::string item = list.substr(pos, end - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
            throw InputError("band '" + item + "' is not of the form lo:hi");
        }
        try {
            std::size_t used_lo = 0, used_hi = 0;
            const std::string lo = item.substr(0, colon);
            const std::string hi = item.substr(colon + 1);
            VisibilityBand b{std::stod(lo, &used_lo), std::stod(hi, &used_hi)};
            if (used_lo != lo.size() || used_hi != hi.size()) {
                throw InputError("trailing characters");
            }
            bands.push_back(b);
        } catch (const std::logic_error&) {
            throw InputError("band '" + item + "' is not numeric");
        }
        pos = end + 1;
    }
    detail::check_bands(bands);
    return bands;
}

}  // namespace occtrack
