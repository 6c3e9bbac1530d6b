// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "occtrack/association.hpp"
#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"
#include "occtrack/metrics.hpp"
#include "occtrack/occlusion.hpp"
#include "occtrack/text.hpp"

namespace occtrack {

/// MOTChallenge class id of pedestrians.
inline constexpr int kPedestrianClass = 1;

/// One parsed detection row. `ordinal` is the row's position among the rows of its frame, in file order.
struct DetectionRow {
    Detection detection;
    int ordinal = 0;
    bool has_score_column = false;
    std::size_t line = 0;
};

namespace detail {

struct MotBox {
    int frame = 0;
    int id = 0;
    BoundingBox box;
    double conf = 0.0;
};

inline MotBox parse_mot_prefix(const std::vector<std::string_view>& f, std::size_t line) {
    MotBox m;
    const long frame = text::to_long(f[0], line, "frame");
    if (frame < 1) {
        throw ParseError(line, "frame must be >= 1");
    }
    m.frame = static_cast<int>(frame);
    m.id = static_cast<int>(text::to_long(f[1], line, "id"));
    const double left = text::to_double(f[2], line, "bb_left");
    const double top = text::to_double(f[3], line, "bb_top");
    const double width = text::to_double(f[4], line, "bb_width");
    const double height = text::to_double(f[5], line, "bb_height");
    if (!(width > 0.0) || !(height > 0.0)) {
        throw ParseError(line, "box width and height must be positive");
    }
    m.box = BoundingBox::from_tlwh(left, top, width, height);
    m.conf = text::to_double(f[6], line, "conf");
    return m;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (text::blank(line)) {
            continue;
        }
        fn(text::split(line, ','), number);
    }
}

}  // namespace detail

/**
 * Reads "frame,id,left,top,width,height,conf[,x,y,z[,occlusion_score]]"
 * rows. Rows keep file order; confidence and the optional 11th column must
 * lie in [0,1].
 */
inline std::vector<DetectionRow> parse_detection_rows(std::istream& in) {
    std::vector<DetectionRow> rows;
    std::map<int, int> per_frame;
    detail::for_each_line(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() != 7 && f.size() != 10 && f.size() != 11) {
            throw ParseError(line, "expected 7, 10 or 11 fields, got " + std::to_string(f.size()));
        }
        const detail::MotBox m = detail::parse_mot_prefix(f, line);
        if (!(m.conf >= 0.0 && m.conf <= 1.0)) {
            throw ParseError(line, "confidence must lie in [0,1]");
        }
        for (std::size_t i = 7; i < std::min<std::size_t>(f.size(), 10); ++i) {
            text::to_double(f[i], line, "world coordinate");
        }
        DetectionRow r;
        r.line = line;
        r.detection.frame = m.frame;
        r.detection.box = m.box;
        r.detection.confidence = m.conf;
        if (f.size() == 11) {
            const double s = text::to_double(f[10], line, "occlusion score");
            if (!(s >= 0.0 && s <= 1.0)) {
                throw ParseError(line, "occlusion score must lie in [0,1]");
            }
            r.detection.occlusion_score = s;
            r.has_score_column = true;
        }
        r.ordinal = per_frame[m.frame]++;
        rows.push_back(std::move(r));
    });
    return rows;
}

/// Groups rows by ascending frame, dropping rows below min_confidence; frames keep file order within.
inline std::vector<FrameObservations> group_detections(const std::vector<DetectionRow>& rows,
                                                       double min_confidence = 0.0) {
    std::map<int, FrameObservations> frames;
    for (const DetectionRow& r : rows) {
        FrameObservations& f = frames[r.detection.frame];
        f.frame = r.detection.frame;
        if (r.detection.confidence >= min_confidence) {
            f.detections.push_back(r.detection);
        }
    }
    std::vector<FrameObservations> out;
    for (auto& [frame, obs] : frames) {
        out.push_back(std::move(obs));
    }
    return out;
}

inline std::vector<FrameObservations> parse_detections(std::istream& in, double min_confidence = 0.0) {
    return group_detections(parse_detection_rows(in), min_confidence);
}

/// Dense frame list 1..last_frame with empty entries where the input had none.
inline std::vector<FrameObservations> fill_frame_gaps(const std::vector<FrameObservations>& frames, int last_frame) {
    std::vector<FrameObservations> out(static_cast<std::size_t>(std::max(last_frame, 0)));
    for (int f = 1; f <= last_frame; ++f) {
        out[static_cast<std::size_t>(f - 1)].frame = f;
    }
    for (const FrameObservations& f : frames) {
        if (f.frame < 1 || f.frame > last_frame) {
            throw InputError("frame " + std::to_string(f.frame) + " outside 1.." + std::to_string(last_frame));
        }
        out[static_cast<std::size_t>(f.frame - 1)] = f;
    }
    return out;
}

struct GtRow {
    int frame = 0;
    int identity = 0;
    BoundingBox box;
    double conf = 1.0;
    int cls = kPedestrianClass;
    double visibility = 1.0;

    bool evaluated() const { return conf != 0.0 && cls == kPedestrianClass; }
};

/// "frame,id,left,top,width,height,conf,class,visibility" rows.
inline std::vector<GtRow> parse_ground_truth(std::istream& in) {
    std::vector<GtRow> rows;
    detail::for_each_line(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() < 9) {
            throw ParseError(line, "ground truth needs 9 fields (frame,id,left,top,width,height,conf,class,"
                                   "visibility), got " +
                                       std::to_string(f.size()));
        }
        if (f.size() > 9) {
            throw ParseError(line, "too many fields for a ground-truth row");
        }
        const detail::MotBox m = detail::parse_mot_prefix(f, line);
        GtRow r;
        r.frame = m.frame;
        r.identity = m.id;
        r.box = m.box;
        r.conf = m.conf;
        r.cls = static_cast<int>(text::to_long(f[7], line, "class"));
        r.visibility = text::to_double(f[8], line, "visibility");
        if (!(r.visibility >= 0.0 && r.visibility <= 1.0)) {
            throw ParseError(line, "visibility must lie in [0,1]");
        }
        rows.push_back(r);
    });
    return rows;
}

/// Pedestrian annotations of one frame (all confidences), for occlusion-map construction.
inline std::vector<AnnotatedBox> annotations_at(const std::vector<GtRow>& rows, int frame) {
    std::vector<AnnotatedBox> out;
    for (const GtRow& r : rows) {
        if (r.frame == frame && r.cls == kPedestrianClass) {
            out.push_back({r.box, r.visibility, r.identity});
        }
    }
    return out;
}

struct ResultRow {
    int frame = 0;
    int track_id = 0;
    BoundingBox box;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Tracker results in frame-major, id-ascending order.
inline std::vector<ResultRow> result_rows(const std::vector<FrameResult>& results) {
    std::vector<ResultRow> rows;
    for (const FrameResult& r : results) {
        for (const TrackOutput& o : r.outputs) {
            rows.push_back({r.frame, o.track_id, o.box});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return a.frame != b.frame ? a.frame < b.frame : a.track_id < b.track_id;
    });
    return rows;
}

/// "frame,id,left,top,width,height,1,-1,-1,-1" with two decimals per box value.
inline std::string write_results(const std::vector<ResultRow>& rows) {
    std::string out;
    for (const ResultRow& r : rows) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.track_id) + ',' + text::fixed2(r.box.left) + ',' +
               text::fixed2(r.box.top) + ',' + text::fixed2(r.box.width()) + ',' + text::fixed2(r.box.height()) +
               ",1,-1,-1,-1\n";
    }
    return out;
}

inline std::vector<ResultRow> parse_results(std::istream& in) {
    std::vector<ResultRow> rows;
    detail::for_each_line(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() < 7 || f.size() > 10) {
            throw ParseError(line, "expected 7 to 10 fields, got " + std::to_string(f.size()));
        }
        const detail::MotBox m = detail::parse_mot_prefix(f, line);
        rows.push_back({m.frame, m.id, m.box});
    });
    return rows;
}

/// Joins evaluated GT rows and result rows into per-frame evaluation input over the union of frames.
inline std::vector<EvalFrame> build_eval_frames(const std::vector<GtRow>& gt, const std::vector<ResultRow>& hyp) {
    std::map<int, EvalFrame> frames;
    for (const GtRow& r : gt) {
        if (r.evaluated()) {
            EvalFrame& f = frames[r.frame];
            f.frame = r.frame;
            f.gt.push_back({r.identity, r.box, r.visibility});
        }
    }
    for (const ResultRow& r : hyp) {
        EvalFrame& f = frames[r.frame];
        f.frame = r.frame;
        f.hyp.push_back({r.track_id, r.box});
    }
    std::vector<EvalFrame> out;
    for (auto& [frame, f] : frames) {
        out.push_back(std::move(f));
    }
    return out;
}

/// Detection rows for a det.txt file: id -1, world coordinates -1, occlusion score in the 11th column.
inline std::string write_detections(const std::vector<FrameObservations>& frames) {
    std::string out;
    for (const FrameObservations& f : frames) {
        for (const Detection& d : f.detections) {
            out += std::to_string(f.frame) + ",-1," + text::fixed2(d.box.left) + ',' + text::fixed2(d.box.top) + ',' +
                   text::fixed2(d.box.width()) + ',' + text::fixed2(d.box.height()) + ',' +
                   text::shortest(d.confidence) + ",-1,-1,-1," + text::shortest(d.occlusion_score) + '\n';
        }
    }
    return out;
}

/// Occlusion map text: "H W" then H lines of W values.
inline OcclusionMap parse_occlusion_map(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    std::vector<std::size_t> numbers;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!text::blank(line)) {
            lines.push_back(line);
            numbers.push_back(n);
        }
    }
    if (lines.empty()) {
        throw ParseError(0, "occlusion map is empty");
    }
    const auto words = [](const std::string& s) {
        std::vector<std::string> w;
        std::istringstream is(s);
        for (std::string t; is >> t;) {
            w.push_back(t);
        }
        return w;
    };
    const auto header = words(lines[0]);
    if (header.size() != 2) {
        throw ParseError(numbers[0], "occlusion map header must be 'H W'");
    }
    const long h = text::to_long(header[0], numbers[0], "height");
    const long w = text::to_long(header[1], numbers[0], "width");
    if (h <= 0 || w <= 0) {
        throw ParseError(numbers[0], "occlusion map dimensions must be positive");
    }
    if (lines.size() != static_cast<std::size_t>(h) + 1) {
        throw ParseError(0, "occlusion map declares " + std::to_string(h) + " rows but has " +
                                std::to_string(lines.size() - 1));
    }
    OcclusionMap map(static_cast<int>(h), static_cast<int>(w));
    for (long y = 0; y < h; ++y) {
        const std::size_t ln = numbers[static_cast<std::size_t>(y) + 1];
        const auto row = words(lines[static_cast<std::size_t>(y) + 1]);
        if (row.size() != static_cast<std::size_t>(w)) {
            throw ParseError(ln, "expected " + std::to_string(w) + " values, got " + std::to_string(row.size()));
        }
        for (long x = 0; x < w; ++x) {
            const double v = text::to_double(row[static_cast<std::size_t>(x)], ln, "occlusion value");
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ParseError(ln, "occlusion values must lie in [0,1]");
            }
            map.set(static_cast<int>(x), static_cast<int>(y), v);
        }
    }
    return map;
}

inline std::string write_occlusion_map(const OcclusionMap& map) {
    std::string out = std::to_string(map.height()) + ' ' + std::to_string(map.width()) + '\n';
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            out += (x == 0 ? "" : " ") + text::shortest(map.at(x, y));
        }
        out += '\n';
    }
    return out;
}

}  // namespace occtrack
