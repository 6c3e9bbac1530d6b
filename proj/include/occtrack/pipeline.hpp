// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "occtrack/appearance.hpp"
#include "occtrack/association.hpp"
#include "occtrack/metrics.hpp"
#include "occtrack/simulator.hpp"
#include "occtrack/text.hpp"

namespace occtrack {

/// Runs one tracker over a dense frame sequence.
inline std::vector<FrameResult> run_tracker(const std::vector<FrameObservations>& frames,
                                            const TrackerConfig& config) {
    Tracker tracker(config);
    std::vector<FrameResult> results;
    results.reserve(frames.size());
    for (const FrameObservations& f : frames) {
        results.push_back(tracker.step(f));
    }
    return results;
}

/// Ground truth in MOT gt layout; records with no detection get conf 0.
inline std::string write_ground_truth(const std::vector<GtRecord>& records) {
    std::string out;
    for (const GtRecord& r : records) {
        out += std::to_string(r.frame) + ',' + std::to_string(r.identity) + ',' + text::fixed2(r.box.left) + ',' +
               text::fixed2(r.box.top) + ',' + text::fixed2(r.box.width()) + ',' + text::fixed2(r.box.height()) +
               ',' + (r.detectable ? "1" : "0") + ",1," + text::shortest(r.visibility) + '\n';
    }
    return out;
}

/// Joins simulator ground truth (detectable records) with tracker outputs, frames 1..duration.
inline std::vector<EvalFrame> simulation_eval_frames(const SimulationOutput& sim, const std::vector<FrameResult>& results,
                                                     int duration) {
    std::vector<EvalFrame> frames = evaluation_frames(sim.ground_truth, duration);
    for (const FrameResult& r : results) {
        if (r.frame >= 1 && r.frame <= duration) {
            for (const TrackOutput& o : r.outputs) {
                frames[static_cast<std::size_t>(r.frame - 1)].hyp.push_back({o.track_id, o.box});
            }
        }
    }
    return frames;
}

/// Crossing-run summary: metrics plus the state of the occludee's track just before it reappears.
struct CrossingOutcome {
    EvalReport report;
    std::optional<int> occludee_track;
    /// Cosine distances to the occludee's anchor, taken after the last frame without a detection.
    double long_cos_to_anchor = 0.0;
    double short_cos_to_anchor = 0.0;
    double short_cos_to_occluder = 0.0;
};

/**
 * Runs the tracker over a scenario whose first agent is occluded by a single
 * event, and reports metrics plus the embedding drift of that agent's track.
 */
inline CrossingOutcome run_crossing(const Scenario& s, const TrackerConfig& config) {
    const SimulationOutput sim = generate(s);
    const std::map<int, Embedding> anchors = scenario_anchors(s);
    const AgentSpec& occludee = s.agents.front();
    const OcclusionEvent* event = occludee.events.empty() ? nullptr : &occludee.events.front();

    int last_dark = 0;
    if (event != nullptr) {
        for (int f = event->start; f <= event->end(); ++f) {
            if (agent_visibility(occludee, f) < s.noise.drop_threshold) {
                last_dark = f;
            }
        }
    }

    CrossingOutcome out;
    Tracker tracker(config);
    std::vector<FrameResult> results;
    for (const FrameObservations& f : sim.observations) {
        results.push_back(tracker.step(f));
        if (event != nullptr && f.frame == event->start - 1) {
            double best = 0.0;
            const BoundingBox truth = agent_box(occludee, f.frame);
            for (const TrackOutput& o : results.back().outputs) {
                const double v = iou(o.box, truth);
                if (v > best) {
                    best = v;
                    out.occludee_track = o.track_id;
                }
            }
        }
        if (f.frame == last_dark && out.occludee_track) {
            for (const Track& t : tracker.tracks()) {
                if (t.id == *out.occludee_track && t.has_appearance()) {
                    const Embedding& a = anchors.at(occludee.identity);
                    out.long_cos_to_anchor = cosine_distance(t.embeddings.long_term, a);
                    out.short_cos_to_anchor = cosine_distance(t.embeddings.short_term, a);
                    if (event->occluder != 0) {
                        out.short_cos_to_occluder =
                            cosine_distance(t.embeddings.short_term, anchors.at(event->occluder));
                    }
                }
            }
        }
    }
    out.report = accumulate(simulation_eval_frames(sim, results, s.duration));
    return out;
}

/// Default configuration with stage two reading the short-term embedding.
inline TrackerConfig short_term_ablation(TrackerConfig config = {}) {
    config.association.stage2_embedding = Stage2Embedding::Short;
    return config;
}

}  // namespace occtrack
