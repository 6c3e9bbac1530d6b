// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "occtrack/appearance.hpp"
#include "occtrack/assignment.hpp"
#include "occtrack/core_types.hpp"
#include "occtrack/error.hpp"
#include "occtrack/motion.hpp"
#include "occtrack/track.hpp"

namespace occtrack {

/// Which track embedding the second (rescue) stage compares against.
enum class Stage2Embedding { Long, Short };

struct AssociationParams {
    double gamma = 0.8;
    double lambda = 0.9;
    double stage1_threshold = 0.7;
    double stage2_cos_threshold = 0.3;
    int keep_alive = 30;
    double gate_chi2 = kChi2Gate4;
    int tentative_confirm = 2;
    Stage2Embedding stage2_embedding = Stage2Embedding::Long;
    /// Weight of normalized Mahalanobis in the stage-two cost; 0 makes motion a pure gate.
    double stage2_motion_weight = 0.0;
    /// Dormant tracks take part in stage one as well as stage two.
    bool stage_one_includes_dormant = true;

    void validate() const {
        const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!unit(gamma) || !unit(lambda)) {
            throw InputError("gamma and lambda must lie in [0,1]");
        }
        if (!(stage1_threshold >= 0.0) || !(stage2_cos_threshold >= 0.0)) {
            throw InputError("matching thresholds must be nonnegative");
        }
        if (keep_alive < 0) {
            throw InputError("keep_alive must be nonnegative");
        }
        if (!(gate_chi2 > 0.0)) {
            throw InputError("gate threshold must be positive");
        }
        if (tentative_confirm < 1) {
            throw InputError("tentative_confirm must be at least 1");
        }
        if (!unit(stage2_motion_weight)) {
            throw InputError("stage2_motion_weight must lie in [0,1]");
        }
    }
};

struct TrackerConfig {
    AssociationParams association;
    UpdateParams appearance;
    MotionParams motion;
    double min_confidence = 0.4;

    void validate() const {
        association.validate();
        if (!(appearance.alpha >= 0.0)) {
            throw InputError("alpha must be nonnegative");
        }
        if (!(appearance.occlusion_threshold >= 0.0 && appearance.occlusion_threshold <= 1.0)) {
            throw InputError("occlusion threshold must lie in [0,1]");
        }
        if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
            throw InputError("min_confidence must lie in [0,1]");
        }
        if (!(motion.std_weight_position > 0.0) || !(motion.std_weight_velocity > 0.0)) {
            throw InputError("motion noise weights must be positive");
        }
    }
};

/// D = gamma * (lambda * d_cos + (1 - lambda) * d_mah) + (1 - gamma) * (1 - d_iou)
inline double fused_cost(double d_cos, double d_mah_normalized, double d_iou, const AssociationParams& p) {
    return p.gamma * (p.lambda * d_cos + (1.0 - p.lambda) * d_mah_normalized) + (1.0 - p.gamma) * (1.0 - d_iou);
}

/// Maps a gated squared Mahalanobis distance onto [0,1].
inline double normalized_mahalanobis(double squared_distance, double gate_chi2) {
    return std::min(squared_distance / gate_chi2, 1.0);
}

struct TrackMatch {
    int track_id = 0;
    std::size_t detection = 0;

    friend bool operator==(const TrackMatch&, const TrackMatch&) = default;
};

struct TrackOutput {
    int track_id = 0;
    BoundingBox box;

    friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

struct FrameResult {
    int frame = 0;
    std::vector<TrackMatch> matches;  ///< ascending track id; detection indexes the input frame
    std::vector<int> new_track_ids;
    std::vector<int> retired_track_ids;
    std::vector<int> discarded_track_ids;  ///< tentative tracks dropped on their first miss
    std::vector<TrackOutput> outputs;      ///< confirmed tracks matched this frame, ascending id
};

/// Matches between candidate tracks and detections, by position in the candidate lists.
struct StageResult {
    std::vector<std::pair<std::size_t, std::size_t>> matches;
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_detections;
};

namespace detail {

inline StageResult to_stage_result(const Assignment& a) {
    return {a.matches, a.unmatched_rows, a.unmatched_cols};
}

inline bool has_appearance(const Detection& d) { return d.embedding.size() > 0; }

}  // namespace detail

/**
 * Stage-one cost: gated Mahalanobis, predicted-box IOU and short-term
 * embedding cosine distance fused into one number. Tracks must already be
 * predicted to the current frame. Without appearance on either side the
 * cosine term is zero.
 */
inline CostMatrix stage_one_costs(const std::vector<const Track*>& tracks, const std::vector<const Detection*>& dets,
                                  const KalmanFilter& kf, const AssociationParams& p) {
    CostMatrix costs(tracks.size(), dets.size());
    for (std::size_t r = 0; r < tracks.size(); ++r) {
        const Track& t = *tracks[r];
        const BoundingBox predicted = t.motion.box();
        for (std::size_t c = 0; c < dets.size(); ++c) {
            const Detection& d = *dets[c];
            const double mah = kf.mahalanobis(t.motion, Measurement::from_box(d.box));
            if (!gate(mah, p.gate_chi2)) {
                continue;
            }
            const double d_cos = (t.has_appearance() && detail::has_appearance(d))
                                     ? cosine_distance(t.embeddings.short_term, d.embedding)
                                     : 0.0;
            costs.set(r, c, fused_cost(d_cos, normalized_mahalanobis(mah, p.gate_chi2), iou(predicted, d.box), p));
        }
    }
    return costs;
}

/**
 * Stage-two cost: cosine distance between a track embedding (long-term by
 * default) and the detection, with Mahalanobis as a feasibility gate. Pairs
 * lacking appearance are infeasible.
 */
inline CostMatrix stage_two_costs(const std::vector<const Track*>& tracks, const std::vector<const Detection*>& dets,
                                  const KalmanFilter& kf, const AssociationParams& p) {
    CostMatrix costs(tracks.size(), dets.size());
    for (std::size_t r = 0; r < tracks.size(); ++r) {
        const Track& t = *tracks[r];
        if (!t.has_appearance()) {
            continue;
        }
        const Embedding& reference =
            p.stage2_embedding == Stage2Embedding::Long ? t.embeddings.long_term : t.embeddings.short_term;
        for (std::size_t c = 0; c < dets.size(); ++c) {
            const Detection& d = *dets[c];
            if (!detail::has_appearance(d)) {
                continue;
            }
            const double mah = kf.mahalanobis(t.motion, Measurement::from_box(d.box));
            if (!gate(mah, p.gate_chi2)) {
                continue;
            }
            const double d_cos = cosine_distance(reference, d.embedding);
            const double w = p.stage2_motion_weight;
            costs.set(r, c, (1.0 - w) * d_cos + w * normalized_mahalanobis(mah, p.gate_chi2));
        }
    }
    return costs;
}

inline StageResult stage_one(const std::vector<const Track*>& tracks, const std::vector<const Detection*>& dets,
                             const KalmanFilter& kf, const AssociationParams& p) {
    return detail::to_stage_result(solve_assignment(stage_one_costs(tracks, dets, kf, p), p.stage1_threshold));
}

inline StageResult stage_two(const std::vector<const Track*>& tracks, const std::vector<const Detection*>& dets,
                             const KalmanFilter& kf, const AssociationParams& p) {
    return detail::to_stage_result(solve_assignment(stage_two_costs(tracks, dets, kf, p), p.stage2_cos_threshold));
}

/**
 * Online two-stage tracker. One instance per sequence; frames must arrive in
 * strictly increasing order.
 *
 * Per frame: predict every live track, associate in stage one (short-term
 * appearance + motion + IOU), rescue leftovers in stage two (long-term
 * appearance, motion-gated), update matched tracks, start tentative tracks
 * from leftover detections and age the unmatched tracks.
 */
class Tracker {
public:
    explicit Tracker(TrackerConfig config = {}) : config_(std::move(config)), kf_(config_.motion) {
        config_.validate();
    }

    const TrackerConfig& config() const { return config_; }

    /// Live (non-retired) tracks in creation order.
    const std::vector<Track>& tracks() const { return tracks_; }
    const std::vector<Track>& retired() const { return retired_; }

    FrameResult step(const FrameObservations& frame) {
        if (frame.frame < 1) {
            throw InputError("frame indices start at 1");
        }
        if (last_frame_ && frame.frame <= *last_frame_) {
            throw InputError("frame " + std::to_string(frame.frame) + " does not follow frame " +
                             std::to_string(*last_frame_));
        }
        const bool first_frame = !last_frame_.has_value();
        last_frame_ = frame.frame;

        FrameResult result;
        result.frame = frame.frame;

        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < frame.detections.size(); ++i) {
            const Detection& d = frame.detections[i];
            if (d.frame != frame.frame) {
                throw InputError("detection frame index differs from its frame");
            }
            if (!(d.occlusion_score >= 0.0 && d.occlusion_score <= 1.0)) {
                throw InputError("occlusion score must lie in [0,1]");
            }
            check_dimension(d);
            if (d.confidence >= config_.min_confidence && d.box.valid() && d.box.width() > 0.0 &&
                d.box.height() > 0.0) {
                eligible.push_back(i);
            }
        }

        for (Track& t : tracks_) {
            t.motion = kf_.predict(t.motion);
        }

        const AssociationParams& p = config_.association;
        std::vector<char> track_matched(tracks_.size(), 0);
        std::vector<char> det_matched(eligible.size(), 0);
        std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track index, eligible index)

        // Stage one.
        std::vector<std::size_t> s1_tracks;
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            if (p.stage_one_includes_dormant || tracks_[i].status != TrackStatus::Dormant) {
                s1_tracks.push_back(i);
            }
        }
        std::vector<std::size_t> s1_dets(eligible.size());
        for (std::size_t k = 0; k < eligible.size(); ++k) {
            s1_dets[k] = k;
        }
        run_stage(s1_tracks, s1_dets, frame, eligible, /*second=*/false, track_matched, det_matched, matches);

        // Stage two on the leftovers.
        std::vector<std::size_t> s2_tracks, s2_dets;
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            if (!track_matched[i]) {
                s2_tracks.push_back(i);
            }
        }
        for (std::size_t k = 0; k < eligible.size(); ++k) {
            if (!det_matched[k]) {
                s2_dets.push_back(k);
            }
        }
        run_stage(s2_tracks, s2_dets, frame, eligible, /*second=*/true, track_matched, det_matched, matches);

        for (const auto& [ti, k] : matches) {
            Track& t = tracks_[ti];
            const Detection& d = frame.detections[eligible[k]];
            t.motion = kf_.update(t.motion, Measurement::from_box(d.box));
            if (t.has_appearance() && detail::has_appearance(d)) {
                t.embeddings.update(d.embedding, d.occlusion_score, config_.appearance);
            }
            t.frames_since_update = 0;
            ++t.hits;
            if (t.status == TrackStatus::Dormant ||
                (t.status == TrackStatus::Tentative && t.hits >= p.tentative_confirm)) {
                t.status = TrackStatus::Active;
            }
            t.history.push_back({frame.frame, t.motion.box()});
            result.matches.push_back({t.id, eligible[k]});
        }

        std::vector<Track> survivors;
        survivors.reserve(tracks_.size());
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            Track& t = tracks_[i];
            if (!track_matched[i]) {
                if (t.status == TrackStatus::Tentative) {
                    result.discarded_track_ids.push_back(t.id);
                    continue;
                }
                ++t.frames_since_update;
                if (t.frames_since_update > p.keep_alive) {
                    t.status = TrackStatus::Retired;
                    result.retired_track_ids.push_back(t.id);
                    retired_.push_back(std::move(t));
                    continue;
                }
                t.status = TrackStatus::Dormant;
            }
            survivors.push_back(std::move(t));
        }
        tracks_ = std::move(survivors);

        for (std::size_t k = 0; k < eligible.size(); ++k) {
            if (det_matched[k]) {
                continue;
            }
            const Detection& d = frame.detections[eligible[k]];
            Track t;
            t.id = next_id_++;
            t.motion = kf_.initiate(Measurement::from_box(d.box));
            if (detail::has_appearance(d)) {
                t.embeddings = EmbeddingPair::from_detection(d.embedding);
            }
            t.hits = 1;
            t.status = (first_frame || p.tentative_confirm <= 1) ? TrackStatus::Active : TrackStatus::Tentative;
            t.history.push_back({frame.frame, t.motion.box()});
            result.new_track_ids.push_back(t.id);
            result.matches.push_back({t.id, eligible[k]});
            tracks_.push_back(std::move(t));
        }

        // Newly born tracks are not associations; keep them out of the match list.
        std::erase_if(result.matches, [&](const TrackMatch& m) {
            return std::find(result.new_track_ids.begin(), result.new_track_ids.end(), m.track_id) !=
                   result.new_track_ids.end();
        });
        std::sort(result.matches.begin(), result.matches.end(),
                  [](const TrackMatch& a, const TrackMatch& b) { return a.track_id < b.track_id; });

        for (const Track& t : tracks_) {
            if (t.status == TrackStatus::Active && t.frames_since_update == 0) {
                result.outputs.push_back({t.id, t.motion.box()});
            }
        }
        return result;
    }

private:
    void check_dimension(const Detection& d) {
        const auto dim = static_cast<long>(d.embedding.size());
        if (!embedding_dim_) {
            embedding_dim_ = dim;
        } else if (*embedding_dim_ != dim) {
            throw InputError("embedding dimension changed within the sequence: expected " +
                             std::to_string(*embedding_dim_) + ", got " + std::to_string(dim));
        }
    }

    void run_stage(const std::vector<std::size_t>& track_ids, const std::vector<std::size_t>& det_ids,
                   const FrameObservations& frame, const std::vector<std::size_t>& eligible, bool second,
                   std::vector<char>& track_matched, std::vector<char>& det_matched,
                   std::vector<std::pair<std::size_t, std::size_t>>& matches) const {
        if (track_ids.empty() || det_ids.empty()) {
            return;
        }
        std::vector<const Track*> ts;
        std::vector<const Detection*> ds;
        for (std::size_t i : track_ids) {
            ts.push_back(&tracks_[i]);
        }
        for (std::size_t k : det_ids) {
            ds.push_back(&frame.detections[eligible[k]]);
        }
        const StageResult r = second ? stage_two(ts, ds, kf_, config_.association)
                                     : stage_one(ts, ds, kf_, config_.association);
        for (const auto& [a, b] : r.matches) {
            track_matched[track_ids[a]] = 1;
            det_matched[det_ids[b]] = 1;
            matches.emplace_back(track_ids[a], det_ids[b]);
        }
    }

    TrackerConfig config_;
    KalmanFilter kf_;
    std::vector<Track> tracks_;
    std::vector<Track> retired_;
    std::optional<int> last_frame_;
    std::optional<long> embedding_dim_;
    int next_id_ = 1;
};

}  // namespace occtrack
