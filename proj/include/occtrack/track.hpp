// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <vector>

#include "occtrack/appearance.hpp"
#include "occtrack/core_types.hpp"
#include "occtrack/motion.hpp"

namespace occtrack {

enum class TrackStatus {
    Tentative,  ///< born recently, not yet confirmed; dropped on its first miss
    Active,     ///< matched in the current frame
    Dormant,    ///< unmatched for 1..keep_alive frames, still matchable
    Retired,    ///< unmatched beyond keep_alive, never matched again
};

inline std::string_view to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tentative: return "tentative";
        case TrackStatus::Active: return "active";
        case TrackStatus::Dormant: return "dormant";
        case TrackStatus::Retired: return "retired";
    }
    return "unknown";
}

struct TrackRecord {
    int frame = 0;
    BoundingBox box;
};

/// Persistent identity. Embeddings are empty when the stream carries no appearance.
struct Track {
    int id = 0;
    MotionState motion;
    EmbeddingPair embeddings;
    int frames_since_update = 0;
    int hits = 0;
    TrackStatus status = TrackStatus::Tentative;
    std::vector<TrackRecord> history;

    bool has_appearance() const { return embeddings.long_term.size() > 0; }
};

}  // namespace occtrack
