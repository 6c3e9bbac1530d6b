// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "occtrack/association.hpp"
#include "occtrack/error.hpp"
#include "occtrack/metrics.hpp"
#include "occtrack/occlusion.hpp"
#include "occtrack/simulator.hpp"
#include "occtrack/text.hpp"

namespace occtrack {

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/**
 * "key = value" lines. Text from '#' to the end of a line is a comment and
 * blank lines are skipped; a line without '=' or with an empty key is an error.
 */
inline std::vector<KeyValue> parse_key_values(std::istream& in) {
    std::vector<KeyValue> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string_view t = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (t.empty()) {
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(number, "expected 'key = value'");
        }
        KeyValue kv{std::string(text::trim(t.substr(0, eq))), std::string(text::trim(t.substr(eq + 1))), number};
        if (kv.key.empty()) {
            throw ParseError(number, "empty key");
        }
        out.push_back(std::move(kv));
    }
    return out;
}

namespace detail {

inline bool to_bool(const KeyValue& kv) {
    if (kv.value == "true" || kv.value == "1") {
        return true;
    }
    if (kv.value == "false" || kv.value == "0") {
        return false;
    }
    throw ParseError(kv.line, kv.key + " must be true or false");
}

inline double to_double(const KeyValue& kv) { return text::to_double(kv.value, kv.line, kv.key); }

inline int to_int(const KeyValue& kv) { return static_cast<int>(text::to_long(kv.value, kv.line, kv.key)); }

inline void require_unique(const std::vector<KeyValue>& kvs, const std::set<std::string>& repeatable = {}) {
    std::set<std::string> seen;
    for (const KeyValue& kv : kvs) {
        if (!repeatable.contains(kv.key) && !seen.insert(kv.key).second) {
            throw ParseError(kv.line, "duplicate key '" + kv.key + "'");
        }
    }
}

}  // namespace detail

/// Every tunable of a tracking run, with its published or documented default.
struct RunConfig {
    TrackerConfig tracker;
    double valid_visibility = kDefaultValidVisibility;
    double iou_threshold = kDefaultIouThreshold;
    std::uint64_t seed = 0;

    void validate() const {
        tracker.validate();
        if (!(valid_visibility >= 0.0 && valid_visibility <= 1.0)) {
            throw InputError("tau_vis must lie in [0,1]");
        }
        if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
            throw InputError("iou_threshold must lie in (0,1]");
        }
    }
};

/// Recognized keys, in the order format_run_config writes them.
inline const std::vector<std::string>& run_config_keys() {
    static const std::vector<std::string> keys = {
        "alpha",          "tau_upd",          "tau_vis",          "beta_mode",
        "gamma",          "lambda",           "stage1_threshold", "stage2_cos_threshold",
        "chi2_gate",      "keep_alive",       "tentative_confirm", "stage2_embedding",
        "stage2_motion_weight", "stage_one_includes_dormant", "std_weight_position", "std_weight_velocity",
        "min_confidence", "iou_threshold",    "seed",
    };
    return keys;
}

inline RunConfig run_config_from(const std::vector<KeyValue>& kvs) {
    detail::require_unique(kvs);
    RunConfig c;
    AssociationParams& a = c.tracker.association;
    UpdateParams& u = c.tracker.appearance;
    MotionParams& m = c.tracker.motion;
    const std::map<std::string, std::function<void(const KeyValue&)>> setters = {
        {"alpha", [&](const KeyValue& kv) { u.alpha = detail::to_double(kv); }},
        {"tau_upd", [&](const KeyValue& kv) { u.occlusion_threshold = detail::to_double(kv); }},
        {"tau_vis", [&](const KeyValue& kv) { c.valid_visibility = detail::to_double(kv); }},
        {"beta_mode",
         [&](const KeyValue& kv) {
             if (kv.value == "linear") {
                 u.beta_mode = BetaMode::Linear;
             } else if (kv.value == "constant") {
                 u.beta_mode = BetaMode::Constant;
             } else {
                 throw ParseError(kv.line, "beta_mode must be linear or constant");
             }
         }},
        {"gamma", [&](const KeyValue& kv) { a.gamma = detail::to_double(kv); }},
        {"lambda", [&](const KeyValue& kv) { a.lambda = detail::to_double(kv); }},
        {"stage1_threshold", [&](const KeyValue& kv) { a.stage1_threshold = detail::to_double(kv); }},
        {"stage2_cos_threshold", [&](const KeyValue& kv) { a.stage2_cos_threshold = detail::to_double(kv); }},
        {"chi2_gate", [&](const KeyValue& kv) { a.gate_chi2 = detail::to_double(kv); }},
        {"keep_alive", [&](const KeyValue& kv) { a.keep_alive = detail::to_int(kv); }},
        {"tentative_confirm", [&](const KeyValue& kv) { a.tentative_confirm = detail::to_int(kv); }},
        {"stage2_embedding",
         [&](const KeyValue& kv) {
             if (kv.value == "long") {
                 a.stage2_embedding = Stage2Embedding::Long;
             } else if (kv.value == "short") {
                 a.stage2_embedding = Stage2Embedding::Short;
             } else {
                 throw ParseError(kv.line, "stage2_embedding must be long or short");
             }
         }},
        {"stage2_motion_weight", [&](const KeyValue& kv) { a.stage2_motion_weight = detail::to_double(kv); }},
        {"stage_one_includes_dormant", [&](const KeyValue& kv) { a.stage_one_includes_dormant = detail::to_bool(kv); }},
        {"std_weight_position", [&](const KeyValue& kv) { m.std_weight_position = detail::to_double(kv); }},
        {"std_weight_velocity", [&](const KeyValue& kv) { m.std_weight_velocity = detail::to_double(kv); }},
        {"min_confidence", [&](const KeyValue& kv) { c.tracker.min_confidence = detail::to_double(kv); }},
        {"iou_threshold", [&](const KeyValue& kv) { c.iou_threshold = detail::to_double(kv); }},
        {"seed",
         [&](const KeyValue& kv) {
             const long s = text::to_long(kv.value, kv.line, kv.key);
             if (s < 0) {
                 throw ParseError(kv.line, "seed must be nonnegative");
             }
             c.seed = static_cast<std::uint64_t>(s);
         }},
    };
    for (const KeyValue& kv : kvs) {
        const auto it = setters.find(kv.key);
        if (it == setters.end()) {
            throw ParseError(kv.line, "unknown key '" + kv.key + "'");
        }
        it->second(kv);
    }
    c.validate();
    return c;
}

inline RunConfig parse_run_config(std::istream& in) { return run_config_from(parse_key_values(in)); }

inline std::string format_run_config(const RunConfig& c) {
    const AssociationParams& a = c.tracker.association;
    const UpdateParams& u = c.tracker.appearance;
    const MotionParams& m = c.tracker.motion;
    const auto d = [](double v) { return text::shortest(v); };
    std::string out;
    const auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + '\n'; };
    put("alpha", d(u.alpha));
    put("tau_upd", d(u.occlusion_threshold));
    put("tau_vis", d(c.valid_visibility));
    put("beta_mode", u.beta_mode == BetaMode::Linear ? "linear" : "constant");
    put("gamma", d(a.gamma));
    put("lambda", d(a.lambda));
    put("stage1_threshold", d(a.stage1_threshold));
    put("stage2_cos_threshold", d(a.stage2_cos_threshold));
    put("chi2_gate", d(a.gate_chi2));
    put("keep_alive", std::to_string(a.keep_alive));
    put("tentative_confirm", std::to_string(a.tentative_confirm));
    put("stage2_embedding", a.stage2_embedding == Stage2Embedding::Long ? "long" : "short");
    put("stage2_motion_weight", d(a.stage2_motion_weight));
    put("stage_one_includes_dormant", a.stage_one_includes_dormant ? "true" : "false");
    put("std_weight_position", d(m.std_weight_position));
    put("std_weight_velocity", d(m.std_weight_velocity));
    put("min_confidence", d(c.tracker.min_confidence));
    put("iou_threshold", d(c.iou_threshold));
    put("seed", std::to_string(c.seed));
    return out;
}

/**
 * Scenario text:
 *
 *   seed = 7
 *   duration = 60
 *   agent = id, left, top, width, height, vx, vy
 *   event = agent_id, start, occluder_id, s1 s2 s3 ...
 *   anchor = agent_id, v1 v2 ... v_dim
 *
 * plus embedding_dim, orthogonal_anchors, box_jitter_std,
 * embedding_noise_std, drop_threshold, score_noise_std and confidence.
 */
inline Scenario scenario_from(const std::vector<KeyValue>& kvs) {
    detail::require_unique(kvs, {"agent", "event", "anchor"});
    Scenario s;
    std::vector<const KeyValue*> events, anchors;
    const auto space_list = [](const KeyValue& kv, std::string_view field) {
        std::vector<double> v;
        std::string_view rest = text::trim(field);
        while (!rest.empty()) {
            const std::size_t sp = rest.find_first_of(" \t");
            v.push_back(text::to_double(rest.substr(0, sp), kv.line, kv.key));
            rest = sp == std::string_view::npos ? std::string_view{} : text::trim(rest.substr(sp));
        }
        return v;
    };
    for (const KeyValue& kv : kvs) {
        const std::string& k = kv.key;
        if (k == "seed") {
            const long v = text::to_long(kv.value, kv.line, k);
            if (v < 0) {
                throw ParseError(kv.line, "seed must be nonnegative");
            }
            s.seed = static_cast<std::uint64_t>(v);
        } else if (k == "duration") {
            s.duration = detail::to_int(kv);
        } else if (k == "embedding_dim") {
            s.embedding_dim = detail::to_int(kv);
        } else if (k == "orthogonal_anchors") {
            s.orthogonal_anchors = detail::to_bool(kv);
        } else if (k == "box_jitter_std") {
            s.noise.box_jitter_std = detail::to_double(kv);
        } else if (k == "embedding_noise_std") {
            s.noise.embedding_noise_std = detail::to_double(kv);
        } else if (k == "drop_threshold") {
            s.noise.drop_threshold = detail::to_double(kv);
        } else if (k == "score_noise_std") {
            s.noise.score_noise_std = detail::to_double(kv);
        } else if (k == "confidence") {
            s.noise.confidence = detail::to_double(kv);
        } else if (k == "agent") {
            const auto f = text::split(kv.value, ',');
            if (f.size() != 7) {
                throw ParseError(kv.line, "agent needs id, left, top, width, height, vx, vy");
            }
            AgentSpec a;
            a.identity = static_cast<int>(text::to_long(f[0], kv.line, "agent id"));
            const double w = text::to_double(f[3], kv.line, "width");
            const double h = text::to_double(f[4], kv.line, "height");
            a.initial_box = BoundingBox::from_tlwh(text::to_double(f[1], kv.line, "left"),
                                                   text::to_double(f[2], kv.line, "top"), w, h);
            a.vx = text::to_double(f[5], kv.line, "vx");
            a.vy = text::to_double(f[6], kv.line, "vy");
            s.agents.push_back(a);
        } else if (k == "event") {
            events.push_back(&kv);
        } else if (k == "anchor") {
            anchors.push_back(&kv);
        } else {
            throw ParseError(kv.line, "unknown scenario key '" + k + "'");
        }
    }
    const auto find_agent = [&](long id, std::size_t line) -> AgentSpec& {
        for (AgentSpec& a : s.agents) {
            if (a.identity == id) {
                return a;
            }
        }
        throw ParseError(line, "no agent with id " + std::to_string(id));
    };
    for (const KeyValue* kv : events) {
        const auto f = text::split(kv->value, ',');
        if (f.size() != 4) {
            throw ParseError(kv->line, "event needs agent_id, start, occluder_id, severities");
        }
        OcclusionEvent e;
        e.start = static_cast<int>(text::to_long(f[1], kv->line, "start"));
        e.occluder = static_cast<int>(text::to_long(f[2], kv->line, "occluder"));
        e.severities = space_list(*kv, f[3]);
        find_agent(text::to_long(f[0], kv->line, "agent id"), kv->line).events.push_back(e);
    }
    for (const KeyValue* kv : anchors) {
        const auto f = text::split(kv->value, ',');
        if (f.size() != 2) {
            throw ParseError(kv->line, "anchor needs agent_id, values");
        }
        const std::vector<double> v = space_list(*kv, f[1]);
        Embedding e(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            e(static_cast<Eigen::Index>(i)) = v[i];
        }
        find_agent(text::to_long(f[0], kv->line, "agent id"), kv->line).anchor = e;
    }
    s.validate();
    return s;
}

inline Scenario parse_scenario(std::istream& in) { return scenario_from(parse_key_values(in)); }

inline std::string format_scenario(const Scenario& s) {
    const auto d = [](double v) { return text::shortest(v); };
    std::string out;
    out += "seed = " + std::to_string(s.seed) + '\n';
    out += "duration = " + std::to_string(s.duration) + '\n';
    out += "embedding_dim = " + std::to_string(s.embedding_dim) + '\n';
    out += std::string("orthogonal_anchors = ") + (s.orthogonal_anchors ? "true" : "false") + '\n';
    out += "box_jitter_std = " + d(s.noise.box_jitter_std) + '\n';
    out += "embedding_noise_std = " + d(s.noise.embedding_noise_std) + '\n';
    out += "drop_threshold = " + d(s.noise.drop_threshold) + '\n';
    out += "score_noise_std = " + d(s.noise.score_noise_std) + '\n';
    out += "confidence = " + d(s.noise.confidence) + '\n';
    for (const AgentSpec& a : s.agents) {
        out += "agent = " + std::to_string(a.identity) + ", " + d(a.initial_box.left) + ", " + d(a.initial_box.top) +
               ", " + d(a.initial_box.width()) + ", " + d(a.initial_box.height()) + ", " + d(a.vx) + ", " + d(a.vy) +
               '\n';
    }
    for (const AgentSpec& a : s.agents) {
        for (const OcclusionEvent& e : a.events) {
            out += "event = " + std::to_string(a.identity) + ", " + std::to_string(e.start) + ", " +
                   std::to_string(e.occluder) + ',';
            for (double v : e.severities) {
                out += ' ' + d(v);
            }
            out += '\n';
        }
        if (a.anchor.size() != 0) {
            out += "anchor = " + std::to_string(a.identity) + ',';
            for (Eigen::Index k = 0; k < a.anchor.size(); ++k) {
                out += ' ' + d(a.anchor(k));
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace occtrack
