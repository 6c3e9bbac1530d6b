// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

// Acceptance runner: one PASS/FAIL line per criterion. With an argument, runs
// only that criterion; the exit status is nonzero when any selected one fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "occtrack/occtrack.hpp"
#include "support/assignment_oracle.hpp"
#include "support/metrics_oracle.hpp"

namespace {

using namespace occtrack;
using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Verdict assignment_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::size_t> dim(1, 7);
    std::uniform_real_distribution<double> cost(0.0, 1.0);
    int mismatches = 0;
    const int trials = 10000;
    for (int trial = 0; trial < trials; ++trial) {
        CostMatrix c(dim(rng), dim(rng));
        for (std::size_t r = 0; r < c.rows(); ++r) {
            for (std::size_t k = 0; k < c.cols(); ++k) {
                c.set(r, k, cost(rng));
            }
        }
        const Assignment a = solve_assignment(c);
        double total = 0.0;
        for (const auto& [r, k] : a.matches) {
            total += c.at(r, k);
        }
        const bool complete = a.matches.size() == std::min(c.rows(), c.cols());
        if (!complete || total != oracle::min_complete_total(c)) {
            ++mismatches;
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 10.0,
            fmt("%d/%d matrices differ from exhaustive enumeration, %.2f s", mismatches, trials, secs)};
}

Verdict fused_cost_fidelity() {
    const AssociationParams p;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> cos(0.0, 2.0), unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double dc = cos(rng), dm = unit(rng), di = unit(rng);
        const double expected = 0.8 * (0.9 * dc + 0.1 * dm) + 0.2 * (1.0 - di);
        worst = std::max(worst, std::abs(fused_cost(dc, dm, di, p) - expected));
    }
    return {p.gamma == 0.8 && p.lambda == 0.9 && worst <= 1e-12, fmt("max deviation %.3g over 1000 triples", worst)};
}

Embedding basis(int dim, int axis) {
    Embedding e = Embedding::Zero(dim);
    e(axis) = 1.0;
    return e;
}

// Long-term cosine distance to the anchor after 100 alternating own/occluder
// updates; the occluder-free run applies only the own updates.
double long_term_drift(const UpdateParams& p, double occluder_score, bool with_occluder) {
    const int dim = 8;
    const Embedding anchor = basis(dim, 0);
    const Embedding occluder = basis(dim, 1);
    SimRng rng(3);
    Embedding f = anchor;
    for (int i = 0; i < 100; ++i) {
        if (i % 2 == 0) {
            Embedding own = anchor;
            for (int k = 2; k < dim; ++k) {
                own(k) = 0.05 * rng.normal();
            }
            f = update_long(f, own, 1.0, p);
        } else if (with_occluder) {
            f = update_long(f, occluder, occluder_score, p);
        }
    }
    return cosine_distance(f, anchor);
}

Verdict embedding_consistency() {
    const auto t0 = Clock::now();
    const UpdateParams p;
    const double clean = long_term_drift(p, 0.0, false);
    const double mixed = long_term_drift(p, 0.0, true);
    UpdateParams literal = p;
    literal.occlusion_threshold = 0.0;
    const double ablation = long_term_drift(literal, 0.01, true) - long_term_drift(literal, 0.01, false);
    const double secs = seconds_since(t0);
    return {mixed - clean == 0.0 && ablation >= 0.05 && secs < 1.0,
            fmt("gated change %.3g, ungated drift %.4f, %.3f s", mixed - clean, ablation, secs)};
}

Verdict norm_preservation() {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> dim(1, 32);
    std::uniform_real_distribution<double> unit(0.0, 1.0), alpha(0.01, 0.99);
    std::normal_distribution<double> g;
    double worst = 0.0;
    const int calls = 100000;
    for (int i = 0; i < calls; ++i) {
        const int n = dim(rng);
        Embedding f(n), e(n);
        for (int k = 0; k < n; ++k) {
            f(k) = g(rng);
            e(k) = g(rng) * 10.0;
        }
        f = normalize(f);
        UpdateParams p;
        p.alpha = alpha(rng);
        p.occlusion_threshold = unit(rng);
        p.beta_mode = i % 2 == 0 ? BetaMode::Linear : BetaMode::Constant;
        const Embedding out = i % 4 < 2 ? update_long(f, e, unit(rng), p) : update_short(f, e, unit(rng), p);
        const double dev = std::abs(out.norm() - 1.0);
        worst = std::isfinite(dev) ? std::max(worst, dev) : std::numeric_limits<double>::infinity();
    }
    return {worst <= 1e-6, fmt("max |norm - 1| = %.3g over %d calls", worst, calls)};
}

Verdict occlusion_loss_correctness() {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(1, 12), side(8, 256);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int nonzero = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int width = side(rng), height = side(rng);
        std::vector<AnnotatedBox> boxes;
        const int n = count(rng);
        for (int k = 0; k < n; ++k) {
            const double x = unit(rng) * width, y = unit(rng) * height;
            boxes.push_back({{x, y, x + 1.0 + unit(rng) * 40.0, y + 1.0 + unit(rng) * 80.0}, unit(rng), k + 1});
        }
        const OcclusionMap gt = build_gt_map(boxes, height / kOcclusionStride, width / kOcclusionStride);
        nonzero += occlusion_loss(gt, gt) == 0.0 ? 0 : 1;
    }
    OcclusionMap gt(2, 2), zero(2, 2);
    gt.set(0, 0, 0.1);
    gt.set(1, 1, 0.3);
    const double two_cell = occlusion_loss(gt, zero);
    return {nonzero == 0 && two_cell == 0.2,
            fmt("%d/1000 self-losses nonzero, two-cell loss %.17g", nonzero, two_cell)};
}

Verdict gauntlet_default() {
    const auto t0 = Clock::now();
    const CrossingOutcome o = run_crossing(adversarial_crossing(), TrackerConfig{});
    const double secs = seconds_since(t0);
    return {o.report.ids == 0 && o.report.idf1 == 1.0 && secs < 5.0,
            fmt("ids %ld, idf1 %.6f, mota %.6f, %.3f s", long(o.report.ids), o.report.idf1, o.report.mota, secs)};
}

Verdict gauntlet_ablation() {
    const auto t0 = Clock::now();
    const CrossingOutcome o = run_crossing(adversarial_crossing(), short_term_ablation());
    const double secs = seconds_since(t0);
    return {o.report.ids >= 1 && secs < 5.0,
            fmt("ids %ld, idf1 %.6f, short-term cos to anchor %.4f, to occluder %.4f, %.3f s", long(o.report.ids),
                o.report.idf1, o.short_cos_to_anchor, o.short_cos_to_occluder, secs)};
}

struct GapOutcome {
    std::set<int> ids_reported;
    std::vector<int> reappearance_matches;
    bool first_track_retired = false;
};

// A stationary object seen on frames 1..10 and again after `gap` empty frames.
GapOutcome across_gap(int gap) {
    Tracker tracker;
    const BoundingBox box{100, 100, 140, 200};
    Embedding e(2);
    e << 1.0, 0.0;
    GapOutcome out;
    const int reappear = 11 + gap;
    for (int f = 1; f <= reappear; ++f) {
        FrameObservations obs{f, {}};
        if (f <= 10 || f == reappear) {
            obs.detections.push_back({f, box, 0.9, e, 1.0});
        }
        const FrameResult r = tracker.step(obs);
        for (const TrackOutput& o : r.outputs) {
            out.ids_reported.insert(o.track_id);
        }
        if (f == reappear) {
            for (const TrackMatch& m : r.matches) {
                out.reappearance_matches.push_back(m.track_id);
            }
        }
    }
    for (const Track& t : tracker.retired()) {
        out.first_track_retired = out.first_track_retired || t.id == 1;
    }
    return out;
}

Verdict keep_alive_boundary() {
    const GapOutcome kept = across_gap(30);
    const GapOutcome lost = across_gap(31);
    const bool kept_ok = kept.ids_reported == std::set<int>{1} && kept.reappearance_matches == std::vector<int>{1} &&
                         !kept.first_track_retired;
    const bool lost_ok = lost.first_track_retired && lost.reappearance_matches.empty();
    return {kept_ok && lost_ok,
            fmt("gap 30: %s, gap 31: %s", kept_ok ? "same id re-associated" : "not re-associated",
                lost_ok ? "id 1 retired, reappearance unmatched" : "id 1 survived")};
}

std::vector<EvalFrame> random_sequence(std::mt19937_64& rng) {
    const BoundingBox base{0, 0, 10, 20};
    std::uniform_int_distribution<int> nframes(1, 10), nids(1, 3), pick(1, 3), coin(0, 3);
    std::uniform_real_distribution<double> jitter(-4.0, 4.0), vis(0.0, 1.0);
    std::vector<EvalFrame> frames;
    const int n = nframes(rng);
    const int identities = nids(rng);
    for (int f = 1; f <= n; ++f) {
        EvalFrame e{f, {}, {}};
        for (int id = 1; id <= identities; ++id) {
            if (coin(rng) != 0) {
                e.gt.push_back({id, base.translated(30.0 * id + jitter(rng), jitter(rng)), vis(rng)});
            }
        }
        std::set<int> used;
        const int hyps = coin(rng);
        for (int k = 0; k < hyps; ++k) {
            const int tid = pick(rng);
            if (!used.insert(tid).second) continue;
            e.hyp.push_back({tid + 10, base.translated(30.0 * pick(rng) + jitter(rng), jitter(rng))});
        }
        frames.push_back(e);
    }
    return frames;
}

Verdict metrics_oracle() {
    std::mt19937_64 rng(8);
    int mismatches = 0;
    const int trials = 20000;
    for (int trial = 0; trial < trials; ++trial) {
        const auto frames = random_sequence(rng);
        const EvalReport r = accumulate(frames);
        const oracle::Counts o = oracle::clear_mot_and_identity(frames, kDefaultIouThreshold);
        const bool same = r.matches == o.matches && r.fp == o.fp && r.fn == o.fn && r.ids == o.ids &&
                          r.idtp == o.idtp && r.idfn == o.gt - o.idtp && r.idfp == o.hyp - o.idtp;
        mismatches += same ? 0 : 1;
    }
    const BoundingBox box{0, 0, 10, 20};
    std::vector<EvalFrame> split;
    for (int f = 1; f <= 10; ++f) {
        split.push_back({f, {{1, box, 1.0}}, {{f <= 6 ? 1 : 2, box}}});
    }
    const EvalReport s = accumulate(split);
    return {mismatches == 0 && s.idf1 == 0.6 && s.ids == 1,
            fmt("%d/%d sequences differ from brute force, split example idf1 %.17g ids %ld", mismatches, trials,
                s.idf1, long(s.ids))};
}

Verdict kalman_consistency() {
    const KalmanFilter kf;
    SimRng rng(9);
    const double h = 150.0, aspect = 1.0;
    const double noise = h / 20.0;
    const auto truth = [&](int t) { return Vector4(300.0 + 2.0 * t, 200.0 + 1.0 * t, aspect, h); };
    const auto measure = [&](int t) {
        const Vector4 z = truth(t);
        return Measurement::from_values(z(0) + noise * rng.normal(), z(1) + noise * rng.normal(),
                                        z(2) + 0.1 * rng.normal(), z(3) + noise * rng.normal());
    };
    MotionState s = kf.initiate(measure(0));
    double nis = 0.0, exact = 0.0;
    const int steps = 1000;
    for (int t = 1; t <= steps; ++t) {
        const MotionState predicted = kf.predict(s);
        const Vector4 projected = kf.project(predicted).first;
        exact = std::max(exact, kf.mahalanobis(predicted, Measurement::from_values(projected(0), projected(1),
                                                                                   projected(2), projected(3))));
        const Measurement m = measure(t);
        nis += kf.mahalanobis(predicted, m);
        s = kf.update(predicted, m);
    }
    nis /= steps;
    return {nis >= 2.5 && nis <= 5.5 && exact <= 1e-9,
            fmt("mean NIS %.4f over %d steps, max distance at exact prediction %.3g", nis, steps, exact)};
}

// simulate -> write -> parse -> track -> write; returns the results text and its MOTA.
std::pair<std::string, double> round_trip(const Scenario& s) {
    const SimulationOutput sim = generate(s);
    std::istringstream dets(write_detections(sim.observations));
    std::ostringstream bin(std::ios::binary);
    write_sidecar(bin, make_sidecar(sim.observations));
    std::istringstream sidecar(bin.str(), std::ios::binary);
    std::istringstream gt(write_ground_truth(sim.ground_truth));

    const RunConfig config;
    std::vector<DetectionRow> rows = parse_detection_rows(dets);
    attach_embeddings(rows, read_sidecar(sidecar));
    const auto grouped = group_detections(rows, config.tracker.min_confidence);
    const int last = grouped.empty() ? 0 : grouped.back().frame;
    const std::string results =
        write_results(result_rows(run_tracker(fill_frame_gaps(grouped, last), config.tracker)));

    std::istringstream parsed(results);
    const EvalReport r = accumulate(build_eval_frames(parse_ground_truth(gt), parse_results(parsed)));
    return {results, r.mota};
}

Verdict format_round_trip() {
    const Scenario s = single_agent();
    const auto [first, mota] = round_trip(s);
    const auto [second, mota2] = round_trip(s);
    return {mota == 1.0 && mota2 == 1.0 && !first.empty() && first == second,
            fmt("mota %.6f, results %s across runs (%zu bytes)", mota, first == second ? "identical" : "differ",
                first.size())};
}

struct Criterion {
    const char* name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"1", assignment_oracle},      {"2", fused_cost_fidelity},        {"3", embedding_consistency},
        {"4", norm_preservation},      {"5", occlusion_loss_correctness}, {"6a", gauntlet_default},
        {"6b", gauntlet_ablation},     {"7", keep_alive_boundary},        {"8", metrics_oracle},
        {"9", kalman_consistency},     {"10", format_round_trip},
    };
    const std::string only = argc > 1 ? argv[1] : "";
    bool all_pass = true, found = false;
    for (const Criterion& c : criteria) {
        if (!only.empty() && only != c.name) continue;
        found = true;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %s: %s (%s)\n", c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        all_pass = all_pass && v.pass;
    }
    if (!found) {
        std::fprintf(stderr, "acceptance: unknown criterion '%s'\n", only.c_str());
        return 1;
    }
    return all_pass ? 0 : 1;
}
