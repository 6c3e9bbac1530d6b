// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "occtrack/occtrack.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::ifstream open_in(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) {
        throw occtrack::InputError("cannot open '" + path + "'");
    }
    return in;
}

void write_file(const std::string& path, const std::string& content, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) {
        throw occtrack::InputError("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw occtrack::InputError("write to '" + path + "' failed");
    }
}

std::string fmt(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

occtrack::Scenario load_scenario(const std::string& spec) {
    if (spec == "builtin:adversarial_crossing") {
        return occtrack::adversarial_crossing();
    }
    if (spec == "builtin:single_agent") {
        return occtrack::single_agent();
    }
    std::ifstream in = open_in(spec);
    return occtrack::parse_scenario(in);
}

struct TrackArgs {
    std::string dets;
    std::string embeddings;
    std::string config;
    std::string out;
};

int cmd_track(const TrackArgs& a) {
    occtrack::RunConfig config;
    if (!a.config.empty()) {
        std::ifstream in = open_in(a.config);
        config = occtrack::parse_run_config(in);
    }
    std::ifstream din = open_in(a.dets);
    std::vector<occtrack::DetectionRow> rows = occtrack::parse_detection_rows(din);
    if (!a.embeddings.empty()) {
        std::ifstream ein = open_in(a.embeddings, true);
        occtrack::attach_embeddings(rows, occtrack::read_sidecar(ein));
    }
    const auto grouped = occtrack::group_detections(rows, config.tracker.min_confidence);
    const int last = grouped.empty() ? 0 : grouped.back().frame;
    const auto results = occtrack::run_tracker(occtrack::fill_frame_gaps(grouped, last), config.tracker);
    write_file(a.out, occtrack::write_results(occtrack::result_rows(results)));
    return kExitOk;
}

struct SimulateArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out_dets;
    std::string out_gt;
    std::string out_embeddings;
};

int cmd_simulate(const SimulateArgs& a) {
    occtrack::Scenario s = load_scenario(a.scenario);
    if (a.seed) {
        s.seed = *a.seed;
    }
    const occtrack::SimulationOutput sim = occtrack::generate(s);
    write_file(a.out_dets, occtrack::write_detections(sim.observations));

    write_file(a.out_gt, occtrack::write_ground_truth(sim.ground_truth));

    if (!a.out_embeddings.empty()) {
        std::ostringstream bin(std::ios::binary);
        occtrack::write_sidecar(bin, occtrack::make_sidecar(sim.observations));
        write_file(a.out_embeddings, bin.str(), true);
    }
    return kExitOk;
}

struct EvaluateArgs {
    std::string gt;
    std::string results;
    std::string bands;
    double iou = occtrack::kDefaultIouThreshold;
    std::string json_out;
};

int cmd_evaluate(const EvaluateArgs& a) {
    std::vector<occtrack::VisibilityBand> bands;
    if (!a.bands.empty()) {
        bands = occtrack::parse_bands(a.bands);
    }
    std::ifstream gin = open_in(a.gt);
    const auto gt = occtrack::parse_ground_truth(gin);
    std::ifstream rin = open_in(a.results);
    const auto hyp = occtrack::parse_results(rin);
    const auto frames = occtrack::build_eval_frames(gt, hyp);
    occtrack::EvalReport r = occtrack::accumulate(frames, a.iou);
    if (!bands.empty()) {
        r.bands = occtrack::stratify_by_visibility(frames, bands, a.iou);
    }

    std::cout << "frames " << r.frames << '\n'
              << "gt " << r.gt << '\n'
              << "hyp " << r.hyp << '\n'
              << "matches " << r.matches << '\n'
              << "fp " << r.fp << '\n'
              << "fn " << r.fn << '\n'
              << "ids " << r.ids << '\n'
              << "mota " << fmt(r.mota) << '\n'
              << "idtp " << r.idtp << '\n'
              << "idfp " << r.idfp << '\n'
              << "idfn " << r.idfn << '\n'
              << "idf1 " << fmt(r.idf1) << '\n';
    for (const occtrack::BandReport& b : r.bands) {
        const std::string name = "band[" + occtrack::text::shortest(b.band.lo) + ',' +
                                 occtrack::text::shortest(b.band.hi) + ").";
        std::cout << name << "gt " << b.gt << '\n'
                  << name << "matches " << b.matches << '\n'
                  << name << "fn " << b.fn << '\n'
                  << name << "ids " << b.ids << '\n';
    }

    nlohmann::json j = {{"frames", r.frames}, {"gt", r.gt},       {"hyp", r.hyp},   {"matches", r.matches},
                        {"fp", r.fp},         {"fn", r.fn},       {"ids", r.ids},   {"mota", number_or_null(r.mota)},
                        {"idtp", r.idtp},     {"idfp", r.idfp},   {"idfn", r.idfn}, {"idf1", r.idf1}};
    j["bands"] = nlohmann::json::array();
    for (const occtrack::BandReport& b : r.bands) {
        j["bands"].push_back({{"lo", b.band.lo},
                              {"hi", b.band.hi},
                              {"gt", b.gt},
                              {"matches", b.matches},
                              {"fn", b.fn},
                              {"ids", b.ids}});
    }
    if (!a.json_out.empty()) {
        write_file(a.json_out, j.dump(2) + '\n');
    } else {
        std::cout << "json " << j.dump() << '\n';
    }
    return kExitOk;
}

struct OccmapArgs {
    std::string gt;
    std::string pred;
    std::string from_gt;
    int frame = 1;
    int image_width = 0;
    int image_height = 0;
    std::string out;
};

int cmd_occmap(const OccmapArgs& a) {
    if (!a.from_gt.empty()) {
        std::ifstream in = open_in(a.from_gt);
        const auto rows = occtrack::parse_ground_truth(in);
        const auto annotations = occtrack::annotations_at(rows, a.frame);
        const occtrack::OcclusionMap shape = occtrack::OcclusionMap::for_image(a.image_width, a.image_height);
        const occtrack::OcclusionMap map = occtrack::build_gt_map(annotations, shape.height(), shape.width());
        write_file(a.out, occtrack::write_occlusion_map(map));
        return kExitOk;
    }
    std::ifstream gin = open_in(a.gt);
    const occtrack::OcclusionMap gt = occtrack::parse_occlusion_map(gin);
    std::ifstream pin = open_in(a.pred);
    const occtrack::OcclusionMap pred = occtrack::parse_occlusion_map(pin);
    const std::size_t n = gt.positive_count();
    std::cout << "positives " << n << '\n' << "loss " << fmt(occtrack::occlusion_loss(gt, pred, n)) << '\n';
    return kExitOk;
}

int cmd_selftest() {
    const occtrack::Scenario s = occtrack::adversarial_crossing();
    const occtrack::CrossingOutcome base = occtrack::run_crossing(s, {});
    const occtrack::CrossingOutcome ablation = occtrack::run_crossing(s, occtrack::short_term_ablation());
    const bool base_ok = base.report.ids == 0 && base.report.idf1 == 1.0;
    const bool ablation_ok = ablation.report.ids >= 1;

    std::cout << "scenario adversarial_crossing\n"
              << "default.ids " << base.report.ids << '\n'
              << "default.idf1 " << fmt(base.report.idf1) << '\n'
              << "default.mota " << fmt(base.report.mota) << '\n'
              << "default.long_cos_to_anchor " << fmt(base.long_cos_to_anchor) << '\n'
              << "default.short_cos_to_anchor " << fmt(base.short_cos_to_anchor) << '\n'
              << "default.short_cos_to_occluder " << fmt(base.short_cos_to_occluder) << '\n'
              << "ablation.ids " << ablation.report.ids << '\n'
              << "ablation.idf1 " << fmt(ablation.report.idf1) << '\n'
              << "ablation.mota " << fmt(ablation.report.mota) << '\n'
              << "delta.ids " << (ablation.report.ids - base.report.ids) << '\n'
              << "delta.idf1 " << fmt(base.report.idf1 - ablation.report.idf1) << '\n'
              << "delta.short_minus_long_cos " << fmt(base.short_cos_to_anchor - base.long_cos_to_anchor) << '\n'
              << "default " << (base_ok ? "PASS" : "FAIL") << " (ids = 0, idf1 = 1)\n"
              << "ablation " << (ablation_ok ? "PASS" : "FAIL") << " (ids >= 1)\n";
    return base_ok ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Occlusion-aware multi-object tracker"};
    app.name("occtrack");
    app.require_subcommand(1);

    TrackArgs track;
    auto* track_cmd = app.add_subcommand("track", "Track MOT-format detections");
    track_cmd->add_option("--dets", track.dets, "det.txt input")->required();
    track_cmd->add_option("--embeddings", track.embeddings, "embedding sidecar");
    track_cmd->add_option("--config", track.config, "key = value configuration");
    track_cmd->add_option("--out", track.out, "results output")->required();

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Materialize a synthetic scenario");
    sim_cmd->add_option("--scenario", sim.scenario, "scenario file, or builtin:adversarial_crossing / builtin:single_agent")
        ->required();
    sim_cmd->add_option("--seed", sim.seed, "override the scenario seed");
    sim_cmd->add_option("--out-dets", sim.out_dets, "det.txt output")->required();
    sim_cmd->add_option("--out-gt", sim.out_gt, "gt.txt output")->required();
    sim_cmd->add_option("--out-embeddings", sim.out_embeddings, "embedding sidecar output");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score results against ground truth");
    eval_cmd->add_option("--gt", eval.gt, "gt.txt")->required();
    eval_cmd->add_option("--results", eval.results, "tracker results")->required();
    eval_cmd->add_option("--bands", eval.bands, "visibility bands, e.g. 0:0.5,0.5:1");
    eval_cmd->add_option("--iou", eval.iou, "match IOU threshold")->capture_default_str();
    eval_cmd->add_option("--json", eval.json_out, "write the report as JSON to this path");

    OccmapArgs occ;
    auto* occ_cmd = app.add_subcommand("occmap", "Occlusion-map loss, or build a map from ground truth");
    auto* occ_gt = occ_cmd->add_option("--gt", occ.gt, "ground-truth map");
    auto* occ_pred = occ_cmd->add_option("--pred", occ.pred, "predicted map");
    auto* occ_from = occ_cmd->add_option("--from-gt", occ.from_gt, "build a map from a gt.txt frame");
    occ_cmd->add_option("--frame", occ.frame, "frame for --from-gt")->capture_default_str();
    auto* occ_w = occ_cmd->add_option("--image-width", occ.image_width, "image width for --from-gt");
    auto* occ_h = occ_cmd->add_option("--image-height", occ.image_height, "image height for --from-gt");
    auto* occ_out = occ_cmd->add_option("--out", occ.out, "map output for --from-gt");
    occ_gt->needs(occ_pred)->excludes(occ_from);
    occ_pred->needs(occ_gt);
    occ_from->needs(occ_w)->needs(occ_h)->needs(occ_out);

    app.add_subcommand("selftest", "Run the crossing scenario with long-term and short-term stage two");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "occtrack: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (track_cmd->parsed()) {
            return cmd_track(track);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(sim);
        }
        if (eval_cmd->parsed()) {
            return cmd_evaluate(eval);
        }
        if (occ_cmd->parsed()) {
            if (occ.gt.empty() && occ.from_gt.empty()) {
                std::cerr << "occtrack: occmap needs --gt and --pred, or --from-gt\n";
                return kExitUsage;
            }
            return cmd_occmap(occ);
        }
        return cmd_selftest();
    } catch (const std::exception& e) {
        std::cerr << "occtrack: " << e.what() << '\n';
        return kExitData;
    }
}
