#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trimix/common.hpp"
#include "trimix/curriculum.hpp"
#include "trimix/hpr.hpp"
#include "trimix/scene_io.hpp"
#include "trimix/scene_sim.hpp"
#include "trimix/train.hpp"
#include "trimix/triplet.hpp"
#include "trimix/zeroshot.hpp"

namespace trimix {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int default_threads() {
    if (const char* env = std::getenv("TRIMIX_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

// Ordered parallel map: output slot i is always task i's result, so the
// merge is independent of the pool size.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& file, int dim,
                                                 std::uint64_t seed,
                                                 const std::vector<std::string>& extra_vocab) {
    if (!file.empty()) return std::make_unique<FileProvider>(file);
    std::vector<std::string> vocab;
    for (const auto& c : default_classes()) vocab.push_back(c.name);
    for (const auto& v : extra_vocab) vocab.push_back(v);
    return std::make_unique<HashProvider>(dim, seed, std::move(vocab));
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    SceneConfig config;
    std::string out;
    std::string classes_csv;
};

int cmd_simulate(const SimulateArgs& a) {
    SceneConfig config = a.config;
    config.classes = split_csv(a.classes_csv);
    const SceneBundle bundle = generate_scene(config);
    write_scene(a.out, bundle);
    std::size_t points = 0;
    for (const auto& s : bundle.scene.sweeps) points += s.points.size();
    std::cout << "scene: " << a.out << "\n"
              << "  sweeps: " << bundle.scene.sweeps.size() << ", points: " << points
              << ", tracks: " << bundle.scene.tracks.size()
              << ", captions: " << bundle.captions.size() << "\n"
              << "  config_hash: " << bundle.config_hash << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct GenTripletsArgs {
    std::string scene;
    std::string out;
    std::string name = "triplets";
    int sweeps = 10;
    int min_points = 150;
    double visibility = 0.4;
    double margin = 0.10;
    double max_offset = -1.0; // < 0: unlimited
    int threads = default_threads();
    // synthetic mode
    int cad_count = 0;
    SyntheticCloudConfig cad;
    std::string classes_csv;
};

int cmd_gen_triplets(const GenTripletsArgs& a) {
    if (a.scene.empty() == (a.cad_count == 0)) {
        throw ConfigError("gen-triplets: need exactly one of --scene or --cad");
    }

    std::vector<Triplet> triplets;
    std::string config_hash;

    if (a.cad_count > 0) {
        SyntheticCloudConfig cfg = a.cad;
        cfg.count = a.cad_count;
        cfg.classes = split_csv(a.classes_csv);
        config_hash = cfg.hash();
        for (const auto& obj : generate_synthetic_objects(cfg)) {
            for (const auto& view : obj.view_ids) {
                Triplet t;
                t.instance_id = obj.object_id;
                t.class_label = obj.class_label;
                t.domain = Domain::Synthetic;
                t.caption = obj.caption;
                t.crop.view_id = view;
                t.points.reserve(obj.points.size());
                for (const auto& p : obj.points) t.points.push_back(p.cast<float>());
                triplets.push_back(std::move(t));
            }
        }
    } else {
        const SceneBundle bundle = read_scene(a.scene);
        const Scene& scene = bundle.scene;
        {
            json j;
            j["scene_config_hash"] = bundle.config_hash;
            j["sweeps"] = a.sweeps;
            j["min_points"] = a.min_points;
            j["visibility"] = a.visibility;
            j["margin"] = a.margin;
            j["max_offset"] = a.max_offset;
            config_hash = hex64(fnv1a64(j.dump()));
        }

        struct Task {
            const Track* track;
            double t0;
        };
        std::vector<Task> tasks;
        for (const auto& track : scene.tracks) {
            for (const auto& box : track.boxes) tasks.push_back({&track, box.pose.timestamp});
        }

        struct TaskResult {
            std::vector<Triplet> triplets;
            std::size_t skipped_captions = 0;
            bool dropped_min_points = false;
        };
        std::vector<TaskResult> results(tasks.size());
        FusionOptions fopt;
        fopt.sweeps = a.sweeps;
        fopt.crop_margin = a.margin;
        parallel_for(tasks.size(), a.threads, [&](std::size_t i) {
            const Task& task = tasks[i];
            const FusedObjectCloud fused =
                fuse_object(scene, task.track->instance_id, task.t0, fopt);
            if (!filter_min_points(fused, static_cast<std::size_t>(a.min_points))) {
                results[i].dropped_min_points = true;
                return;
            }
            std::vector<CropCandidate> crops;
            for (const auto& box : task.track->boxes) {
                if (a.max_offset >= 0.0 &&
                    std::abs(box.pose.timestamp - task.t0) > a.max_offset) {
                    continue;
                }
                const int k = scene.sweep_index_at(box.pose.timestamp);
                if (k < 0) continue;
                const auto views = select_valid_views(
                    task.track->instance_id, box.pose, box.visibility, scene.cameras,
                    scene.sweeps[static_cast<std::size_t>(k)].ego_pose, a.visibility);
                crops.insert(crops.end(), views.begin(), views.end());
            }
            auto assembled =
                assemble_triplets(fused, task.track->class_label, crops, bundle.captions);
            results[i].triplets = std::move(assembled.triplets);
            results[i].skipped_captions = assembled.skipped_missing_caption;
        });

        std::size_t skipped = 0, dropped = 0;
        for (auto& r : results) {
            skipped += r.skipped_captions;
            if (r.dropped_min_points) ++dropped;
            for (auto& t : r.triplets) triplets.push_back(std::move(t));
        }
        std::cout << "dropped " << dropped << " clouds below " << a.min_points
                  << " points, skipped " << skipped << " crops without captions\n";
    }

    const TripletManifest manifest = write_dataset(a.out, triplets, a.name, config_hash);
    std::cout << "dataset: " << a.out << "\n  records: " << manifest.total
              << "\n  config_hash: " << manifest.config_hash << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct HprArgs {
    std::string in;
    std::string out;
    double gamma = 1e2;
    double rmin = 0.0; // meters; 0 = use scale factors
    double rmax = 0.0;
    double rmin_scale = 2.0; // x bounding radius
    double rmax_scale = 6.0;
    std::uint64_t seed = 1;
};

int cmd_hpr_augment(const HprArgs& a) {
    Dataset ds = read_dataset(a.in);
    json j;
    j["input_config_hash"] = ds.manifest.config_hash;
    j["gamma"] = a.gamma;
    j["rmin"] = a.rmin;
    j["rmax"] = a.rmax;
    j["rmin_scale"] = a.rmin_scale;
    j["rmax_scale"] = a.rmax_scale;
    j["seed"] = a.seed;
    const std::string config_hash = hex64(fnv1a64(j.dump()));

    const Rng master(a.seed);
    std::size_t degenerate = 0;
    for (std::size_t i = 0; i < ds.triplets.size(); ++i) {
        Triplet& t = ds.triplets[i];
        std::vector<Eigen::Vector3d> pts;
        pts.reserve(t.points.size());
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (const auto& p : t.points) {
            pts.push_back(p.cast<double>());
            centroid += pts.back();
        }
        centroid /= static_cast<double>(pts.size());
        double bounding = 0.0;
        for (const auto& p : pts) bounding = std::max(bounding, (p - centroid).norm());
        double rmin = a.rmin > 0.0 ? a.rmin : a.rmin_scale * bounding;
        double rmax = a.rmax > 0.0 ? a.rmax : a.rmax_scale * bounding;
        if (!(rmin > 0.0)) rmin = 1.0;
        if (rmax < rmin) rmax = rmin;

        Rng rng = master.split("hpr").split(i);
        const Viewpoint vp = sample_viewpoint(rng, centroid, rmin, rmax);
        const HprResult res = hpr_visible(pts, vp.position, a.gamma);
        if (res.degenerate) {
            ++degenerate;
            continue;
        }
        const auto kept = apply_mask(pts, res.visible);
        if (kept.empty()) continue;
        t.points.clear();
        t.points.reserve(kept.size());
        for (const auto& p : kept) t.points.push_back(p.cast<float>());
    }
    const TripletManifest manifest =
        write_dataset(a.out, ds.triplets, ds.manifest.name + "-hpr", config_hash);
    std::cout << "hpr-augment: " << manifest.total << " records";
    if (degenerate > 0) std::cout << " (" << degenerate << " degenerate clouds left intact)";
    std::cout << "\n  config_hash: " << manifest.config_hash << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScheduleArgs {
    CurriculumSchedule schedule;
    std::string out;
};

int cmd_schedule(const ScheduleArgs& a) {
    a.schedule.validate();
    json j;
    j["we"] = a.schedule.warmup_epochs;
    j["te"] = a.schedule.total_epochs;
    j["rmax"] = a.schedule.max_ratio;
    j["psi"] = a.schedule.coverage;
    j["ncad"] = a.schedule.synthetic_size;
    j["batch"] = a.schedule.batch_size;
    j["devices"] = a.schedule.device_count;
    const std::string hash = hex64(fnv1a64(j.dump()));
    const long long iters = iterations_per_epoch(a.schedule);

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "epoch,mixing_ratio,iterations_per_epoch\n";
    for (int e = 0; e <= a.schedule.total_epochs; ++e) {
        csv << e << "," << fmt(mixing_ratio(e, a.schedule)) << "," << iters << "\n";
    }
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw IoError("cannot open for writing: " + a.out);
        f << csv.str();
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    TrainConfig config;
    std::string synthetic;
    std::string outdoor;
    std::string mode = "curriculum";
    std::string metrics_out;
    std::string params_out;
    std::string provider_file;
    std::uint64_t provider_seed = 42;
    int provider_dim = 16;
    std::string exclude_csv;
};

int cmd_train(const TrainArgs& a) {
    TrainConfig config = a.config;
    config.mode = train_mode_from_name(a.mode);
    config.exclude_outdoor_classes = split_csv(a.exclude_csv);

    const Dataset syn = read_dataset(a.synthetic);
    Dataset out;
    if (!a.outdoor.empty()) out = read_dataset(a.outdoor);

    std::vector<std::string> vocab;
    for (const auto& [dom, per_class] : syn.manifest.counts) {
        (void)dom;
        for (const auto& [cls, n] : per_class) {
            (void)n;
            vocab.push_back(cls);
        }
    }
    const auto provider =
        make_provider(a.provider_file, a.provider_dim, a.provider_seed, vocab);

    json j;
    j["mode"] = a.mode;
    j["we"] = config.schedule.warmup_epochs;
    j["te"] = config.schedule.total_epochs;
    j["rmax"] = config.schedule.max_ratio;
    j["psi"] = config.schedule.coverage;
    j["batch"] = config.schedule.batch_size;
    j["devices"] = config.schedule.device_count;
    j["hidden"] = config.hidden;
    j["tau"] = config.tau;
    j["lr"] = config.learning_rate;
    j["switch_epoch"] = config.switch_epoch;
    j["seed"] = config.seed;
    j["provider_seed"] = a.provider_seed;
    j["provider_dim"] = a.provider_dim;
    j["provider_file"] = a.provider_file;
    j["exclude"] = config.exclude_outdoor_classes;
    j["synthetic_hash"] = syn.manifest.config_hash;
    j["outdoor_hash"] = out.manifest.config_hash;
    const std::string hash = hex64(fnv1a64(j.dump()));

    const TrainResult result = train(config, syn.triplets, out.triplets, *provider);

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "epoch,mixing_ratio,iterations,mean_loss,synthetic_class_top1,synthetic_object_top1,"
           "outdoor_class_top1,outdoor_object_top1\n";
    for (const auto& m : result.metrics) {
        csv << m.epoch << "," << fmt(m.ratio) << "," << m.iterations << "," << fmt(m.mean_loss)
            << "," << fmt(m.synthetic_class_top1) << "," << fmt(m.synthetic_object_top1) << ","
            << fmt(m.outdoor_class_top1) << "," << fmt(m.outdoor_object_top1) << "\n";
    }
    if (a.metrics_out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(a.metrics_out);
        if (!f) throw IoError("cannot open for writing: " + a.metrics_out);
        f << csv.str();
    }
    if (!a.params_out.empty()) write_params(a.params_out, result.params);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string dataset;
    std::string params;
    std::string prompts;
    std::string topk = "1,5";
    std::string mode = "both";
    std::string holdout_csv;
    std::string out;
    std::string features_out;
    std::string retrieve_prompt;
    int top = 5;
    bool dense_only = false;
    std::string provider_file;
    std::uint64_t provider_seed = 42;
    int provider_dim = 16;
};

int cmd_eval(const EvalArgs& a) {
    const Dataset ds = read_dataset(a.dataset);
    const ToyEncoderParams params = read_params(a.params);

    std::vector<std::string> vocab;
    std::vector<std::string> classes;
    for (const auto& [dom, per_class] : ds.manifest.counts) {
        (void)dom;
        for (const auto& [cls, n] : per_class) {
            (void)n;
            vocab.push_back(cls);
            if (std::find(classes.begin(), classes.end(), cls) == classes.end()) {
                classes.push_back(cls);
            }
        }
    }
    std::sort(classes.begin(), classes.end());
    const auto provider = make_provider(a.provider_file, a.provider_dim, a.provider_seed, vocab);

    std::vector<std::string> templates;
    if (a.prompts.empty()) {
        templates = {kOutdoorPrompt};
    } else {
        templates = load_prompt_templates(a.prompts);
    }
    const ClassPrototypes prototypes = build_prototypes(classes, templates, *provider);

    json j;
    j["dataset_hash"] = ds.manifest.config_hash;
    j["prompts"] = a.prompts;
    j["topk"] = a.topk;
    j["mode"] = a.mode;
    j["holdout"] = a.holdout_csv;
    j["dense_only"] = a.dense_only;
    j["provider_seed"] = a.provider_seed;
    j["provider_dim"] = a.provider_dim;
    j["provider_file"] = a.provider_file;
    const std::string hash = hex64(fnv1a64(j.dump()));

    const auto holdout = split_csv(a.holdout_csv);

    // One prediction per distinct (instance, t0) cloud.
    std::vector<std::vector<std::string>> ranked;
    std::vector<std::string> labels;
    std::set<std::pair<std::string, double>> seen;
    for (const auto& t : ds.triplets) {
        if (!seen.insert({t.instance_id, t.t0}).second) continue;
        if (a.dense_only && t.points.size() <= 150) continue;
        if (!holdout.empty() &&
            std::find(holdout.begin(), holdout.end(), t.class_label) == holdout.end()) {
            continue;
        }
        std::vector<Eigen::Vector3d> cloud;
        cloud.reserve(t.points.size());
        for (const auto& p : t.points) cloud.push_back(p.cast<double>());
        const Eigen::VectorXd e = encode_points(params, cloud);
        std::vector<std::string> names;
        for (const auto& [cls, sim] : classify(e, prototypes)) {
            (void)sim;
            names.push_back(cls);
        }
        ranked.push_back(std::move(names));
        labels.push_back(t.class_label);
    }
    if (ranked.empty()) throw ConfigError("eval: no instances left to evaluate");

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "metric,k,value\n";
    for (const auto& k_str : split_csv(a.topk)) {
        const int k = std::stoi(k_str);
        if (a.mode == "both" || a.mode == "object") {
            csv << "object_wise," << k << ","
                << fmt(accuracy(ranked, labels, k, AccuracyMode::ObjectWise)) << "\n";
        }
        if (a.mode == "both" || a.mode == "class") {
            csv << "class_wise," << k << ","
                << fmt(accuracy(ranked, labels, k, AccuracyMode::ClassWise)) << "\n";
        }
    }
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw IoError("cannot open for writing: " + a.out);
        f << csv.str();
    }

    if (!a.features_out.empty()) {
        const auto rows = export_features(ds.triplets, params);
        std::ofstream f(a.features_out);
        if (!f) throw IoError("cannot open for writing: " + a.features_out);
        f << "# config_hash=" << hash << "\n";
        f << "instance,class";
        for (int d = 0; d < params.dim(); ++d) f << ",f" << d;
        f << "\n";
        for (const auto& row : rows) {
            f << row.instance_id << "," << row.class_label;
            for (Eigen::Index d = 0; d < row.embedding.size(); ++d) {
                f << "," << fmt(row.embedding[d]);
            }
            f << "\n";
        }
    }

    if (!a.retrieve_prompt.empty()) {
        const auto hits = retrieve(a.retrieve_prompt, ds.triplets, params, *provider,
                                   static_cast<std::size_t>(a.top));
        std::cout << "retrieve: \"" << a.retrieve_prompt << "\"\n";
        for (const auto& h : hits) {
            std::cout << "  " << h.instance_id << " (" << h.class_label << ") sim=" << fmt(h.similarity)
                      << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"point-image-text triplet pipeline and curriculum trainer"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate-scene", "generate a deterministic driving scene");
    sim_cmd->add_option("--out", sim.out, "output scene directory")->required();
    sim_cmd->add_option("--seed", sim.config.seed, "master seed");
    sim_cmd->add_option("--objects", sim.config.num_objects, "number of objects");
    sim_cmd->add_option("--sweeps", sim.config.num_sweeps, "number of sweeps");
    sim_cmd->add_option("--dt", sim.config.sweep_dt, "sweep spacing, seconds");
    sim_cmd->add_option("--annotation-every", sim.config.sweeps_per_annotation,
                        "sweeps per annotation interval");
    sim_cmd->add_option("--cameras", sim.config.num_cameras, "number of cameras");
    sim_cmd->add_option("--image-width", sim.config.image_width, "image width, px");
    sim_cmd->add_option("--image-height", sim.config.image_height, "image height, px");
    sim_cmd->add_option("--focal", sim.config.focal_px, "focal length, px");
    sim_cmd->add_option("--noise-sigma", sim.config.range_noise_sigma, "range noise sigma, m");
    sim_cmd->add_option("--points-per-object", sim.config.points_per_object,
                        "surface samples per object per sweep");
    sim_cmd->add_option("--clutter", sim.config.clutter_points, "ground clutter points per sweep");
    sim_cmd->add_option("--speed-min", sim.config.speed_min, "min object speed, m/s");
    sim_cmd->add_option("--speed-max", sim.config.speed_max, "max object speed, m/s");
    sim_cmd->add_option("--yaw-rate-max", sim.config.yaw_rate_max, "max |yaw rate|, rad/s");
    sim_cmd->add_option("--ego-speed", sim.config.ego_speed, "ego speed along +x, m/s");
    sim_cmd->add_option("--dropout-ref", sim.config.dropout_ref_distance,
                        "dropout reference distance, m (0 disables)");
    sim_cmd->add_option("--place-min", sim.config.place_min_radius, "min placement radius, m");
    sim_cmd->add_option("--place-max", sim.config.place_max_radius, "max placement radius, m");
    sim_cmd->add_option("--classes", sim.classes_csv, "comma-separated class subset");
    sim_cmd->add_flag("--random-visibility", sim.config.random_visibility,
                      "sample annotation visibility uniformly instead of 1.0");
    sim_cmd->set_config("--config");

    GenTripletsArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-triplets", "assemble point-image-text triplets");
    gen_cmd->add_option("--scene", gen.scene, "input scene directory (outdoor mode)");
    gen_cmd->add_option("--out", gen.out, "output dataset directory")->required();
    gen_cmd->add_option("--name", gen.name, "dataset name");
    gen_cmd->add_option("--sweeps", gen.sweeps, "fusion window size");
    gen_cmd->add_option("--min-points", gen.min_points, "minimum fused points per instance");
    gen_cmd->add_option("--visibility", gen.visibility, "visibility threshold");
    gen_cmd->add_option("--margin", gen.margin, "crop box margin, m");
    gen_cmd->add_option("--max-offset", gen.max_offset,
                        "max |crop time - t0| in seconds (unlimited when negative)");
    gen_cmd->add_option("--threads", gen.threads, "worker threads (env TRIMIX_THREADS)");
    gen_cmd->add_option("--cad", gen.cad_count, "synthetic mode: number of objects");
    gen_cmd->add_option("--cad-points", gen.cad.points_per_cloud, "points per synthetic cloud");
    gen_cmd->add_option("--cad-views", gen.cad.views_per_object, "views per synthetic object");
    gen_cmd->add_option("--seed", gen.cad.seed, "synthetic mode seed");
    gen_cmd->add_option("--classes", gen.classes_csv, "comma-separated class subset");
    gen_cmd->set_config("--config");

    HprArgs hpr;
    auto* hpr_cmd = app.add_subcommand("hpr-augment", "viewpoint-aware occlusion augmentation");
    hpr_cmd->add_option("--in", hpr.in, "input dataset")->required();
    hpr_cmd->add_option("--out", hpr.out, "output dataset")->required();
    hpr_cmd->add_option("--gamma", hpr.gamma, "inversion radius factor");
    hpr_cmd->add_option("--rmin", hpr.rmin, "viewpoint shell minimum radius, m");
    hpr_cmd->add_option("--rmax", hpr.rmax, "viewpoint shell maximum radius, m");
    hpr_cmd->add_option("--rmin-scale", hpr.rmin_scale,
                        "shell minimum as multiple of bounding radius");
    hpr_cmd->add_option("--rmax-scale", hpr.rmax_scale,
                        "shell maximum as multiple of bounding radius");
    hpr_cmd->add_option("--seed", hpr.seed, "viewpoint seed");

    ScheduleArgs sch;
    auto* sch_cmd = app.add_subcommand("schedule", "dump the mixing schedule as CSV");
    sch_cmd->add_option("--we", sch.schedule.warmup_epochs, "warm-up epochs");
    sch_cmd->add_option("--te", sch.schedule.total_epochs, "total epochs");
    sch_cmd->add_option("--rmax", sch.schedule.max_ratio, "max outdoor ratio");
    sch_cmd->add_option("--psi", sch.schedule.coverage, "target synthetic coverage");
    sch_cmd->add_option("--ncad", sch.schedule.synthetic_size, "synthetic dataset size");
    sch_cmd->add_option("--batch", sch.schedule.batch_size, "batch size per device");
    sch_cmd->add_option("--devices", sch.schedule.device_count, "device count");
    sch_cmd->add_option("--out", sch.out, "output CSV (stdout when omitted)");

    TrainArgs tr;
    auto* tr_cmd = app.add_subcommand("train", "train the toy encoder");
    tr_cmd->add_option("--synthetic", tr.synthetic, "synthetic triplet dataset")->required();
    tr_cmd->add_option("--outdoor", tr.outdoor, "outdoor triplet dataset");
    tr_cmd->add_option("--mode", tr.mode, "curriculum|static|two-step");
    tr_cmd->add_option("--seed", tr.config.seed, "training seed");
    tr_cmd->add_option("--metrics-out", tr.metrics_out, "metrics CSV path (stdout when omitted)");
    tr_cmd->add_option("--params-out", tr.params_out, "trained parameter file");
    tr_cmd->add_option("--we", tr.config.schedule.warmup_epochs, "warm-up epochs");
    tr_cmd->add_option("--te", tr.config.schedule.total_epochs, "total epochs");
    tr_cmd->add_option("--rmax", tr.config.schedule.max_ratio, "max outdoor ratio");
    tr_cmd->add_option("--psi", tr.config.schedule.coverage, "target synthetic coverage");
    tr_cmd->add_option("--batch", tr.config.schedule.batch_size, "batch size per device");
    tr_cmd->add_option("--devices", tr.config.schedule.device_count, "device count");
    tr_cmd->add_option("--hidden", tr.config.hidden, "encoder hidden width");
    tr_cmd->add_option("--tau", tr.config.tau, "InfoNCE temperature");
    tr_cmd->add_option("--lr", tr.config.learning_rate, "base learning rate");
    tr_cmd->add_option("--switch-epoch", tr.config.switch_epoch,
                       "two-step switch epoch (default total/2)");
    tr_cmd->add_option("--exclude-classes", tr.exclude_csv,
                       "outdoor classes withheld from training");
    tr_cmd->add_option("--provider-file", tr.provider_file, "embedding provider file");
    tr_cmd->add_option("--provider-seed", tr.provider_seed, "hash provider seed");
    tr_cmd->add_option("--provider-dim", tr.provider_dim, "embedding dimension");
    tr_cmd->set_config("--config");

    EvalArgs ev;
    auto* ev_cmd = app.add_subcommand("eval", "zero-shot classification evaluation");
    ev_cmd->add_option("--dataset", ev.dataset, "triplet dataset")->required();
    ev_cmd->add_option("--params", ev.params, "trained parameter file")->required();
    ev_cmd->add_option("--prompts", ev.prompts, "prompt template file (default: single prompt)");
    ev_cmd->add_option("--topk", ev.topk, "comma-separated k values");
    ev_cmd->add_option("--mode", ev.mode, "both|object|class");
    ev_cmd->add_option("--holdout", ev.holdout_csv, "evaluate only these classes");
    ev_cmd->add_option("--out", ev.out, "output CSV (stdout when omitted)");
    ev_cmd->add_option("--features-out", ev.features_out, "feature table CSV");
    ev_cmd->add_option("--retrieve", ev.retrieve_prompt, "retrieval prompt");
    ev_cmd->add_option("--top", ev.top, "retrieval result count");
    ev_cmd->add_flag("--dense-only", ev.dense_only, "only instances with more than 150 points");
    ev_cmd->add_option("--provider-file", ev.provider_file, "embedding provider file");
    ev_cmd->add_option("--provider-seed", ev.provider_seed, "hash provider seed");
    ev_cmd->add_option("--provider-dim", ev.provider_dim, "embedding dimension");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (gen_cmd->parsed()) return cmd_gen_triplets(gen);
        if (hpr_cmd->parsed()) return cmd_hpr_augment(hpr);
        if (sch_cmd->parsed()) return cmd_schedule(sch);
        if (tr_cmd->parsed()) return cmd_train(tr);
        if (ev_cmd->parsed()) return cmd_eval(ev);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}

} // namespace trimix
