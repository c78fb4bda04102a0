#include "trimix/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trimix/camera.hpp"
#include "trimix/common.hpp"

namespace trimix {

namespace {

using json = nlohmann::ordered_json;

constexpr double kSensorHeight = 1.8;

std::vector<ClassSpec> resolve_classes(const std::vector<std::string>& names) {
    if (names.empty()) return default_classes();
    std::vector<ClassSpec> out;
    for (const auto& n : names) {
        const ClassSpec* spec = find_class(n);
        if (!spec) throw ConfigError("classes: unknown class '" + n + "'");
        out.push_back(*spec);
    }
    return out;
}

RigidTransform camera_axes() {
    // Camera x right, y down, z forward expressed in the ego frame
    // (x forward, y left, z up).
    Eigen::Matrix3d r;
    r.col(0) = Eigen::Vector3d(0, -1, 0);
    r.col(1) = Eigen::Vector3d(0, 0, -1);
    r.col(2) = Eigen::Vector3d(1, 0, 0);
    return {Eigen::Quaterniond(r), Eigen::Vector3d::Zero()};
}

struct ObjectState {
    ObjectTruth truth;
    double heading = 0.0;
};

BoxPose object_pose_at(const ObjectState& obj, double t) {
    BoxPose pose;
    pose.center = obj.truth.pose0.center + t * obj.truth.velocity;
    pose.orientation =
        RigidTransform::rotate_z(obj.heading + obj.truth.yaw_rate * t).rotation;
    pose.size = obj.truth.pose0.size;
    pose.timestamp = t;
    return pose;
}

} // namespace

void SceneConfig::validate() const {
    if (num_sweeps < 1) throw ConfigError("num_sweeps: must be >= 1");
    if (num_objects < 0) throw ConfigError("num_objects: must be >= 0");
    if (!(sweep_dt > 0.0)) throw ConfigError("sweep_dt: must be > 0");
    if (sweeps_per_annotation < 1) throw ConfigError("sweeps_per_annotation: must be >= 1");
    if (num_cameras < 0) throw ConfigError("num_cameras: must be >= 0");
    if (image_width < 1) throw ConfigError("image_width: must be >= 1");
    if (image_height < 1) throw ConfigError("image_height: must be >= 1");
    if (!(focal_px > 0.0)) throw ConfigError("focal_px: must be > 0");
    if (range_noise_sigma < 0.0) throw ConfigError("range_noise_sigma: must be >= 0");
    if (points_per_object < 0) throw ConfigError("points_per_object: must be >= 0");
    if (clutter_points < 0) throw ConfigError("clutter_points: must be >= 0");
    if (!(clutter_radius > 0.0)) throw ConfigError("clutter_radius: must be > 0");
    if (speed_min < 0.0) throw ConfigError("speed_min: must be >= 0");
    if (speed_max < speed_min) throw ConfigError("speed_max: must be >= speed_min");
    if (yaw_rate_max < 0.0) throw ConfigError("yaw_rate_max: must be >= 0");
    const double m = sweep_dt * sweeps_per_annotation;
    if (yaw_rate_max * m >= std::numbers::pi) {
        throw ConfigError("yaw_rate_max: |yaw_rate| * annotation interval must stay below pi");
    }
    if (dropout_ref_distance < 0.0) throw ConfigError("dropout_ref_distance: must be >= 0");
    if (!(place_min_radius > 0.0)) throw ConfigError("place_min_radius: must be > 0");
    if (place_max_radius < place_min_radius) {
        throw ConfigError("place_max_radius: must be >= place_min_radius");
    }
    if (place_bearing_deg < 0.0 || place_bearing_deg > 180.0) {
        throw ConfigError("place_bearing_deg: must be in [0, 180]");
    }
    resolve_classes(classes);
}

std::string SceneConfig::canonical_json() const {
    json j;
    j["num_objects"] = num_objects;
    j["num_sweeps"] = num_sweeps;
    j["sweep_dt"] = sweep_dt;
    j["sweeps_per_annotation"] = sweeps_per_annotation;
    j["num_cameras"] = num_cameras;
    j["image_width"] = image_width;
    j["image_height"] = image_height;
    j["focal_px"] = focal_px;
    j["range_noise_sigma"] = range_noise_sigma;
    j["points_per_object"] = points_per_object;
    j["clutter_points"] = clutter_points;
    j["clutter_radius"] = clutter_radius;
    j["speed_min"] = speed_min;
    j["speed_max"] = speed_max;
    j["yaw_rate_max"] = yaw_rate_max;
    j["dropout_ref_distance"] = dropout_ref_distance;
    j["ego_speed"] = ego_speed;
    j["place_min_radius"] = place_min_radius;
    j["place_max_radius"] = place_max_radius;
    j["place_bearing_deg"] = place_bearing_deg;
    j["random_visibility"] = random_visibility;
    j["classes"] = classes;
    j["seed"] = seed;
    return j.dump();
}

std::string SceneConfig::hash() const { return hex64(fnv1a64(canonical_json())); }

SceneBundle generate_scene(const SceneConfig& config) {
    config.validate();
    const auto class_specs = resolve_classes(config.classes);
    const Rng master(config.seed);

    SceneBundle bundle;
    Scene& scene = bundle.scene;
    scene.seed = config.seed;
    scene.annotation_interval = config.sweep_dt * config.sweeps_per_annotation;
    bundle.config_hash = config.hash();

    // Cameras: forward-ish fan around the ego heading.
    for (int k = 0; k < config.num_cameras; ++k) {
        CameraModel cam;
        cam.fx = cam.fy = config.focal_px;
        cam.width = config.image_width;
        cam.height = config.image_height;
        cam.cx = 0.5 * config.image_width;
        cam.cy = 0.5 * config.image_height;
        double yaw = 0.0;
        if (config.num_cameras > 1) {
            const double spread = std::numbers::pi / 4.0; // +/-45 degrees
            yaw = -spread + 2.0 * spread * static_cast<double>(k) /
                                static_cast<double>(config.num_cameras - 1);
        }
        RigidTransform mount = RigidTransform::rotate_z(yaw).compose(camera_axes());
        mount.translation = Eigen::Vector3d(1.2, 0.0, 1.5);
        cam.t_ego_cam = mount;
        scene.cameras.push_back(cam);
    }

    // Objects.
    std::vector<ObjectState> objects;
    const Rng obj_stream = master.split("objects");
    for (int i = 0; i < config.num_objects; ++i) {
        Rng rng = obj_stream.split(static_cast<std::uint64_t>(i));
        ObjectState obj;
        const ClassSpec& spec = class_specs[rng.uniform_index(class_specs.size())];
        obj.truth.instance_id = [i] {
            std::ostringstream os;
            os << "obj-" << i;
            return os.str();
        }();
        obj.truth.class_label = spec.name;
        obj.truth.shape.kind = spec.kind;
        obj.truth.shape.size = spec.size;
        for (int a = 0; a < 3; ++a) {
            obj.truth.shape.size[a] *= 1.0 + rng.uniform(-0.1, 0.1);
        }
        const double bearing =
            rng.uniform(-config.place_bearing_deg, config.place_bearing_deg) *
            std::numbers::pi / 180.0;
        const double dist = rng.uniform(config.place_min_radius, config.place_max_radius);
        obj.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double speed = rng.uniform(config.speed_min, config.speed_max);
        obj.truth.velocity =
            speed * Eigen::Vector3d(std::cos(obj.heading), std::sin(obj.heading), 0.0);
        obj.truth.yaw_rate = config.yaw_rate_max == 0.0
                                 ? 0.0
                                 : rng.uniform(-config.yaw_rate_max, config.yaw_rate_max);
        obj.truth.pose0 =
            BoxPose(Eigen::Vector3d(dist * std::cos(bearing), dist * std::sin(bearing),
                                    0.5 * obj.truth.shape.size.z()),
                    RigidTransform::rotate_z(obj.heading).rotation, obj.truth.shape.size, 0.0);
        objects.push_back(std::move(obj));
    }

    const RigidTransform sensor_mount = RigidTransform::translate(0.0, 0.0, kSensorHeight);

    // Sweeps.
    const Rng lidar_stream = master.split("lidar");
    const Rng clutter_stream = master.split("clutter");
    for (int k = 0; k < config.num_sweeps; ++k) {
        Sweep sweep;
        sweep.timestamp = config.sweep_dt * k;
        sweep.ego_pose = RigidTransform::translate(config.ego_speed * sweep.timestamp, 0.0, 0.0);
        sweep.sensor_mount = sensor_mount;
        const RigidTransform global_from_sensor = sweep.sensor_to_global();
        const RigidTransform sensor_from_global = global_from_sensor.inverse();

        for (std::size_t i = 0; i < objects.size(); ++i) {
            Rng rng = lidar_stream.split(static_cast<std::uint64_t>(k),
                                         static_cast<std::uint64_t>(i));
            const ObjectState& obj = objects[i];
            const BoxPose pose = object_pose_at(obj, sweep.timestamp);
            const float intensity_base =
                0.2f + 0.6f * static_cast<float>(fnv1a64(obj.truth.class_label) % 256) / 255.0f;
            for (int p = 0; p < config.points_per_object; ++p) {
                const Eigen::Vector3d local = obj.truth.shape.sample_surface(rng);
                const Eigen::Vector3d global = pose.orientation * local + pose.center;
                Eigen::Vector3d sensor = sensor_from_global.apply(global);
                const double dist = sensor.norm();
                if (config.dropout_ref_distance > 0.0 && dist > config.dropout_ref_distance) {
                    if (rng.uniform() > config.dropout_ref_distance / dist) continue;
                }
                if (config.range_noise_sigma > 0.0 && dist > 0.0) {
                    sensor += rng.normal(0.0, config.range_noise_sigma) * (sensor / dist);
                }
                PointXYZI pt;
                pt.x = static_cast<float>(sensor.x());
                pt.y = static_cast<float>(sensor.y());
                pt.z = static_cast<float>(sensor.z());
                pt.intensity = intensity_base + 0.05f * static_cast<float>(rng.uniform());
                sweep.points.push_back(pt);
            }
        }

        Rng crng = clutter_stream.split(static_cast<std::uint64_t>(k));
        for (int p = 0; p < config.clutter_points; ++p) {
            const double r = config.clutter_radius * std::sqrt(crng.uniform());
            const double phi = crng.uniform(0.0, 2.0 * std::numbers::pi);
            const Eigen::Vector3d global(sweep.ego_pose.translation.x() + r * std::cos(phi),
                                         sweep.ego_pose.translation.y() + r * std::sin(phi), 0.0);
            Eigen::Vector3d sensor = sensor_from_global.apply(global);
            const double dist = sensor.norm();
            if (config.range_noise_sigma > 0.0 && dist > 0.0) {
                sensor += crng.normal(0.0, config.range_noise_sigma) * (sensor / dist);
            }
            PointXYZI pt;
            pt.x = static_cast<float>(sensor.x());
            pt.y = static_cast<float>(sensor.y());
            pt.z = static_cast<float>(sensor.z());
            pt.intensity = 0.1f;
            sweep.points.push_back(pt);
        }
        scene.sweeps.push_back(std::move(sweep));
    }

    // Annotations: the last sweep is always annotated, then every
    // sweeps_per_annotation-th sweep backwards from it.
    const Rng vis_stream = master.split("visibility");
    std::vector<int> annotated;
    for (int k = 0; k < config.num_sweeps; ++k) {
        if ((config.num_sweeps - 1 - k) % config.sweeps_per_annotation == 0) {
            annotated.push_back(k);
        }
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        Track track;
        track.instance_id = objects[i].truth.instance_id;
        track.class_label = objects[i].truth.class_label;
        for (int k : annotated) {
            AnnotatedBox ab;
            ab.pose = object_pose_at(objects[i], scene.sweeps[static_cast<std::size_t>(k)].timestamp);
            if (config.random_visibility) {
                Rng vr = vis_stream.split(static_cast<std::uint64_t>(k),
                                          static_cast<std::uint64_t>(i));
                ab.visibility = vr.uniform();
            }
            track.boxes.push_back(ab);
        }
        scene.tracks.push_back(std::move(track));
        bundle.truths.push_back(objects[i].truth);
    }

    // Caption sidecar: one entry per (instance, camera, annotated t) whose box
    // projects fully inside the image.
    for (const auto& track : scene.tracks) {
        for (const auto& ab : track.boxes) {
            const int k = scene.sweep_index_at(ab.pose.timestamp);
            const auto& ego = scene.sweeps[static_cast<std::size_t>(k)].ego_pose;
            const auto views = select_valid_views(track.instance_id, ab.pose, 1.0, scene.cameras,
                                                  ego, 0.0);
            for (const auto& v : views) {
                bundle.captions[{track.instance_id, v.camera_index, ab.pose.timestamp}] =
                    caption_for_class(track.class_label);
            }
        }
    }

    return bundle;
}

ImageCrop render_crop_stub(const Scene& scene, const std::string& instance_id, int camera_index,
                           double t, double min_visibility) {
    const Track* track = scene.find_track(instance_id);
    if (!track) throw NotVisibleError("render_crop_stub: unknown instance " + instance_id);
    if (camera_index < 0 || camera_index >= static_cast<int>(scene.cameras.size())) {
        throw NotVisibleError("render_crop_stub: camera index out of range");
    }
    const AnnotatedBox* box = track->box_at(t);
    if (!box) throw NotVisibleError("render_crop_stub: instance not annotated at t");
    const int k = scene.sweep_index_at(t);
    if (k < 0) throw NotVisibleError("render_crop_stub: t is not a sweep timestamp");
    const auto views =
        select_valid_views(instance_id, box->pose, box->visibility, scene.cameras,
                           scene.sweeps[static_cast<std::size_t>(k)].ego_pose, min_visibility);
    const CropCandidate* chosen = nullptr;
    for (const auto& v : views) {
        if (v.camera_index == camera_index) chosen = &v;
    }
    if (!chosen) throw NotVisibleError("render_crop_stub: instance not visible in camera");

    const CameraModel& cam = scene.cameras[static_cast<std::size_t>(camera_index)];
    const PixelRect rect = crop_pixel_rect(*chosen, cam);
    ImageCrop crop;
    crop.u0 = rect.u0;
    crop.v0 = rect.v0;
    crop.width = rect.width;
    crop.height = rect.height;
    crop.rgb.resize(static_cast<std::size_t>(rect.width) * rect.height * 3);

    // Procedural texture: class-keyed base color, instance-keyed stripes.
    const std::uint64_t class_hash = fnv1a64(track->class_label);
    const std::uint64_t inst_hash = fnv1a64(instance_id);
    const std::uint8_t base[3] = {static_cast<std::uint8_t>(64 + class_hash % 160),
                                  static_cast<std::uint8_t>(64 + (class_hash >> 8) % 160),
                                  static_cast<std::uint8_t>(64 + (class_hash >> 16) % 160)};
    const int period = 4 + static_cast<int>(inst_hash % 9);
    for (int y = 0; y < rect.height; ++y) {
        for (int x = 0; x < rect.width; ++x) {
            const bool stripe = ((x + y) / period) % 2 == 0;
            const std::size_t off = 3 * (static_cast<std::size_t>(y) * rect.width + x);
            for (int ch = 0; ch < 3; ++ch) {
                const int v = stripe ? base[ch] : base[ch] / 2;
                crop.rgb[off + static_cast<std::size_t>(ch)] = static_cast<std::uint8_t>(v);
            }
        }
    }
    return crop;
}

void SyntheticCloudConfig::validate() const {
    if (count < 0) throw ConfigError("count: must be >= 0");
    if (points_per_cloud < 1) throw ConfigError("points_per_cloud: must be >= 1");
    if (views_per_object < 1) throw ConfigError("views_per_object: must be >= 1");
    if (size_jitter < 0.0 || size_jitter >= 1.0) throw ConfigError("size_jitter: must be in [0, 1)");
    resolve_classes(classes);
}

std::string SyntheticCloudConfig::canonical_json() const {
    json j;
    j["count"] = count;
    j["points_per_cloud"] = points_per_cloud;
    j["views_per_object"] = views_per_object;
    j["size_jitter"] = size_jitter;
    j["classes"] = classes;
    j["seed"] = seed;
    return j.dump();
}

std::string SyntheticCloudConfig::hash() const { return hex64(fnv1a64(canonical_json())); }

std::vector<SyntheticObject> generate_synthetic_objects(const SyntheticCloudConfig& config) {
    config.validate();
    const auto class_specs = resolve_classes(config.classes);
    const Rng master(config.seed);
    std::vector<SyntheticObject> out;
    out.reserve(static_cast<std::size_t>(config.count));
    for (int i = 0; i < config.count; ++i) {
        Rng rng = master.split("cad").split(static_cast<std::uint64_t>(i));
        SyntheticObject obj;
        const ClassSpec& spec = class_specs[rng.uniform_index(class_specs.size())];
        obj.class_label = spec.name;
        {
            std::ostringstream os;
            os << "cad-" << i;
            obj.object_id = os.str();
        }
        ObjectTemplate shape;
        shape.kind = spec.kind;
        shape.size = spec.size;
        for (int a = 0; a < 3; ++a) {
            shape.size[a] *= 1.0 + rng.uniform(-config.size_jitter, config.size_jitter);
        }
        const double scale = 0.5 * shape.size.maxCoeff();
        obj.points.reserve(static_cast<std::size_t>(config.points_per_cloud));
        for (int p = 0; p < config.points_per_cloud; ++p) {
            obj.points.push_back(shape.sample_surface(rng) / scale);
        }
        for (int v = 0; v < config.views_per_object; ++v) {
            std::ostringstream os;
            os << "render:" << obj.object_id << ":" << v;
            obj.view_ids.push_back(os.str());
        }
        obj.caption = caption_for_class(obj.class_label);
        out.push_back(std::move(obj));
    }
    return out;
}

std::string caption_for_class(const std::string& class_label) {
    std::string pretty = class_label;
    std::replace(pretty.begin(), pretty.end(), '_', ' ');
    return "a point cloud of a " + pretty;
}

} // namespace trimix
