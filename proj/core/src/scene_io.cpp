#include "trimix/scene_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trimix/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary point files are little-endian; big-endian hosts are unsupported");

namespace trimix {

namespace {

using json = nlohmann::ordered_json;

json transform_to_json(const RigidTransform& t) {
    json j;
    j["q"] = {t.rotation.w(), t.rotation.x(), t.rotation.y(), t.rotation.z()};
    j["t"] = {t.translation.x(), t.translation.y(), t.translation.z()};
    return j;
}

RigidTransform transform_from_json(const json& j) {
    const auto& q = j.at("q");
    const auto& t = j.at("t");
    return {Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                               q.at(2).get<double>(), q.at(3).get<double>()),
            Eigen::Vector3d(t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>())};
}

json box_to_json(const BoxPose& b) {
    json j;
    j["center"] = {b.center.x(), b.center.y(), b.center.z()};
    j["orientation"] = {b.orientation.w(), b.orientation.x(), b.orientation.y(),
                        b.orientation.z()};
    j["size"] = {b.size.x(), b.size.y(), b.size.z()};
    j["timestamp"] = b.timestamp;
    return j;
}

BoxPose box_from_json(const json& j) {
    const auto& c = j.at("center");
    const auto& q = j.at("orientation");
    const auto& s = j.at("size");
    return BoxPose(
        Eigen::Vector3d(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()),
        Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                           q.at(3).get<double>()),
        Eigen::Vector3d(s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()),
        j.at("timestamp").get<double>());
}

std::string sweep_filename(std::size_t index) {
    std::ostringstream os;
    os << "sweeps/sweep_";
    os.width(4);
    os.fill('0');
    os << index << ".bin";
    return os.str();
}

void write_points(const std::filesystem::path& path, const std::vector<PointXYZI>& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(points.data()),
              static_cast<std::streamsize>(points.size() * sizeof(PointXYZI)));
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<PointXYZI> read_points(const std::filesystem::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open: " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != expected * sizeof(PointXYZI)) {
        throw IoError("point file size mismatch: " + path.string());
    }
    in.seekg(0);
    std::vector<PointXYZI> points(expected);
    in.read(reinterpret_cast<char*>(points.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("read failed: " + path.string());
    return points;
}

} // namespace

void write_scene(const std::filesystem::path& dir, const SceneBundle& bundle) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "sweeps", ec);
    if (ec) throw IoError("cannot create scene directory: " + dir.string());

    const Scene& scene = bundle.scene;
    json j;
    j["format_version"] = 1;
    j["config_hash"] = bundle.config_hash;
    j["seed"] = scene.seed;
    j["annotation_interval"] = scene.annotation_interval;

    j["sweeps"] = json::array();
    for (std::size_t i = 0; i < scene.sweeps.size(); ++i) {
        const Sweep& s = scene.sweeps[i];
        json sj;
        sj["timestamp"] = s.timestamp;
        sj["file"] = sweep_filename(i);
        sj["point_count"] = s.points.size();
        sj["ego_pose"] = transform_to_json(s.ego_pose);
        sj["sensor_mount"] = transform_to_json(s.sensor_mount);
        j["sweeps"].push_back(sj);
        write_points(dir / sweep_filename(i), s.points);
    }

    j["cameras"] = json::array();
    for (const auto& c : scene.cameras) {
        json cj;
        cj["fx"] = c.fx;
        cj["fy"] = c.fy;
        cj["cx"] = c.cx;
        cj["cy"] = c.cy;
        cj["width"] = c.width;
        cj["height"] = c.height;
        cj["t_ego_cam"] = transform_to_json(c.t_ego_cam);
        j["cameras"].push_back(cj);
    }

    j["annotations"] = json::array();
    for (const auto& t : scene.tracks) {
        json tj;
        tj["instance"] = t.instance_id;
        tj["class"] = t.class_label;
        tj["boxes"] = json::array();
        for (const auto& b : t.boxes) {
            json bj = box_to_json(b.pose);
            bj["visibility"] = b.visibility;
            tj["boxes"].push_back(bj);
        }
        j["annotations"].push_back(tj);
    }

    j["truth"] = json::array();
    for (const auto& t : bundle.truths) {
        json tj;
        tj["instance"] = t.instance_id;
        tj["class"] = t.class_label;
        tj["template"] = {{"kind", template_kind_name(t.shape.kind)},
                          {"size", {t.shape.size.x(), t.shape.size.y(), t.shape.size.z()}}};
        tj["velocity"] = {t.velocity.x(), t.velocity.y(), t.velocity.z()};
        tj["yaw_rate"] = t.yaw_rate;
        tj["pose0"] = box_to_json(t.pose0);
        j["truth"].push_back(tj);
    }

    {
        std::ofstream out(dir / "scene.json");
        if (!out) throw IoError("cannot open for writing: " + (dir / "scene.json").string());
        out << j.dump(2) << "\n";
    }
    {
        json cj = json::array();
        for (const auto& [key, caption] : bundle.captions) {
            json e;
            e["instance"] = key.instance_id;
            e["camera"] = key.camera;
            e["timestamp"] = key.timestamp;
            e["caption"] = caption;
            cj.push_back(e);
        }
        std::ofstream out(dir / "captions.json");
        if (!out) throw IoError("cannot open for writing: " + (dir / "captions.json").string());
        out << cj.dump(2) << "\n";
    }
}

SceneBundle read_scene(const std::filesystem::path& dir) {
    std::ifstream in(dir / "scene.json");
    if (!in) throw IoError("cannot open: " + (dir / "scene.json").string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("malformed scene.json: " + std::string(e.what()));
    }

    SceneBundle bundle;
    Scene& scene = bundle.scene;
    try {
        bundle.config_hash = j.value("config_hash", "");
        scene.seed = j.at("seed").get<std::uint64_t>();
        scene.annotation_interval = j.at("annotation_interval").get<double>();

        for (const auto& sj : j.at("sweeps")) {
            Sweep s;
            s.timestamp = sj.at("timestamp").get<double>();
            s.ego_pose = transform_from_json(sj.at("ego_pose"));
            s.sensor_mount = transform_from_json(sj.at("sensor_mount"));
            s.points = read_points(dir / sj.at("file").get<std::string>(),
                                   sj.at("point_count").get<std::size_t>());
            if (!scene.sweeps.empty() && s.timestamp <= scene.sweeps.back().timestamp) {
                throw IoError("scene.json: sweep timestamps not strictly increasing");
            }
            scene.sweeps.push_back(std::move(s));
        }
        for (const auto& cj : j.at("cameras")) {
            CameraModel c;
            c.fx = cj.at("fx").get<double>();
            c.fy = cj.at("fy").get<double>();
            c.cx = cj.at("cx").get<double>();
            c.cy = cj.at("cy").get<double>();
            c.width = cj.at("width").get<int>();
            c.height = cj.at("height").get<int>();
            c.t_ego_cam = transform_from_json(cj.at("t_ego_cam"));
            if (!(c.fx > 0.0) || !(c.fy > 0.0) || c.width <= 0 || c.height <= 0) {
                throw IoError("scene.json: invalid camera intrinsics");
            }
            scene.cameras.push_back(c);
        }
        for (const auto& tj : j.at("annotations")) {
            Track t;
            t.instance_id = tj.at("instance").get<std::string>();
            t.class_label = tj.at("class").get<std::string>();
            for (const auto& bj : tj.at("boxes")) {
                AnnotatedBox ab;
                ab.pose = box_from_json(bj);
                ab.visibility = bj.at("visibility").get<double>();
                if (scene.sweep_index_at(ab.pose.timestamp) < 0) {
                    throw IoError("scene.json: annotation timestamp has no matching sweep");
                }
                t.boxes.push_back(ab);
            }
            scene.tracks.push_back(std::move(t));
        }
        if (j.contains("truth")) {
            for (const auto& tj : j.at("truth")) {
                ObjectTruth t;
                t.instance_id = tj.at("instance").get<std::string>();
                t.class_label = tj.at("class").get<std::string>();
                t.shape.kind = template_kind_from_name(tj.at("template").at("kind").get<std::string>());
                const auto& sz = tj.at("template").at("size");
                t.shape.size = {sz.at(0).get<double>(), sz.at(1).get<double>(),
                                sz.at(2).get<double>()};
                const auto& v = tj.at("velocity");
                t.velocity = {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
                t.yaw_rate = tj.at("yaw_rate").get<double>();
                t.pose0 = box_from_json(tj.at("pose0"));
                bundle.truths.push_back(std::move(t));
            }
        }
    } catch (const json::exception& e) {
        throw IoError("scene.json: missing or mistyped field: " + std::string(e.what()));
    }

    std::ifstream cin_(dir / "captions.json");
    if (cin_) {
        json cj;
        try {
            cin_ >> cj;
            for (const auto& e : cj) {
                bundle.captions[{e.at("instance").get<std::string>(), e.at("camera").get<int>(),
                                 e.at("timestamp").get<double>()}] =
                    e.at("caption").get<std::string>();
            }
        } catch (const json::exception& e) {
            throw IoError("malformed captions.json: " + std::string(e.what()));
        }
    }
    return bundle;
}

} // namespace trimix
