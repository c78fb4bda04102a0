#include "trimix/triplet.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "trimix/common.hpp"

namespace trimix {

namespace {

using json = nlohmann::ordered_json;

void put_bytes(std::vector<std::uint8_t>& buf, const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf.insert(buf.end(), p, p + n);
}

template <typename T> void put(std::vector<std::uint8_t>& buf, T value) {
    put_bytes(buf, &value, sizeof(T));
}

void put_str(std::vector<std::uint8_t>& buf, const std::string& s) {
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(s.size()));
    put_bytes(buf, s.data(), s.size());
}

// Cursor with bounds checking; failures report the absolute byte offset.
struct Reader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) const {
        if (pos + n > size) {
            throw IoError("corrupt record at byte offset " + std::to_string(pos) +
                          ": truncated " + what);
        }
    }
    template <typename T> T get(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, data + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    std::string get_str(const char* what) {
        const auto n = get<std::uint32_t>(what);
        need(n, what);
        std::string s(reinterpret_cast<const char*>(data + pos), n);
        pos += n;
        return s;
    }
};

std::vector<std::uint8_t> encode_record(const Triplet& t) {
    std::vector<std::uint8_t> payload;
    put<std::uint8_t>(payload, static_cast<std::uint8_t>(t.domain));
    put_str(payload, t.instance_id);
    put_str(payload, t.class_label);
    put_str(payload, t.caption);
    put_str(payload, t.crop.view_id);
    put<std::int32_t>(payload, t.crop.camera);
    put<double>(payload, t.crop.timestamp);
    put<float>(payload, t.crop.u_min);
    put<float>(payload, t.crop.v_min);
    put<float>(payload, t.crop.u_max);
    put<float>(payload, t.crop.v_max);
    put<float>(payload, t.crop.visibility);
    put<double>(payload, t.t0);
    put<std::uint32_t>(payload, t.source_sweeps);
    put<std::uint32_t>(payload, static_cast<std::uint32_t>(t.points.size()));
    for (const auto& p : t.points) {
        put<float>(payload, p.x());
        put<float>(payload, p.y());
        put<float>(payload, p.z());
    }
    std::vector<std::uint8_t> record;
    put<std::uint32_t>(record, static_cast<std::uint32_t>(payload.size()));
    record.insert(record.end(), payload.begin(), payload.end());
    return record;
}

void validate_triplet(const Triplet& t, std::size_t offset) {
    if (t.caption.empty()) {
        throw IoError("corrupt record at byte offset " + std::to_string(offset) +
                      ": empty caption");
    }
    if (t.points.empty()) {
        throw IoError("corrupt record at byte offset " + std::to_string(offset) +
                      ": empty point cloud");
    }
    if (t.domain != Domain::Synthetic && t.domain != Domain::Outdoor) {
        throw IoError("corrupt record at byte offset " + std::to_string(offset) +
                      ": bad domain tag");
    }
}

} // namespace

const char* domain_name(Domain d) { return d == Domain::Synthetic ? "synthetic" : "outdoor"; }

AssembleResult assemble_triplets(const FusedObjectCloud& cloud, const std::string& class_label,
                                 std::span<const CropCandidate> crops,
                                 const std::map<CaptionKey, std::string>& captions) {
    AssembleResult out;
    std::vector<Eigen::Vector3f> points;
    points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) points.push_back(p.cast<float>());

    for (const auto& crop : crops) {
        const auto it = captions.find({crop.instance_id, crop.camera_index, crop.timestamp});
        if (it == captions.end()) {
            ++out.skipped_missing_caption;
            continue;
        }
        Triplet t;
        t.instance_id = cloud.instance_id;
        t.class_label = class_label;
        t.domain = Domain::Outdoor;
        t.caption = it->second;
        t.crop.camera = crop.camera_index;
        t.crop.timestamp = crop.timestamp;
        t.crop.u_min = static_cast<float>(crop.u_min);
        t.crop.v_min = static_cast<float>(crop.v_min);
        t.crop.u_max = static_cast<float>(crop.u_max);
        t.crop.v_max = static_cast<float>(crop.v_max);
        t.crop.visibility = static_cast<float>(crop.visibility);
        t.t0 = cloud.t0;
        t.source_sweeps = static_cast<std::uint32_t>(cloud.source_sweep_count);
        t.points = points;
        out.triplets.push_back(std::move(t));
    }
    return out;
}

TripletManifest write_dataset(const std::filesystem::path& dir,
                              std::span<const Triplet> triplets, const std::string& name,
                              const std::string& config_hash) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create dataset directory: " + dir.string());

    TripletManifest manifest;
    manifest.name = name;
    manifest.config_hash = config_hash;
    manifest.total = triplets.size();

    std::ofstream records(dir / manifest.records_file, std::ios::binary);
    if (!records) {
        throw IoError("cannot open for writing: " + (dir / manifest.records_file).string());
    }
    std::uint64_t bytes = 0;
    for (const auto& t : triplets) {
        const auto rec = encode_record(t);
        records.write(reinterpret_cast<const char*>(rec.data()),
                      static_cast<std::streamsize>(rec.size()));
        bytes += rec.size();
        manifest.counts[domain_name(t.domain)][t.class_label] += 1;
    }
    if (!records) throw IoError("write failed: " + (dir / manifest.records_file).string());
    manifest.records_bytes = bytes;

    json j;
    j["format_version"] = 1;
    j["name"] = manifest.name;
    j["config_hash"] = manifest.config_hash;
    j["total"] = manifest.total;
    j["counts"] = json::object();
    for (const auto& [domain, per_class] : manifest.counts) {
        json cj = json::object();
        for (const auto& [cls, n] : per_class) cj[cls] = n;
        j["counts"][domain] = cj;
    }
    j["records_file"] = manifest.records_file;
    j["records_bytes"] = manifest.records_bytes;

    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw IoError("cannot open for writing: " + (dir / "manifest.json").string());
    mf << j.dump(2) << "\n";
    return manifest;
}

Dataset read_dataset(const std::filesystem::path& dir) {
    Dataset out;
    {
        std::ifstream mf(dir / "manifest.json");
        if (!mf) throw IoError("cannot open: " + (dir / "manifest.json").string());
        json j;
        try {
            mf >> j;
            out.manifest.name = j.at("name").get<std::string>();
            out.manifest.config_hash = j.at("config_hash").get<std::string>();
            out.manifest.total = j.at("total").get<std::size_t>();
            out.manifest.records_file = j.at("records_file").get<std::string>();
            out.manifest.records_bytes = j.at("records_bytes").get<std::uint64_t>();
            for (const auto& [domain, per_class] : j.at("counts").items()) {
                for (const auto& [cls, n] : per_class.items()) {
                    out.manifest.counts[domain][cls] = n.get<std::size_t>();
                }
            }
        } catch (const json::exception& e) {
            throw IoError("malformed manifest.json: " + std::string(e.what()));
        }
    }

    const auto path = dir / out.manifest.records_file;
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open: " + path.string());
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::uint8_t> buf(size);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
    if (!in) throw IoError("read failed: " + path.string());
    if (size != out.manifest.records_bytes) {
        throw IoError("corrupt record at byte offset " + std::to_string(size) +
                      ": file size does not match manifest records_bytes");
    }

    Reader r{buf.data(), buf.size()};
    while (r.pos < r.size) {
        const std::size_t record_start = r.pos;
        const auto payload_size = r.get<std::uint32_t>("record header");
        if (r.pos + payload_size > r.size) {
            throw IoError("corrupt record at byte offset " + std::to_string(record_start) +
                          ": truncated payload");
        }
        const std::size_t payload_end = r.pos + payload_size;
        Triplet t;
        t.domain = static_cast<Domain>(r.get<std::uint8_t>("domain"));
        t.instance_id = r.get_str("instance_id");
        t.class_label = r.get_str("class_label");
        t.caption = r.get_str("caption");
        t.crop.view_id = r.get_str("view_id");
        t.crop.camera = r.get<std::int32_t>("camera");
        t.crop.timestamp = r.get<double>("crop timestamp");
        t.crop.u_min = r.get<float>("aabb");
        t.crop.v_min = r.get<float>("aabb");
        t.crop.u_max = r.get<float>("aabb");
        t.crop.v_max = r.get<float>("aabb");
        t.crop.visibility = r.get<float>("visibility");
        t.t0 = r.get<double>("t0");
        t.source_sweeps = r.get<std::uint32_t>("source_sweeps");
        const auto count = r.get<std::uint32_t>("point count");
        t.points.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            const float x = r.get<float>("point data");
            const float y = r.get<float>("point data");
            const float z = r.get<float>("point data");
            t.points.emplace_back(x, y, z);
        }
        if (r.pos != payload_end) {
            throw IoError("corrupt record at byte offset " + std::to_string(record_start) +
                          ": payload size mismatch");
        }
        validate_triplet(t, record_start);
        out.triplets.push_back(std::move(t));
    }
    if (out.triplets.size() != out.manifest.total) {
        throw IoError("manifest total (" + std::to_string(out.manifest.total) +
                      ") does not match record count (" + std::to_string(out.triplets.size()) +
                      ")");
    }
    return out;
}

std::string image_embed_key(const Triplet& t) {
    if (t.domain == Domain::Synthetic || !t.crop.view_id.empty()) {
        return "img|" + t.class_label + "|" + t.crop.view_id;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "cam%d|t%.9g", t.crop.camera, t.crop.timestamp);
    return "img|" + t.class_label + "|" + t.instance_id + "|" + buf;
}

} // namespace trimix
