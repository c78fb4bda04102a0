#include "trimix/contrastive.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "trimix/common.hpp"

namespace trimix {

namespace {

std::string normalize(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

Eigen::VectorXd gaussian_unit(Rng rng, int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    const double n = v.norm();
    if (!(n > 0.0)) {
        v.setZero();
        v[0] = 1.0;
        return v;
    }
    return v / n;
}

} // namespace

HashProvider::HashProvider(int dim, std::uint64_t seed, std::vector<std::string> vocabulary,
                           double text_noise, double image_noise)
    : dim_(dim), seed_(seed), text_noise_(text_noise), image_noise_(image_noise) {
    if (dim < 2) throw std::invalid_argument("HashProvider: dim must be >= 2");
    for (auto& w : vocabulary) w = normalize(std::move(w));
    // Longest first so "construction vehicle" beats any shorter substring.
    std::sort(vocabulary.begin(), vocabulary.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    vocabulary_ = std::move(vocabulary);
}

Eigen::VectorXd HashProvider::anchor(const std::string& word) const {
    return gaussian_unit(Rng(seed_).split("anchor").split(normalize(word)), dim_);
}

Eigen::VectorXd HashProvider::embed(const std::string& input, std::string_view stream,
                                    double noise) const {
    const std::string text = normalize(input);
    const Eigen::VectorXd dir = gaussian_unit(Rng(seed_).split(stream).split(text), dim_);
    for (const auto& word : vocabulary_) {
        if (text.find(word) != std::string::npos) {
            Eigen::VectorXd v = anchor(word) + noise * dir;
            return v / v.norm();
        }
    }
    return dir;
}

Eigen::VectorXd HashProvider::embed_text(const std::string& text) const {
    return embed(text, "text", text_noise_);
}

Eigen::VectorXd HashProvider::embed_image(const std::string& key) const {
    return embed(key, "image", image_noise_);
}

FileProvider::FileProvider(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open provider file: " + path.string());
    std::uint32_t dim = 0, count = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in || dim == 0) throw IoError("provider file: bad header: " + path.string());
    dim_ = static_cast<int>(dim);
    for (std::uint32_t r = 0; r < count; ++r) {
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof(len));
        if (!in) throw IoError("provider file: truncated key length: " + path.string());
        std::string key(len, '\0');
        in.read(key.data(), len);
        std::vector<float> values(dim);
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(dim * sizeof(float)));
        if (!in) throw IoError("provider file: truncated record: " + path.string());
        Eigen::VectorXd v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = values[static_cast<std::size_t>(i)];
        const double n = v.norm();
        if (!(n > 0.0)) throw IoError("provider file: zero vector for key '" + key + "'");
        table_[key] = v / n;
    }
}

Eigen::VectorXd FileProvider::lookup(const std::string& key) const {
    const auto it = table_.find(key);
    if (it == table_.end()) {
        throw std::invalid_argument("FileProvider: no embedding for key '" + key + "'");
    }
    return it->second;
}

void write_provider_file(const std::filesystem::path& path,
                         const std::map<std::string, Eigen::VectorXd>& table) {
    if (table.empty()) throw std::invalid_argument("write_provider_file: empty table");
    const auto dim = static_cast<std::uint32_t>(table.begin()->second.size());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const auto count = static_cast<std::uint32_t>(table.size());
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& [key, vec] : table) {
        if (vec.size() != dim) {
            throw std::invalid_argument("write_provider_file: inconsistent dimensions");
        }
        const auto len = static_cast<std::uint32_t>(key.size());
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        out.write(key.data(), len);
        for (Eigen::Index i = 0; i < vec.size(); ++i) {
            const float f = static_cast<float>(vec[i]);
            out.write(reinterpret_cast<const char*>(&f), sizeof(f));
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace trimix
