#include "nsaug/dsb_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "nsaug/png_io.hpp"
#include "nsaug/rle.hpp"

namespace fs = std::filesystem;

namespace nsaug {

LabeledSample load_sample(const std::string& image_path,
                          const std::optional<std::string>& masks_dir) {
    LabeledSample sample;
    sample.image = read_image_png(image_path);
    sample.id = fs::path(image_path).stem().string();

    if (masks_dir) {
        if (!fs::is_directory(*masks_dir)) throw IoError("masks dir not found: " + *masks_dir);
        std::vector<std::string> files;
        for (const auto& e : fs::directory_iterator(*masks_dir)) {
            if (e.is_regular_file() && e.path().extension() == ".png") {
                files.push_back(e.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        std::vector<Mask> masks;
        for (const auto& f : files) {
            Mask m = read_mask_png(f);
            if (m.height != sample.image.height || m.width != sample.image.width) {
                throw ValidationError("mask " + f + " has shape " + std::to_string(m.height) +
                                      "x" + std::to_string(m.width) + ", image is " +
                                      std::to_string(sample.image.height) + "x" +
                                      std::to_string(sample.image.width));
            }
            masks.push_back(std::move(m));
        }
        sample.masks = resolve_overlaps(sample.image.height, sample.image.width, std::move(masks),
                                        sample.id);
    }
    return sample;
}

std::vector<LabeledSample> load_corpus(const std::string& root, bool with_masks) {
    if (!fs::is_directory(root)) throw IoError("corpus root not found: " + root);
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory() && fs::is_directory(e.path() / "images")) {
            ids.push_back(e.path().filename().string());
        }
    }
    std::sort(ids.begin(), ids.end());

    std::map<std::string, int> domains;
    if (fs::exists(fs::path(root) / "domains.csv")) {
        domains = read_domains_csv((fs::path(root) / "domains.csv").string());
    }

    std::vector<LabeledSample> out;
    for (const auto& id : ids) {
        fs::path image_path = fs::path(root) / id / "images" / (id + ".png");
        if (!fs::exists(image_path)) throw IoError("missing image file: " + image_path.string());
        fs::path masks_path = fs::path(root) / id / "masks";
        std::optional<std::string> masks_dir;
        if (with_masks && fs::is_directory(masks_path)) masks_dir = masks_path.string();
        LabeledSample s = load_sample(image_path.string(), masks_dir);
        if (auto it = domains.find(id); it != domains.end()) s.domain = it->second;
        out.push_back(std::move(s));
    }
    return out;
}

void write_sample(const std::string& root, const LabeledSample& sample) {
    fs::path dir = fs::path(root) / sample.id;
    fs::create_directories(dir / "images");
    write_image_png((dir / "images" / (sample.id + ".png")).string(), sample.image);
    if (sample.masks) {
        fs::create_directories(dir / "masks");
        char name[32];
        for (size_t i = 0; i < sample.masks->instances.size(); ++i) {
            std::snprintf(name, sizeof(name), "%04zu.png", i);
            write_mask_png((dir / "masks" / name).string(), sample.masks->instances[i]);
        }
    }
}

void write_domains_csv(const std::string& path,
                       const std::vector<std::pair<std::string, int>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "sample_id,domain\n";
    for (const auto& [id, domain] : rows) out << id << ',' << domain << '\n';
}

std::map<std::string, int> read_domains_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::map<std::string, int> out;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty domains csv");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError(path + ": malformed row " + line);
        out[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
    }
    return out;
}

void write_submission_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, InstanceMaskSet>>& predictions) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "ImageId,EncodedPixels\n";
    for (const auto& [id, masks] : predictions) {
        for (const Mask& m : masks.instances) {
            out << id << ',' << rle_encode(m) << '\n';
        }
    }
}

}  // namespace nsaug
