#include "nsaug/predictor.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <utility>

#include "nsaug/metrics.hpp"
#include "nsaug/png_io.hpp"

namespace nsaug {

void BlobParams::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ValidationError("blob predictor: threshold must lie in (0,1)");
    if (min_size < 1) throw ValidationError("blob predictor: min_size must be at least 1");
}

namespace {

Prediction blob_predict(const Image& img, const BlobParams& p) {
    const int h = img.height, w = img.width;
    const size_t n = static_cast<size_t>(h) * w;
    std::vector<float> lum(n);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) lum[static_cast<size_t>(y) * w + x] = luminance(img, y, x);

    std::vector<float> sorted = lum;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const float med = sorted[sorted.size() / 2];

    std::vector<float> sal(n);
    for (size_t i = 0; i < n; ++i) sal[i] = std::fabs(lum[i] - med);

    std::vector<uint8_t> fg(n);
    for (size_t i = 0; i < n; ++i) fg[i] = sal[i] > p.threshold;

    Prediction out;
    out.masks = InstanceMaskSet(h, w);
    std::vector<uint8_t> seen(n, 0);
    std::vector<int> stack;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const size_t start = static_cast<size_t>(sy) * w + sx;
            if (!fg[start] || seen[start]) continue;
            stack.assign(1, static_cast<int>(start));
            seen[start] = 1;
            std::vector<int> px;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                px.push_back(cur);
                const int cy = cur / w, cx = cur % w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int ny = cy + dy, nx = cx + dx;
                        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                        const size_t ni = static_cast<size_t>(ny) * w + nx;
                        if (!fg[ni] || seen[ni]) continue;
                        seen[ni] = 1;
                        stack.push_back(static_cast<int>(ni));
                    }
                }
            }
            if (static_cast<int>(px.size()) < p.min_size) continue;
            Mask m(h, w);
            double sal_sum = 0.0;
            for (int i : px) {
                m.data[static_cast<size_t>(i)] = 1;
                sal_sum += sal[static_cast<size_t>(i)];
            }
            out.masks.instances.push_back(std::move(m));
            out.confidence.push_back(
                std::min(1.0, sal_sum / static_cast<double>(px.size()) / 0.5));
        }
    }
    return out;
}

}  // namespace

Predictor make_blob_predictor(const BlobParams& params) {
    params.validate();
    return [params](const Image& img) { return blob_predict(img, params); };
}

BlobParams fit_blob_threshold(const std::vector<LabeledSample>& samples, int min_size) {
    if (samples.empty()) throw ValidationError("fit_blob_threshold: no samples");
    std::string missing;
    for (const auto& s : samples)
        if (!s.masks) missing += missing.empty() ? s.id : ", " + s.id;
    if (!missing.empty())
        throw ValidationError("fit_blob_threshold: samples without ground truth: " + missing);

    BlobParams best;
    best.min_size = min_size;
    double best_score = -1.0;
    for (int i = 1; i <= 30; ++i) {
        BlobParams cand;
        cand.threshold = 0.02 * i;
        cand.min_size = min_size;
        double sum = 0.0;
        for (const auto& s : samples) sum += dsb_map(blob_predict(s.image, cand).masks, *s.masks);
        const double mean = sum / static_cast<double>(samples.size());
        if (mean > best_score) {
            best_score = mean;
            best = cand;
        }
    }
    return best;
}

Predictor make_oracle_predictor(std::vector<LabeledSample> corpus) {
    auto store = std::make_shared<std::vector<LabeledSample>>(std::move(corpus));
    auto index = std::make_shared<std::multimap<uint64_t, size_t>>();
    for (size_t i = 0; i < store->size(); ++i) {
        const auto& img = (*store)[i].image;
        index->emplace(fnv1a64(img.data.data(), img.data.size() * sizeof(float)), i);
    }
    return [store, index](const Image& img) {
        Prediction out;
        out.masks = InstanceMaskSet(img.height, img.width);
        const uint64_t key = fnv1a64(img.data.data(), img.data.size() * sizeof(float));
        auto [lo, hi] = index->equal_range(key);
        for (auto it = lo; it != hi; ++it) {
            const LabeledSample& s = (*store)[it->second];
            if (s.image.height != img.height || s.image.width != img.width ||
                s.image.data != img.data || !s.masks)
                continue;
            out.masks = *s.masks;
            out.confidence.assign(s.masks->instances.size(), 1.0);
            break;
        }
        return out;
    };
}

Predictor make_empty_predictor() {
    return [](const Image& img) {
        Prediction out;
        out.masks = InstanceMaskSet(img.height, img.width);
        return out;
    };
}

namespace {

// Child process speaking the line protocol; dies with the predictor.
struct ExternalProcess {
    std::string command;
    std::string scratch;
    std::FILE* to_child = nullptr;
    std::FILE* from_child = nullptr;
    pid_t pid = -1;
    size_t queries = 0;

    ~ExternalProcess() {
        if (to_child) std::fclose(to_child);  // EOF tells the child to exit
        if (from_child) std::fclose(from_child);
        if (pid > 0) waitpid(pid, nullptr, 0);
    }

    void spawn() {
        std::signal(SIGPIPE, SIG_IGN);  // a dead child surfaces as IoError instead
        int to_pipe[2], from_pipe[2];
        if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
            throw IoError("external predictor: cannot create pipes");
        pid = fork();
        if (pid < 0) throw IoError("external predictor: fork failed");
        if (pid == 0) {
            dup2(to_pipe[0], 0);
            dup2(from_pipe[1], 1);
            close(to_pipe[0]);
            close(to_pipe[1]);
            close(from_pipe[0]);
            close(from_pipe[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_pipe[0]);
        close(from_pipe[1]);
        to_child = fdopen(to_pipe[1], "w");
        from_child = fdopen(from_pipe[0], "r");
        if (!to_child || !from_child) throw IoError("external predictor: fdopen failed");
    }

    std::string round_trip(const std::string& line) {
        if (pid < 0) spawn();
        if (std::fprintf(to_child, "%s\n", line.c_str()) < 0 || std::fflush(to_child) != 0)
            throw IoError("external predictor: child no longer accepts input");
        std::string reply;
        int c;
        while ((c = std::fgetc(from_child)) != EOF && c != '\n') reply.push_back(static_cast<char>(c));
        if (reply.empty() && c == EOF)
            throw IoError("external predictor: child closed its output");
        return reply;
    }
};

}  // namespace

Predictor make_external_predictor(const std::string& command, const std::string& scratch_dir) {
    if (command.empty()) throw ValidationError("external predictor: empty command");
    std::error_code ec;
    std::filesystem::create_directories(scratch_dir, ec);
    if (ec)
        throw IoError("external predictor: cannot create " + scratch_dir + ": " + ec.message());
    auto proc = std::make_shared<ExternalProcess>();
    proc->command = command;
    proc->scratch = scratch_dir;
    return [proc](const Image& img) {
        const std::string png =
            proc->scratch + "/query_" + std::to_string(proc->queries++) + ".png";
        write_image_png(png, img);
        const std::string mask_dir = proc->round_trip(png);
        std::error_code dir_ec;
        std::filesystem::directory_iterator it(mask_dir, dir_ec), end;
        if (dir_ec)
            throw IoError("external predictor: cannot read reply directory " + mask_dir + ": " +
                          dir_ec.message());
        std::vector<std::string> files;
        for (; it != end; ++it)
            if (it->path().extension() == ".png") files.push_back(it->path().string());
        std::sort(files.begin(), files.end());
        std::vector<Mask> masks;
        for (const auto& f : files) masks.push_back(read_mask_png(f));
        Prediction out;
        out.masks = resolve_overlaps(img.height, img.width, std::move(masks),
                                     "external predictor output " + mask_dir);
        out.confidence.assign(out.masks.instances.size(), 1.0);
        return out;
    };
}

}  // namespace nsaug
