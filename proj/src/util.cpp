#include "nsaug/util.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace nsaug {

namespace {
WarnHandler g_warn_handler;  // empty -> stderr
}

void set_warn_handler(WarnHandler handler) { g_warn_handler = std::move(handler); }

void warn(const std::string& message) {
    if (g_warn_handler) {
        g_warn_handler(message);
    } else {
        std::cerr << "warning: " << message << "\n";
    }
}

WarnCapture::WarnCapture() : previous_(g_warn_handler) {
    g_warn_handler = [this](const std::string& m) { messages_.push_back(m); };
}

WarnCapture::~WarnCapture() { g_warn_handler = previous_; }

bool WarnCapture::contains(const std::string& needle) const {
    return std::any_of(messages_.begin(), messages_.end(), [&](const std::string& m) {
        return m.find(needle) != std::string::npos;
    });
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    // splitmix64 finalizer over seed xor golden-ratio-spread salt
    uint64_t z = seed ^ (salt + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

uint64_t RandomStream::next_u64() {
    // splitmix64 step
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int RandomStream::uniform_int(int lo, int hi) {
    if (hi < lo) throw ValidationError("uniform_int: empty range");
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

double RandomStream::normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

uint64_t fnv1a64(const void* data, size_t len, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for hashing: " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
    }
    return h;
}

uint64_t hash_tree(const std::string& root) {
    namespace fs = std::filesystem;
    std::vector<std::string> rel_paths;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            rel_paths.push_back(fs::relative(entry.path(), root).generic_string());
        }
    }
    std::sort(rel_paths.begin(), rel_paths.end());
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& rel : rel_paths) {
        h = fnv1a64(rel.data(), rel.size(), h);
        uint64_t fh = hash_file((fs::path(root) / rel).string());
        h = fnv1a64(&fh, sizeof(fh), h);
    }
    return h;
}

void parallel_for(int64_t n, int jobs, const std::function<void(int64_t)>& fn) {
    if (n <= 0) return;
    jobs = static_cast<int>(std::max<int64_t>(1, std::min<int64_t>(jobs, n)));
    if (jobs == 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (int64_t i = w; i < n; i += jobs) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

}  // namespace nsaug
