#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsaug {

// Error taxonomy used across the library. The CLI maps these onto exit codes
// (ValidationError/IoError -> 2, NumericalError -> 3).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Warning sink. Library code never prints directly; it calls warn() and the
// host (CLI or test) decides where messages go. Default sink writes stderr.

using WarnHandler = std::function<void(const std::string&)>;

void set_warn_handler(WarnHandler handler);
void warn(const std::string& message);

// Captures warnings for the duration of its lifetime. Used by tests that
// assert a warning was (or was not) emitted.
class WarnCapture {
  public:
    WarnCapture();
    ~WarnCapture();
    WarnCapture(const WarnCapture&) = delete;
    WarnCapture& operator=(const WarnCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }
    bool contains(const std::string& needle) const;

  private:
    std::vector<std::string> messages_;
    WarnHandler previous_;
};

// ---------------------------------------------------------------------------
// Seeding and random draws. Every random stream in the repo is derived from
// an explicit seed via mix_seed; nothing touches global RNG state. Draw
// algorithms are pinned here (not delegated to std::*_distribution) so that
// corpora and training runs are reproducible byte-for-byte.

uint64_t mix_seed(uint64_t seed, uint64_t salt);

class RandomStream {
  public:
    explicit RandomStream(uint64_t seed) : state_(seed) {
        // splitmix-style warmup so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    uint64_t next_u64();

    // uniform in [0, 1)
    double uniform();
    double uniform(double lo, double hi);
    // inclusive bounds
    int uniform_int(int lo, int hi);
    bool bernoulli(double p);
    // standard normal via Box-Muller; no cached spare, so the stream state
    // is a pure function of the number of draws
    double normal();

    RandomStream fork(uint64_t salt) const { return RandomStream(mix_seed(state_, salt)); }

  private:
    uint64_t state_;
};

// ---------------------------------------------------------------------------
// FNV-1a hashing, used for determinism checks on files and directory trees.

uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull);
uint64_t hash_file(const std::string& path);
// Hash of (relative path, content hash) pairs in sorted order.
uint64_t hash_tree(const std::string& root);

// Run fn(i) for i in [0, n) on up to jobs threads. Results must be written to
// per-index slots; the function itself provides no synchronization.
void parallel_for(int64_t n, int jobs, const std::function<void(int64_t)>& fn);

std::string format_double(double v, int precision = 9);

}  // namespace nsaug
