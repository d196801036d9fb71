#pragma once

// Line-oriented CSV cache for zeta evaluations: sigma,t,tol,re,im.
// Keys are (sigma, t) rounded to 1e-12; merges keep the tightest-tolerance
// entry per key.  Corrupt lines are skipped and counted.  The cache file is
// held under an advisory lock for the duration of a run.

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>

#include "zetalab/common.hpp"

namespace zetalab {

struct CacheEntry {
    double sigma = 0.0;
    double t = 0.0;
    double tol = 0.0;
    double re = 0.0;
    double im = 0.0;
};

class ZetaCache {
public:
    struct Key {
        int64_t sigma_q;  // sigma * 1e12, rounded
        int64_t t_int;    // nearest integer of t
        int64_t t_frac;   // (t - t_int) * 1e12, rounded
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            uint64_t h = 1469598103934665603ull;
            for (uint64_t v : {static_cast<uint64_t>(k.sigma_q), static_cast<uint64_t>(k.t_int),
                               static_cast<uint64_t>(k.t_frac)}) {
                h ^= v;
                h *= 1099511628211ull;
            }
            return static_cast<size_t>(h);
        }
    };

    static Key make_key(double sigma, double t) {
        double ti = std::nearbyint(t);
        return Key{static_cast<int64_t>(std::llround(sigma * 1e12)),
                   static_cast<int64_t>(ti),
                   static_cast<int64_t>(std::llround((t - ti) * 1e12))};
    }

    std::optional<std::complex<double>> lookup(double sigma, double t, double tol) const {
        auto it = map_.find(make_key(sigma, t));
        if (it == map_.end() || it->second.tol > tol) return std::nullopt;
        return std::complex<double>(it->second.re, it->second.im);
    }

    // keep the tightest tolerance per key
    void insert(const CacheEntry& e) {
        Key k = make_key(e.sigma, e.t);
        auto it = map_.find(k);
        if (it == map_.end() || e.tol < it->second.tol) map_[k] = e;
    }

    size_t size() const { return map_.size(); }
    size_t corrupt_lines() const { return corrupt_lines_; }

    // merge-load; unreadable path with must_exist throws
    void load(const std::string& path, bool must_exist = false) {
        std::ifstream in(path);
        if (!in) {
            if (must_exist) throw std::runtime_error("cache: cannot read " + path);
            return;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            CacheEntry e;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &e.sigma, &e.t, &e.tol, &e.re,
                            &e.im) != 5 ||
                !std::isfinite(e.sigma) || !std::isfinite(e.t) || !(e.tol > 0.0)) {
                ++corrupt_lines_;
                continue;
            }
            insert(e);
        }
    }

    void save(const std::string& path) const {
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw std::runtime_error("cache: cannot write " + tmp);
            out << "# sigma,t,tol,re,im\n";
            char line[256];
            for (const auto& [k, e] : map_) {
                std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", e.sigma, e.t,
                              e.tol, e.re, e.im);
                out << line;
            }
        }
        if (std::rename(tmp.c_str(), path.c_str()) != 0)
            throw std::runtime_error("cache: rename failed: " + std::string(std::strerror(errno)));
    }

    const std::unordered_map<Key, CacheEntry, KeyHash>& entries() const { return map_; }

private:
    std::unordered_map<Key, CacheEntry, KeyHash> map_;
    size_t corrupt_lines_ = 0;
};

// advisory lock held for the duration of a run
class FileLock {
public:
    explicit FileLock(const std::string& path) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ >= 0) ::flock(fd_, LOCK_EX);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace zetalab
