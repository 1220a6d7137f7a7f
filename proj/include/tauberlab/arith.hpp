#pragma once

// Counting functions, the prime table, and non-decreasing growth functions S
// on [1, inf) with S(x) = 0 below 1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "tauberlab/errors.hpp"

namespace tauberlab {

/// pi_N(x) = floor(x), the number of positive integers <= x.
inline double count_integers(double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw Error(ErrorCode::domain, "count_integers: x must be finite and >= 0");
    return std::floor(x);
}

// ---------------------------------------------------------------------------
// PrimeTable
//
// Bit i of the table says whether the odd number 2i+1 is prime, for odd
// numbers <= limit. 2 is handled separately. A popcount prefix per 64-bit
// word makes pi(x) an O(1) query.
// ---------------------------------------------------------------------------
class PrimeTable {
public:
    static constexpr std::uint64_t kHardCap = std::uint64_t{1} << 32;
    static constexpr std::uint32_t kFileVersion = 1;

    PrimeTable() = default;

    /// Segmented sieve of Eratosthenes over odd numbers up to `limit`.
    static PrimeTable sieve(std::uint64_t limit) {
        check_limit(limit);
        PrimeTable table;
        table.limit_ = limit;
        const std::uint64_t bits = bit_count(limit);
        table.words_.assign((bits + 63) / 64, ~std::uint64_t{0});
        table.clear_padding();
        table.clear_bit(0);  // 1 is not prime

        const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
        std::vector<std::uint32_t> base;  // odd primes <= root
        {
            std::vector<bool> composite(root + 1, false);
            for (std::uint64_t p = 3; p <= root; p += 2) {
                if (composite[p]) continue;
                base.push_back(static_cast<std::uint32_t>(p));
                for (std::uint64_t m = p * p; m <= root; m += 2 * p) composite[m] = true;
            }
        }
        constexpr std::uint64_t kSegmentBits = std::uint64_t{1} << 21;
        for (std::uint64_t lo = 0; lo < bits; lo += kSegmentBits) {
            const std::uint64_t hi = std::min(bits, lo + kSegmentBits);
            const std::uint64_t first_number = 2 * lo + 1;
            const std::uint64_t last_number = 2 * (hi - 1) + 1;
            for (std::uint32_t p : base) {
                const std::uint64_t pp = std::uint64_t{p} * p;
                if (pp > last_number) break;
                std::uint64_t m = std::max(pp, (first_number + p - 1) / p * p);
                if (m % 2 == 0) m += p;
                for (std::uint64_t i = (m - 1) / 2; i < hi; i += p) table.clear_bit(i);
            }
        }
        table.build_prefix();
        return table;
    }

    std::uint64_t limit() const { return limit_; }

    bool is_prime(std::uint64_t n) const {
        if (n > limit_) throw TableExhausted(n, limit_);
        if (n < 2) return false;
        if (n == 2) return true;
        if (n % 2 == 0) return false;
        return test_bit((n - 1) / 2);
    }

    /// pi_P(n) for integer n <= limit.
    std::uint64_t count(std::uint64_t n) const {
        if (n > limit_) throw TableExhausted(n, limit_);
        if (n < 2) return 0;
        const std::uint64_t idx = (n - 1) / 2;  // last odd number <= n is 2*idx+1
        const std::uint64_t word = idx / 64;
        const unsigned bit = static_cast<unsigned>(idx % 64);
        const std::uint64_t mask = bit == 63 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (bit + 1)) - 1);
        return 1 + prefix_[word] + static_cast<std::uint64_t>(std::popcount(words_[word] & mask));
    }

    /// Calls f(p) for every prime lo <= p <= hi, ascending.
    template <class F>
    void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const {
        if (hi > limit_) throw TableExhausted(hi, limit_);
        if (lo <= 2 && hi >= 2) f(std::uint64_t{2});
        if (hi < 3) return;
        std::uint64_t i = std::max<std::uint64_t>(lo, 3);
        i = (i - 1) / 2 + (i % 2 == 0 ? 1 : 0);  // first odd >= lo
        const std::uint64_t end = (hi - 1) / 2;
        while (i <= end) {
            const std::uint64_t word_index = i / 64;
            std::uint64_t word = words_[word_index] >> (i % 64);
            if (word == 0) {
                i = (word_index + 1) * 64;
                continue;
            }
            i += static_cast<std::uint64_t>(std::countr_zero(word));
            if (i > end) break;
            f(2 * i + 1);
            ++i;
        }
    }

    std::vector<std::uint64_t> primes_up_to(std::uint64_t hi) const {
        std::vector<std::uint64_t> out;
        for_each_prime(0, hi, [&](std::uint64_t p) { out.push_back(p); });
        return out;
    }

    // Cache file: "PTBL", u32 version, u64 limit (little-endian), then the odd-number
    // bitset as ceil(bits/8) bytes, bit i of the stream = bit (i % 8) of byte i / 8.
    void write(std::ostream& out) const {
        out.write("PTBL", 4);
        write_le(out, kFileVersion, 4);
        write_le(out, limit_, 8);
        const std::uint64_t bytes = (bit_count(limit_) + 7) / 8;
        std::vector<char> buffer(bytes);
        for (std::uint64_t b = 0; b < bytes; ++b)
            buffer[b] = static_cast<char>((words_[b / 8] >> (8 * (b % 8))) & 0xFF);
        out.write(buffer.data(), static_cast<std::streamsize>(bytes));
    }

    /// Parses a cache stream; nullopt when the header, limit or length do not match.
    static std::optional<PrimeTable> read(std::istream& in, std::uint64_t expected_limit) {
        char magic[4];
        if (!in.read(magic, 4) || std::string(magic, 4) != "PTBL") return std::nullopt;
        std::uint64_t version = 0, limit = 0;
        if (!read_le(in, version, 4) || version != kFileVersion) return std::nullopt;
        if (!read_le(in, limit, 8) || limit != expected_limit) return std::nullopt;
        if (limit < 2 || limit > kHardCap) return std::nullopt;
        const std::uint64_t bits = bit_count(limit);
        const std::uint64_t bytes = (bits + 7) / 8;
        std::vector<char> buffer(bytes);
        if (!in.read(buffer.data(), static_cast<std::streamsize>(bytes))) return std::nullopt;
        if (in.peek() != std::char_traits<char>::eof()) return std::nullopt;
        PrimeTable table;
        table.limit_ = limit;
        table.words_.assign((bits + 63) / 64, 0);
        for (std::uint64_t b = 0; b < bytes; ++b)
            table.words_[b / 8] |= std::uint64_t{static_cast<unsigned char>(buffer[b])} << (8 * (b % 8));
        table.clear_padding();
        if (table.test_bit(0)) return std::nullopt;
        table.build_prefix();
        return table;
    }

    static void check_limit(std::uint64_t limit) {
        if (limit < 2) throw Error(ErrorCode::contract, "prime table limit must be >= 2");
        if (limit > kHardCap)
            throw Error(ErrorCode::resource,
                        "prime table limit " + std::to_string(limit) + " exceeds hard cap 2^32");
    }

private:
    static std::uint64_t bit_count(std::uint64_t limit) { return (limit + 1) / 2; }

    bool test_bit(std::uint64_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    void clear_bit(std::uint64_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

    void clear_padding() {
        const std::uint64_t bits = bit_count(limit_);
        if (bits % 64 != 0) words_.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
    }

    void build_prefix() {
        prefix_.assign(words_.size(), 0);
        std::uint64_t running = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            prefix_[w] = running;
            running += static_cast<std::uint64_t>(std::popcount(words_[w]));
        }
    }

    static void write_le(std::ostream& out, std::uint64_t value, int bytes) {
        for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
    static bool read_le(std::istream& in, std::uint64_t& value, int bytes) {
        value = 0;
        for (int i = 0; i < bytes; ++i) {
            const int c = in.get();
            if (c == std::char_traits<char>::eof()) return false;
            value |= std::uint64_t{static_cast<unsigned char>(c)} << (8 * i);
        }
        return true;
    }

    std::uint64_t limit_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> prefix_;
};

/// Cache directory: $TAUBERLAB_CACHE_DIR, else $XDG_CACHE_HOME/tauberlab,
/// else $HOME/.cache/tauberlab, else ./.tauberlab-cache.
inline std::filesystem::path default_cache_dir() {
    if (const char* dir = std::getenv("TAUBERLAB_CACHE_DIR"); dir && *dir) return dir;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
        return std::filesystem::path(xdg) / "tauberlab";
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".cache" / "tauberlab";
    return ".tauberlab-cache";
}

inline std::filesystem::path prime_cache_path(const std::filesystem::path& dir, std::uint64_t limit) {
    return dir / ("primes-" + std::to_string(limit) + ".ptbl");
}

/// Sieves up to `limit`, reusing `<cache_dir>/primes-<limit>.ptbl` when valid.
/// An empty cache_dir disables persistence. A corrupt cache is rebuilt with a
/// warning on stderr; the new file is written to a temp name and renamed.
inline PrimeTable build_prime_table(std::uint64_t limit, const std::filesystem::path& cache_dir = {}) {
    PrimeTable::check_limit(limit);
    if (cache_dir.empty()) return PrimeTable::sieve(limit);

    const auto path = prime_cache_path(cache_dir, limit);
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
        std::ifstream in(path, std::ios::binary);
        if (auto table = PrimeTable::read(in, limit)) return std::move(*table);
        std::cerr << "warning: corrupt prime cache " << path << ", rebuilding\n";
    }
    PrimeTable table = PrimeTable::sieve(limit);
    std::filesystem::create_directories(cache_dir, ec);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "warning: cannot write prime cache " << path << "\n";
            return table;
        }
        table.write(out);
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::cerr << "warning: cannot install prime cache " << path << ": " << ec.message() << "\n";
    return table;
}

inline std::uint64_t count_primes(double x, const PrimeTable& table) {
    if (!std::isfinite(x) || x < 0.0) throw Error(ErrorCode::domain, "count_primes: x must be finite and >= 0");
    const double n = std::floor(x);
    if (n > static_cast<double>(table.limit())) throw TableExhausted(static_cast<std::uint64_t>(n), table.limit());
    return table.count(static_cast<std::uint64_t>(n));
}

/// pi_P(x) * ln x.
inline double chebyshev_weighted(double x, const PrimeTable& table) {
    if (!std::isfinite(x) || x < 1.0) throw Error(ErrorCode::domain, "chebyshev_weighted: x must be >= 1");
    return static_cast<double>(count_primes(x, table)) * std::log(x);
}

// ---------------------------------------------------------------------------
// Step functions and growth functions
// ---------------------------------------------------------------------------

/// S(x) = sum of jumps a_j over breakpoints x_j <= x.
class StepFunction {
public:
    StepFunction(std::vector<double> breakpoints, std::vector<double> jumps)
        : breakpoints_(std::move(breakpoints)), jumps_(std::move(jumps)) {
        if (breakpoints_.size() != jumps_.size())
            throw Error(ErrorCode::contract, "step function: breakpoint/jump count mismatch");
        for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
            if (!std::isfinite(breakpoints_[j]) || breakpoints_[j] < 1.0)
                throw Error(ErrorCode::contract, "step function: breakpoints must be finite and >= 1");
            if (j > 0 && !(breakpoints_[j] > breakpoints_[j - 1]))
                throw Error(ErrorCode::contract, "step function: breakpoints must be strictly increasing");
            if (!(jumps_[j] > 0.0) || !std::isfinite(jumps_[j]))
                throw Error(ErrorCode::contract, "step function: jumps must be positive");
        }
        cumulative_.resize(jumps_.size());
        double running = 0.0;
        for (std::size_t j = 0; j < jumps_.size(); ++j) cumulative_[j] = running += jumps_[j];
    }

    double operator()(double x) const {
        const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        return it == breakpoints_.begin() ? 0.0 : cumulative_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
    }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& jumps() const { return jumps_; }
    double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

    /// Smallest C with S(x) <= C x on [1, inf).
    double linear_bound() const {
        double c = 0.0;
        for (std::size_t j = 0; j < breakpoints_.size(); ++j) c = std::max(c, cumulative_[j] / breakpoints_[j]);
        return c;
    }

private:
    std::vector<double> breakpoints_;
    std::vector<double> jumps_;
    std::vector<double> cumulative_;
};

/// Reads "x_j, a_j" per line; blank lines and '#' comments are skipped.
inline StepFunction read_step_function_csv(std::istream& in) {
    std::vector<double> xs, as;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double x = 0, a = 0;
        std::string extra;
        if (!(fields >> x >> a) || (fields >> extra))
            throw Error(ErrorCode::parse, "step function CSV: malformed line " + std::to_string(line_no));
        xs.push_back(x);
        as.push_back(a);
    }
    return StepFunction(std::move(xs), std::move(as));
}

/// Reference level for g(u) = S(e^u)/e^u at large u: sup over v >= u of
/// |g(v) - level| is at most deviation(u). Used to close frequency integrals.
struct TailModel {
    double level = 0.0;
    std::function<double(double)> deviation;
};

/// Appends the x-abscissae of jumps of S in (x_lo, x_hi] to `out` and returns
/// true, or returns false (out untouched) when there are more than `cap`.
using JumpLister = std::function<bool(double x_lo, double x_hi, std::size_t cap, std::vector<double>& out)>;

/// A non-decreasing S on [1, inf) with S(x) <= growth_constant * x.
struct GrowthFunction {
    std::string label;
    std::function<double(double)> evaluate;
    double growth_constant = 1.0;
    double range_limit = std::numeric_limits<double>::infinity();
    JumpLister jumps;                 // empty when S is continuous
    std::optional<TailModel> tail;    // empty when nothing is known past the range

    double operator()(double x) const {
        if (!std::isfinite(x)) throw Error(ErrorCode::domain, label + ": non-finite argument");
        if (x < 1.0) return 0.0;
        if (x > range_limit)
            throw TableExhausted(static_cast<std::uint64_t>(std::ceil(x)), static_cast<std::uint64_t>(range_limit));
        return evaluate(x);
    }

    /// Largest u with e^u inside the evaluable range.
    double max_u() const { return std::isfinite(range_limit) ? std::log(range_limit) : std::numeric_limits<double>::infinity(); }
};

/// g(u) = S(e^u)/e^u. e^u within a few ulps of an integer is snapped to it so
/// that u = ln(10^k) evaluates counting functions at 10^k exactly.
inline double normalized_ratio(const GrowthFunction& s, double u) {
    if (!std::isfinite(u) || u < 0.0) throw Error(ErrorCode::domain, "normalized_ratio: u must be finite and >= 0");
    double x = std::exp(u);
    const double nearest = std::nearbyint(x);
    if (std::abs(x - nearest) <= 1e-12 * x) x = nearest;
    return s(x) / x;
}

// ---------------------------------------------------------------------------
// Growth functions used by the experiments
// ---------------------------------------------------------------------------

namespace detail {
inline std::string short_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}
}  // namespace detail

/// S(x) = a x.
inline GrowthFunction identity_growth(double a = 1.0) {
    if (!(a > 0.0)) throw Error(ErrorCode::contract, "identity_growth: slope must be positive");
    return {a == 1.0 ? std::string("x") : detail::short_number(a) + "x", [a](double x) { return a * x; }, a, std::numeric_limits<double>::infinity(), {},
            TailModel{a, [](double) { return 0.0; }}};
}

/// pi_N(x) = floor(x).
inline GrowthFunction integers_growth() {
    JumpLister jumps = [](double lo, double hi, std::size_t cap, std::vector<double>& out) {
        const double first = std::floor(lo) + 1.0;
        const double last = std::floor(hi);
        if (last < first) return true;
        if (last - first + 1.0 > static_cast<double>(cap)) return false;
        for (double n = first; n <= last; n += 1.0) out.push_back(n);
        return true;
    };
    return {"pi_N", [](double x) { return std::floor(x); }, 1.0, std::numeric_limits<double>::infinity(),
            std::move(jumps), TailModel{1.0, [](double u) { return std::exp(-u); }}};
}

/// S(x) = a x + sqrt(x), g(u) = a + e^{-u/2}.
inline GrowthFunction sqrt_perturbed_growth(double a = 1.0) {
    return {(a == 1.0 ? std::string() : detail::short_number(a)) + "x+sqrt(x)", [a](double x) { return a * x + std::sqrt(x); }, a + 1.0,
            std::numeric_limits<double>::infinity(), {},
            TailModel{a, [](double u) { return std::exp(-0.5 * u); }}};
}

/// S(x) = x (1 + sin(ln x) / 2); g(u) = 1 + sin(u)/2 has no limit.
inline GrowthFunction oscillating_growth() {
    return {"x(1+0.5sin(ln x))", [](double x) { return x * (1.0 + 0.5 * std::sin(std::log(x))); }, 1.5,
            std::numeric_limits<double>::infinity(), {}, TailModel{1.0, [](double) { return 0.5; }}};
}

/// S(x) = x + x/(1 + ln x); g(u) = 1 + 1/(1+u) tends to 1 slowly.
inline GrowthFunction slow_growth() {
    return {"x+x/(1+ln x)", [](double x) { return x + x / (1.0 + std::log(x)); }, 2.0,
            std::numeric_limits<double>::infinity(), {},
            TailModel{1.0, [](double u) { return 1.0 / (1.0 + u); }}};
}

inline GrowthFunction step_growth(StepFunction step, std::string label = "step") {
    const double bound = std::max(step.linear_bound(), 1e-300);
    const double total = step.total();
    JumpLister jumps = [step](double lo, double hi, std::size_t cap, std::vector<double>& out) {
        const auto& xs = step.breakpoints();
        const auto first = std::upper_bound(xs.begin(), xs.end(), lo);
        const auto last = std::upper_bound(xs.begin(), xs.end(), hi);
        if (static_cast<std::size_t>(last - first) > cap) return false;
        out.insert(out.end(), first, last);
        return true;
    };
    auto eval = [step = std::move(step)](double x) { return step(x); };
    // g(u) <= total e^{-u}, so the tail level is 0.
    return {std::move(label), std::move(eval), bound, std::numeric_limits<double>::infinity(), std::move(jumps),
            TailModel{0.0, [total](double u) { return total * std::exp(-u); }}};
}

/// A single jump of size `a` at x0 (bounded S, g -> 0).
inline GrowthFunction single_step_growth(double x0 = 2.0, double a = 1.0) {
    return step_growth(StepFunction({x0}, {a}), "step(x0=" + detail::short_number(x0) + ")");
}

inline GrowthFunction zero_growth() {
    return {"zero", [](double) { return 0.0; }, 1.0, std::numeric_limits<double>::infinity(), {},
            TailModel{0.0, [](double) { return 0.0; }}};
}

namespace detail {
inline JumpLister prime_jumps(const PrimeTable* table) {
    return [table](double lo, double hi, std::size_t cap, std::vector<double>& out) {
        const auto first = static_cast<std::uint64_t>(std::floor(std::max(lo, 0.0))) + 1;
        const auto last = static_cast<std::uint64_t>(std::floor(hi));
        if (last < first) return true;
        const std::uint64_t n = table->count(last) - table->count(first - 1);
        if (n > cap) return false;
        table->for_each_prime(first, last, [&](std::uint64_t p) { out.push_back(static_cast<double>(p)); });
        return true;
    };
}
}  // namespace detail

/// pi_P(x). The table must outlive the returned function.
inline GrowthFunction primes_growth(const PrimeTable& table) {
    return {"pi_P", [t = &table](double x) { return static_cast<double>(count_primes(x, *t)); }, 1.0,
            static_cast<double>(table.limit()), detail::prime_jumps(&table), std::nullopt};
}

/// pi_P(x) ln x, with the linear bound 1.3 x. The table must outlive the result.
inline GrowthFunction weighted_primes_growth(const PrimeTable& table) {
    return {"pi_P*ln", [t = &table](double x) { return chebyshev_weighted(x, *t); }, 1.3,
            static_cast<double>(table.limit()), detail::prime_jumps(&table), std::nullopt};
}

}  // namespace tauberlab
