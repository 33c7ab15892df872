#pragma once
/**
 * @file common.hpp
 * @brief Shared utilities: error types, pinned tolerances, seeded RNG helpers.
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace chm {

/// Thrown when an input object fails structural validation.  The CLI maps
/// this to exit code 3 and echoes the offending object.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what, std::string offending = {})
        : std::runtime_error(offending.empty() ? what : what + " [offending: " + offending + "]"),
          offending_(std::move(offending)) {}
    const std::string& offending() const noexcept { return offending_; }

private:
    std::string offending_;
};

/// Thrown when an operation is queried outside its supported domain
/// (e.g. tangent cones at graph-cone spine points).
class unsupported_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Central numeric tolerances.  These are part of the library contract and
/// are pinned here; tests reference them instead of defining their own.
struct Tolerances {
    double rel_identity        = 1e-12;  ///< exact identities evaluated in floating point
    double equivariance        = 1e-10;  ///< well-definedness of equivariant data
    double lemma27             = 1e-8;   ///< residual-norm cross check
    double bochner_map_rel     = 1e-8;   ///< nonlinear Bochner identities, relative
    double bochner_cochain_rel = 1e-10;  ///< linear Bochner-Weitzenboeck, relative
    double third_term_floor    = -1e-10; ///< nonnegativity slack of NPC third terms
    double barycenter_move     = 1e-12;  ///< iterate displacement at convergence
    double stationarity        = 1e-8;   ///< first-variation sweep bound
    double gram_feasibility    = 1e-9;   ///< Gram diagonal/off-diagonal residuals
    double psd_floor           = -1e-9;  ///< smallest admissible Gram eigenvalue
    double spectra             = 1e-9;   ///< eigenvalue comparisons
    double cat0_slack          = 1e-9;   ///< CAT(0) midpoint inequality slack
    double flow_energy         = 1e-12;  ///< flow convergence threshold on energy
    double flow_residual       = 1e-10;  ///< flow convergence threshold on residual
    double theta_min           = 1e-8;   ///< smallest damping before a step stalls
    double gradient_slack      = 1e-8;   ///< Lemma 4.2 lower-bound slack
    double delta_config_abs    = 1e-4;   ///< SDP value vs closed forms
    double point_eq            = 1e-12;  ///< point identity in metric spaces
};

inline constexpr Tolerances kTol{};

// ---------------------------------------------------------------------------
// deterministic randomness

using Rng = std::mt19937_64;

inline double unif(Rng& g, double a = 0.0, double b = 1.0) {
    std::uniform_real_distribution<double> d(a, b);
    return d(g);
}

inline double gauss(Rng& g, double sigma = 1.0) {
    std::normal_distribution<double> d(0.0, sigma);
    return d(g);
}

inline int unif_int(Rng& g, int a, int b) {
    std::uniform_int_distribution<int> d(a, b);
    return d(g);
}

// ---------------------------------------------------------------------------
// bounded parallelism (HF_THREADS caps the worker count; default sequential)

inline int max_threads() {
    if (const char* e = std::getenv("HF_THREADS")) {
        int v = std::atoi(e);
        if (v >= 1) return v;
    }
    return 1;
}

/// Runs body(i) for i in [0, n).  Results must not depend on scheduling;
/// callers reduce deterministically afterwards.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    int workers = std::min(max_threads(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// misc

inline double sq(double x) { return x * x; }

template <class T>
std::string join_ints(const T& v, const char* sep = ",") {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << sep;
        os << v[i];
    }
    return os.str();
}

}  // namespace chm
