#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdelab/lyapunov.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/schemes.hpp"

namespace sdelab {

// Initial condition: a point mass or a sampler. Sampler draws are taken from
// the path substream before any step noise, so the sequence per path is
// (x0 draws, then per step the m noise components in component order).
struct X0Spec {
    enum class Kind { point, uniform_ball, gaussian };

    Kind kind = Kind::point;
    Vec point;
    double radius = 1.0;   // uniform_ball
    Vec mean;              // gaussian
    double stddev = 1.0;   // gaussian (isotropic)

    static X0Spec at(Vec x) {
        X0Spec s;
        s.kind = Kind::point;
        s.point = std::move(x);
        return s;
    }

    int dim() const;
    Vec sample(PathRng& rng) const;
};

// Streaming per-step statistics accumulated while paths run.
struct FunctionalSpec {
    enum class Kind {
        lyapunov_value, // mean/SE of V(X_k)
        norm_sq,        // mean/SE of |X_k|^2
        max_abs,        // max over paths of |X_k|
        negative_count, // count of paths with any component < 0 at step k
    };

    Kind kind = Kind::lyapunov_value;
    std::string name;              // trace name in reports/CSV
    const LyapunovSpec* lyap = nullptr; // for lyapunov_value
};

struct StepTrace {
    std::string name;
    FunctionalSpec::Kind kind;
    // Indexed by step 0..n_steps. Mean-type traces fill sum/sumsq (over alive
    // paths); max_abs fills maxv; negative_count fills count.
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::vector<double> maxv;
    std::vector<long> count;

    double mean_at(long k, long alive) const { return alive > 0 ? sum[k] / alive : 0.0; }
    double se_at(long k, long alive) const;
};

struct PathEnsemble {
    double h = 0.0;
    double T = 0.0;
    long n_steps = 0;
    int dim = 0;
    long n_paths = 0;

    std::vector<Vec> terminal;            // per-path state at the last step reached
    std::vector<long> first_divergence;   // step index of first divergence, -1 if none
    long n_diverged = 0;
    std::vector<long> alive;              // per-step count of not-yet-diverged paths
    std::vector<StepTrace> traces;

    // First negative iterate (path-major order), for the positivity checks.
    long first_negative_path = -1;
    long first_negative_step = -1;
    long total_negative_steps = 0;

    double time_at(long k) const { return k * h; }
    const StepTrace* trace(const std::string& name) const;
    double divergence_fraction() const {
        return n_paths > 0 ? static_cast<double>(n_diverged) / n_paths : 0.0;
    }
};

struct EnsembleOptions {
    long n_paths = 1000;
    RngSpec rng;
    X0Spec x0;
    std::vector<FunctionalSpec> functionals;
    int workers = 0;          // 0: SDELAB_WORKERS env var, else hardware concurrency
    long chunk_size = 256;    // fixed accumulation block; independent of workers
    double divergence_cap = 1e12; // |x| cap for non-projected schemes
};

// Runs n_paths of the configured scheme. Statistics are accumulated per fixed
// chunk of paths and merged in chunk order, so results are bit-identical for
// any worker count. Divergent paths are frozen at their first bad step and
// carried as diverged, not aborted.
PathEnsemble simulate_ensemble(const SdeModel& model, const SchemeConfig& scheme,
                               const EnsembleOptions& opts);

// ---- coarse/fine coupling for strong-error estimation ----

struct StrongErrorLevel {
    double h = 0.0;
    double rms_error = 0.0; // sqrt(mean |X^h_T - X^ref_T|^2)
    double se = 0.0;        // delta-method SE of the RMS
    bool excluded = false;  // zero error at a non-reference level
};

struct StrongErrorResult {
    std::vector<StrongErrorLevel> levels;
    double h_ref = 0.0;
    long n_paths = 0;
};

using SchemeFactory = std::function<SchemeConfig(double h)>;

// Simulates every level and the reference on the same Brownian lattice per
// path: fine increments are drawn at h_ref and coarse increments formed by
// summing consecutive fine increments left to right. Levels must divide
// dyadically into h_ref.
StrongErrorResult couple_strong_error(const SdeModel& model, const SchemeFactory& factory,
                                      const X0Spec& x0, const std::vector<double>& levels,
                                      double h_ref, double T, long n_paths,
                                      const RngSpec& rng, int workers = 0);

// Worker count resolution: explicit > SDELAB_WORKERS env var > hardware.
int resolve_workers(int requested);

} // namespace sdelab
