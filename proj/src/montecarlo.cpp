#include "sdelab/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "sdelab/errors.hpp"

namespace sdelab {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SDELAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

int X0Spec::dim() const {
    switch (kind) {
        case Kind::point: return static_cast<int>(point.size());
        case Kind::uniform_ball: return static_cast<int>(point.size()); // point holds the center
        case Kind::gaussian: return static_cast<int>(mean.size());
    }
    return 0;
}

Vec X0Spec::sample(PathRng& rng) const {
    switch (kind) {
        case Kind::point:
            return point;
        case Kind::uniform_ball: {
            Vec x = sample_in_ball(rng, static_cast<int>(point.size()), radius);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += point[i];
            return x;
        }
        case Kind::gaussian: {
            Vec x(mean);
            for (double& v : x) v += stddev * rng.normal();
            return x;
        }
    }
    return {};
}

double StepTrace::se_at(long k, long alive) const {
    if (alive < 2) return 0.0;
    const double mean = sum[k] / alive;
    double var = (sumsq[k] - alive * mean * mean) / (alive - 1);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / alive);
}

const StepTrace* PathEnsemble::trace(const std::string& name) const {
    for (const StepTrace& t : traces)
        if (t.name == name) return &t;
    return nullptr;
}

namespace {

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n_items).
// The chunk grid is independent of the worker count, so any per-chunk
// accumulation merged in chunk order reproduces the serial result bit for bit.
template <typename Fn>
void run_chunked(long n_items, long chunk_size, int workers, Fn&& fn) {
    const long n_chunks = (n_items + chunk_size - 1) / chunk_size;
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        for (;;) {
            const long c = next.fetch_add(1);
            if (c >= n_chunks || failed.load()) break;
            const long begin = c * chunk_size;
            const long end = std::min(begin + chunk_size, n_items);
            try {
                fn(c, begin, end);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                break;
            }
        }
    };

    const int n_threads = std::min<long>(std::max(workers, 1), std::max<long>(n_chunks, 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

struct ChunkStats {
    std::vector<StepTrace> traces;
    std::vector<long> alive;
    long n_diverged = 0;
    long first_negative_path = -1;
    long first_negative_step = -1;
    long total_negative = 0;
};

void init_traces(std::vector<StepTrace>& traces, const std::vector<FunctionalSpec>& specs,
                 long n_points) {
    traces.clear();
    for (const FunctionalSpec& spec : specs) {
        StepTrace t;
        t.name = spec.name;
        t.kind = spec.kind;
        switch (spec.kind) {
            case FunctionalSpec::Kind::lyapunov_value:
            case FunctionalSpec::Kind::norm_sq:
                t.sum.assign(n_points, 0.0);
                t.sumsq.assign(n_points, 0.0);
                break;
            case FunctionalSpec::Kind::max_abs:
                t.maxv.assign(n_points, 0.0);
                break;
            case FunctionalSpec::Kind::negative_count:
                t.count.assign(n_points, 0);
                break;
        }
        traces.push_back(std::move(t));
    }
}

} // namespace

PathEnsemble simulate_ensemble(const SdeModel& model, const SchemeConfig& scheme,
                               const EnsembleOptions& opts) {
    scheme.validate();
    if (opts.x0.dim() != model.dim_state)
        throw config_error("x0 dimension does not match the model state dimension");
    for (const FunctionalSpec& f : opts.functionals)
        if (f.kind == FunctionalSpec::Kind::lyapunov_value && f.lyap == nullptr)
            throw config_error("lyapunov_value functional needs a LyapunovSpec");

    const long n_steps = scheme.n_steps();
    const long n_points = n_steps + 1;
    const int m = model.dim_noise;
    const bool capped = !scheme.uses_projection();

    PathEnsemble out;
    out.h = scheme.h;
    out.T = scheme.T;
    out.n_steps = n_steps;
    out.dim = model.dim_state;
    out.n_paths = opts.n_paths;
    out.terminal.assign(opts.n_paths, Vec());
    out.first_divergence.assign(opts.n_paths, -1);
    out.alive.assign(n_points, 0);
    init_traces(out.traces, opts.functionals, n_points);

    const long chunk = std::max<long>(opts.chunk_size, 1);
    const long n_chunks = (opts.n_paths + chunk - 1) / chunk;
    std::vector<ChunkStats> partial(n_chunks);

    run_chunked(opts.n_paths, chunk, resolve_workers(opts.workers),
                [&](long c, long begin, long end) {
        const OneStep step(model, scheme);
        ChunkStats& stats = partial[c];
        stats.alive.assign(n_points, 0);
        init_traces(stats.traces, opts.functionals, n_points);

        Vec xi(m);
        for (long path = begin; path < end; ++path) {
            PathRng rng(opts.rng, static_cast<std::uint64_t>(path));
            Vec x = step.prepare_initial(opts.x0.sample(rng));
            long diverged_at = -1;

            auto record = [&](long k, const Vec& state) {
                ++stats.alive[k];
                bool negative = false;
                for (double v : state)
                    if (v < 0.0) negative = true;
                if (negative) {
                    ++stats.total_negative;
                    if (stats.first_negative_path < 0) {
                        stats.first_negative_path = path;
                        stats.first_negative_step = k;
                    }
                }
                for (std::size_t f = 0; f < opts.functionals.size(); ++f) {
                    StepTrace& t = stats.traces[f];
                    switch (opts.functionals[f].kind) {
                        case FunctionalSpec::Kind::lyapunov_value: {
                            const double v = opts.functionals[f].lyap->value(state);
                            t.sum[k] += v;
                            t.sumsq[k] += v * v;
                            break;
                        }
                        case FunctionalSpec::Kind::norm_sq: {
                            const double v = norm_sq(state);
                            t.sum[k] += v;
                            t.sumsq[k] += v * v;
                            break;
                        }
                        case FunctionalSpec::Kind::max_abs:
                            t.maxv[k] = std::max(t.maxv[k], norm(state));
                            break;
                        case FunctionalSpec::Kind::negative_count:
                            if (negative) ++t.count[k];
                            break;
                    }
                }
            };

            record(0, x);
            for (long k = 0; k < n_steps; ++k) {
                for (int j = 0; j < m; ++j) xi[j] = rng.normal();
                Vec y = step(k * scheme.h, x, xi);
                const bool bad = !all_finite(y) || (capped && norm(y) > opts.divergence_cap);
                if (bad) {
                    diverged_at = k + 1;
                    break;
                }
                x = std::move(y);
                record(k + 1, x);
            }

            out.terminal[path] = x; // last valid state
            out.first_divergence[path] = diverged_at;
            if (diverged_at >= 0) ++stats.n_diverged;
        }
    });

    // Merge chunk results in chunk order (fixed left-to-right summation).
    for (const ChunkStats& stats : partial) {
        for (long k = 0; k < n_points; ++k) out.alive[k] += stats.alive[k];
        out.n_diverged += stats.n_diverged;
        out.total_negative_steps += stats.total_negative;
        if (out.first_negative_path < 0 && stats.first_negative_path >= 0) {
            out.first_negative_path = stats.first_negative_path;
            out.first_negative_step = stats.first_negative_step;
        }
        for (std::size_t f = 0; f < out.traces.size(); ++f) {
            StepTrace& t = out.traces[f];
            const StepTrace& s = stats.traces[f];
            for (long k = 0; k < n_points; ++k) {
                if (!t.sum.empty()) {
                    t.sum[k] += s.sum[k];
                    t.sumsq[k] += s.sumsq[k];
                }
                if (!t.maxv.empty()) t.maxv[k] = std::max(t.maxv[k], s.maxv[k]);
                if (!t.count.empty()) t.count[k] += s.count[k];
            }
        }
    }
    return out;
}

StrongErrorResult couple_strong_error(const SdeModel& model, const SchemeFactory& factory,
                                      const X0Spec& x0, const std::vector<double>& levels,
                                      double h_ref, double T, long n_paths,
                                      const RngSpec& rng, int workers) {
    if (levels.empty()) throw config_error("strong-error coupling needs at least one level");
    const long n_ref = std::lround(T / h_ref);
    if (n_ref < 1 || std::fabs(n_ref * h_ref - T) > 1e-9 * T)
        throw config_error("reference step h_ref must divide the horizon T");

    std::vector<long> strides;
    for (double h : levels) {
        const double ratio = h / h_ref;
        const long stride = std::lround(ratio);
        const bool pow2 = stride >= 1 && (stride & (stride - 1)) == 0;
        if (!pow2 || std::fabs(stride - ratio) > 1e-9 || n_ref % stride != 0)
            throw config_error("level h = " + std::to_string(h) +
                               " does not divide dyadically into h_ref");
        strides.push_back(stride);
    }

    const std::size_t n_levels = levels.size();
    std::vector<SchemeConfig> configs;
    configs.reserve(n_levels + 1);
    for (double h : levels) {
        SchemeConfig cfg = factory(h);
        cfg.h = h;
        cfg.T = T;
        configs.push_back(std::move(cfg));
    }
    {
        SchemeConfig ref = factory(h_ref);
        ref.h = h_ref;
        ref.T = T;
        configs.push_back(std::move(ref));
    }

    struct ChunkAccum {
        std::vector<double> sum_sq;   // per level: sum of |X_T^h - X_T^ref|^2
        std::vector<double> sum_sq2;  // per level: sum of squares of the above
        std::vector<long> used;
    };
    const long chunk = 256;
    const long n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<ChunkAccum> partial(n_chunks);

    const int m = model.dim_noise;
    const double sqrt_h_ref = std::sqrt(h_ref);

    run_chunked(n_paths, chunk, resolve_workers(workers), [&](long c, long begin, long end) {
        ChunkAccum& acc = partial[c];
        acc.sum_sq.assign(n_levels, 0.0);
        acc.sum_sq2.assign(n_levels, 0.0);
        acc.used.assign(n_levels, 0);

        std::vector<OneStep> steps;
        steps.reserve(n_levels + 1);
        for (const SchemeConfig& cfg : configs) steps.emplace_back(model, cfg);
        const OneStep& ref_step = steps.back();

        Vec xi(m), xi_level(m);
        for (long path = begin; path < end; ++path) {
            PathRng prng(rng, static_cast<std::uint64_t>(path));
            const Vec start = x0.sample(prng);
            Vec x_ref = ref_step.prepare_initial(start);
            std::vector<Vec> x_level(n_levels);
            std::vector<Vec> dw_acc(n_levels, Vec(m, 0.0));
            std::vector<bool> level_ok(n_levels, true);
            for (std::size_t l = 0; l < n_levels; ++l)
                x_level[l] = steps[l].prepare_initial(start);
            bool ref_ok = true;

            for (long k = 0; k < n_ref; ++k) {
                for (int j = 0; j < m; ++j) xi[j] = prng.normal();
                if (ref_ok) {
                    Vec y = ref_step(k * h_ref, x_ref, xi);
                    if (!all_finite(y))
                        ref_ok = false;
                    else
                        x_ref = std::move(y);
                }
                for (std::size_t l = 0; l < n_levels; ++l) {
                    for (int j = 0; j < m; ++j) dw_acc[l][j] += sqrt_h_ref * xi[j];
                    if ((k + 1) % strides[l] != 0) continue;
                    if (level_ok[l]) {
                        const double h = levels[l];
                        const double t = (static_cast<double>(k + 1) / strides[l] - 1.0) * h;
                        for (int j = 0; j < m; ++j) xi_level[j] = dw_acc[l][j] / std::sqrt(h);
                        Vec y = steps[l](t, x_level[l], xi_level);
                        if (!all_finite(y))
                            level_ok[l] = false;
                        else
                            x_level[l] = std::move(y);
                    }
                    for (int j = 0; j < m; ++j) dw_acc[l][j] = 0.0;
                }
            }

            for (std::size_t l = 0; l < n_levels; ++l) {
                if (!ref_ok || !level_ok[l]) continue;
                double sq = 0.0;
                for (int i = 0; i < model.dim_state; ++i) {
                    const double diff = x_level[l][i] - x_ref[i];
                    sq += diff * diff;
                }
                acc.sum_sq[l] += sq;
                acc.sum_sq2[l] += sq * sq;
                ++acc.used[l];
            }
        }
    });

    StrongErrorResult result;
    result.h_ref = h_ref;
    result.n_paths = n_paths;
    for (std::size_t l = 0; l < n_levels; ++l) {
        double sum = 0.0, sum2 = 0.0;
        long used = 0;
        for (const ChunkAccum& acc : partial) {
            sum += acc.sum_sq[l];
            sum2 += acc.sum_sq2[l];
            used += acc.used[l];
        }
        StrongErrorLevel lvl;
        lvl.h = levels[l];
        if (used > 0) {
            const double mean_sq = sum / used;
            lvl.rms_error = std::sqrt(mean_sq);
            if (used > 1 && lvl.rms_error > 0.0) {
                double var = (sum2 - used * mean_sq * mean_sq) / (used - 1);
                if (var < 0.0) var = 0.0;
                lvl.se = std::sqrt(var / used) / (2.0 * lvl.rms_error);
            }
        }
        result.levels.push_back(lvl);
    }
    return result;
}

} // namespace sdelab
