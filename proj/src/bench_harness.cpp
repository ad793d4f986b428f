#include "evsim/bench_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evsim/io.hpp"
#include "evsim/rng.hpp"

namespace evsim {

void BenchConfig::validate() const {
    if (env_counts.empty()) throw ValidationError("env_counts must be nonempty");
    for (std::size_t n : env_counts)
        if (n < 1) throw ValidationError("env counts must be >= 1");
    if (height < 1 || width < 1) throw ValidationError("resolution must be >= 1");
    if (frames < 2) throw ValidationError("need at least two frames");
    if (!(contrast > 0.0)) throw ValidationError("contrast must be > 0");
    if (num_bins < 1 || num_bins > frames - 1)
        throw ValidationError("num_bins must lie in [1, frames-1]");
    if (repetitions < 3) throw ValidationError("repetitions must be >= 3");
}

void LogicalMemoryModel::alloc(std::uint64_t bytes) {
    current_ += bytes;
    peak_ = std::max(peak_, current_);
    sample();
}

void LogicalMemoryModel::free(std::uint64_t bytes) {
    current_ -= std::min(current_, bytes);
    sample();
}

void LogicalMemoryModel::sample() {
    sample_sum_ += current_;
    ++sample_count_;
}

std::uint64_t LogicalMemoryModel::mean() const {
    return sample_count_ == 0 ? 0 : sample_sum_ / sample_count_;
}

LogFrameStack make_bench_stack(std::size_t frames, std::size_t h, std::size_t w,
                               std::uint64_t seed) {
    Rng rng(seed);
    LogFrameStack stack;
    stack.t = frames;
    stack.h = h;
    stack.w = w;
    stack.frame_period = 1.0 / 500.0;
    stack.frames.resize(frames * h * w);

    const std::size_t plane = h * w;
    // mean-reverting random walk per pixel
    const double theta = 0.05, mu = 0.5, sigma = 0.06;
    std::vector<double> state(plane);
    for (std::size_t i = 0; i < plane; ++i) {
        state[i] = rng.uniform01();
        stack.frames[i] = static_cast<float>(state[i]);
    }
    for (std::size_t ti = 1; ti < frames; ++ti) {
        float* out = stack.frames.data() + ti * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            state[i] += theta * (mu - state[i]) + sigma * rng.normal();
            out[i] = static_cast<float>(state[i]);
        }
    }
    return stack;
}

namespace {

constexpr std::uint64_t kStreamRecordBytes = 12;  // EVS1 record size

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    BenchReport report;
    report.config = cfg;

    ContrastConfig ccfg;
    ccfg.contrast = cfg.contrast;
    BinningConfig bins{cfg.num_bins};

    const std::uint64_t frame_bytes =
        static_cast<std::uint64_t>(cfg.frames) * cfg.height * cfg.width * sizeof(float);
    const std::uint64_t tensor_bytes = static_cast<std::uint64_t>(2) * cfg.num_bins *
                                       cfg.height * cfg.width * sizeof(std::uint32_t);
    const std::uint64_t vec_scratch_bytes =
        static_cast<std::uint64_t>(cfg.width) * (sizeof(std::int64_t) + sizeof(std::int8_t)) +
        static_cast<std::uint64_t>(cfg.frames) * sizeof(std::uint32_t);

    for (std::size_t n : cfg.env_counts) {
        std::vector<double> vec_times(cfg.repetitions, 0.0);
        std::vector<double> ora_times(cfg.repetitions, 0.0);
        LogicalMemoryModel vec_mem, ora_mem;
        // the batch holds every environment's input stack and output tensor
        vec_mem.alloc(n * frame_bytes);
        vec_mem.alloc(n * tensor_bytes);
        ora_mem.alloc(n * frame_bytes);
        ora_mem.alloc(n * tensor_bytes);

        for (std::size_t env = 0; env < n; ++env) {
            LogFrameStack stack =
                make_bench_stack(cfg.frames, cfg.height, cfg.width,
                                 cfg.seed * 1000003ULL + static_cast<std::uint64_t>(env));

            EventTensor vectorized;
            EventTensor accumulated;
            std::uint64_t stream_events = 0;

            std::size_t runs = cfg.measure_time ? cfg.repetitions + 1 : 1;
            for (std::size_t run = 0; run < runs; ++run) {
                auto t0 = std::chrono::steady_clock::now();
                vectorized = vectorized_event_tensor(stack, ccfg, bins, 1);
                double vec_dt = seconds_since(t0);

                auto t1 = std::chrono::steady_clock::now();
                SparseEventStream stream = oracle_event_stream(stack, ccfg);
                accumulated =
                    accumulate_tensor(stream, stack.t, stack.h, stack.w, bins);
                double ora_dt = seconds_since(t1);
                stream_events = stream.events.size();

                // run 0 is the warm-up and is never counted
                if (cfg.measure_time && run > 0) {
                    vec_times[run - 1] += vec_dt;
                    ora_times[run - 1] += ora_dt;
                }
            }

            vec_mem.alloc(vec_scratch_bytes);
            vec_mem.free(vec_scratch_bytes);
            ora_mem.alloc(stream_events * kStreamRecordBytes);
            ora_mem.free(stream_events * kStreamRecordBytes);

            DiffReport diff = diff_tensors(vectorized, accumulated);
            if (!diff.equal()) {
                std::ostringstream msg;
                msg << "benchmark correctness gate failed at env_count=" << n
                    << " env=" << env << ": total_abs_difference="
                    << diff.total_abs_difference
                    << " mismatched_cells=" << diff.num_mismatched_cells;
                if (diff.first_mismatch) {
                    const auto& m = *diff.first_mismatch;
                    msg << " first=(pol " << m.polarity_index << ", bin " << m.bin << ", y "
                        << m.y << ", x " << m.x << ", " << m.lhs << " vs " << m.rhs << ")";
                }
                throw std::runtime_error(msg.str());
            }
        }

        BenchRow vec_row;
        vec_row.method = "vectorized";
        vec_row.env_count = n;
        vec_row.peak_logical_bytes = vec_mem.peak();
        vec_row.mean_logical_bytes = vec_mem.mean();
        vec_row.correctness_checked = true;

        BenchRow ora_row;
        ora_row.method = "oracle";
        ora_row.env_count = n;
        ora_row.peak_logical_bytes = ora_mem.peak();
        ora_row.mean_logical_bytes = ora_mem.mean();
        ora_row.correctness_checked = true;

        if (cfg.measure_time) {
            auto summarize = [](const std::vector<double>& ts, BenchRow& row) {
                double sum = 0.0, mx = 0.0;
                for (double t : ts) {
                    sum += t;
                    mx = std::max(mx, t);
                }
                row.mean_runtime_s = sum / static_cast<double>(ts.size());
                row.max_runtime_s = mx;
            };
            summarize(vec_times, vec_row);
            summarize(ora_times, ora_row);
        }

        report.rows.push_back(vec_row);
        report.rows.push_back(ora_row);
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
        if (a.method != b.method) return a.method < b.method;
        return a.env_count < b.env_count;
    });
    return report;
}

void write_report(const BenchReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    os << "method,env_count,mean_runtime_s,max_runtime_s,peak_bytes,mean_bytes,correct\n";
    for (const BenchRow& r : report.rows) {
        os << r.method << ',' << r.env_count << ',' << format_g9(r.mean_runtime_s) << ','
           << format_g9(r.max_runtime_s) << ',' << r.peak_logical_bytes << ','
           << r.mean_logical_bytes << ',' << (r.correctness_checked ? 1 : 0) << '\n';
    }
    if (!os) throw ValidationError("write failed: " + path);
}

std::vector<BenchRow> read_report(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(is, line) ||
        line != "method,env_count,mean_runtime_s,max_runtime_s,peak_bytes,mean_bytes,correct")
        throw ValidationError("bad report header in " + path);
    std::vector<BenchRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        BenchRow r;
        std::string field;
        std::getline(ss, r.method, ',');
        std::getline(ss, field, ',');
        r.env_count = std::stoull(field);
        std::getline(ss, field, ',');
        r.mean_runtime_s = std::stod(field);
        std::getline(ss, field, ',');
        r.max_runtime_s = std::stod(field);
        std::getline(ss, field, ',');
        r.peak_logical_bytes = std::stoull(field);
        std::getline(ss, field, ',');
        r.mean_logical_bytes = std::stoull(field);
        std::getline(ss, field, ',');
        r.correctness_checked = field == "1";
        rows.push_back(r);
    }
    return rows;
}

}  // namespace evsim
