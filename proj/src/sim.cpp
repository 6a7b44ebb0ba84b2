#include "ehrelay/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "ehrelay/channel.hpp"

namespace ehrelay {

void RunningStats::add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    const double n1 = static_cast<double>(count);
    const double n2 = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double n = n1 + n2;
    mean += delta * n2 / n;
    m2 += o.m2 + delta * delta * n1 * n2 / n;
    count += o.count;
}

double RunningStats::variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double RunningStats::std_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

void CompensatedSum::add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
        comp += (sum - t) + x;
    } else {
        comp += (x - t) + sum;
    }
    sum = t;
}

namespace {

bool tracks_patterns(ProtocolId id) {
    return id == ProtocolId::AF_DISC || id == ProtocolId::DF_CONT || id == ProtocolId::DF_DISC;
}

struct WorkerOutput {
    SimResult result;
    CompensatedSum harvested;
    CompensatedSum consumed;
};

WorkerOutput run_stream(const SystemParams& p, const DerivedConstants& dc, ProtocolId id,
                        std::uint64_t n_blocks, Rng rng, const SimOptions& opt) {
    WorkerOutput out;
    SimResult& r = out.result;
    SimTallies& t = r.tallies;
    t.y_histogram.assign(std::max<std::size_t>(opt.y_histogram_bins, 1), 0);

    const bool patterns = tracks_patterns(id);
    const double spend = p.it_energy();
    RelayState state{0.0, id};
    r.initial_battery = 0.0;
    r.min_battery = 0.0;

    bool first_pattern = true;
    std::uint64_t x_count = 0;
    std::uint64_t y_count = 0;

    for (std::uint64_t i = 0; i < n_blocks; ++i) {
        const ChannelBlock blk = draw_block(rng);
        const StepResult s = step(p, dc, blk, state, opt.baseline_alpha);
        const BlockOutcome& o = s.outcome;

        r.tau_stats.add(o.tau);
        r.max_tau = std::max(r.max_tau, o.tau);
        out.harvested.add(o.harvested);
        out.consumed.add(o.consumed);
        r.min_battery = std::min(r.min_battery, s.state.battery);
        if (o.relay_outage) ++t.relay_outage_blocks;

        if (o.alpha < 1.0) {
            ++t.it_blocks;
            if (o.outage) ++t.dest_outage_blocks;
        }

        if (patterns) {
            if (o.alpha >= 1.0) {
                const bool y_type =
                    o.relay_outage && (o.energy_in >= spend || id == ProtocolId::DF_CONT);
                if (y_type) {
                    ++y_count;
                } else {
                    ++x_count;
                }
            } else {
                if (!first_pattern) {
                    t.x_stats.add(static_cast<double>(x_count));
                    t.y_stats.add(static_cast<double>(y_count));
                    const std::size_t bin =
                        std::min<std::size_t>(y_count, t.y_histogram.size() - 1);
                    ++t.y_histogram[bin];
                }
                first_pattern = false;
                x_count = 0;
                y_count = 0;
                if (t.eo_samples.size() < opt.max_eo_samples) {
                    t.eo_samples.push_back(s.state.battery);
                }
            }
        }
        state = s.state;
    }
    r.n_blocks = n_blocks;
    r.final_battery = state.battery;
    return out;
}

void finalize(SimResult& r) {
    SimTallies& t = r.tallies;
    const double n = static_cast<double>(r.n_blocks);
    r.mean_tau = r.tau_stats.mean;
    r.std_error = r.tau_stats.std_error();
    t.it_block_fraction = static_cast<double>(t.it_blocks) / n;
    t.relay_outage_rate = static_cast<double>(t.relay_outage_blocks) / n;
    t.dest_outage_rate =
        t.it_blocks > 0 ? static_cast<double>(t.dest_outage_blocks) / t.it_blocks : 0.0;
    t.mean_X = t.x_stats.mean;
    t.mean_Y = t.y_stats.mean;
}

void merge_into(WorkerOutput& acc, const WorkerOutput& w, std::size_t max_eo) {
    SimResult& a = acc.result;
    const SimResult& b = w.result;
    a.n_blocks += b.n_blocks;
    a.tau_stats.merge(b.tau_stats);
    a.max_tau = std::max(a.max_tau, b.max_tau);
    a.min_battery = std::min(a.min_battery, b.min_battery);
    a.initial_battery += b.initial_battery;
    a.final_battery += b.final_battery;
    acc.harvested.add(w.harvested.sum);
    acc.harvested.add(w.harvested.comp);
    acc.consumed.add(w.consumed.sum);
    acc.consumed.add(w.consumed.comp);

    SimTallies& ta = a.tallies;
    const SimTallies& tb = b.tallies;
    ta.it_blocks += tb.it_blocks;
    ta.relay_outage_blocks += tb.relay_outage_blocks;
    ta.dest_outage_blocks += tb.dest_outage_blocks;
    ta.x_stats.merge(tb.x_stats);
    ta.y_stats.merge(tb.y_stats);
    if (ta.y_histogram.size() < tb.y_histogram.size()) ta.y_histogram.resize(tb.y_histogram.size());
    for (std::size_t i = 0; i < tb.y_histogram.size(); ++i) ta.y_histogram[i] += tb.y_histogram[i];
    for (double e : tb.eo_samples) {
        if (ta.eo_samples.size() >= max_eo) break;
        ta.eo_samples.push_back(e);
    }
}

SimResult assemble(WorkerOutput& w) {
    w.result.total_harvested = w.harvested.value();
    w.result.total_consumed = w.consumed.value();
    finalize(w.result);
    return std::move(w.result);
}

}  // namespace

SimResult run(const SystemParams& p, ProtocolId id, std::uint64_t n_blocks, std::uint64_t seed,
              const SimOptions& opt) {
    if (n_blocks == 0) throw std::invalid_argument("n_blocks must be at least 1");
    const DerivedConstants dc = derive_constants(p);
    WorkerOutput w = run_stream(p, dc, id, n_blocks, Rng(seed), opt);
    return assemble(w);
}

SimResult run_parallel(const SystemParams& p, ProtocolId id, std::uint64_t n_blocks,
                       std::uint64_t seed, unsigned workers, const SimOptions& opt) {
    if (workers == 0) throw std::invalid_argument("workers must be at least 1");
    if (n_blocks == 0) throw std::invalid_argument("n_blocks must be at least 1");
    if (workers == 1) return run(p, id, n_blocks, seed, opt);
    if (n_blocks < workers) workers = static_cast<unsigned>(n_blocks);

    const DerivedConstants dc = derive_constants(p);
    const Rng base(seed);
    const std::uint64_t share = n_blocks / workers;
    std::vector<WorkerOutput> outputs(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned k = 0; k < workers; ++k) {
        const std::uint64_t count = (k + 1 == workers) ? n_blocks - share * k : share;
        threads.emplace_back([&, k, count] {
            try {
                outputs[k] = run_stream(p, dc, id, count, split_stream(base, k), opt);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    WorkerOutput acc = std::move(outputs[0]);
    for (unsigned k = 1; k < workers; ++k) merge_into(acc, outputs[k], opt.max_eo_samples);
    return assemble(acc);
}

}  // namespace ehrelay
