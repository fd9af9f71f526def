#include "rcs/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rcs/detector_dnn.hpp"
#include "rcs/errors.hpp"
#include "rcs/relay_dnn.hpp"

namespace rcs {

namespace {

constexpr std::uint64_t kChunkTrials = 2048;

void require_models(const ScenarioConfig& config, const RunModels& models) {
    if (config.phase_mode == PhaseMode::dnn && models.relay == nullptr) {
        throw ConfigError("phase mode dnn requires a trained relay model");
    }
    if (config.detector_mode == DetectorMode::dnn && models.detector == nullptr) {
        throw ConfigError("detector mode dnn requires a trained detector model");
    }
}

struct ChunkOutcome {
    std::uint64_t trials = 0;
    std::uint64_t bit_errors = 0;
};

/// Runs whole chunks of trials for one SNR point. Draws are made trial by
/// trial in a fixed order; network inference is batched across the chunk,
/// which changes nothing statistically because it consumes no randomness.
class PointRunner {
public:
    PointRunner(const ChainContext& chain, const RunModels& models, double snr_db)
        : chain_(chain),
          models_(models),
          noise_(chain.config().noise_enabled ? NoiseModel::from_snr_db(snr_db)
                                              : NoiseModel::disabled()),
          class_map_{chain.constellation()} {}

    ChunkOutcome run_chunk(RngStream rng, std::uint64_t trials) {
        const ScenarioConfig& config = chain_.config();
        const std::size_t coeffs =
            config.relay_count() * static_cast<std::size_t>(config.elements);

        draws_.resize(trials);
        for (std::uint64_t t = 0; t < trials; ++t) {
            chain_.draw(noise_, rng, draws_[t]);
        }

        // Reflection phases, batched over the chunk in the dnn mode.
        phases_.resize(trials * coeffs);
        if (config.phase_mode == PhaseMode::dnn) {
            flat_sr_.clear();
            flat_rd_.clear();
            flat_sr_.reserve(trials * coeffs);
            flat_rd_.reserve(trials * coeffs);
            for (const TrialDraws& d : draws_) {
                flat_sr_.insert(flat_sr_.end(), d.h_sr.begin(), d.h_sr.end());
                flat_rd_.insert(flat_rd_.end(), d.h_rd.begin(), d.h_rd.end());
            }
            std::vector<double> estimated =
                estimate_phases(*models_.relay, flat_sr_, flat_rd_);
            if (config.phase_bits > 0) {
                estimated = quantize_phases(estimated, config.phase_bits);
            }
            std::copy(estimated.begin(), estimated.end(), phases_.begin());
        } else {
            for (std::uint64_t t = 0; t < trials; ++t) {
                const std::vector<double> p = chain_.analytic_phases(draws_[t]);
                std::copy(p.begin(), p.end(), phases_.begin() + static_cast<std::ptrdiff_t>(t * coeffs));
            }
        }

        combined_.resize(trials);
        for (std::uint64_t t = 0; t < trials; ++t) {
            combined_[t] = chain_.combine(
                draws_[t], {phases_.data() + t * coeffs, coeffs});
        }

        ChunkOutcome outcome;
        outcome.trials = trials;
        if (config.detector_mode == DetectorMode::ml) {
            for (std::uint64_t t = 0; t < trials; ++t) {
                const int decided = demodulate_ml(combined_[t].r, combined_[t].h_eff,
                                                  chain_.constellation());
                outcome.bit_errors += static_cast<std::uint64_t>(
                    label_bit_errors(draws_[t].symbol, decided));
            }
        } else {
            observations_.resize(trials);
            for (std::uint64_t t = 0; t < trials; ++t) {
                observations_[t] = combined_[t].r;
            }
            const std::vector<int> decided =
                classify_symbols(*models_.detector, observations_, class_map_);
            for (std::uint64_t t = 0; t < trials; ++t) {
                outcome.bit_errors += static_cast<std::uint64_t>(
                    label_bit_errors(draws_[t].symbol, decided[t]));
            }
        }
        return outcome;
    }

private:
    const ChainContext& chain_;
    const RunModels& models_;
    NoiseModel noise_;
    ClassMap class_map_;

    // chunk workspaces, reused across chunks of one worker
    std::vector<TrialDraws> draws_;
    std::vector<double> phases_;
    std::vector<ChannelCoefficient> flat_sr_, flat_rd_;
    std::vector<ChainContext::Combined> combined_;
    std::vector<std::complex<double>> observations_;
};

BerRecord make_record(const ScenarioConfig& config, double snr_db) {
    BerRecord rec;
    rec.scenario = config.scenario;
    rec.scheme = config.scheme;
    rec.phase_mode = config.phase_mode;
    rec.detector_mode = config.detector_mode;
    rec.relay_count = config.relay_count();
    rec.elements = config.elements;
    rec.cascade_degree = config.cascade_degree;
    rec.m = config.m;
    rec.path_loss_exponent = config.path_loss_exponent;
    rec.snr_db = snr_db;
    rec.seed = config.seed;
    return rec;
}

BerRecord run_point(const ChainContext& chain, const RunModels& models, double snr_db,
                    const RngStream& point_stream, unsigned threads) {
    const ScenarioConfig& config = chain.config();
    const auto start = std::chrono::steady_clock::now();

    const std::uint64_t max_chunks = (config.max_trials + kChunkTrials - 1) / kChunkTrials;
    std::vector<ChunkOutcome> outcomes(max_chunks);
    std::vector<char> done(max_chunks, 0);

    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> stop_bound{max_chunks};
    std::mutex prefix_mutex;
    std::uint64_t prefix = 0;
    std::uint64_t prefix_errors = 0;
    std::exception_ptr failure;

    auto worker = [&] {
        try {
            PointRunner runner(chain, models, snr_db);
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= stop_bound.load()) {
                    return;
                }
                const std::uint64_t trials =
                    std::min<std::uint64_t>(kChunkTrials, config.max_trials - i * kChunkTrials);
                const ChunkOutcome outcome = runner.run_chunk(point_stream.substream(i), trials);

                std::lock_guard<std::mutex> lock(prefix_mutex);
                outcomes[i] = outcome;
                done[i] = 1;
                // Advance the contiguous prefix; the stop decision only ever
                // looks at it, so it cannot depend on completion order.
                while (prefix < max_chunks && done[prefix]) {
                    prefix_errors += outcomes[prefix].bit_errors;
                    ++prefix;
                    if (prefix_errors >= config.min_bit_errors) {
                        std::uint64_t current = stop_bound.load();
                        while (prefix < current &&
                               !stop_bound.compare_exchange_weak(current, prefix)) {
                        }
                        break;
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(prefix_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            stop_bound.store(0);
        }
    };

    unsigned worker_count = threads == 0 ? std::thread::hardware_concurrency() : threads;
    worker_count = std::max(1u, worker_count);
    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned w = 0; w < worker_count; ++w) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    const std::uint64_t used_chunks = std::min<std::uint64_t>(stop_bound.load(), max_chunks);
    BerRecord rec = make_record(config, snr_db);
    for (std::uint64_t i = 0; i < used_chunks; ++i) {
        rec.trials += outcomes[i].trials;
        rec.bit_errors += outcomes[i].bit_errors;
    }
    const double bits = static_cast<double>(rec.trials) *
                        static_cast<double>(chain.constellation().bits_per_symbol);
    rec.ber = bits > 0.0 ? static_cast<double>(rec.bit_errors) / bits : 0.0;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

TrialResult run_trial(const ScenarioConfig& config, double snr_db, const RunModels& models,
                      RngStream& rng) {
    require_models(config, models);
    const ChainContext chain(config);
    const NoiseModel noise =
        config.noise_enabled ? NoiseModel::from_snr_db(snr_db) : NoiseModel::disabled();

    TrialDraws draws;
    chain.draw(noise, rng, draws);
    std::vector<double> phases = config.phase_mode == PhaseMode::dnn
                                     ? estimate_phases(*models.relay, draws.h_sr, draws.h_rd)
                                     : chain.analytic_phases(draws);
    if (config.phase_mode == PhaseMode::dnn && config.phase_bits > 0) {
        phases = quantize_phases(phases, config.phase_bits);
    }
    const ChainContext::Combined combined = chain.combine(draws, phases);

    int decided = 0;
    if (config.detector_mode == DetectorMode::ml) {
        decided = demodulate_ml(combined.r, combined.h_eff, chain.constellation());
    } else {
        decided = classify_symbol(*models.detector, combined.r, ClassMap{chain.constellation()});
    }

    TrialResult result;
    result.tx_bits = bits_of_symbol(draws.symbol, chain.constellation());
    result.rx_bits = bits_of_symbol(decided, chain.constellation());
    return result;
}

std::vector<BerRecord> run_sweep(const ScenarioConfig& config, const RunModels& models,
                                 unsigned threads) {
    config.validate();
    require_models(config, models);
    if (config.snr_grid_db.empty()) {
        throw ConfigError("SNR grid is empty");
    }

    const ChainContext chain(config);
    const RngStream base(config.seed, 0);

    std::vector<BerRecord> records;
    records.reserve(config.snr_grid_db.size());
    for (std::size_t p = 0; p < config.snr_grid_db.size(); ++p) {
        records.push_back(
            run_point(chain, models, config.snr_grid_db[p], base.substream(p), threads));
    }
    return records;
}

std::string BerCurve::label() const {
    std::ostringstream name;
    name << "s" << id.scenario << "_" << to_string(id.scheme) << "_"
         << to_string(id.phase_mode) << "_" << to_string(id.detector_mode) << "_L"
         << id.relay_count << "_N" << id.elements << "_K" << id.cascade_degree << "_m"
         << format_double(id.m) << "_seed" << id.seed;
    return name.str();
}

std::vector<BerCurve> group_into_curves(const std::vector<BerRecord>& records) {
    auto same_curve = [](const BerRecord& a, const BerRecord& b) {
        return a.scenario == b.scenario && a.scheme == b.scheme &&
               a.phase_mode == b.phase_mode && a.detector_mode == b.detector_mode &&
               a.relay_count == b.relay_count && a.elements == b.elements &&
               a.cascade_degree == b.cascade_degree && a.m == b.m &&
               a.path_loss_exponent == b.path_loss_exponent && a.seed == b.seed;
    };
    std::vector<BerCurve> curves;
    for (const BerRecord& rec : records) {
        BerCurve* curve = nullptr;
        for (BerCurve& existing : curves) {
            if (same_curve(existing.id, rec)) {
                curve = &existing;
                break;
            }
        }
        if (curve == nullptr) {
            curves.push_back(BerCurve{rec, {}});
            curve = &curves.back();
        }
        curve->points.emplace_back(rec.snr_db, rec.ber);
    }
    return curves;
}

double snr_at_ber(const BerCurve& curve, double target_ber) {
    if (!(target_ber > 0.0)) {
        throw ParameterError("target BER must be positive");
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& [snr, ber] : curve.points) {
        if (ber > 0.0) {
            pts.emplace_back(snr, ber);
        }
    }
    std::sort(pts.begin(), pts.end());
    const double target_log = std::log10(target_ber);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double hi = std::log10(pts[i].second);
        const double lo = std::log10(pts[i + 1].second);
        if ((hi >= target_log && target_log >= lo) || (hi <= target_log && target_log <= lo)) {
            if (hi == lo) {
                return pts[i].first;
            }
            const double frac = (hi - target_log) / (hi - lo);
            return pts[i].first + frac * (pts[i + 1].first - pts[i].first);
        }
    }
    std::ostringstream msg;
    msg << "curve " << curve.label() << " does not cross BER " << target_ber
        << " inside the swept range";
    throw ParameterError(msg.str());
}

double gap_at_ber(const BerCurve& a, const BerCurve& b, double target_ber) {
    return snr_at_ber(a, target_ber) - snr_at_ber(b, target_ber);
}

std::vector<PipelineGap> compare_pipelines(const std::vector<BerRecord>& a,
                                           const std::vector<BerRecord>& b,
                                           const std::vector<double>& target_bers) {
    const std::vector<BerCurve> ca = group_into_curves(a);
    const std::vector<BerCurve> cb = group_into_curves(b);
    if (ca.size() != 1 || cb.size() != 1) {
        throw ParameterError("pipeline comparison expects exactly one curve per side");
    }
    std::vector<PipelineGap> gaps;
    gaps.reserve(target_bers.size());
    for (double target : target_bers) {
        gaps.push_back({target, gap_at_ber(ca[0], cb[0], target)});
    }
    return gaps;
}

void write_ber_csv(const std::vector<BerRecord>& records, std::ostream& out) {
    out << "scenario,scheme,phase_mode,detector_mode,L,N,K,m,c,snr_db,trials,bit_errors,ber,seed\n";
    for (const BerRecord& r : records) {
        out << r.scenario << ',' << to_string(r.scheme) << ',' << to_string(r.phase_mode)
            << ',' << to_string(r.detector_mode) << ',' << r.relay_count << ',' << r.elements
            << ',' << r.cascade_degree << ',' << format_double(r.m) << ','
            << format_double(r.path_loss_exponent) << ',' << format_double(r.snr_db) << ','
            << r.trials << ',' << r.bit_errors << ',' << format_double(r.ber) << ',' << r.seed
            << '\n';
    }
}

void write_ber_csv(const std::vector<BerRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) {
        throw ModelIoError("cannot open results file for writing: " + path.string());
    }
    write_ber_csv(records, out);
}

std::vector<BerRecord> read_ber_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ModelIoError("cannot open results file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) ||
        line !=
            "scenario,scheme,phase_mode,detector_mode,L,N,K,m,c,snr_db,trials,bit_errors,ber,seed") {
        throw ModelIoError("unexpected results header in " + path.string());
    }
    std::vector<BerRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::vector<std::string> fields;
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 14) {
            std::ostringstream msg;
            msg << "malformed results row at " << path.string() << ":" << line_no;
            throw ModelIoError(msg.str());
        }
        try {
            BerRecord r;
            r.scenario = std::stoi(fields[0]);
            r.scheme = scheme_from_string(fields[1]);
            r.phase_mode = phase_mode_from_string(fields[2]);
            r.detector_mode = detector_mode_from_string(fields[3]);
            r.relay_count = static_cast<std::size_t>(std::stoull(fields[4]));
            r.elements = std::stoi(fields[5]);
            r.cascade_degree = std::stoi(fields[6]);
            r.m = std::stod(fields[7]);
            r.path_loss_exponent = std::stod(fields[8]);
            r.snr_db = std::stod(fields[9]);
            r.trials = std::stoull(fields[10]);
            r.bit_errors = std::stoull(fields[11]);
            r.ber = std::stod(fields[12]);
            r.seed = std::stoull(fields[13]);
            records.push_back(r);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            std::ostringstream msg;
            msg << "malformed results row at " << path.string() << ":" << line_no;
            throw ModelIoError(msg.str());
        }
    }
    return records;
}

} // namespace rcs
