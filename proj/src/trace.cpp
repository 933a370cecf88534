#include "pcag/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "pcag/csv.hpp"

namespace pcag {

Vector EpochTrace::epoch_vector(std::size_t t) const {
    Vector x(p());
    for (std::size_t i = 0; i < p(); ++i) x[i] = values(i, t);
    return x;
}

BucketStat bucket_stat_from_string(const std::string& s) {
    if (s == "last") return BucketStat::Last;
    if (s == "mean") return BucketStat::Mean;
    throw std::invalid_argument("bucket_stat must be 'last' or 'mean', got '" + s + "'");
}

EpochTrace load_trace(const std::filesystem::path& path, double epoch_seconds,
                      const std::vector<SensorId>& exclude, BucketStat stat) {
    if (epoch_seconds <= 0.0)
        throw std::invalid_argument("load_trace: epoch_seconds must be positive");
    CsvFile csv = read_csv(path);
    if (csv.header != std::vector<std::string>{"timestamp_s", "sensor_id", "value"})
        throw std::runtime_error(path.string() + ": expected header timestamp_s,sensor_id,value");

    const std::set<SensorId> excluded(exclude.begin(), exclude.end());

    struct Slot {
        double ts = -std::numeric_limits<double>::infinity();
        double value = 0.0;   // last-wins value
        double sum = 0.0;     // for the mean statistic
        std::int64_t n = 0;
    };
    std::map<SensorId, std::map<std::int64_t, Slot>> buckets;
    std::set<SensorId> seen;
    std::int64_t b_min = std::numeric_limits<std::int64_t>::max();
    std::int64_t b_max = std::numeric_limits<std::int64_t>::min();

    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const std::string ctx = path.string() + ": line " + std::to_string(r + 2);
        const double ts = parse_double(csv.rows[r][0], ctx);
        const auto id = static_cast<SensorId>(parse_int(csv.rows[r][1], ctx));
        const double value = parse_double(csv.rows[r][2], ctx);
        if (excluded.count(id)) continue;
        seen.insert(id);
        if (!std::isfinite(value)) continue;  // treated as a missing reading
        const auto b = static_cast<std::int64_t>(std::floor(ts / epoch_seconds));
        Slot& slot = buckets[id][b];
        if (ts >= slot.ts) {
            slot.ts = ts;
            slot.value = value;
        }
        slot.sum += value;
        slot.n += 1;
        b_min = std::min(b_min, b);
        b_max = std::max(b_max, b);
    }

    EpochTrace trace;
    for (SensorId id : seen)
        if (!buckets.count(id) || buckets[id].empty()) trace.dropped_sensors.push_back(id);
    for (SensorId id : trace.dropped_sensors) seen.erase(id);
    if (seen.empty()) throw std::runtime_error(path.string() + ": no usable readings");

    trace.sensor_ids.assign(seen.begin(), seen.end());
    const std::size_t p = trace.sensor_ids.size();
    const auto T = static_cast<std::size_t>(b_max - b_min + 1);
    trace.epochs.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        trace.epochs[t] = static_cast<double>(b_min + static_cast<std::int64_t>(t)) *
                          epoch_seconds;
    trace.values = Matrix(p, T);

    for (std::size_t i = 0; i < p; ++i) {
        const auto& sensor_buckets = buckets[trace.sensor_ids[i]];
        const double first_value = stat == BucketStat::Last
                                       ? sensor_buckets.begin()->second.value
                                       : sensor_buckets.begin()->second.sum /
                                             static_cast<double>(sensor_buckets.begin()->second.n);
        double carried = first_value;  // leading gaps take the first observation
        for (std::size_t t = 0; t < T; ++t) {
            const std::int64_t b = b_min + static_cast<std::int64_t>(t);
            auto it = sensor_buckets.find(b);
            if (it != sensor_buckets.end()) {
                carried = stat == BucketStat::Last
                              ? it->second.value
                              : it->second.sum / static_cast<double>(it->second.n);
            }
            trace.values(i, t) = carried;
        }
    }
    return trace;
}

void save_trace(const EpochTrace& trace, const std::filesystem::path& path) {
    Table t;
    t.header = {"timestamp_s", "sensor_id", "value"};
    for (std::size_t e = 0; e < trace.T(); ++e)
        for (std::size_t i = 0; i < trace.p(); ++i)
            t.add_row({format_value(trace.epochs[e]), std::to_string(trace.sensor_ids[i]),
                       format_value(trace.values(i, e))});
    t.write(path);
}

void SynthSpec::validate() const {
    if (p < 1) throw std::invalid_argument("SynthSpec: p must be at least 1");
    if (T < 2) throw std::invalid_argument("SynthSpec: T must be at least 2");
    if (correlation_length < 0.0)
        throw std::invalid_argument("SynthSpec: correlation length must be nonnegative");
    if (noise < 0.0) throw std::invalid_argument("SynthSpec: noise must be nonnegative");
    if (sources < 1) throw std::invalid_argument("SynthSpec: need at least 1 source");
    if (amplitude_decay <= 0.0)
        throw std::invalid_argument("SynthSpec: amplitude decay must be positive");
}

EpochTrace generate_synthetic(const SynthSpec& spec, const SensorField& field) {
    spec.validate();
    if (spec.p != field.size())
        throw std::invalid_argument("generate_synthetic: spec.p does not match field size");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double x_min = field.sensors()[0].x, x_max = x_min;
    double y_min = field.sensors()[0].y, y_max = y_min;
    for (const Sensor& s : field.sensors()) {
        x_min = std::min(x_min, s.x);
        x_max = std::max(x_max, s.x);
        y_min = std::min(y_min, s.y);
        y_max = std::max(y_max, s.y);
    }

    struct Source {
        double x, y, amplitude, f1, f2, phase1, phase2;
    };
    std::vector<Source> sources(spec.sources);
    for (int k = 0; k < spec.sources; ++k) {
        Source& s = sources[k];
        s.x = x_min + (x_max - x_min) * unit(rng);
        s.y = y_min + (y_max - y_min) * unit(rng);
        s.amplitude = std::pow(spec.amplitude_decay, k);
        s.f1 = 1.0 + 3.0 * unit(rng);
        s.f2 = 5.0 + 6.0 * unit(rng);
        s.phase1 = 2.0 * M_PI * unit(rng);
        s.phase2 = 2.0 * M_PI * unit(rng);
    }

    auto weight = [&spec](double d) {
        if (spec.correlation_length == 0.0) return d == 0.0 ? 1.0 : 0.0;
        if (std::isinf(spec.correlation_length)) return 1.0;
        return std::exp(-d / spec.correlation_length);
    };

    EpochTrace trace;
    trace.sensor_ids.reserve(spec.p);
    for (const Sensor& s : field.sensors()) trace.sensor_ids.push_back(s.id);
    trace.epochs.resize(spec.T);
    for (std::size_t t = 0; t < spec.T; ++t) trace.epochs[t] = 30.0 * static_cast<double>(t);
    trace.values = Matrix(spec.p, spec.T);

    Matrix weights(spec.p, static_cast<std::size_t>(spec.sources));
    for (std::size_t i = 0; i < spec.p; ++i) {
        const Sensor& s = field.sensors()[i];
        for (int k = 0; k < spec.sources; ++k) {
            const double d = std::hypot(s.x - sources[k].x, s.y - sources[k].y);
            weights(i, static_cast<std::size_t>(k)) = weight(d);
        }
    }

    for (std::size_t t = 0; t < spec.T; ++t) {
        const double tau = static_cast<double>(t) / static_cast<double>(spec.T);
        Vector signal(static_cast<std::size_t>(spec.sources));
        for (int k = 0; k < spec.sources; ++k) {
            const Source& s = sources[k];
            signal[static_cast<std::size_t>(k)] =
                s.amplitude * (std::sin(2.0 * M_PI * s.f1 * tau + s.phase1) +
                               0.6 * std::sin(2.0 * M_PI * s.f2 * tau + s.phase2));
        }
        for (std::size_t i = 0; i < spec.p; ++i) {
            double v = 0.0;
            for (int k = 0; k < spec.sources; ++k)
                v += weights(i, static_cast<std::size_t>(k)) * signal[static_cast<std::size_t>(k)];
            if (spec.noise > 0.0) v += spec.noise * gauss(rng);
            trace.values(i, t) = v;
        }
    }
    return trace;
}

}  // namespace pcag
