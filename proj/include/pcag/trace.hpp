#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pcag/topology.hpp"

namespace pcag {

/// Dense measurement trace: one row per sensor (sorted by id), one column per
/// epoch on a fixed-interval grid with no missing entries.
struct EpochTrace {
    std::vector<SensorId> sensor_ids;
    std::vector<double> epochs;  // grid timestamps in seconds, strictly increasing
    Matrix values;               // p x T
    std::vector<SensorId> dropped_sensors;  // ended up with no usable readings

    std::size_t p() const { return sensor_ids.size(); }
    std::size_t T() const { return epochs.size(); }

    /// Measurement vector of one epoch in sensor-index order.
    Vector epoch_vector(std::size_t t) const;
};

enum class BucketStat { Last, Mean };

BucketStat bucket_stat_from_string(const std::string& s);

/// Reads a `timestamp_s,sensor_id,value` CSV, buckets readings into
/// fixed-length intervals (last reading wins by default), fills gaps by
/// carrying the last observation forward and leading gaps with the first
/// value. Non-finite values count as missing; rows that do not parse raise an
/// error naming the line.
EpochTrace load_trace(const std::filesystem::path& path, double epoch_seconds,
                      const std::vector<SensorId>& exclude = {},
                      BucketStat stat = BucketStat::Last);

void save_trace(const EpochTrace& trace, const std::filesystem::path& path);

/// Synthetic trace description: a few smooth latent signals anchored at
/// random points of the field, mixed into each sensor with weight
/// exp(-distance/correlation_length), plus white noise. correlation_length 0
/// means pure noise, infinity means identical weights (rank-1 data when
/// noise is 0).
struct SynthSpec {
    std::size_t p = 0;
    std::size_t T = 0;
    double correlation_length = 10.0;  // meters
    double noise = 0.1;
    std::uint64_t seed = 1;
    int sources = 3;
    double amplitude_decay = 0.7;  // amplitude ratio between consecutive sources

    void validate() const;
};

EpochTrace generate_synthetic(const SynthSpec& spec, const SensorField& field);

}  // namespace pcag
