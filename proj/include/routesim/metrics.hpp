#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "routesim/types.hpp"

namespace routesim {

enum class DropReason { LinkDown = 0, Congestion = 1, NoRoute = 2, Ttl = 3 };
inline constexpr int kDropReasonCount = 4;

const char* drop_reason_name(DropReason r);

// One time bucket of the collected series.
struct MetricBucket {
  std::int64_t dropped = 0;             // all packets, data and control
  int convergence_active = 0;           // 0 or 1
  std::int64_t delay_sum_us = 0;        // over delivered data packets
  std::int64_t delivered = 0;
  std::int64_t hops_sum = 0;
  std::int64_t control_bits = 0;
};

// Fixed-bucket collector fed by the kernel while a simulation runs.
class MetricsCollector {
 public:
  MetricsCollector(std::int64_t duration_s, std::int64_t bucket_s);

  void record_drop(SimTime now, DropReason reason, bool data_packet);
  void record_delivery(SimTime now, SimTime delay_us, int hops);
  void record_control_bits(SimTime now, std::int64_t bits);
  void mark_convergence(SimTime now);

  const std::vector<MetricBucket>& buckets() const { return buckets_; }
  std::int64_t bucket_seconds() const { return bucket_s_; }

  std::int64_t total_dropped() const { return total_dropped_; }
  std::int64_t data_dropped() const { return data_dropped_; }
  std::int64_t dropped_by_reason(DropReason r) const {
    return by_reason_[static_cast<int>(r)];
  }
  std::int64_t total_delivered() const { return delivered_; }
  std::int64_t delay_sum_us() const { return delay_sum_us_; }
  std::int64_t hops_sum() const { return hops_sum_; }
  std::int64_t control_bits() const { return control_bits_; }
  std::int64_t convergence_active_seconds() const;

 private:
  MetricBucket* bucket_at(SimTime now);

  std::int64_t bucket_s_;
  std::vector<MetricBucket> buckets_;
  std::int64_t total_dropped_ = 0;
  std::int64_t data_dropped_ = 0;
  std::array<std::int64_t, kDropReasonCount> by_reason_{};
  std::int64_t delivered_ = 0;
  std::int64_t delay_sum_us_ = 0;
  std::int64_t hops_sum_ = 0;
  std::int64_t control_bits_ = 0;
};

}  // namespace routesim
