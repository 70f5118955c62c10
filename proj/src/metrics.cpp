#include "routesim/metrics.hpp"

#include <stdexcept>

namespace routesim {

const char* drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::LinkDown:
      return "link_down";
    case DropReason::Congestion:
      return "congestion";
    case DropReason::NoRoute:
      return "no_route";
    case DropReason::Ttl:
      return "ttl_expired";
  }
  return "unknown";
}

MetricsCollector::MetricsCollector(std::int64_t duration_s,
                                   std::int64_t bucket_s)
    : bucket_s_(bucket_s) {
  if (duration_s < 0 || bucket_s <= 0) {
    throw std::invalid_argument("bad metrics dimensions");
  }
  buckets_.resize(
      static_cast<std::size_t>((duration_s + bucket_s - 1) / bucket_s));
}

MetricBucket* MetricsCollector::bucket_at(SimTime now) {
  std::int64_t idx = now / (bucket_s_ * kMicrosPerSecond);
  if (idx < 0 || idx >= static_cast<std::int64_t>(buckets_.size())) {
    return nullptr;
  }
  return &buckets_[static_cast<std::size_t>(idx)];
}

void MetricsCollector::record_drop(SimTime now, DropReason reason,
                                   bool data_packet) {
  ++total_dropped_;
  ++by_reason_[static_cast<int>(reason)];
  if (data_packet) ++data_dropped_;
  if (auto* b = bucket_at(now)) ++b->dropped;
}

void MetricsCollector::record_delivery(SimTime now, SimTime delay_us,
                                       int hops) {
  ++delivered_;
  delay_sum_us_ += delay_us;
  hops_sum_ += hops;
  if (auto* b = bucket_at(now)) {
    ++b->delivered;
    b->delay_sum_us += delay_us;
    b->hops_sum += hops;
  }
}

void MetricsCollector::record_control_bits(SimTime now, std::int64_t bits) {
  control_bits_ += bits;
  if (auto* b = bucket_at(now)) b->control_bits += bits;
}

void MetricsCollector::mark_convergence(SimTime now) {
  if (auto* b = bucket_at(now)) b->convergence_active = 1;
}

std::int64_t MetricsCollector::convergence_active_seconds() const {
  std::int64_t active = 0;
  for (const auto& b : buckets_) {
    if (b.convergence_active) active += bucket_s_;
  }
  return active;
}

}  // namespace routesim
