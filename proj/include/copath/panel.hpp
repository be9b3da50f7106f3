#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace copath {

// One firm-period observation. Logs throughout; the log material price is
// normalized to zero, so material expenditure and quantity coincide.
struct FirmPeriod {
  std::int64_t firm_id = 0;
  std::int64_t period = 0;
  double r = 0;  // log revenue
  double m = 0;  // log material expenditure
  double k = 0;  // log capital
  double l = 0;  // log labor
  // ground-truth columns, present in simulated panels
  std::optional<double> omega;
  std::optional<double> u;
  std::optional<double> y;
  std::optional<double> p;
  std::optional<double> markup;
};

class Panel {
public:
  Panel() = default;
  explicit Panel(std::vector<FirmPeriod> records);

  const std::vector<FirmPeriod>& records() const { return records_; }
  const std::vector<std::int64_t>& periods() const { return periods_; }
  std::size_t n_firms() const { return n_firms_; }
  std::size_t size() const { return records_.size(); }

  // Index of (firm, period), or -1.
  std::ptrdiff_t find(std::int64_t firm, std::int64_t period) const;

  // All records of one period, in stored order.
  std::vector<std::size_t> period_index(std::int64_t period) const;

  // True if every firm observed at `period` also has records back to
  // period - depth (label arithmetic, not adjacency).
  bool has_lag_depth(std::int64_t period, int depth) const;

private:
  std::vector<FirmPeriod> records_;
  std::vector<std::int64_t> periods_;
  std::size_t n_firms_ = 0;
  std::unordered_map<std::uint64_t, std::size_t> index_;

  static std::uint64_t key(std::int64_t firm, std::int64_t period);
};

// exp(m - r); always > 0, and < 1 iff m < r.
double material_share(const FirmPeriod& rec);

// CSV I/O. Header: firm_id,period,r,m,k,l[,omega,u,y,p,markup]; floats are
// written with 17 significant digits so read(write(p)) == p bitwise.
Panel read_panel(const std::string& path);
void write_panel(const Panel& panel, const std::string& path);

// Drops firms with any material share outside (0,1) or inside the bottom
// lower_pct / top (1-upper_pct) percentile bands (nearest-rank percentiles,
// computed once on the input sample). per_period restricts percentile
// computation to each period's cross-section.
Panel trim_shares(const Panel& panel, double lower_pct, double upper_pct,
                  bool per_period = false);

}  // namespace copath
