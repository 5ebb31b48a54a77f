#include "biovit/efga.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace biovit::efga {

std::string_view to_string(Group group) { return group == Group::NormalSuperior ? "NormalSuperior" : "Low"; }

std::string_view to_string(Item item) {
  switch (item) {
    case Item::Mo: return "Mo";
    case Item::Mape: return "MAPE";
    case Item::Efga: return "EFGA";
  }
  return "?";
}

double efga_score(double mo, double mape, bool times_100) {
  if (!(mape > 0.0) || !std::isfinite(mape)) throw Error("EFGA needs MAPE > 0");
  if (!(mo >= 0.0 && mo <= 100.0)) throw Error("EFGA needs Mo in [0, 100]");
  const double ratio = mo / mape;
  return times_100 ? ratio * 100.0 : ratio;
}

double display_efga(double efga) {
  // The epsilon keeps exact two-decimal quotients such as 1.03 from
  // dropping a cent through binary round-off.
  const double scaled = std::abs(efga) * 100.0;
  const double cents = std::floor(scaled * (1.0 + 1e-12) + 1e-9);
  return std::copysign(cents / 100.0, efga);
}

std::string format_efga(double efga) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, display_efga(efga), std::chars_format::fixed, 2);
  return std::string(buf, p);
}

EfgaRecord make_record(std::string participant_id, double mo, double mape, const EfgaOptions& options) {
  if (!(options.threshold > 0.0)) throw Error("EFGA threshold must be positive");
  EfgaRecord r;
  r.participant_id = std::move(participant_id);
  r.mo = mo;
  r.mape = mape;
  r.efga = efga_score(mo, mape, options.times_100);
  r.band = session::classify_band(mo);
  r.group = r.efga >= options.threshold ? Group::NormalSuperior : Group::Low;
  return r;
}

GroupSplit split_groups(const std::vector<EfgaRecord>& records, double threshold) {
  if (records.empty()) throw Error("no EFGA records to split");
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.participant_id).second) throw Error("duplicate participant id: " + r.participant_id);
  }
  GroupSplit split;
  for (const auto& r : records) {
    auto copy = r;
    copy.group = r.efga >= threshold ? Group::NormalSuperior : Group::Low;
    (copy.group == Group::NormalSuperior ? split.retained : split.declined).push_back(std::move(copy));
  }
  auto by_mape = [](const EfgaRecord& a, const EfgaRecord& b) { return a.mape < b.mape; };
  std::stable_sort(split.retained.begin(), split.retained.end(), by_mape);
  std::stable_sort(split.declined.begin(), split.declined.end(), by_mape);
  return split;
}

double retention_rate(const std::vector<EfgaRecord>& records, double threshold) {
  const auto split = split_groups(records, threshold);
  const double pct = 100.0 * static_cast<double>(split.retained.size()) / static_cast<double>(records.size());
  return std::round(pct * 10.0) / 10.0;
}

namespace {

std::vector<double> column(const std::vector<EfgaRecord>& records, Item item) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    switch (item) {
      case Item::Mo: out.push_back(r.mo); break;
      case Item::Mape: out.push_back(r.mape); break;
      case Item::Efga: out.push_back(r.efga); break;
    }
  }
  return out;
}

}  // namespace

ValidationReport validate_scale(const std::vector<EfgaRecord>& records, Item first, Item second) {
  if (records.size() < 3) throw Error("scale validation needs at least 3 records");
  const auto x = column(records, first);
  const auto y = column(records, second);
  ValidationReport v;
  v.first = first;
  v.second = second;
  v.item_names = {std::string(to_string(first)), std::string(to_string(second))};
  v.pearson_r = stats::pearson(x, y);
  v.cronbach_alpha = stats::standardized_alpha(v.pearson_r, 2);
  v.raw_alpha = stats::cronbach_alpha({x, y}).raw;
  return v;
}

GroupTests group_tests(const GroupSplit& split) {
  GroupTests t;
  if (!split.retained.empty()) {
    t.retained = stats::mann_whitney(column(split.retained, Item::Mo), column(split.retained, Item::Mape),
                                     stats::Alternative::Greater);
  }
  if (!split.declined.empty()) {
    t.declined = stats::mann_whitney(column(split.declined, Item::Mo), column(split.declined, Item::Mape),
                                     stats::Alternative::Less);
  }
  return t;
}

}  // namespace biovit::efga
