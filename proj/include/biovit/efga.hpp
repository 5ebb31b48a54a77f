#pragma once

// Attention Grade Frequency Scale (EFGA): the session mode divided by the
// quadratic trend MAPE. High values mean attention held at high levels with
// a tight trend fit. Participants with EFGA >= 1 form the retained group.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biovit/session.hpp"
#include "biovit/stats.hpp"

namespace biovit::efga {

enum class Group { NormalSuperior, Low };

std::string_view to_string(Group group);

inline constexpr double kDefaultThreshold = 1.0;

struct EfgaOptions {
  double threshold = kDefaultThreshold;
  // Multiply the ratio by 100, as the scale's printed formula reads. The
  // tabulated values all use the plain ratio.
  bool times_100 = false;
};

// mo / mape (times 100 if requested). Throws unless mape > 0 and mo in
// [0, 100].
double efga_score(double mo, double mape, bool times_100 = false);

// Two-decimal display value, truncated toward zero the way the published
// tables print it (63 / 24.003 = 2.6247 -> "2.62").
double display_efga(double efga);
std::string format_efga(double efga);

struct EfgaRecord {
  std::string participant_id;
  double mo = 0.0;
  double mape = 0.0;
  double efga = 0.0;
  session::EsenseBand band = session::EsenseBand::Low;
  Group group = Group::Low;

  bool operator==(const EfgaRecord&) const = default;
};

// Builds a record, deriving efga, band (from mo) and group.
EfgaRecord make_record(std::string participant_id, double mo, double mape, const EfgaOptions& options = {});

struct GroupSplit {
  std::vector<EfgaRecord> retained;  // efga >= threshold, ascending MAPE
  std::vector<EfgaRecord> declined;  // efga < threshold, ascending MAPE
};

// Throws on empty input or duplicate participant ids.
GroupSplit split_groups(const std::vector<EfgaRecord>& records, double threshold = kDefaultThreshold);

// Percentage of retained participants, rounded to one decimal.
double retention_rate(const std::vector<EfgaRecord>& records, double threshold = kDefaultThreshold);

enum class Item { Mo, Mape, Efga };

std::string_view to_string(Item item);

struct ValidationReport {
  double pearson_r = 0.0;
  double cronbach_alpha = 0.0;  // standardized two-item alpha, 2r / (1 + r)
  double raw_alpha = 0.0;       // raw alpha on the unstandardized columns
  Item first = Item::Mo;
  Item second = Item::Efga;
  std::vector<std::string> item_names;
};

ValidationReport validate_scale(const std::vector<EfgaRecord>& records, Item first = Item::Mo,
                                Item second = Item::Efga);

// The one-sided Mann-Whitney comparisons between the Mo and MAPE columns of
// each group: Greater for the retained group, Less for the declined group.
struct GroupTests {
  std::optional<stats::MannWhitneyResult> retained;
  std::optional<stats::MannWhitneyResult> declined;
};

GroupTests group_tests(const GroupSplit& split);

}  // namespace biovit::efga
