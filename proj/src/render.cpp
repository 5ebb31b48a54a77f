#include <charconv>
#include <cmath>

#include "json.hpp"

#include "biovit/pipeline.hpp"

namespace biovit::pipeline {

namespace {

using ojson = nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string p_text(double p) { return p < 0.0005 ? "<0.001" : format_fixed(p, 3); }

std::string row(std::initializer_list<std::string> cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string header(std::initializer_list<std::string> cells) {
  std::string out = row(cells) + "|";
  for (std::size_t i = 0; i < cells.size(); ++i) out += "---|";
  return out + "\n";
}

void efga_table(std::string& out, const std::string& title, const std::vector<efga::EfgaRecord>& rows) {
  out += "## " + title + "\n\n";
  out += header({"Variable", "Mo", "MAPE", "EFGA", "eSense"});
  for (const auto& r : rows) {
    out += row({r.participant_id, shortest(r.mo), format_fixed(r.mape, 2), efga::format_efga(r.efga),
                std::string(session::to_string(r.band))});
  }
  out += "\n";
}

void test_table(std::string& out, const std::string& title, const std::string& hypothesis,
                const std::vector<efga::EfgaRecord>& rows, const std::optional<stats::MannWhitneyResult>& test) {
  out += "## " + title + "\n\n";
  out += "H1: " + hypothesis + "\n\n";
  out += header({"Variable", "Mo", "MAPE", "Confidence", "CI bound", "p-value"});
  if (test) {
    const std::string conf = format_fixed(test->confidence, 2) + "%";
    const std::string bound = format_fixed(test->bound, 2);
    const std::string p = p_text(test->p_value);
    for (const auto& r : rows) {
      out += row({r.participant_id, shortest(r.mo), format_fixed(r.mape, 2), conf, bound, p});
    }
    out += "\nn1 = " + std::to_string(test->n1) + ", n2 = " + std::to_string(test->n2) +
           ", W = " + shortest(test->w_statistic) + ", median difference = " + format_fixed(test->median_diff_point, 2) +
           ", p = " + shortest(test->p_value) + (test->exact ? " (exact)" : " (normal approximation)") + "\n";
  }
  out += "\n";
}

ojson measures_json(const trend::AccuracyMeasures& m) {
  ojson j;
  j["mape"] = std::isnan(m.mape) ? ojson(nullptr) : ojson(m.mape);
  j["mad"] = m.mad;
  j["msd"] = m.msd;
  return j;
}

ojson record_json(const efga::EfgaRecord& r) {
  ojson j;
  j["participant_id"] = r.participant_id;
  j["mo"] = r.mo;
  j["mape"] = r.mape;
  j["efga"] = r.efga;
  j["efga_display"] = efga::format_efga(r.efga);
  j["band"] = session::to_string(r.band);
  j["group"] = efga::to_string(r.group);
  return j;
}

ojson test_json(const std::optional<stats::MannWhitneyResult>& t) {
  if (!t) return nullptr;
  ojson j;
  j["n1"] = t->n1;
  j["n2"] = t->n2;
  j["direction"] = stats::to_string(t->direction);
  j["w_statistic"] = t->w_statistic;
  j["u_statistic"] = t->u_statistic;
  j["p_value"] = t->p_value;
  j["exact"] = t->exact;
  j["median_diff_point"] = t->median_diff_point;
  j["bound"] = t->bound;
  j["confidence"] = t->confidence;
  return j;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += csv_cell(c);
    first = false;
  }
  return out + "\n";
}

std::string opt_num(const std::optional<double>& v) { return v ? shortest(*v) : ""; }

}  // namespace

std::string render_efga_markdown(const EfgaSection& s) {
  std::string out;
  efga_table(out, "Table 5. Normal-superior EFGA attention scale", s.retained);
  efga_table(out, "Table 6. Low EFGA attention scale", s.declined);

  out += "## Scale validation\n\n";
  if (s.validation) {
    const auto& v = *s.validation;
    out += "Items: " + v.item_names[0] + ", " + v.item_names[1] + " (reconstructed pairing)\n\n";
    out += header({"Pearson r", "Cronbach alpha (standardized)", "Cronbach alpha (raw)"});
    out += row({format_fixed(v.pearson_r, 3), format_fixed(v.cronbach_alpha, 3), format_fixed(v.raw_alpha, 3)});
  } else {
    out += "not available" + (s.validation_error.empty() ? std::string() : ": " + s.validation_error) + "\n";
  }
  if (s.retention_rate) out += "\nRetention rate: " + format_fixed(*s.retention_rate, 1) + "%\n";
  out += "\n";

  out += "Mann-Whitney pairing (reconstructed): Mo column vs MAPE column within each group.\n\n";
  test_table(out, "Table 7. First Mann-Whitney hypothesis test", "Mo - MAPE > 0", s.retained, s.tests.retained);
  test_table(out, "Table 8. Second Mann-Whitney hypothesis test", "Mo - MAPE < 0", s.declined, s.tests.declined);
  return out;
}

std::string render_markdown(const TestReport& r) {
  std::string out = "# Attention analytics report\n\n";

  out += "## Table 2. Anderson-Darling normality test\n\n";
  out += header({"Variable", "Average", "Std. Dev.", "Observations", "A²", "P-value"});
  for (const auto& row_ : r.table2) {
    if (row_.ad) {
      out += row({row_.participant_id, format_fixed(row_.mean, 3), format_fixed(row_.std_dev, 3),
                  std::to_string(row_.n), format_fixed(row_.ad->statistic, 3), format_fixed(row_.ad->p_display, 3)});
    } else {
      out += row({row_.participant_id, "-", "-", std::to_string(row_.n), "-", "error: " + row_.error});
    }
  }
  out += "\n## Table 3. Descriptive statistics\n\n";
  out += header({"Variable", "Observations", "Average", "Variance", "Std. Dev.", "Mo"});
  for (const auto& row_ : r.table3) {
    if (row_.d) {
      out += row({row_.participant_id, std::to_string(row_.d->n), format_fixed(row_.d->mean, 3),
                  format_fixed(row_.d->variance, 3), format_fixed(row_.d->std_dev, 3), shortest(row_.d->mode)});
    } else {
      out += row({row_.participant_id, "-", "-", "-", "-", "error: " + row_.error});
    }
  }
  out += "\n## Table 4. Attention growth analysis\n\n";
  out += header({"Variable", "Mo", "MAPE", "MAD", "MSD", "Duration (min.s)"});
  for (const auto& g : r.table4) {
    const auto& a = g.accuracy;
    out += row({g.participant_id, g.mo ? shortest(*g.mo) : "-", a ? format_fixed(a->mape, 3) : "-",
                a ? format_fixed(a->mad, 3) : "-", a ? format_fixed(a->msd, 3) : "-",
                session::format_duration(g.duration_seconds)});
  }
  out += "\n";

  out += render_efga_markdown(r.efga);

  out += "## Trend analysis\n\n";
  out += header({"Variable", "Model", "Equation", "Shape", "eSense", "Best model"});
  for (const auto& g : r.table4) {
    out += row({g.participant_id, g.model ? std::string(trend::to_string(*g.model)) : "-",
                g.equation.empty() ? "error: " + g.error : g.equation,
                g.shape ? std::string(trend::to_string(*g.shape)) : "-",
                g.band ? std::string(session::to_string(*g.band)) : "-",
                g.best ? std::string(trend::to_string(*g.best)) : "-"});
  }
  out += "\n";

  if (!r.warnings.empty()) {
    out += "## Warnings\n\n";
    for (const auto& w : r.warnings) out += "- " + w + "\n";
    out += "\n";
  }
  return out;
}

std::string render_json(const TestReport& r) {
  ojson doc;
  ojson t2 = ojson::array();
  for (const auto& x : r.table2) {
    ojson j;
    j["participant_id"] = x.participant_id;
    j["n"] = x.n;
    if (x.ad) {
      j["mean"] = x.mean;
      j["std_dev"] = x.std_dev;
      j["statistic"] = x.ad->statistic;
      j["adjusted_statistic"] = x.ad->adjusted;
      j["p_value"] = x.ad->p_value;
      j["p_display"] = x.ad->p_display;
    } else {
      j["error"] = x.error;
    }
    t2.push_back(std::move(j));
  }
  doc["table2"] = std::move(t2);

  ojson t3 = ojson::array();
  for (const auto& x : r.table3) {
    ojson j;
    j["participant_id"] = x.participant_id;
    if (x.d) {
      j["n"] = x.d->n;
      j["mean"] = x.d->mean;
      j["variance"] = x.d->variance;
      j["std_dev"] = x.d->std_dev;
      j["mode"] = x.d->mode;
    } else {
      j["error"] = x.error;
    }
    t3.push_back(std::move(j));
  }
  doc["table3"] = std::move(t3);

  ojson t4 = ojson::array();
  ojson app = ojson::array();
  for (const auto& g : r.table4) {
    ojson j;
    j["participant_id"] = g.participant_id;
    j["mo"] = g.mo ? ojson(*g.mo) : ojson(nullptr);
    j["model"] = g.model ? ojson(trend::to_string(*g.model)) : ojson(nullptr);
    j["accuracy"] = g.accuracy ? measures_json(*g.accuracy) : ojson(nullptr);
    j["duration_seconds"] = g.duration_seconds;
    j["duration"] = session::format_duration(g.duration_seconds);
    if (!g.error.empty()) j["error"] = g.error;
    t4.push_back(std::move(j));

    ojson a;
    a["participant_id"] = g.participant_id;
    a["equation"] = g.equation;
    a["equation_full"] = g.equation_full;
    a["shape"] = g.shape ? ojson(trend::to_string(*g.shape)) : ojson(nullptr);
    a["band"] = g.band ? ojson(session::to_string(*g.band)) : ojson(nullptr);
    a["best_model"] = g.best ? ojson(trend::to_string(*g.best)) : ojson(nullptr);
    ojson scores = ojson::array();
    for (const auto& s : g.scores) {
      ojson sj;
      sj["model"] = trend::to_string(s.kind);
      sj["accuracy"] = measures_json(s.accuracy);
      scores.push_back(std::move(sj));
    }
    a["models"] = std::move(scores);
    ojson skipped = ojson::array();
    for (const auto& s : g.skipped) skipped.push_back({{"model", trend::to_string(s.kind)}, {"reason", s.reason}});
    a["skipped"] = std::move(skipped);
    app.push_back(std::move(a));
  }
  doc["table4"] = std::move(t4);

  ojson e;
  ojson retained = ojson::array();
  for (const auto& x : r.efga.retained) retained.push_back(record_json(x));
  ojson declined = ojson::array();
  for (const auto& x : r.efga.declined) declined.push_back(record_json(x));
  e["table5"] = std::move(retained);
  e["table6"] = std::move(declined);
  e["retention_rate"] = r.efga.retention_rate ? ojson(*r.efga.retention_rate) : ojson(nullptr);
  if (r.efga.validation) {
    const auto& v = *r.efga.validation;
    e["validation"] = {{"items", v.item_names},
                       {"pearson_r", v.pearson_r},
                       {"cronbach_alpha", v.cronbach_alpha},
                       {"raw_alpha", v.raw_alpha},
                       {"reconstructed", true}};
  } else {
    e["validation"] = nullptr;
  }
  e["table7"] = test_json(r.efga.tests.retained);
  e["table8"] = test_json(r.efga.tests.declined);
  doc["efga"] = std::move(e);
  doc["appendix2"] = std::move(app);
  doc["warnings"] = r.warnings;
  return doc.dump(2) + "\n";
}

std::vector<std::pair<std::string, std::string>> render_csv(const TestReport& r) {
  std::vector<std::pair<std::string, std::string>> files;

  std::string t2 = csv_row({"variable", "mean", "std_dev", "observations", "ad_statistic", "p_value", "p_display", "error"});
  for (const auto& x : r.table2) {
    t2 += x.ad ? csv_row({x.participant_id, shortest(x.mean), shortest(x.std_dev), std::to_string(x.n),
                          shortest(x.ad->statistic), shortest(x.ad->p_value), shortest(x.ad->p_display), ""})
               : csv_row({x.participant_id, "", "", std::to_string(x.n), "", "", "", x.error});
  }
  files.emplace_back("table2.csv", std::move(t2));

  std::string t3 = csv_row({"variable", "observations", "mean", "variance", "std_dev", "mode", "error"});
  for (const auto& x : r.table3) {
    t3 += x.d ? csv_row({x.participant_id, std::to_string(x.d->n), shortest(x.d->mean), shortest(x.d->variance),
                         shortest(x.d->std_dev), shortest(x.d->mode), ""})
              : csv_row({x.participant_id, "", "", "", "", "", x.error});
  }
  files.emplace_back("table3.csv", std::move(t3));

  std::string t4 = csv_row({"variable", "mo", "model", "mape", "mad", "msd", "duration", "error"});
  std::string app = csv_row({"variable", "equation", "equation_full", "shape", "band", "best_model"});
  for (const auto& g : r.table4) {
    const auto& a = g.accuracy;
    t4 += csv_row({g.participant_id, opt_num(g.mo), g.model ? std::string(trend::to_string(*g.model)) : "",
                   a ? shortest(a->mape) : "", a ? shortest(a->mad) : "", a ? shortest(a->msd) : "",
                   session::format_duration(g.duration_seconds), g.error});
    app += csv_row({g.participant_id, g.equation, g.equation_full,
                    g.shape ? std::string(trend::to_string(*g.shape)) : "",
                    g.band ? std::string(session::to_string(*g.band)) : "",
                    g.best ? std::string(trend::to_string(*g.best)) : ""});
  }
  files.emplace_back("table4.csv", std::move(t4));

  auto efga_csv = [](const std::vector<efga::EfgaRecord>& rows) {
    std::string s = csv_row({"variable", "mo", "mape", "efga", "efga_display", "band"});
    for (const auto& x : rows) {
      s += csv_row({x.participant_id, shortest(x.mo), shortest(x.mape), shortest(x.efga), efga::format_efga(x.efga),
                    std::string(session::to_string(x.band))});
    }
    return s;
  };
  files.emplace_back("table5.csv", efga_csv(r.efga.retained));
  files.emplace_back("table6.csv", efga_csv(r.efga.declined));

  auto test_csv = [](const std::vector<efga::EfgaRecord>& rows, const std::optional<stats::MannWhitneyResult>& t) {
    std::string s = csv_row({"variable", "mo", "mape", "confidence", "bound", "p_value"});
    if (!t) return s;
    for (const auto& x : rows) {
      s += csv_row({x.participant_id, shortest(x.mo), shortest(x.mape), shortest(t->confidence), shortest(t->bound),
                    shortest(t->p_value)});
    }
    return s;
  };
  files.emplace_back("table7.csv", test_csv(r.efga.retained, r.efga.tests.retained));
  files.emplace_back("table8.csv", test_csv(r.efga.declined, r.efga.tests.declined));

  std::string val = csv_row({"item_1", "item_2", "pearson_r", "cronbach_alpha", "raw_alpha", "retention_rate"});
  if (r.efga.validation) {
    const auto& v = *r.efga.validation;
    val += csv_row({v.item_names[0], v.item_names[1], shortest(v.pearson_r), shortest(v.cronbach_alpha),
                    shortest(v.raw_alpha), r.efga.retention_rate ? shortest(*r.efga.retention_rate) : ""});
  }
  files.emplace_back("validation.csv", std::move(val));
  files.emplace_back("appendix2.csv", std::move(app));
  return files;
}

}  // namespace biovit::pipeline
