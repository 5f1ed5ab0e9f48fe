#include "faultforge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "faultforge/errors.hpp"

namespace faultforge::report {

namespace {

using pipeline::CellResult;
using pipeline::Model;
using pipeline::RunLedger;
using pipeline::Selector;
using pipeline::Tuner;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void write_file(const std::string& path, const std::string& body,
                std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report file: " + path);
    out << body;
    written.push_back(path);
}

std::vector<Model> models_present(const RunLedger& ledger) {
    std::vector<Model> out;
    for (const auto& c : ledger.cells)
        if (std::find(out.begin(), out.end(), c.key.model) == out.end())
            out.push_back(c.key.model);
    return out;
}

std::vector<Selector> selectors_present(const RunLedger& ledger, bool tuned_only) {
    std::vector<Selector> out;
    for (const auto& c : ledger.cells) {
        if (tuned_only && c.key.selector == Selector::None) continue;
        if (std::find(out.begin(), out.end(), c.key.selector) == out.end())
            out.push_back(c.key.selector);
    }
    return out;
}

std::vector<Tuner> tuners_present(const RunLedger& ledger) {
    std::vector<Tuner> out;
    for (const auto& c : ledger.cells)
        if (std::find(out.begin(), out.end(), c.key.tuner) == out.end()) out.push_back(c.key.tuner);
    return out;
}

}  // namespace

std::string folds_csv(const RunLedger& ledger) {
    std::string out = "model,selector,tuner,fold,accuracy,precision,recall,f1,train_s,test_s\n";
    for (const auto& cell : ledger.cells) {
        if (cell.failed) continue;
        for (std::size_t f = 0; f < cell.folds.size(); ++f) {
            const auto& m = cell.folds[f].metrics;
            out += to_string(cell.key.model) + "," + to_string(cell.key.selector) + "," +
                   to_string(cell.key.tuner) + "," + std::to_string(f) + "," + num(m.accuracy) +
                   "," + num(m.precision) + "," + num(m.recall) + "," + num(m.f1) + "," +
                   num(m.train_seconds) + "," + num(m.test_seconds) + "\n";
        }
    }
    return out;
}

std::string summary_csv(const RunLedger& ledger) {
    std::string out =
        "selector,model,tuner,status,f1,precision,recall,accuracy,accuracy_std,"
        "train_accuracy,train_s,test_s,tuning_s\n";
    for (const auto& cell : ledger.cells) {
        out += to_string(cell.key.selector) + "," + to_string(cell.key.model) + "," +
               to_string(cell.key.tuner) + ",";
        if (cell.failed) {
            out += "failed,,,,,,,,,\n";
            continue;
        }
        const auto& r = cell.report;
        out += "ok," + num(r.f1.mean) + "," + num(r.precision.mean) + "," + num(r.recall.mean) +
               "," + num(r.accuracy.mean) + "," + num(r.accuracy.stddev) + "," +
               num(cell.mean_train_accuracy()) + "," + num(r.train_seconds_total) + "," +
               num(r.test_seconds_total) + "," + num(cell.tuning_seconds_total()) + "\n";
    }
    return out;
}

std::string selector_table_csv(const RunLedger& ledger, Selector s) {
    std::string out = "model,tuner,f1,precision,recall,accuracy,train_s,test_s\n";
    for (const auto& cell : ledger.cells) {
        if (cell.key.selector != s || cell.failed) continue;
        const auto& r = cell.report;
        out += to_string(cell.key.model) + "," + to_string(cell.key.tuner) + "," + num(r.f1.mean) +
               "," + num(r.precision.mean) + "," + num(r.recall.mean) + "," +
               num(r.accuracy.mean) + "," + num(r.train_seconds_total) + "," +
               num(r.test_seconds_total) + "\n";
    }
    return out;
}

std::string tuned_vs_untuned_csv(const RunLedger& ledger) {
    // Tuned columns take the best mean accuracy across selectors for that
    // (model, tuner); the no-tune column is the (none, model, none) baseline.
    std::string out = "model,grid,random,ga,no_tune\n";
    for (Model m : models_present(ledger)) {
        out += to_string(m);
        for (Tuner t : {Tuner::Grid, Tuner::Random, Tuner::GA}) {
            double best = -1.0;
            for (const auto& cell : ledger.cells) {
                if (cell.failed || cell.key.model != m || cell.key.tuner != t) continue;
                best = std::max(best, cell.report.accuracy.mean);
            }
            out += ",";
            if (best >= 0.0) out += num(best);
        }
        const CellResult* base = ledger.find({Selector::None, m, Tuner::None});
        out += ",";
        if (base && !base->failed) out += num(base->report.accuracy.mean);
        out += "\n";
    }
    return out;
}

std::string baseline_overfitting_csv(const RunLedger& ledger) {
    std::string out = "model,train_s,test_s,train_accuracy,test_accuracy\n";
    for (Model m : models_present(ledger)) {
        const CellResult* base = ledger.find({Selector::None, m, Tuner::None});
        if (!base || base->failed) continue;
        out += to_string(m) + "," + num(base->report.train_seconds_total) + "," +
               num(base->report.test_seconds_total) + "," + num(base->mean_train_accuracy()) +
               "," + num(base->report.accuracy.mean) + "\n";
    }
    return out;
}

std::string ledger_json_lines(const RunLedger& ledger) {
    using nlohmann::json;
    std::string out;
    for (const auto& cell : ledger.cells) {
        json line;
        line["selector"] = to_string(cell.key.selector);
        line["model"] = to_string(cell.key.model);
        line["tuner"] = to_string(cell.key.tuner);
        if (cell.failed) {
            line["status"] = "failed";
            line["error"] = cell.error;
            out += line.dump() + "\n";
            continue;
        }
        line["status"] = "ok";
        line["mean"] = {{"accuracy", cell.report.accuracy.mean},
                        {"precision", cell.report.precision.mean},
                        {"recall", cell.report.recall.mean},
                        {"f1", cell.report.f1.mean}};
        line["std"] = {{"accuracy", cell.report.accuracy.stddev},
                       {"precision", cell.report.precision.stddev},
                       {"recall", cell.report.recall.stddev},
                       {"f1", cell.report.f1.stddev}};
        line["train_accuracy_mean"] = cell.mean_train_accuracy();
        line["train_seconds"] = cell.report.train_seconds_total;
        line["test_seconds"] = cell.report.test_seconds_total;
        line["tuning_seconds"] = cell.tuning_seconds_total();
        line["fingerprint"] = cell.report.fingerprint;
        json folds = json::array();
        for (std::size_t f = 0; f < cell.folds.size(); ++f) {
            const auto& fo = cell.folds[f];
            json jf;
            jf["fold"] = f;
            jf["accuracy"] = fo.metrics.accuracy;
            jf["precision"] = fo.metrics.precision;
            jf["recall"] = fo.metrics.recall;
            jf["f1"] = fo.metrics.f1;
            jf["train_seconds"] = fo.metrics.train_seconds;
            jf["test_seconds"] = fo.metrics.test_seconds;
            jf["train_accuracy"] = fo.train_accuracy;
            jf["tuner_evals"] = fo.tuner_evals;
            jf["retained_features"] = fo.retained;
            json chosen;
            for (const auto& [name, value] : fo.chosen.values) {
                if (std::holds_alternative<double>(value))
                    chosen[name] = std::get<double>(value);
                else
                    chosen[name] = std::get<std::string>(value);
            }
            jf["chosen_params"] = chosen;
            folds.push_back(std::move(jf));
        }
        line["folds"] = std::move(folds);
        out += line.dump() + "\n";
    }
    return out;
}

std::string grouped_bar_svg(const std::string& title, const std::vector<std::string>& series,
                            const std::vector<BarGroup>& groups, double y_max) {
    const double plot_h = 220.0;
    const double bar_w = 26.0;
    const double bar_gap = 6.0;
    const double group_gap = 34.0;
    const double margin_left = 56.0;
    const double margin_top = 46.0;
    const double base_y = margin_top + plot_h;

    const double group_w =
        static_cast<double>(series.size()) * (bar_w + bar_gap) - bar_gap + group_gap;
    const double width = margin_left + static_cast<double>(groups.size()) * group_w + 30.0;
    const double height = base_y + 60.0;

    char buf[256];
    std::string svg;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<text x=\"" + std::to_string(static_cast<int>(width / 2)) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";

    static const char* kColors[] = {"#4878a8", "#e49444", "#6a9f58", "#b65d60", "#857aab"};

    // Axis lines and y ticks.
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                  margin_left, margin_top, margin_left, base_y);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                  margin_left, base_y, width - 10.0, base_y);
    svg += buf;
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = static_cast<double>(tick) / 4.0;
        const double y = base_y - frac * plot_h;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"10\">%.2f"
                      "</text>\n",
                      margin_left - 6.0, y + 3.0, frac * y_max);
        svg += buf;
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double gx = margin_left + 12.0 + static_cast<double>(g) * group_w;
        for (std::size_t s = 0; s < series.size(); ++s) {
            const double v = s < groups[g].values.size() ? groups[g].values[s] : 0.0;
            const double h = std::max(0.0, v / y_max * plot_h);
            const double x = gx + static_cast<double>(s) * (bar_w + bar_gap);
            std::snprintf(buf, sizeof(buf),
                          "<rect class=\"bar\" data-value=\"%.6f\" x=\"%.2f\" y=\"%.2f\" "
                          "width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                          v, x, base_y - h, bar_w, h, kColors[s % 5]);
            svg += buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"11\">",
                      gx + (static_cast<double>(series.size()) * (bar_w + bar_gap) - bar_gap) / 2.0,
                      base_y + 16.0);
        svg += buf;
        svg += groups[g].label + "</text>\n";
    }

    // Legend.
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double x = margin_left + static_cast<double>(s) * 110.0;
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>\n", x,
                      base_y + 30.0, kColors[s % 5]);
        svg += buf;
        std::snprintf(buf, sizeof(buf), "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">", x + 14.0,
                      base_y + 39.0);
        svg += buf;
        svg += series[s] + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

std::string fig_f1_by_selector(const RunLedger& ledger) {
    const auto selectors = selectors_present(ledger, false);
    const auto models = models_present(ledger);
    std::vector<std::string> series;
    for (Model m : models) series.push_back(to_string(m));
    std::vector<BarGroup> groups;
    for (Selector s : selectors) {
        BarGroup g;
        g.label = to_string(s);
        for (Model m : models) {
            double acc = 0.0;
            std::size_t n = 0;
            for (const auto& cell : ledger.cells) {
                if (cell.failed || cell.key.selector != s || cell.key.model != m) continue;
                acc += cell.report.f1.mean;
                ++n;
            }
            g.values.push_back(n ? acc / static_cast<double>(n) : 0.0);
        }
        groups.push_back(std::move(g));
    }
    return grouped_bar_svg("F1 score by feature selector", series, groups);
}

std::string fig_accuracy_by_tuner(const RunLedger& ledger) {
    const auto tuners = tuners_present(ledger);
    const auto models = models_present(ledger);
    std::vector<std::string> series;
    for (Model m : models) series.push_back(to_string(m));
    std::vector<BarGroup> groups;
    for (Tuner t : tuners) {
        BarGroup g;
        g.label = to_string(t);
        for (Model m : models) {
            double acc = 0.0;
            std::size_t n = 0;
            for (const auto& cell : ledger.cells) {
                if (cell.failed || cell.key.tuner != t || cell.key.model != m) continue;
                acc += cell.report.accuracy.mean;
                ++n;
            }
            g.values.push_back(n ? acc / static_cast<double>(n) : 0.0);
        }
        groups.push_back(std::move(g));
    }
    return grouped_bar_svg("Accuracy by tuner", series, groups);
}

std::string fig_train_vs_test(const RunLedger& ledger) {
    // Prefer the baseline cells; fall back to the per-model average.
    const auto models = models_present(ledger);
    std::vector<BarGroup> groups;
    for (Model m : models) {
        BarGroup g;
        g.label = to_string(m);
        const CellResult* base = ledger.find({Selector::None, m, Tuner::None});
        if (base && !base->failed) {
            g.values = {base->mean_train_accuracy(), base->report.accuracy.mean};
        } else {
            double tr = 0.0, te = 0.0;
            std::size_t n = 0;
            for (const auto& cell : ledger.cells) {
                if (cell.failed || cell.key.model != m) continue;
                tr += cell.mean_train_accuracy();
                te += cell.report.accuracy.mean;
                ++n;
            }
            if (n) {
                tr /= static_cast<double>(n);
                te /= static_cast<double>(n);
            }
            g.values = {tr, te};
        }
        groups.push_back(std::move(g));
    }
    return grouped_bar_svg("Train vs test accuracy", {"train", "test"}, groups);
}

}  // namespace

std::vector<std::string> emit_reports(const RunLedger& ledger, const std::string& outdir) {
    if (ledger.cells.empty()) throw Error("emit_reports: empty ledger");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(outdir) / "tables", ec);
    fs::create_directories(fs::path(outdir) / "figures", ec);
    if (ec) throw Error("cannot create output directory: " + outdir);

    std::vector<std::string> written;
    const std::string tables = (fs::path(outdir) / "tables").string();
    const std::string figures = (fs::path(outdir) / "figures").string();

    write_file(tables + "/folds.csv", folds_csv(ledger), written);
    write_file(tables + "/summary.csv", summary_csv(ledger), written);
    for (Selector s : selectors_present(ledger, true))
        write_file(tables + "/" + to_string(s) + ".csv", selector_table_csv(ledger, s), written);
    write_file(tables + "/tuned_vs_untuned.csv", tuned_vs_untuned_csv(ledger), written);
    write_file(tables + "/baseline_overfitting.csv", baseline_overfitting_csv(ledger), written);
    write_file(figures + "/f1_by_selector.svg", fig_f1_by_selector(ledger), written);
    write_file(figures + "/accuracy_by_tuner.svg", fig_accuracy_by_tuner(ledger), written);
    write_file(figures + "/train_vs_test.svg", fig_train_vs_test(ledger), written);
    write_file((fs::path(outdir) / "ledger.json-lines").string(), ledger_json_lines(ledger),
               written);
    return written;
}

}  // namespace faultforge::report
