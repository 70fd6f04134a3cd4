#include "landslide/metrics.hpp"

#include <cstdio>

#include "json.hpp"

namespace landslide {

using nlohmann::json;

ConfusionMatrix confusion_from_pairs(const std::vector<int>& predicted,
                                     const std::vector<int>& truth) {
    require(predicted.size() == truth.size(), "prediction/truth length mismatch");
    require(!predicted.empty(), "cannot evaluate an empty sample list");
    ConfusionMatrix cm;
    for (size_t i = 0; i < predicted.size(); ++i) {
        require((predicted[i] == 0 || predicted[i] == 1) && (truth[i] == 0 || truth[i] == 1),
                "confusion counting expects binary class indices");
        if (truth[i] == 1) {
            predicted[i] == 1 ? ++cm.tp : ++cm.fn;
        } else {
            predicted[i] == 1 ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

EvalReport report_from_confusion(const ConfusionMatrix& cm) {
    require(cm.total() > 0, "confusion matrix is empty");
    EvalReport r;
    r.confusion = cm;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp > 0) {
        r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    }
    if (cm.tp + cm.fn > 0) {
        r.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    return r;
}

std::string report_to_json(const EvalReport& r, const std::string& name) {
    json j;
    if (!name.empty()) j["name"] = name;
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision ? json(*r.precision) : json(nullptr);
    j["recall"] = r.recall ? json(*r.recall) : json(nullptr);
    j["confusion"] = {{"tp", r.confusion.tp}, {"fp", r.confusion.fp},
                      {"tn", r.confusion.tn}, {"fn", r.confusion.fn}};
    j["loss_curve"] = r.loss_curve;
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text, std::string* name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("malformed report JSON: ") + e.what());
    }
    EvalReport r;
    try {
        if (name) *name = j.value("name", "");
        r.accuracy = j.at("accuracy").get<double>();
        if (!j.at("precision").is_null()) r.precision = j.at("precision").get<double>();
        if (!j.at("recall").is_null()) r.recall = j.at("recall").get<double>();
        const auto& c = j.at("confusion");
        r.confusion = {c.at("tp").get<int64_t>(), c.at("fp").get<int64_t>(),
                       c.at("tn").get<int64_t>(), c.at("fn").get<int64_t>()};
        for (const auto& v : j.value("loss_curve", json::array())) {
            r.loss_curve.push_back(v.get<double>());
        }
    } catch (const json::exception& e) {
        fail(std::string("malformed report JSON: ") + e.what());
    }
    return r;
}

std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
    auto pct = [](const std::optional<double>& v) {
        char buf[32];
        if (!v) return std::string("n/a");
        std::snprintf(buf, sizeof(buf), "%.2f", *v * 100.0);
        return std::string(buf);
    };
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %12s %13s %10s\n", "Dataset", "Accuracy(%)",
                  "Precision(%)", "Recall(%)");
    out += line;
    for (const auto& [name, r] : rows) {
        std::snprintf(line, sizeof(line), "%-12s %12s %13s %10s\n", name.c_str(),
                      pct(r.accuracy).c_str(), pct(r.precision).c_str(), pct(r.recall).c_str());
        out += line;
    }
    return out;
}

}  // namespace landslide
