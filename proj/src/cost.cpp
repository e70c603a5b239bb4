#include "omidet/cost.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace omidet {

CostReport make_cost_report(const std::vector<MethodUsage>& usages) {
    if (usages.empty()) {
        throw std::invalid_argument("cost report: no usage records");
    }
    CostReport report;
    Scalar max_cost = 0;
    for (const auto& u : usages) {
        if (u.items <= 0) {
            throw std::invalid_argument("cost report: method '" + u.method +
                                        "' has no items");
        }
        MethodCost c;
        c.method = u.method;
        c.items = u.items;
        c.c_token = static_cast<Scalar>(u.prompt_tokens + u.completion_tokens) /
                    static_cast<Scalar>(u.items);
        max_cost = std::max(max_cost, c.c_token);
        report.methods.push_back(std::move(c));
    }
    if (max_cost <= 0) {
        throw std::invalid_argument(
            "cost report: every method consumed zero tokens");
    }
    for (auto& c : report.methods) c.c_normed = c.c_token / max_cost;
    return report;
}

std::string CostReport::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : methods) {
        j.push_back({{"method", c.method},
                     {"items", c.items},
                     {"c_token", c.c_token},
                     {"c_normed", c.c_normed}});
    }
    return nlohmann::json{{"methods", j}}.dump(2);
}

CostReport CostReport::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    CostReport report;
    for (const auto& e : j.at("methods")) {
        MethodCost c;
        c.method = e.at("method").get<std::string>();
        c.items = e.at("items").get<std::int64_t>();
        c.c_token = e.at("c_token").get<Scalar>();
        c.c_normed = e.at("c_normed").get<Scalar>();
        report.methods.push_back(std::move(c));
    }
    return report;
}

std::string CostReport::to_csv() const {
    std::ostringstream out;
    out << "method,items,c_token,c_normed\n";
    for (const auto& c : methods) {
        out << c.method << ',' << c.items << ','
            << nlohmann::json(c.c_token).dump() << ','
            << nlohmann::json(c.c_normed).dump() << '\n';
    }
    return out.str();
}

}  // namespace omidet
