#pragma once

// Token-cost accounting across compared methods. C_token is the mean of
// prompt+completion tokens per item; C_normed divides by the costliest
// method's C_token, so exactly one method sits at 1.0.

#include <cstdint>
#include <string>
#include <vector>

#include "omidet/math.hpp"

namespace omidet {

struct MethodUsage {
    std::string method;
    std::int64_t items = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct MethodCost {
    std::string method;
    std::int64_t items = 0;
    Scalar c_token = 0;
    Scalar c_normed = 0;
};

struct CostReport {
    std::vector<MethodCost> methods;

    std::string to_json() const;
    static CostReport from_json(const std::string& text);
    std::string to_csv() const;
};

// Throws when no usage records are given, a record has zero items, or
// every method consumed zero tokens (normalization undefined).
CostReport make_cost_report(const std::vector<MethodUsage>& usages);

}  // namespace omidet
