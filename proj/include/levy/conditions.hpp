#pragma once

#include "levy/model.hpp"
#include "levy/rates.hpp"

#include <optional>
#include <string>

namespace levy {

enum class Verdict { holds, violated, unknown };

const char* to_string(Verdict v);

struct VerdictWithReason {
    Verdict verdict = Verdict::unknown;
    std::string reason;
};

struct VertexConditions {
    Verdict vertex_is_mpp = Verdict::unknown;
    Verdict rg_in_cramer_range = Verdict::unknown;
    Verdict normal_strictly_positive = Verdict::unknown;
    Verdict drift_inner_product_negative = Verdict::unknown;
    Verdict overall = Verdict::unknown;
    std::string reason;
};

struct ConditionReport {
    VerdictWithReason c1;
    VerdictWithReason c2;
    VertexConditions c3;
    std::optional<double> r_g;
    std::optional<double> d_of_g;
    std::optional<Vector> normal;
    std::optional<double> mean_inner;

    // c1 (or its override), c2 and c3 all hold.
    bool theorem_applies(bool assume_c1 = false) const;
};

// Non-lattice / no-hyperplane condition on X(1), decided by structural sufficient rules.
VerdictWithReason check_c1(const LevyModel& model);

// Cramer moment condition: the MGF domain contains an open set.
VerdictWithReason check_c2(const LevyModel& model);

ConditionReport check_conditions(const LevyModel& model, const OrthantTarget& target,
                                 const ToleranceProfile& tol = {});

}  // namespace levy
