#pragma once

#include <string>
#include <vector>

#include "facte/chain.hpp"

namespace facte {

enum class PerturbationKind {
    OperationError,
    ConceptualSwap,
    Misgeneralization,
    ReorderedLogic,
    Contradiction,
};

/// One of the five noise families used to build counterfactual continuations,
/// carrying the per-task description injected into the {error} prompt slot.
struct PerturbationType {
    PerturbationKind kind;
    std::string name;
    std::string description_math;
    std::string description_commonsense;

    const std::string& description_for(TaskKind task) const {
        return (task == TaskKind::MathNumeric || task == TaskKind::MathExpression)
                   ? description_math
                   : description_commonsense;
    }
};

/// The five perturbation types in fixed catalog order.
const std::vector<PerturbationType>& perturbation_catalog();

const PerturbationType& perturbation_by_name(const std::string& name);

}  // namespace facte
