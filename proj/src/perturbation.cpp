#include "facte/perturbation.hpp"

#include "facte/errors.hpp"

namespace facte {

const std::vector<PerturbationType>& perturbation_catalog() {
    static const std::vector<PerturbationType> catalog = {
        {PerturbationKind::OperationError, "OperationError",
         "Modification of a specific mathematical operation or procedural step.",
         "Modification of a specific logical step or operative element within the "
         "reasoning."},
        {PerturbationKind::ConceptualSwap, "ConceptualSwap",
         "Substitution of distinct mathematical or logical concepts.",
         "Substitution of semantically or logically related entities, properties, or "
         "concepts."},
        {PerturbationKind::Misgeneralization, "Misgeneralization",
         "Erroneous extrapolation from a specific concept to an invalid general rule.",
         "Improper extension of a specific concept or heuristic to an invalid or "
         "broader context."},
        {PerturbationKind::ReorderedLogic, "ReorderedLogic",
         "Permutation of the sequential order of reasoning steps.",
         "Permutation of the sequential or causal order of reasoning steps."},
        {PerturbationKind::Contradiction, "Contradiction",
         "Introduction of an inconsistency with established premises or prior "
         "conclusions.",
         "Introduction of an assertion that conflicts with established facts, "
         "premises, or prior logic."},
    };
    return catalog;
}

const PerturbationType& perturbation_by_name(const std::string& name) {
    for (const auto& p : perturbation_catalog())
        if (p.name == name) return p;
    throw ConfigError("unknown perturbation type: " + name);
}

}  // namespace facte
