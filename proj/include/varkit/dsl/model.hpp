#pragma once

#include "varkit/jet/section.hpp"
#include "varkit/symmetry/vector_field.hpp"
#include "varkit/varcalc/forms.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varkit::dsl {

/// Parsed model file: a jet space declaration, one equation per fiber
/// coordinate, and optional named vector fields, currents and sections.
struct ModelFile {
    JetSpace space;
    int declared_order = 2;                 // order budget for user expressions
    std::vector<JetExpr> equations;         // one per fiber coordinate, in order
    std::vector<std::pair<std::string, ProjectableVectorField>> fields;
    std::vector<std::pair<std::string, CurrentDensity>> currents;
    std::vector<std::pair<std::string, SectionPolynomial>> sections;

    SourceForm source_form() const { return SourceForm(space, equations); }

    const ProjectableVectorField* find_field(const std::string& name) const {
        for (const auto& [n, v] : fields)
            if (n == name) return &v;
        return nullptr;
    }
    const CurrentDensity* find_current(const std::string& name) const {
        for (const auto& [n, c] : currents)
            if (n == name) return &c;
        return nullptr;
    }
    const SectionPolynomial* find_section(const std::string& name) const {
        for (const auto& [n, s] : sections)
            if (n == name) return &s;
        return nullptr;
    }
};

} // namespace varkit::dsl
