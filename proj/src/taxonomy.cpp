#include "omidet/taxonomy.hpp"

#include "omidet/text.hpp"

namespace omidet {

const std::vector<OmissionType>& canonical_omission_types() {
    static const std::vector<OmissionType> kTypes = {
        {"Contextual",
         "Deliberately omitting relevant background information to obscure the "
         "broader implications of events or statements"},
        {"Complexity",
         "Simplifying complex issues by omitting critical details that could "
         "provide a fuller understanding of the situation"},
        {"Comparative",
         "Omitting relevant comparative data to exaggerate or downplay the "
         "significance of certain statistics or claims"},
        {"Impact",
         "Omitting information about potential consequences or effects to "
         "create a misleading impression of significance"},
        {"Accountability",
         "Ignoring issues of responsibility and accountability to simplify "
         "narratives surrounding controversial topics"},
        {"Severity",
         "Omitting critical details that would highlight the seriousness of a "
         "situation, thereby minimizing perceived risks"},
        {"Stakeholder",
         "Ignoring relevant viewpoints or public reactions to focus on a "
         "singular perspective, neglecting broader complexities surrounding a "
         "topic"},
        {"Political Context",
         "Downplaying the political context or motivations behind actions to "
         "shape public perception"},
    };
    return kTypes;
}

bool is_canonical_type(const std::string& name, std::string* out) {
    std::string probe = trim(name);
    const std::string suffix = " Omission";
    if (probe.size() > suffix.size() &&
        probe.compare(probe.size() - suffix.size(), suffix.size(), suffix) == 0) {
        probe = probe.substr(0, probe.size() - suffix.size());
    }
    for (const auto& t : canonical_omission_types()) {
        if (t.name == probe) {
            if (out) *out = t.name;
            return true;
        }
    }
    return false;
}

}  // namespace omidet
