#pragma once

// The eight canonical omission types and their definitions. The short
// names are the canonical identifiers ("Contextual", ..., "Political
// Context"); display form appends " Omission".

#include <string>
#include <vector>

namespace omidet {

struct OmissionType {
    std::string name;        // canonical short name
    std::string definition;  // one-sentence description

    std::string display_name() const { return name + " Omission"; }
    // "[<display name>, <definition>]" — the line format the type-analysis
    // prompts ask for.
    std::string as_line() const { return "[" + display_name() + ", " + definition + "]"; }
};

const std::vector<OmissionType>& canonical_omission_types();

// True when `name` (with or without the " Omission" suffix) matches a
// canonical type; writes the canonical short name through `out` if given.
bool is_canonical_type(const std::string& name, std::string* out = nullptr);

}  // namespace omidet
