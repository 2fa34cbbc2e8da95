#pragma once

#include <string>
#include <vector>

#include "osp/graph.hpp"

namespace osp {

struct Registry {
    std::vector<CurveCondition> conditions;
    std::vector<CountingLaw> laws;

    const CurveCondition* find_condition(const std::string& id) const;
    const CountingLaw* find_law(const std::string& condition_id) const;
};

// Parses the registry format: sections [curve.<id>] with keys
//   terms = [["x1","x2","<re>+<im>i"], ...]
//   constraint = "real_part_zero" | "imag_part_zero" |
//                "real_part_equals" | "imag_part_equals"
//   value = <float>                  (only for the *_equals constraints)
//   domain = [re_min, re_max, im_min, im_max]
//   seeds = ["<re>+<im>i", ...]      (optional)
// and sections [count.<id>] with `kappa = <float>`,
// `part = "imag"|"real"|"modulus"`. `#` starts a comment.
// Throws RegistryParse on malformed input.
Registry parse_registry(const std::string& text);

Registry load_registry(const std::string& path);

// The bundled default registry (embedded at build time).
const char* default_registry_text();

}  // namespace osp
