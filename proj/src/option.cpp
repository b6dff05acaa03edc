#include "vgtree/option.hpp"

#include "vgtree/errors.hpp"

#include <cmath>

namespace vgtree {

void OptionSpec::validate() const {
    if (!(spot > 0.0) || !std::isfinite(spot)) throw DomainError("spot must be finite and > 0");
    if (!(strike > 0.0) || !std::isfinite(strike)) throw DomainError("strike must be finite and > 0");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) throw DomainError("maturity must be finite and > 0");
}

std::string_view to_string(OptionType type) noexcept {
    return type == OptionType::Call ? "call" : "put";
}

std::string_view to_string(ExerciseStyle style) noexcept {
    return style == ExerciseStyle::European ? "european" : "american";
}

} // namespace vgtree
