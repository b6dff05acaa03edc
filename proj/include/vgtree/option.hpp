#pragma once

#include <string_view>

namespace vgtree {

enum class OptionType { Call, Put };
enum class ExerciseStyle { European, American };

struct OptionSpec {
    double spot = 0.0;
    double strike = 0.0;
    double maturity = 0.0; ///< time to expiry from t0 = 0
    OptionType type = OptionType::Put;
    ExerciseStyle style = ExerciseStyle::European;

    /// Throws DomainError unless spot > 0, strike > 0, maturity > 0.
    void validate() const;

    double payoff(double price) const noexcept {
        const double v = type == OptionType::Call ? price - strike : strike - price;
        return v > 0.0 ? v : 0.0;
    }
};

std::string_view to_string(OptionType type) noexcept;
std::string_view to_string(ExerciseStyle style) noexcept;

} // namespace vgtree
