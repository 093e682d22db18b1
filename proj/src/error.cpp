#include "trendop/error.hpp"

namespace trendop {

void rethrow_with_stage(const Error &e, const std::string &stage) {
    const std::string msg = stage + ": " + e.what();
    if (dynamic_cast<const NumericalError *>(&e) != nullptr)
        throw NumericalError(msg);
    throw ValidationError(msg);
}

} // namespace trendop
