#include "vlb/errors.hpp"

#include <sstream>

namespace vlb {

void Error::set_context(std::size_t interval, std::string stage)
{
    interval_ = interval;
    stage_ = std::move(stage);
    std::ostringstream out;
    out << "market interval " << interval << ", stage " << stage_ << ": " << message_;
    full_ = out.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics)
{
    std::ostringstream out;
    out << "invalid scenario";
    for (const auto& d : diagnostics) {
        out << "\n  " << (d.path.empty() ? "<root>" : d.path) << ": " << d.message;
    }
    return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

}  // namespace vlb
