#include "turingdelay/kinetics.hpp"

#include "turingdelay/errors.hpp"

#include <cmath>
#include <string>

namespace turingdelay {

namespace {

void require_positive(double value, const char* name)
{
    if (!(std::isfinite(value) && value > 0.0))
        throw InvalidParameter(std::string(name) + " must be finite and > 0, got "
                               + std::to_string(value));
}

} // namespace

void validate(const ModelParams& params)
{
    require_positive(params.a, "a");
    require_positive(params.b, "b");
    require_positive(params.du, "du");
    require_positive(params.dv, "dv");
    require_positive(params.lx, "lx");
    require_positive(params.ly, "ly");
    if (!(std::isfinite(params.tau) && params.tau >= 0.0))
        throw InvalidParameter("tau must be finite and >= 0, got " + std::to_string(params.tau));
}

} // namespace turingdelay
