#include "interlace/rng.hpp"

#include "interlace/error.hpp"

#include <random>
#include <string>

namespace interlace {

double gamma_draw(SplitStream& s, double shape) {
    if (!(shape > 0.0)) {
        throw_invalid("gamma shape must be positive, got " + std::to_string(shape));
    }
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(s);
}

} // namespace interlace
