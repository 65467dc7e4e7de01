#include "metamorph/parallel.hpp"

#include <cstdlib>
#include <string>

#include "metamorph/errors.hpp"

namespace metamorph {

std::size_t default_worker_count() {
    if (const char* env = std::getenv("METAMORPH_WORKERS"); env && *env) {
        try {
            const long long n = std::stoll(env);
            if (n >= 1) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("METAMORPH_WORKERS must be a positive integer, got '") + env + "'");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace metamorph
