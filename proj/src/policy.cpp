#include "sandpile/policy.hpp"

namespace sandpile {

std::optional<std::int64_t> select_next(const TopplePolicy& policy, const Configuration& cfg) {
    switch (policy.kind) {
        case PolicyKind::Leftmost: {
            LeftmostSelector s;
            s.reset(cfg);
            return s.next(cfg);
        }
        case PolicyKind::FifoQueue: {
            FifoSelector s;
            s.reset(cfg);
            return s.next(cfg);
        }
        case PolicyKind::Random: {
            RandomSelector s(policy.policy_seed);
            s.reset(cfg);
            return s.next(cfg);
        }
    }
    return std::nullopt;
}

}  // namespace sandpile
