#ifndef NMR_FIXTURES_HPP
#define NMR_FIXTURES_HPP

// Golden inputs shared by selftest and the test suites. They mirror the
// files under samples/.

#include <string_view>

namespace nmr::fixtures {

inline constexpr std::string_view p1 = "a :- not b.\nb :- not a.\n-c :- b.\n";
inline constexpr std::string_view p2 = "a :- not a.\n";
inline constexpr std::string_view bird = "bird(1).\nbird(2).\npenguin(2).\n"
                                         "fly(X) :- bird(X), not penguin(X).\n"
                                         "-fly(X) :- penguin(X).\n";

inline constexpr std::string_view collision = R"(holds(overtake, veh_b, 1).
-holds(control, veh_b, 2).
holds(combine(bump, guardrail), veh_b, 3).
-holds(stop, veh_b, 4).
holds(combine(bump, veh_b), veh_a, 5).
holds(combine(bump, guardrail), veh_a, 6).
vehicle(veh_a).
vehicle(veh_b).
object(veh_a).
object(veh_b).
object(guardrail).
)";

inline constexpr std::string_view collision_cause = "the loss of control of vehicle B at time 1";

} // namespace nmr::fixtures

#endif
