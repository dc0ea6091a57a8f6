#pragma once

#include "cqa/core.hpp"

/// The example queries used throughout the tests, the CLI and the
/// acceptance suite.
namespace cqa::queries {

ConjunctiveQuery q1();   // R1(x; y) & R2(y; z)
ConjunctiveQuery q2();   // R1(x; y) & R2(y; x)
ConjunctiveQuery q3();   // R1(x; y) & R2(z; y)
ConjunctiveQuery q4();   // R(x; y, z) & R(z; x, y)
ConjunctiveQuery q5();   // R1(x; y) & S1(y, z; x)
ConjunctiveQuery q2p();  // path R X R Y R Y
ConjunctiveQuery q3p();  // path R X R X R Y R Y

/// Path query whose word is `letters`, over variables x0..xn.
ConjunctiveQuery path_query(const std::vector<std::string>& letters);

/// True when q is q4 up to renaming of variables.
bool is_q4_shape(const ConjunctiveQuery& q);

}  // namespace cqa::queries
