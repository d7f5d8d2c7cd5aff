#pragma once

#include <optional>

#include "sizedlang/core.hpp"
#include "sizedlang/diag.hpp"

namespace sizedlang {

// Join of the composed polarities over all occurrences of `target` (a local
// variable) in `body`; nullopt when the target does not occur. Applied heads
// contribute their declared parameter polarities; heads without declared
// polarities make occurrences Mixed.
std::optional<Polarity> occurrencePolarity(const std::string& target, const CorePtr& body,
                                           Polarity ambient, const Signature& sig);

// Verifies the declared parameter polarities of a type-level fun/cofun:
// a parameter must either not occur in the body or occur exactly at its
// declared polarity.
std::vector<Diag> checkTypeDefPolarities(const Declaration& decl, const Signature& sig);

// Same verification for the constructor fields of a data declaration.
std::vector<Diag> checkDataPolarities(const Declaration& decl, const Signature& sig);

} // namespace sizedlang
