#pragma once

#include <stdexcept>
#include <string>

namespace osrf {

// Error taxonomy shared across the toolkit. Each condition gets its own type
// so callers (and the CLI exit-code mapping) can discriminate without string
// matching.

struct InvalidSpec : std::runtime_error { using std::runtime_error::runtime_error; };
struct AliasingRisk : std::runtime_error { using std::runtime_error::runtime_error; };
struct InvalidProfile : std::runtime_error { using std::runtime_error::runtime_error; };
struct OffsetOutOfRange : std::runtime_error { using std::runtime_error::runtime_error; };
struct ZeroPowerSignal : std::runtime_error { using std::runtime_error::runtime_error; };
struct SignalTooShort : std::runtime_error { using std::runtime_error::runtime_error; };
struct LengthMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct ShapeMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct InvalidLabel : std::runtime_error { using std::runtime_error::runtime_error; };
struct EmptyDataset : std::runtime_error { using std::runtime_error::runtime_error; };
struct LabelOutOfRange : std::runtime_error { using std::runtime_error::runtime_error; };
struct NumericalError : std::runtime_error { using std::runtime_error::runtime_error; };
struct EmptyActivations : std::runtime_error { using std::runtime_error::runtime_error; };
struct EmptySet : std::runtime_error { using std::runtime_error::runtime_error; };
struct EmptyTable : std::runtime_error { using std::runtime_error::runtime_error; };
struct InfeasibleConstraint : std::runtime_error { using std::runtime_error::runtime_error; };
struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };
struct VersionMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct ChecksumMismatch : std::runtime_error { using std::runtime_error::runtime_error; };
struct InvalidManifest : std::runtime_error { using std::runtime_error::runtime_error; };
struct InvalidConfig : std::runtime_error { using std::runtime_error::runtime_error; };

}  // namespace osrf
