#ifndef SHELFSIM_ERRORS_HPP
#define SHELFSIM_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace shelfsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGeometry : Error { using Error::Error; };
struct InvalidScene : Error { using Error::Error; };
struct UnknownBox : Error {
    explicit UnknownBox(const std::string& id) : Error("unknown box id: " + id) {}
};
struct AlreadyRemoved : Error {
    explicit AlreadyRemoved(const std::string& id) : Error("box already removed: " + id) {}
};
struct SimulationExploded : Error { using Error::Error; };
struct UnsatisfiableObservation : Error {
    UnsatisfiableObservation(const std::string& msg, int sample_index_ = -1)
        : Error(msg), sample_index(sample_index_) {}
    int sample_index;  // failing sample in a batch, -1 for a single draw
};
struct InsufficientHistory : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct SceneGenerationFailed : Error { using Error::Error; };

struct PlanNotFound : Error {
    PlanNotFound(const std::string& msg, std::vector<std::string> trace_)
        : Error(msg), trace(std::move(trace_)) {}
    // attempted (prefix -> action) descriptions, for diagnostics
    std::vector<std::string> trace;
};

struct UnclearableResidue : Error {
    explicit UnclearableResidue(std::vector<std::string> remaining_)
        : Error("no box in the remaining set can be removed safely"),
          remaining(std::move(remaining_)) {}
    std::vector<std::string> remaining;
    std::vector<std::string> partial_plan;  // safely planned prefix, in order
};

}  // namespace shelfsim

#endif
