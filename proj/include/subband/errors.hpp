#ifndef SUBBAND_ERRORS_HPP
#define SUBBAND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace subband {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sizes of fields, spectra or pairs disagree with the grid they are used on.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// An iterative method (eigensolver, CG, root bracketing) hit its iteration cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

// A verification routine was handed input outside its stated class.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

} // namespace subband

#endif
