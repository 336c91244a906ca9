#pragma once

#include <stdexcept>
#include <string>

namespace swarm
{
//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Invalid user input: configuration, preconditions, unsatisfiable laws.
class ValidationError : public Error
{
  public:
    using Error::Error;
};

//! Numerical breakdown of a run (time step too coarse, chattering, ...).
class NumericalError : public Error
{
  public:
    using Error::Error;
};

#define SWARM_DEFINE_ERROR(NAME, BASE)                                  \
    class NAME : public BASE                                           \
    {                                                                  \
      public:                                                          \
        explicit NAME(std::string const& what) : BASE(#NAME ": " + what) \
        {                                                              \
        }                                                              \
    }

SWARM_DEFINE_ERROR(QueryOutsideBand, ValidationError);
SWARM_DEFINE_ERROR(UnsatisfiableSupport, ValidationError);
SWARM_DEFINE_ERROR(LayerExceedsBand, ValidationError);
SWARM_DEFINE_ERROR(MissingCommonPath, ValidationError);
SWARM_DEFINE_ERROR(MissingSnapshots, ValidationError);
SWARM_DEFINE_ERROR(MissingIdiosyncraticPaths, ValidationError);
SWARM_DEFINE_ERROR(ConfigError, ValidationError);

SWARM_DEFINE_ERROR(RootNotBracketed, NumericalError);
SWARM_DEFINE_ERROR(MaxReflectionsExceeded, NumericalError);
SWARM_DEFINE_ERROR(StepTooCoarse, NumericalError);

#undef SWARM_DEFINE_ERROR

}  // namespace swarm
