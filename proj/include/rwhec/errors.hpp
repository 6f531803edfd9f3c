#pragma once

#include <stdexcept>
#include <string>

namespace rwhec {

/// Base class for every error the toolkit raises deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// se3 / camera
struct DegenerateParameter : Error { using Error::Error; };
struct PointBehindCamera : Error { using Error::Error; };

// nonlinear least squares
struct InvalidStart : Error { using Error::Error; };
struct NonFiniteJacobian : Error { using Error::Error; };

// calibration solvers
struct DegenerateMotion : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct NegativeFocal : Error { using Error::Error; };

// metrics
struct InsufficientViews : Error { using Error::Error; };

// simulation
struct GeometryError : Error { using Error::Error; };

// dataset ingestion and CLI
struct IoError : Error { using Error::Error; };
struct ManifestError : Error { using Error::Error; };
struct ExtrinsicsError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace rwhec
