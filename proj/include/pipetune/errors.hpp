#pragma once

#include <stdexcept>
#include <string>

namespace pipetune {

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed scenario file or invalid model/cluster/plan parameters.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Requested plan parameters outside the valid range (k < 1, k > M, ...).
class PlanError : public Error {
  public:
    explicit PlanError(const std::string& what) : Error(what) {}
};

// No (k, b) combination fits the device memory limit.
class InfeasibleModel : public Error {
  public:
    explicit InfeasibleModel(const std::string& what) : Error(what) {}
};

// A profile bucket was queried before any sample was recorded.
class NoProfileData : public Error {
  public:
    explicit NoProfileData(const std::string& what) : Error(what) {}
};

// The event loop stalled with work remaining (bad plan or pairing).
class DeadlockDetected : public Error {
  public:
    explicit DeadlockDetected(const std::string& what) : Error(what) {}
};

// A plan switch targeted a config outside the candidate set.
class UnknownCandidate : public Error {
  public:
    explicit UnknownCandidate(const std::string& what) : Error(what) {}
};

}  // namespace pipetune
