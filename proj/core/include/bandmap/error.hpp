#pragma once

#include <stdexcept>
#include <string>

namespace bandmap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArchError : public Error {
 public:
  using Error::Error;
};

class DfgError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class MisError : public Error {
 public:
  using Error::Error;
};

}  // namespace bandmap
