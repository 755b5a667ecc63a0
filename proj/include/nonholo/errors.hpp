// Copyright 2026 The nonholo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NONHOLO__ERRORS_HPP_
#define NONHOLO__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nonholo
{

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Model-validity breaches. These are not numerical bugs: the state left the
/// region where the closed-form equations hold.
class GuardError : public Error
{
public:
  GuardError(const std::string & guard, const std::string & what)
  : Error(what), guard_(guard)
  {
  }
  const std::string & guard() const noexcept { return guard_; }

private:
  std::string guard_;
};

class SteeringSingularity : public GuardError
{
public:
  explicit SteeringSingularity(const std::string & what)
  : GuardError("SteeringSingularity", what)
  {
  }
};

class LagrangeSingularity : public GuardError
{
public:
  explicit LagrangeSingularity(const std::string & what)
  : GuardError("LagrangeSingularity", what)
  {
  }
};

class TubeSingularity : public GuardError
{
public:
  explicit TubeSingularity(const std::string & what) : GuardError("TubeSingularity", what) {}
};

class AmbiguousProjection : public GuardError
{
public:
  explicit AmbiguousProjection(const std::string & what)
  : GuardError("AmbiguousProjection", what)
  {
  }
};

class NonClosure : public Error
{
public:
  using Error::Error;
};

class BadSplit : public Error
{
public:
  using Error::Error;
};

class UnusedInput : public Error
{
public:
  using Error::Error;
};

class DegenerateEquilibrium : public Error
{
public:
  using Error::Error;
};

class SingularEncounter : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

/// A guard fired during integration; carries the simulation time.
class GuardTripped : public Error
{
public:
  GuardTripped(double time, const std::string & guard, const std::string & detail)
  : Error("guard " + guard + " tripped at t=" + std::to_string(time) + ": " + detail),
    time_(time),
    guard_(guard)
  {
  }
  double time() const noexcept { return time_; }
  const std::string & guard() const noexcept { return guard_; }

private:
  double time_;
  std::string guard_;
};

}  // namespace nonholo

#endif  // NONHOLO__ERRORS_HPP_
