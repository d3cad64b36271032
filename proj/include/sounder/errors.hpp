// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SOUNDER_ERRORS_HPP
#define SOUNDER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sounder {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied data that violates a documented precondition.
class InvalidInput : public Error
{
public:
    using Error::Error;
};

class InvalidConfig : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class InvalidRoot : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class EmptyPlan : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class Infeasible : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class UnsupportedGrid : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class AliasingError : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class CalibrationIncomplete : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class IncompleteSeed : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

class DegenerateDivision : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

/// Numerical result is undefined for the supplied data (e.g. PAPR of silence).
class Undefined : public Error
{
public:
    using Error::Error;
};

/// Malformed scenario or sidecar file.
class SchemaError : public InvalidInput
{
public:
    using InvalidInput::InvalidInput;
};

/// Filesystem level failure.
class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace sounder

#endif // SOUNDER_ERRORS_HPP
