/*
 * Copyright 2026 the artifact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GIBBS_ERRORS_HPP
#define GIBBS_ERRORS_HPP

#include <stdexcept>

namespace gibbs {

// Common base so callers can catch toolkit errors in one handler.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// erode() produced a degenerate or empty rectangle.
class EmptyErosion : public Error {
public:
  using Error::Error;
};

// A contrast was asked to work on a window whose erosion is invalid.
class DegenerateErosion : public Error {
public:
  using Error::Error;
};

// Pair potential or sufficient statistic evaluated at zero separation.
class Singularity : public Error {
public:
  using Error::Error;
};

// Sampler configured with zero steps.
class NonErgodicConfig : public Error {
public:
  using Error::Error;
};

// clip() target window not contained in the source window.
class WindowMismatch : public Error {
public:
  using Error::Error;
};

// Newton system unsolvable even after trace regularization.
class SingularHessian : public Error {
public:
  using Error::Error;
};

// Sensitivity matrix U not invertible at the required conditioning.
class SingularU : public Error {
public:
  using Error::Error;
};

// QQ standardization attempted with zero sample standard deviation.
class DegenerateSD : public Error {
public:
  using Error::Error;
};

} // namespace gibbs

#endif // GIBBS_ERRORS_HPP
