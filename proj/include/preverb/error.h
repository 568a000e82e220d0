/*
Copyright 2026 The preverb Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef PREVERB_ERROR_H_
#define PREVERB_ERROR_H_

#include <stdexcept>
#include <string>

namespace preverb {

// Malformed or out-of-contract input: bad files, unknown names, bad ranges.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input is well formed but the acoustic quantity is undefined for it,
// e.g. an open scene with no collisions or a decay that never reaches -35 dB.
class AcousticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace preverb

#endif  // PREVERB_ERROR_H_
