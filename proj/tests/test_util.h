// Copyright 2026 The CCST Authors. All Rights Reserved.
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
#ifndef CCST_TESTS_TEST_UTIL_H_
#define CCST_TESTS_TEST_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ccst/rng.h"
#include "ccst/tensor.h"

namespace ccst::testing {

inline ImageTensor random_image(Rng& rng, std::size_t c, std::size_t h,
                                std::size_t w, double lo = 0.0,
                                double hi = 1.0) {
  std::vector<double> v(c * h * w);
  for (double& x : v) x = rng.uniform(lo, hi);
  return ImageTensor(c, h, w, std::move(v));
}

inline ImageTensor constant_image(std::size_t c, std::size_t h, std::size_t w,
                                  double value) {
  return ImageTensor(c, h, w, std::vector<double>(c * h * w, value));
}

inline ImageTensor from_values(std::size_t c, std::size_t h, std::size_t w,
                               std::vector<double> v) {
  return ImageTensor(c, h, w, std::move(v));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ccst_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ccst::testing

#endif  // CCST_TESTS_TEST_UTIL_H_
