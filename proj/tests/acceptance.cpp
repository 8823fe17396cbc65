/**************************************************************************
 * acceptance.cpp
 *
 * Copyright 2026 The ftclique Authors
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
 **************************************************************************/

// One line per acceptance criterion; nonzero exit if any fails.

#include "ftclique/cli.hpp"

#include <iostream>

int main() {
    const auto results = ftclique::run_acceptance(&std::cerr);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " [" << r.detail
                  << "]\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
