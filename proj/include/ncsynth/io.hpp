// io.hpp - Instance and result files (strict JSON schemas).
//
// Copyright 2026 The ncsynth Authors
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

#ifndef NCSYNTH_IO_HPP
#define NCSYNTH_IO_HPP

#include <string>

#include "json.hpp"

#include "ncsynth/netmodel.hpp"
#include "ncsynth/optim.hpp"

namespace ncsynth {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

using Json = nlohmann::json;

// Parses and validates an instance document. Unknown fields are rejected
// with a message naming the field (strict mode); version must be 1.
ProblemInstance parse_instance(const Json& doc);
ProblemInstance parse_instance_text(const std::string& text);
ProblemInstance load_instance_file(const std::string& path);

Json instance_to_json(const ProblemInstance& instance);
void save_instance_file(const ProblemInstance& instance, const std::string& path);

// Result document for one optimizer run. `options_echo` is recorded as-is
// for reproducibility. Timing is volatile and only written on request so
// that identical runs produce byte-identical files.
Json result_to_json(const OptimizerReport& report, const ProblemInstance& instance,
                    const Json& options_echo, bool include_timing);
void save_result_file(const Json& result, const std::string& path);

// Reads the per-flow choices of a result document (or any document with a
// "choices" array of {flow, alternative, priority}) into an assignment.
Assignment choices_to_assignment(const ProblemInstance& instance, const Json& doc);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ncsynth

#endif  // NCSYNTH_IO_HPP
