// Copyright 2026 The VCProg Authors. All Rights Reserved.
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

// Guest runner for the shipped native operators. Speaks the same launch
// contract and channel protocol as any other guest:
//
//   vcprog_native_guest --program <file> --channel <file> --schemas <v;e;m>
//
// The program file is JSON:
//
//   {"operator": "sssp", "params": {"source": "0"},
//    "fail_method": "MERGE_MESSAGE", "exit_on": "VERTEX_COMPUTE"}
//
// fail_method makes that method raise; exit_on makes the process exit
// without answering. Both exist to exercise host-side failure handling.

#include <sys/prctl.h>
#include <unistd.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcprog/ipc/channel.hpp"
#include "vcprog/ipc/program_codec.hpp"
#include "vcprog/program.hpp"

namespace {

std::optional<vcprog::ipc::MethodIndex> method_by_name(const std::string& name) {
  for (std::uint32_t i = 0; i < vcprog::ipc::kMethodCount; ++i) {
    auto m = static_cast<vcprog::ipc::MethodIndex>(i);
    if (vcprog::ipc::to_string(m) == name) return m;
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"native operator guest"};
  std::string program_file, channel_file, schemas_text;
  app.add_option("--program", program_file, "JSON program file")->required();
  app.add_option("--channel", channel_file, "mapped channel file")->required();
  app.add_option("--schemas", schemas_text, "vertex;edge;message")->required();
  CLI11_PARSE(app, argc, argv);

  const pid_t parent = ::getppid();
  ::prctl(PR_SET_PDEATHSIG, SIGKILL);
  if (::getppid() != parent) return 3;

  try {
    nlohmann::json doc;
    {
      std::ifstream in(program_file);
      if (!in) throw vcprog::Error(vcprog::ErrorCode::kIo, "cannot read " + program_file);
      doc = nlohmann::json::parse(in);
    }
    vcprog::ParamMap params;
    if (doc.contains("params")) {
      for (const auto& [k, v] : doc.at("params").items()) {
        params[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    auto program = vcprog::native_program(doc.at("operator").get<std::string>(), params);

    std::optional<vcprog::ipc::MethodIndex> fail_method, exit_on;
    if (doc.contains("fail_method")) {
      fail_method = method_by_name(doc.at("fail_method").get<std::string>());
      if (!fail_method) throw vcprog::Error(vcprog::ErrorCode::kInvalidArgument, "bad fail_method");
    }
    if (doc.contains("exit_on")) {
      exit_on = method_by_name(doc.at("exit_on").get<std::string>());
      if (!exit_on) throw vcprog::Error(vcprog::ErrorCode::kInvalidArgument, "bad exit_on");
    }

    vcprog::ipc::ProgramServer server(*program, vcprog::ipc::parse_schemas(schemas_text));
    auto inner = server.dispatcher();
    vcprog::ipc::Dispatcher dispatch = [&](vcprog::ipc::MethodIndex m,
                                           std::span<const std::uint8_t> req,
                                           vcprog::ipc::ResponseWriter& out) {
      if (exit_on && m == *exit_on) {
        std::cerr << "exiting on " << vcprog::ipc::to_string(m) << " as configured\n";
        ::_exit(4);
      }
      if (fail_method && m == *fail_method) {
        throw vcprog::Error(vcprog::ErrorCode::kRemoteFailure,
                            "injected failure in " + std::string(vcprog::ipc::to_string(m)));
      }
      inner(m, req, out);
    };

    auto channel = vcprog::ipc::MappedChannel::open(channel_file);
    vcprog::ipc::serve(channel, dispatch, {[parent] { return ::getppid() == parent; }});
  } catch (const std::exception& e) {
    std::cerr << "vcprog_native_guest: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
