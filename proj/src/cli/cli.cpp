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

#include "cli/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcprog/engine.hpp"
#include "vcprog/graph.hpp"
#include "vcprog/ipc/bench.hpp"
#include "vcprog/ipc/program_codec.hpp"
#include "vcprog/ipc/remote_program.hpp"
#include "vcprog/native_ops.hpp"

namespace vcprog::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunArgs {
  std::string engine = "pregel";
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::size_t max_iter = 1000;
  std::string program;
  std::vector<std::string> params;
  std::string program_file;
  std::string guest_cmd;
  std::string schemas;
  std::string ipc_dir;
  std::string vertices;
  std::string edges;
  std::string output;
  std::string report;
};

struct GenerateArgs {
  std::size_t num_vertices = 1000;
  double mu = 4.0;
  double sigma = 1.3;
  std::uint64_t seed = 1;
  std::string vertices;
  std::string edges;
};

struct BenchArgs {
  std::vector<std::size_t> sizes{64, 4096};
  std::size_t calls = 100000;
  std::size_t warmup = 2000;
  std::string workdir = "/tmp";
  std::string json_path;
};

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--param expects key=value, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::vector<std::string> split_command(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

// Temporary directory removed on scope exit unless the user supplied one.
class Workdir {
 public:
  explicit Workdir(const std::string& requested) {
    if (!requested.empty()) {
      path_ = requested;
      fs::create_directories(path_);
      return;
    }
    std::string tmpl = (fs::temp_directory_path() / "vcprog-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw Error(ErrorCode::kIo, "cannot create a temp directory");
    path_ = tmpl;
    owned_ = true;
  }
  ~Workdir() {
    if (owned_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  bool owned_ = false;
};

json step_json(const StepStats& s) {
  return {{"type", "iteration"},
          {"iter", s.iter},
          {"num_active", s.num_active},
          {"participants", s.participants},
          {"messages_received", s.messages_received},
          {"messages_pending", s.messages_pending},
          {"seconds", s.seconds}};
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  // Everything checked before the graph is touched is a usage error.
  const auto kind = parse_engine_kind(a.engine);
  if (!kind) throw UsageError("unknown engine '" + a.engine + "' (pregel, gas, pushpull)");
  if (a.workers == 0) throw UsageError("--workers must be >= 1");
  if (a.max_iter == 0) throw UsageError("--max-iter must be >= 1");
  if (a.program.empty() == a.program_file.empty()) {
    throw UsageError("exactly one of --program and --program-file is required");
  }

  std::optional<Workdir> workdir;  // must outlive the program's guests
  std::unique_ptr<VertexProgram> program;
  std::string program_label;
  if (!a.program.empty()) {
    if (!a.guest_cmd.empty() || !a.schemas.empty()) {
      throw UsageError("--guest-cmd and --schemas only apply to --program-file");
    }
    try {
      program = native_program(a.program, parse_params(a.params));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    program_label = a.program;
  } else {
    if (!a.params.empty()) throw UsageError("--param only applies to native programs");
    if (a.schemas.empty()) throw UsageError("--program-file requires --schemas vertex;edge;message");
    if (!fs::exists(a.program_file)) throw UsageError("no such program file: " + a.program_file);
    ipc::ProgramSchemas schemas;
    try {
      schemas = ipc::parse_schemas(a.schemas);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    RemoteSpec spec;
    spec.program_path = fs::absolute(a.program_file).string();
    spec.guest_command = split_command(a.guest_cmd.empty() ? default_guest_command() : a.guest_cmd);
    if (spec.guest_command.empty()) throw UsageError("empty --guest-cmd");
    workdir.emplace(a.ipc_dir);
    spec.workdir = workdir->path();
    spec.vertex_schema = schemas.vertex;
    spec.edge_schema = schemas.edge;
    spec.message_schema = schemas.message;
    ipc::RemoteOptions options;
    options.num_workers = a.workers;
    program = std::make_unique<ipc::RemoteProgram>(std::move(spec), options);
    program_label = a.program_file;
  }

  const auto graph = load_graph(a.vertices, a.edges);
  RunOptions options;
  options.kind = *kind;
  options.num_workers = a.workers;
  options.max_iter = a.max_iter;
  auto result = run(graph, *program, options);
  program.reset();  // shuts guests down before output is written

  if (a.output.empty() || a.output == "-") {
    save_vertices(result.graph, out);
  } else {
    save_vertices(result.graph, a.output);
  }

  json summary = {{"type", "summary"},
                  {"engine", std::string(to_string(*kind))},
                  {"workers", a.workers},
                  {"program", program_label},
                  {"num_vertices", graph.num_vertices()},
                  {"num_edges", graph.num_edges()},
                  {"iterations", result.report.iterations_executed},
                  {"converged_early", result.report.converged_early},
                  {"wall_seconds", result.report.wall_seconds}};
  if (!a.report.empty()) {
    std::ofstream rep(a.report);
    if (!rep) throw Error(ErrorCode::kIo, "cannot write report " + a.report);
    for (const auto& s : result.report.steps) rep << step_json(s).dump() << "\n";
    rep << summary.dump() << "\n";
  } else {
    err << summary.dump() << "\n";
  }
  return kExitOk;
}

int cmd_generate(const GenerateArgs& a, std::ostream& err) {
  if (a.num_vertices == 0) throw UsageError("--num-vertices must be >= 1");
  if (!(a.sigma >= 0)) throw UsageError("--sigma must be >= 0");
  const auto g = generate_lognormal(a.num_vertices, a.mu, a.sigma, a.seed);
  save_vertices(g, a.vertices);
  save_edges(g, a.edges);
  err << "generated " << g.num_vertices() << " vertices, " << g.num_edges() << " edges\n";
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  ipc::BenchOptions options;
  options.payload_sizes = a.sizes;
  options.calls = a.calls;
  options.warmup = a.warmup;
  options.workdir = a.workdir;
  const auto points = ipc::bench_ipc(options);

  out << std::left << std::setw(10) << "bytes" << std::setw(10) << "transport" << std::right
      << std::setw(12) << "mean_us" << std::setw(12) << "median_us" << std::setw(12) << "p99_us"
      << "\n";
  json doc = json::array();
  for (const auto& p : points) {
    for (const auto& [name, st] : {std::pair{"shm", p.shared_memory}, std::pair{"socket", p.socket}}) {
      out << std::left << std::setw(10) << p.payload_bytes << std::setw(10) << name << std::right
          << std::fixed << std::setprecision(3) << std::setw(12) << st.mean_us << std::setw(12)
          << st.median_us << std::setw(12) << st.p99_us << "\n";
      doc.push_back({{"payload_bytes", p.payload_bytes},
                     {"transport", name},
                     {"calls", st.calls},
                     {"mean_us", st.mean_us},
                     {"median_us", st.median_us},
                     {"p99_us", st.p99_us}});
    }
  }
  out.unsetf(std::ios::floatfield);
  if (!a.json_path.empty()) {
    std::ofstream f(a.json_path);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + a.json_path);
    f << doc.dump(2) << "\n";
  }
  out << doc.dump() << "\n";
  return kExitOk;
}

}  // namespace

std::string default_guest_command() {
  std::error_code ec;
  const auto self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return "vcprog_native_guest";
  return (self.parent_path() / "vcprog_native_guest").string();
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vcprog: vertex-centric graph processing"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a vertex program over a graph");
  run_cmd->add_option("--engine", run_args.engine, "pregel | gas | pushpull")
      ->capture_default_str();
  run_cmd->add_option("--workers", run_args.workers, "Worker threads (default: logical cores)")
      ->capture_default_str();
  run_cmd->add_option("--max-iter", run_args.max_iter, "Iteration cap")->capture_default_str();
  run_cmd->add_option("--program", run_args.program, "Native program: pagerank | sssp | cc");
  run_cmd->add_option("--param", run_args.params, "Program parameter key=value (repeatable)");
  run_cmd->add_option("--program-file", run_args.program_file, "Guest program file");
  run_cmd->add_option("--guest-cmd", run_args.guest_cmd,
                      "Guest launcher command (default: bundled native guest)");
  run_cmd->add_option("--schemas", run_args.schemas, "Guest schemas vertex;edge;message");
  run_cmd->add_option("--ipc-dir", run_args.ipc_dir, "Directory for channel files and guest logs");
  run_cmd->add_option("--vertices", run_args.vertices, "Vertex file")->required();
  run_cmd->add_option("--edges", run_args.edges, "Edge file")->required();
  run_cmd->add_option("--output", run_args.output, "Output vertex table (default: stdout)");
  run_cmd->add_option("--report", run_args.report, "JSON-lines run report");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a log-normal degree graph");
  gen_cmd->add_option("--num-vertices", gen_args.num_vertices)->capture_default_str();
  gen_cmd->add_option("--mu", gen_args.mu)->capture_default_str();
  gen_cmd->add_option("--sigma", gen_args.sigma)->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed)->capture_default_str();
  gen_cmd->add_option("--vertices", gen_args.vertices, "Output vertex file")->required();
  gen_cmd->add_option("--edges", gen_args.edges, "Output edge file")->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench-ipc", "Shared-memory vs socket RPC latency");
  bench_cmd->add_option("--sizes", bench_args.sizes, "Payload sizes in bytes")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--calls", bench_args.calls)->capture_default_str();
  bench_cmd->add_option("--warmup", bench_args.warmup)->capture_default_str();
  bench_cmd->add_option("--workdir", bench_args.workdir)->capture_default_str();
  bench_cmd->add_option("--json", bench_args.json_path, "Also write the JSON report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out, err);
    if (*gen_cmd) return cmd_generate(gen_args, err);
    if (*bench_cmd) return cmd_bench(bench_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace vcprog::cli
