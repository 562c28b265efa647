#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tutorgen/component_store.hpp"
#include "tutorgen/dsl.hpp"
#include "tutorgen/gateway.hpp"
#include "tutorgen/http_provider.hpp"
#include "tutorgen/json_io.hpp"
#include "tutorgen/klm.hpp"
#include "tutorgen/lint.hpp"
#include "tutorgen/prompt.hpp"
#include "tutorgen/render.hpp"
#include "tutorgen/service.hpp"

namespace tutorgen::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for failures already reported on stderr.
struct DomainFailure {};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string location(const std::string& file, std::string_view source, std::size_t offset) {
  const auto lc = dsl::line_column(source, offset);
  return file + ":" + std::to_string(lc.line) + ":" + std::to_string(lc.column);
}

void report_parse_error(std::ostream& err, const std::string& file, std::string_view source,
                        const dsl::ParseError& e) {
  err << location(file, source, e.span().start) << ": error " << dsl::to_string(e.code()) << ": " << e.message()
      << "\n";
}

struct Parsed {
  std::variant<dsl::TutorLayout, dsl::Fragment> ast;
  std::string source;
};

Parsed parse_file(const std::string& file, bool fragment, std::ostream& err) {
  Parsed p;
  p.source = read_text(file);
  try {
    if (fragment) {
      p.ast = dsl::parse_fragment(p.source);
    } else {
      p.ast = dsl::parse_document(p.source);
    }
  } catch (const dsl::ParseError& e) {
    report_parse_error(err, file, p.source, e);
    throw DomainFailure{};
  }
  return p;
}

void print_tree(std::ostream& out, const std::vector<dsl::Element>& elements, const dsl::IdMap& ids,
                dsl::ElementPath& path, int indent) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    path.push_back(i);
    const auto& e = elements[i];
    out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << ids.at(path) << ' ';
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, dsl::Row>) out << "row";
          else if constexpr (std::is_same_v<T, dsl::Column>) out << "column";
          else if constexpr (std::is_same_v<T, dsl::Label>) out << "label " << json(node.value).dump();
          else out << "input" << (node.placeholder ? " " + json(*node.placeholder).dump() : std::string());
        },
        e.node);
    out << '\n';
    if (e.is_container()) print_tree(out, e.children(), ids, path, indent + 1);
    path.pop_back();
  }
}

std::string counts_line(const dsl::NodeCounts& c) {
  return "inputs=" + std::to_string(c.inputs) + " labels=" + std::to_string(c.labels) +
         " rows=" + std::to_string(c.rows) + " columns=" + std::to_string(c.columns) +
         " depth=" + std::to_string(c.depth);
}

// Shared option state for every subcommand.
struct Options {
  std::string config_file;
  std::string asset_dir;
  std::string file;
  bool fragment = false;
  bool json_output = false;
  bool check = false;
  bool csv = false;
  std::string output;

  std::string description;
  std::string provider;
  std::string replay_file;
  std::string script_file;
  int max_repairs = 2;
  std::string html_output;
  bool print_key = false;

  std::string store_dir;
  std::string name;
  std::string dsl_text;
  std::string dsl_file;
  std::vector<std::string> tags;
  std::string tag;
  std::string id;

  std::vector<std::string> times;
  std::string trace_a;
  std::string trace_b;
  std::string trace_dir;

  std::string host;
  int port = -1;
};

api::ServiceConfig load_config(const Options& o) {
  api::ServiceConfig c = o.config_file.empty() ? api::ServiceConfig{} : api::ServiceConfig::load(o.config_file);
  if (!o.asset_dir.empty()) c.asset_dir = o.asset_dir;
  if (!o.store_dir.empty()) c.store_dir = o.store_dir;
  if (!o.host.empty()) c.host = o.host;
  if (o.port >= 0) c.port = o.port;
  if (!o.replay_file.empty()) c.replay_file = o.replay_file;
  if (!o.script_file.empty()) c.script_file = o.script_file;
  if (!o.provider.empty()) c.provider = o.provider;
  if (c.asset_dir.empty()) c.asset_dir = prompt::default_asset_dir();
  if (c.provider == "replay" && c.replay_file.empty()) c.replay_file = c.asset_dir / "replay" / "cassette.json";
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

int cmd_parse(const Options& o, std::ostream& out, std::ostream& err) {
  const auto p = parse_file(o.file, o.fragment, err);
  dsl::ElementPath path;
  if (const auto* layout = std::get_if<dsl::TutorLayout>(&p.ast)) {
    out << "title " << json(layout->title).dump() << '\n';
    print_tree(out, layout->body, layout->ids, path, 0);
    out << counts_line(dsl::count_nodes(*layout)) << '\n';
  } else {
    const auto& fragment = std::get<dsl::Fragment>(p.ast);
    print_tree(out, fragment.elements, fragment.ids, path, 0);
    out << counts_line(dsl::count_nodes(fragment)) << '\n';
  }
  return kExitOk;
}

int cmd_fmt(const Options& o, std::ostream& out, std::ostream& err) {
  const auto p = parse_file(o.file, o.fragment, err);
  const std::string canonical =
      std::visit([](const auto& ast) { return dsl::pretty_print(ast); }, p.ast) + "\n";
  if (o.check) {
    if (canonical != p.source) {
      err << o.file << ": not in canonical form\n";
      return kExitDomainError;
    }
    return kExitOk;
  }
  out << canonical;
  return kExitOk;
}

int cmd_lint(const Options& o, std::ostream& out, std::ostream& err) {
  const auto p = parse_file(o.file, o.fragment, err);
  lint::LintReport report;
  const dsl::SourceMap* spans = nullptr;
  if (const auto* layout = std::get_if<dsl::TutorLayout>(&p.ast)) {
    report = lint::lint_document(*layout);
    spans = &layout->spans;
  } else {
    const auto& fragment = std::get<dsl::Fragment>(p.ast);
    report = lint::lint_fragment(fragment);
    spans = &fragment.spans;
  }
  if (o.json_output) out << json(report).dump(2) << '\n';
  for (const auto& f : report.findings) {
    std::size_t offset = 0;
    if (f.element_id) {
      if (auto it = spans->find(*f.element_id); it != spans->end()) offset = it->second.start;
    }
    err << location(o.file, p.source, offset) << ": " << lint::to_string(f.severity) << ' '
        << lint::to_string(f.rule) << ": " << f.message;
    if (f.element_id) err << " [" << *f.element_id << ']';
    err << '\n';
  }
  if (!o.json_output && report.findings.empty()) out << o.file << ": clean\n";
  return report.clean ? kExitOk : kExitDomainError;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream& err) {
  const auto p = parse_file(o.file, o.fragment, err);
  const html::HtmlText rendered = o.fragment ? html::render_fragment(std::get<dsl::Fragment>(p.ast))
                                             : html::render_document(std::get<dsl::TutorLayout>(p.ast));
  if (o.output.empty()) {
    out << rendered.text << '\n';
  } else {
    write_text(o.output, rendered.text + "\n");
  }
  return kExitOk;
}

int cmd_generate(const Options& o, prompt::Mode mode, std::ostream& out, std::ostream& err) {
  Options with_default = o;
  if (o.provider.empty() && o.config_file.empty()) with_default.provider = "replay";
  const auto config = load_config(with_default);
  const auto assets = prompt::PromptAssets::load(config.asset_dir / "prompt");
  auto provider = llm::make_provider(config.provider, config.replay_file, config.script_file);

  llm::GenerationRequest request{mode, o.description, o.max_repairs};
  try {
    const auto result = llm::generate(request, *provider, config.provider_config, assets);
    if (o.json_output) {
      out << json(result).dump(2) << '\n';
    } else {
      out << result.dsl << '\n';
    }
    if (!o.html_output.empty()) write_text(o.html_output, result.html.text + "\n");
    err << "generated in " << result.attempts << " attempt(s)\n";
    return kExitOk;
  } catch (const llm::GenerationFailure& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& issue : e.last_errors()) {
      err << "  " << prompt::describe_issue(issue, e.last_output()) << '\n';
    }
    return kExitDomainError;
  }
}

int cmd_prompt(const Options& o, prompt::Mode mode, std::ostream& out) {
  const auto config = load_config(o);
  const auto assets = prompt::PromptAssets::load(config.asset_dir / "prompt");
  const auto bundle = mode == prompt::Mode::Interface
                          ? prompt::build_interface_prompt(assets, o.description, assets.interface_examples)
                          : prompt::build_component_prompt(assets, o.description, assets.component_examples);
  const auto messages = prompt::serialize(bundle);
  if (o.print_key) {
    out << llm::ReplayProvider::key_for(messages) << '\n';
  } else if (o.json_output) {
    out << json(messages).dump(2) << '\n';
  } else {
    out << prompt::to_transcript(messages);
  }
  return kExitOk;
}

library::ComponentStore open_store(const Options& o) { return library::ComponentStore(load_config(o).store_dir); }

int cmd_components_create(const Options& o, std::ostream& out) {
  if (o.dsl_text.empty() == o.dsl_file.empty()) throw CLI::ValidationError("exactly one of --dsl or --dsl-file");
  auto store = open_store(o);
  const std::string source = o.dsl_file.empty() ? o.dsl_text : read_text(o.dsl_file);
  const auto record = store.create(o.name, o.description, source, o.tags);
  out << json(record).dump(2) << '\n';
  return kExitOk;
}

int cmd_components_list(const Options& o, std::ostream& out) {
  auto store = open_store(o);
  const auto records = store.list(o.tag.empty() ? std::nullopt : std::optional<std::string>(o.tag));
  if (o.json_output) {
    out << json(records).dump(2) << '\n';
    return kExitOk;
  }
  for (const auto& r : records) {
    out << r.id << "  " << r.created_at << "  " << r.name;
    if (!r.tags.empty()) {
      out << "  [";
      for (std::size_t i = 0; i < r.tags.size(); ++i) out << (i ? ", " : "") << r.tags[i];
      out << ']';
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_components_show(const Options& o, std::ostream& out) {
  out << json(open_store(o).get(o.id)).dump(2) << '\n';
  return kExitOk;
}

int cmd_components_delete(const Options& o, std::ostream& out) {
  open_store(o).remove(o.id);
  out << "deleted " << o.id << '\n';
  return kExitOk;
}

klm::OperatorTimes operator_times(const Options& o) {
  auto times = klm::OperatorTimes::defaults();
  for (const auto& t : o.times) times.set_from_string(t);
  return times;
}

int cmd_klm_estimate(const Options& o, std::ostream& out) {
  const auto trace = klm::load_trace(o.file);
  const auto e = klm::estimate(trace, operator_times(o));
  if (o.json_output) {
    out << json(e).dump(2) << '\n';
    return kExitOk;
  }
  out << trace.name << ": keystrokes=" << e.keystrokes;
  for (auto op : klm::kOperators) out << ' ' << klm::to_char(op) << '=' << e.count(op);
  std::ostringstream secs;
  secs.precision(2);
  secs << std::fixed << e.total_seconds();
  out << " total=" << secs.str() << "s\n";
  return kExitOk;
}

int cmd_klm_compare(const Options& o, std::ostream& out) {
  const auto times = operator_times(o);
  const auto a = klm::load_trace(o.trace_a);
  const auto b = klm::load_trace(o.trace_b);
  const auto ea = klm::estimate(a, times);
  const auto eb = klm::estimate(b, times);
  if (o.json_output) {
    out << json(klm::compare(ea, eb)).dump(2) << '\n';
    return kExitOk;
  }
  out << klm::report({{a.name + " -> " + b.name, ea, eb}},
                     o.csv ? klm::ReportFormat::Csv : klm::ReportFormat::Text);
  return kExitOk;
}

// Pairs classical_<name>.klm with ai_<name>.klm in a directory.
int cmd_klm_report(const Options& o, std::ostream& out) {
  const fs::path dir = o.trace_dir.empty() ? load_config(o).asset_dir / "traces" : fs::path(o.trace_dir);
  const auto times = operator_times(o);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto stem = entry.path().stem().string();
    if (entry.path().extension() == ".klm" && stem.rfind("classical_", 0) == 0 &&
        fs::exists(dir / ("ai_" + stem.substr(10) + ".klm"))) {
      names.push_back(stem.substr(10));
    }
  }
  std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
    // Reference order puts "simple" before "complex".
    auto rank = [](const std::string& n) { return n == "simple" ? 0 : n == "complex" ? 1 : 2; };
    return rank(a) != rank(b) ? rank(a) < rank(b) : a < b;
  });
  std::vector<klm::ReportRow> rows;
  for (const auto& n : names) {
    rows.push_back({n, klm::estimate(klm::load_trace((dir / ("classical_" + n + ".klm")).string()), times),
                    klm::estimate(klm::load_trace((dir / ("ai_" + n + ".klm")).string()), times)});
  }
  out << klm::report(rows, o.csv ? klm::ReportFormat::Csv : klm::ReportFormat::Text);
  return kExitOk;
}

// Measured completion times and keystrokes shipped as constants; nothing here
// is computed from traces.
int cmd_klm_reference(const Options& o, std::ostream& out) {
  const char sep = o.csv ? ',' : '\t';
  out << "interface" << sep << "classical_s" << sep << "ai_s" << sep << "time_change" << sep << "classical_keys"
      << sep << "ai_keys" << sep << "keystroke_change" << '\n';
  for (const auto& m : klm::kReferenceMeasurements) {
    out << m.name << sep << m.classical_seconds << sep << m.ai_seconds << sep
        << klm::format_change(klm::floor_reduction_percent(m.classical_seconds, m.ai_seconds)) << sep
        << m.classical_keystrokes << sep << m.ai_keystrokes << sep
        << klm::format_change(klm::floor_reduction_percent(m.classical_keystrokes, m.ai_keystrokes)) << '\n';
  }
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  api::serve(load_config(o), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tutorgen: author tutor interfaces in the layout DSL"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Options o;
  std::function<int()> action;
  app.add_option("--config", o.config_file, "JSON config file (host, port, store, assets, provider)");
  app.add_option("--assets", o.asset_dir, "Asset directory holding prompt/, traces/ and replay/");

  auto* parse = app.add_subcommand("parse", "Parse a .tut file and print its element tree");
  parse->add_option("file", o.file)->required();
  parse->add_flag("--fragment", o.fragment, "Parse as a titleless component");
  parse->callback([&] { action = [&] { return cmd_parse(o, out, err); }; });

  auto* fmt = app.add_subcommand("fmt", "Print the canonical form of a .tut file");
  fmt->add_option("file", o.file)->required();
  fmt->add_flag("--fragment", o.fragment, "Parse as a titleless component");
  fmt->add_flag("--check", o.check, "Exit 1 if the file is not already canonical");
  fmt->callback([&] { action = [&] { return cmd_fmt(o, out, err); }; });

  auto* lint_cmd = app.add_subcommand("lint", "Check a .tut file against the design rules");
  lint_cmd->add_option("file", o.file)->required();
  lint_cmd->add_flag("--fragment", o.fragment, "Lint as a component (rules L1, L2, L5)");
  lint_cmd->add_flag("--json", o.json_output, "Print the report as JSON");
  lint_cmd->callback([&] { action = [&] { return cmd_lint(o, out, err); }; });

  auto* render = app.add_subcommand("render", "Render a .tut file to HTML");
  render->add_option("file", o.file)->required();
  render->add_flag("--fragment", o.fragment, "Render as a component");
  render->add_option("-o,--output", o.output, "Write HTML here instead of stdout");
  render->callback([&] { action = [&] { return cmd_render(o, out, err); }; });

  auto* generate = app.add_subcommand("generate", "Generate an interface or component from a description");
  generate->require_subcommand(1);
  for (auto mode : {prompt::Mode::Interface, prompt::Mode::Component}) {
    auto* sub = generate->add_subcommand(std::string(prompt::to_string(mode)),
                                         mode == prompt::Mode::Interface ? "Generate a whole tutor interface"
                                                                         : "Generate a reusable component");
    sub->add_option("--description", o.description, "What the tutor or component should do")->required();
    sub->add_option("--provider", o.provider, "replay (default), scripted or http")
        ->check(CLI::IsMember({"replay", "scripted", "http"}));
    sub->add_option("--replay", o.replay_file, "Replay cassette (defaults to the bundled one)");
    sub->add_option("--script", o.script_file, "JSON array of responses for the scripted provider");
    sub->add_option("--max-repairs", o.max_repairs, "Repair attempts after the first try")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--html", o.html_output, "Also write the rendered HTML to this file");
    sub->add_flag("--json", o.json_output, "Print the full generation result as JSON");
    sub->callback([&, mode] { action = [&, mode] { return cmd_generate(o, mode, out, err); }; });
  }

  auto* prompt_cmd = app.add_subcommand("prompt", "Print the prompt sent for a description");
  prompt_cmd->require_subcommand(1);
  for (auto mode : {prompt::Mode::Interface, prompt::Mode::Component}) {
    auto* sub = prompt_cmd->add_subcommand(std::string(prompt::to_string(mode)),
                                           mode == prompt::Mode::Interface ? "Prompt for a whole tutor interface"
                                                                           : "Prompt for a reusable component");
    sub->add_option("--description", o.description, "What the tutor or component should do")->required();
    sub->add_flag("--key", o.print_key, "Print only the replay key (SHA-256 of the messages)");
    sub->add_flag("--json", o.json_output, "Print messages as JSON");
    sub->callback([&, mode] { action = [&, mode] { return cmd_prompt(o, mode, out); }; });
  }

  auto* components = app.add_subcommand("components", "Manage the reusable component library");
  components->require_subcommand(1);
  components->add_option("--store", o.store_dir, "Component store directory");
  auto* create = components->add_subcommand("create", "Validate and store a component");
  create->add_option("--name", o.name)->required();
  create->add_option("--description", o.description);
  create->add_option("--dsl", o.dsl_text, "Component DSL text");
  create->add_option("--dsl-file", o.dsl_file, "File holding the component DSL");
  create->add_option("--tag", o.tags, "Tag (repeatable)");
  create->callback([&] { action = [&] { return cmd_components_create(o, out); }; });
  auto* list = components->add_subcommand("list", "List components, newest first");
  list->add_option("--tag", o.tag, "Only components with this tag");
  list->add_flag("--json", o.json_output);
  list->callback([&] { action = [&] { return cmd_components_list(o, out); }; });
  auto* show = components->add_subcommand("show", "Print one component record");
  show->add_option("id", o.id)->required();
  show->callback([&] { action = [&] { return cmd_components_show(o, out); }; });
  auto* del = components->add_subcommand("delete", "Delete a component");
  del->add_option("id", o.id)->required();
  del->callback([&] { action = [&] { return cmd_components_delete(o, out); }; });

  auto* klm_cmd = app.add_subcommand("klm", "Keystroke-Level Model estimates");
  klm_cmd->require_subcommand(1);
  klm_cmd->add_option("--time", o.times, "Operator duration override, e.g. K=0.2 (repeatable)");
  auto* estimate = klm_cmd->add_subcommand("estimate", "Cost one .klm trace");
  estimate->add_option("trace", o.file)->required();
  estimate->add_flag("--json", o.json_output);
  estimate->callback([&] { action = [&] { return cmd_klm_estimate(o, out); }; });
  auto* compare = klm_cmd->add_subcommand("compare", "Compare a baseline trace against an alternative");
  compare->add_option("baseline", o.trace_a)->required();
  compare->add_option("alternative", o.trace_b)->required();
  compare->add_flag("--csv", o.csv);
  compare->add_flag("--json", o.json_output);
  compare->callback([&] { action = [&] { return cmd_klm_compare(o, out); }; });
  auto* report = klm_cmd->add_subcommand("report", "Table of classical_* vs ai_* trace pairs");
  report->add_option("--dir", o.trace_dir, "Trace directory (defaults to the bundled traces)");
  report->add_flag("--csv", o.csv);
  report->callback([&] { action = [&] { return cmd_klm_report(o, out); }; });
  auto* reference = klm_cmd->add_subcommand("reference", "Measured times and keystrokes for the reference tasks");
  reference->add_flag("--csv", o.csv);
  reference->callback([&] { action = [&] { return cmd_klm_reference(o, out); }; });

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", o.host, "Address to listen on");
  serve->add_option("--port", o.port, "Port to listen on, 0 for any free port")->check(CLI::Range(0, 65535));
  serve->add_option("--store", o.store_dir, "Component store directory");
  serve->add_option("--provider", o.provider, "replay, scripted or http")
      ->check(CLI::IsMember({"replay", "scripted", "http"}));
  serve->add_option("--replay", o.replay_file, "Replay cassette for the replay provider");
  serve->add_option("--script", o.script_file, "JSON array of responses for the scripted provider");
  serve->callback([&] { action = [&] { return cmd_serve(o, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const DomainFailure&) {
    return kExitDomainError;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dsl::ParseError& e) {
    err << "error " << dsl::to_string(e.code()) << ": " << e.message() << '\n';
  } catch (const klm::KlmError& e) {
    err << "error " << klm::to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const library::StoreError& e) {
    err << "error " << library::to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const prompt::PromptError& e) {
    err << "error " << prompt::to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const llm::ProviderError& e) {
    err << "error " << llm::to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitDomainError;
}

}  // namespace tutorgen::cli
