// Benchmark tasks: JSON lines {"id", "target", "constraint": {"kind",
// "payload"?}, "notes"?}.
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "larc/chem/canonical.hpp"
#include "larc/evaluator/constraint.hpp"

namespace larc::harness {

struct Task {
  std::string id;
  std::string target;
  evaluator::Constraint constraint;
  std::string notes;

  void validate() const {
    chem::canonicalize(target);  // throws on parse failure
    constraint.validate();
  }
};

inline std::vector<Task> load_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file: " + path);
  std::vector<Task> tasks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    try {
      auto j = nlohmann::json::parse(line);
      Task t;
      t.id = j.at("id").get<std::string>();
      t.target = j.at("target").get<std::string>();
      const auto& c = j.at("constraint");
      t.constraint.kind = evaluator::constraint_kind_from_string(
          c.at("kind").get<std::string>());
      if (c.contains("payload"))
        t.constraint.payload =
            chem::canonicalize(c.at("payload").get<std::string>());
      if (c.contains("description"))
        t.constraint.description = c.at("description").get<std::string>();
      t.notes = j.value("notes", "");
      t.validate();
      tasks.push_back(std::move(t));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  if (tasks.empty()) throw std::runtime_error("task file is empty: " + path);
  return tasks;
}

inline void save_tasks(const std::string& path, const std::vector<Task>& tasks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write task file: " + path);
  for (const auto& t : tasks) {
    nlohmann::json j;
    j["id"] = t.id;
    j["target"] = t.target;
    nlohmann::json c;
    c["kind"] = std::string(evaluator::to_string(t.constraint.kind));
    if (t.constraint.payload) c["payload"] = t.constraint.payload->text;
    if (!t.constraint.description.empty())
      c["description"] = t.constraint.description;
    j["constraint"] = c;
    if (!t.notes.empty()) j["notes"] = t.notes;
    out << j.dump() << '\n';
  }
}

}  // namespace larc::harness
