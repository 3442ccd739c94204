#include "auvsim/rl/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace auvsim::rl {
namespace {

struct Tensor {
  std::string name;
  std::vector<double>* values;
};

std::vector<Tensor> tensors(PolicySet& p) {
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < p.micro_actors.size(); ++i) {
    out.push_back({"micro_actor." + std::to_string(i) + ".net", &p.micro_actors[i].net.params()});
    out.push_back({"micro_actor." + std::to_string(i) + ".log_std", &p.micro_actors[i].log_std});
  }
  for (std::size_t i = 0; i < p.micro_critics.size(); ++i)
    out.push_back({"micro_critic." + std::to_string(i), &p.micro_critics[i].params()});
  out.push_back({"macro_actor", &p.macro_actor.params()});
  out.push_back({"macro_critic", &p.macro_critic.params()});
  return out;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const PolicySet& policies,
                     const CheckpointMeta& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    f << "auvsim-checkpoint " << kCheckpointVersion << "\n";
    f << "config_hash " << hex(meta.config_hash) << "\n";
    f << "episode " << meta.episode << "\n";
    f << "seed " << meta.seed << "\n";
    char buf[32];
    for (const auto& t : tensors(const_cast<PolicySet&>(policies))) {
      f << "tensor " << t.name << " " << t.values->size() << "\n";
      std::size_t col = 0;
      for (double v : *t.values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        f << buf << (++col % 8 == 0 ? '\n' : ' ');
      }
      if (col % 8 != 0) f << "\n";
    }
    f << "end\n";
    if (!f) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointMeta load_checkpoint(const std::filesystem::path& path, PolicySet& policies,
                               std::optional<std::uint64_t> expected_hash) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path.string());
  const std::string where = "checkpoint " + path.string() + ": ";
  std::string word;
  int version = 0;
  f >> word >> version;
  if (word != "auvsim-checkpoint") throw std::runtime_error(where + "not a checkpoint file");
  if (version != kCheckpointVersion)
    throw CheckpointMismatch(where + "unsupported version " + std::to_string(version));
  CheckpointMeta meta;
  std::string hash_hex;
  f >> word >> hash_hex;
  if (word != "config_hash") throw std::runtime_error(where + "missing config_hash");
  meta.config_hash = std::stoull(hash_hex, nullptr, 16);
  f >> word >> meta.episode;
  if (word != "episode") throw std::runtime_error(where + "missing episode");
  f >> word >> meta.seed;
  if (word != "seed") throw std::runtime_error(where + "missing seed");
  if (expected_hash && *expected_hash != meta.config_hash)
    throw CheckpointMismatch(where + "config hash " + hash_hex + " does not match the current config (" +
                             hex(*expected_hash) + ")");

  std::vector<std::vector<double>> staged;
  const auto targets = tensors(policies);
  for (const auto& t : targets) {
    std::string name;
    std::size_t count = 0;
    f >> word >> name >> count;
    if (!f || word != "tensor") throw std::runtime_error(where + "truncated before " + t.name);
    if (name != t.name || count != t.values->size())
      throw CheckpointMismatch(where + "tensor " + name + " [" + std::to_string(count) +
                               "] does not fit " + t.name + " [" + std::to_string(t.values->size()) + "]");
    std::vector<double> v(count);
    for (auto& x : v) {
      if (!(f >> word)) throw std::runtime_error(where + "truncated in " + name);
      char* end = nullptr;
      x = std::strtod(word.c_str(), &end);
      if (end == word.c_str() || *end != '\0') throw std::runtime_error(where + "bad value in " + name);
    }
    staged.push_back(std::move(v));
  }
  f >> word;
  if (word != "end") throw std::runtime_error(where + "trailing data or missing end marker");
  for (std::size_t i = 0; i < targets.size(); ++i) *targets[i].values = std::move(staged[i]);
  return meta;
}

}  // namespace auvsim::rl
