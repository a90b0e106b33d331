#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpinn/mlp.hpp"

namespace cpinn {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void save_checkpoint(const std::string& path, const MlpShape& shape,
                     std::span<const double> params, int precision_bits) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
  out << "cpinn-mlp v1\n";
  out << "precision " << precision_bits << "\n";
  out << "activation " << to_string(shape.activation) << "\n";
  out << "widths";
  for (int w : shape.widths) out << ' ' << w;
  out << "\nparams " << params.size() << "\n";
  for (double v : params) {
    if (precision_bits == 32)
      out << shortest(static_cast<double>(static_cast<float>(v))) << '\n';
    else
      out << shortest(v) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

void save_checkpoint(const std::string& path, const Mlp<double>& net) {
  save_checkpoint(path, net.shape, net.params, 64);
}

void save_checkpoint(const std::string& path, const Mlp<float>& net) {
  std::vector<double> p(net.params.begin(), net.params.end());
  save_checkpoint(path, net.shape, p, 32);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
  std::string line, word;
  std::getline(in, line);
  if (line != "cpinn-mlp v1")
    throw std::runtime_error("not a cpinn checkpoint (bad magic line): " + path);
  Checkpoint ck;
  std::string activation;
  std::vector<int> widths;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> word;
    if (word == "precision") {
      ls >> ck.precision_bits;
    } else if (word == "activation") {
      ls >> activation;
    } else if (word == "widths") {
      int w;
      while (ls >> w) widths.push_back(w);
    } else if (word == "params") {
      ls >> count;
      break;
    } else {
      throw std::runtime_error("unknown checkpoint header field '" + word + "' in " + path);
    }
  }
  ck.shape = MlpShape(widths, activation_from_string(activation));
  if (count != ck.shape.param_count)
    throw std::runtime_error("checkpoint parameter count mismatch in " + path);
  ck.params.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> ck.params[i]))
      throw std::runtime_error("checkpoint truncated at parameter " + std::to_string(i) + ": " +
                               path);
  }
  return ck;
}

}  // namespace cpinn
