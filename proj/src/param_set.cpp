#include "foodchain/param_set.hpp"

#include <zlib.h>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace foodchain {

void ParamSet::add(const std::string& name, Tensor* t) {
  if (find(name)) throw std::invalid_argument("duplicate parameter: " + name);
  if (t->g.size() != t->v.size())
    throw std::invalid_argument("parameter without gradient slot: " + name);
  entries_.emplace_back(name, t);
}

Tensor* ParamSet::find(const std::string& name) {
  for (auto& [n, t] : entries_)
    if (n == name) return t;
  return nullptr;
}

const Tensor* ParamSet::find(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return t;
  return nullptr;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t->size();
  return n;
}

void ParamSet::zero_grads() {
  for (auto& [name, t] : entries_) t->zero_grad();
}

double ParamSet::grad_norm() const {
  double s = 0.0;
  for (const auto& [name, t] : entries_)
    for (double g : t->g) s += g * g;
  return std::sqrt(s);
}

std::vector<std::vector<double>> ParamSet::snapshot() const {
  std::vector<std::vector<double>> snap;
  snap.reserve(entries_.size());
  for (const auto& [name, t] : entries_) snap.push_back(t->v);
  return snap;
}

void ParamSet::restore(const std::vector<std::vector<double>>& snap) {
  if (snap.size() != entries_.size())
    throw std::invalid_argument("snapshot layout mismatch");
  for (std::size_t i = 0; i < snap.size(); ++i) {
    if (snap[i].size() != entries_[i].second->v.size())
      throw std::invalid_argument("snapshot tensor size mismatch");
    entries_[i].second->v = snap[i];
  }
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void ParamSet::save(std::ostream& os) const {
  std::ostringstream body;
  body << "FCPS 1\n";
  body << "tensors " << entries_.size() << "\n";
  for (const auto& [name, t] : entries_) {
    body << "tensor " << name << " " << t->rows << " " << t->cols << "\n";
    for (std::size_t i = 0; i < t->v.size(); ++i) {
      if (i) body << " ";
      body << format_double(t->v[i]);
    }
    body << "\n";
  }
  const std::string s = body.str();
  uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(s.data()),
                    static_cast<uInt>(s.size()));
  os << s;
  char crcbuf[16];
  std::snprintf(crcbuf, sizeof(crcbuf), "%08lx", static_cast<unsigned long>(crc));
  os << "crc32 " << crcbuf << "\n";
}

void ParamSet::load(std::istream& is) {
  std::ostringstream body;
  std::string line;
  std::string crc_line;
  while (std::getline(is, line)) {
    if (line.rfind("crc32 ", 0) == 0) {
      crc_line = line;
      break;
    }
    body << line << "\n";
  }
  if (crc_line.empty()) throw std::runtime_error("param file: missing checksum");
  const std::string s = body.str();
  uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(s.data()),
                    static_cast<uInt>(s.size()));
  unsigned long stored = std::stoul(crc_line.substr(6), nullptr, 16);
  if (stored != static_cast<unsigned long>(crc))
    throw std::runtime_error("param file: checksum mismatch");

  std::istringstream in(s);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "FCPS" || version != 1)
    throw std::runtime_error("param file: bad header");
  std::string kw;
  std::size_t n = 0;
  in >> kw >> n;
  if (kw != "tensors") throw std::runtime_error("param file: bad header");
  if (n != entries_.size())
    throw std::runtime_error("param file: tensor count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    std::string name;
    std::size_t rows = 0, cols = 0;
    in >> kw >> name >> rows >> cols;
    if (kw != "tensor") throw std::runtime_error("param file: bad tensor header");
    Tensor* t = find(name);
    if (!t) throw std::runtime_error("param file: unknown tensor " + name);
    if (t->rows != rows || t->cols != cols)
      throw std::runtime_error("param file: shape mismatch for " + name);
    for (double& x : t->v) {
      if (!(in >> x)) throw std::runtime_error("param file: truncated tensor " + name);
    }
  }
}

void ParamSet::save_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  save(os);
}

void ParamSet::load_from_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  load(is);
}

}  // namespace foodchain
