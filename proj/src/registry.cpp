#include "foodchain/registry.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace foodchain {

namespace {

void ensure_dir(const std::string& path) {
  if (mkdir(path.c_str(), 0755) != 0 && errno != EEXIST)
    throw std::system_error(errno, std::generic_category(),
                            "mkdir " + path);
}

std::string index_path(const std::string& root) { return root + "/index.tsv"; }

void check_field(const std::string& s, const char* what) {
  if (s.find('\t') != std::string::npos || s.find('\n') != std::string::npos)
    throw std::invalid_argument(std::string(what) +
                                " may not contain tabs or newlines");
}

std::vector<RegistryEntry> parse_index(const std::string& root,
                                       std::istream& is) {
  std::vector<RegistryEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    RegistryEntry e;
    std::string seq, rmse, note;
    if (!std::getline(ls, seq, '\t') || !std::getline(ls, e.model_id, '\t') ||
        !std::getline(ls, e.artifact, '\t') || !std::getline(ls, rmse, '\t') ||
        !std::getline(ls, e.fingerprint, '\t'))
      throw std::runtime_error(index_path(root) + ":" +
                               std::to_string(lineno) +
                               ": corrupt registry index line");
    std::getline(ls, e.note);  // optional trailing field
    try {
      e.sequence = std::stoull(seq);
      e.validation_rmse = std::stod(rmse);
    } catch (const std::exception&) {
      throw std::runtime_error(index_path(root) + ":" +
                               std::to_string(lineno) +
                               ": corrupt registry index line");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

RegistryEntry registry_publish(const std::string& root,
                               const std::string& model_id,
                               const std::string& param_file,
                               double validation_rmse,
                               const std::string& fingerprint,
                               const std::string& note) {
  check_field(model_id, "model id");
  check_field(fingerprint, "fingerprint");
  check_field(note, "note");
  if (model_id.empty()) throw std::invalid_argument("model id is empty");
  if (model_id.find('/') != std::string::npos)
    throw std::invalid_argument("model id may not contain '/'");

  ensure_dir(root);
  ensure_dir(root + "/artifacts");

  // read the artifact up front so a publish never leaves a partial copy
  std::ifstream src(param_file, std::ios::binary);
  if (!src) throw std::runtime_error("cannot open artifact: " + param_file);
  std::ostringstream body;
  body << src.rdbuf();

  // the index file doubles as the lock; sequence = current line count
  int fd = open(index_path(root).c_str(), O_RDWR | O_CREAT, 0644);
  if (fd < 0)
    throw std::system_error(errno, std::generic_category(),
                            "open " + index_path(root));
  if (flock(fd, LOCK_EX) != 0) {
    int err = errno;
    close(fd);
    throw std::system_error(err, std::generic_category(), "flock index");
  }

  RegistryEntry entry;
  try {
    std::ostringstream existing;
    {
      char buf[4096];
      ssize_t n;
      while ((n = read(fd, buf, sizeof(buf))) > 0) existing.write(buf, n);
      if (n < 0)
        throw std::system_error(errno, std::generic_category(), "read index");
    }
    std::istringstream is(existing.str());
    auto entries = parse_index(root, is);
    entry.sequence = entries.empty() ? 1 : entries.back().sequence + 1;
    entry.model_id = model_id;
    entry.validation_rmse = validation_rmse;
    entry.fingerprint = fingerprint;
    entry.note = note;
    entry.artifact =
        "artifacts/" + model_id + "-" + std::to_string(entry.sequence) + ".fcps";

    // temp-file + rename so readers never see a torn artifact
    std::string final_path = root + "/" + entry.artifact;
    std::string tmp_path = final_path + ".tmp." + std::to_string(getpid());
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp_path);
      out << body.str();
      if (!out) throw std::runtime_error("short write to " + tmp_path);
    }
    if (rename(tmp_path.c_str(), final_path.c_str()) != 0)
      throw std::system_error(errno, std::generic_category(),
                              "rename " + tmp_path);

    char rmse_buf[64];
    std::snprintf(rmse_buf, sizeof(rmse_buf), "%.17g", validation_rmse);
    std::ostringstream line;
    line << entry.sequence << '\t' << entry.model_id << '\t' << entry.artifact
         << '\t' << rmse_buf << '\t'
         << (entry.fingerprint.empty() ? "-" : entry.fingerprint) << '\t'
         << entry.note << '\n';
    std::string s = line.str();
    if (lseek(fd, 0, SEEK_END) < 0 ||
        write(fd, s.data(), s.size()) != static_cast<ssize_t>(s.size()))
      throw std::system_error(errno, std::generic_category(), "append index");
    if (fsync(fd) != 0)
      throw std::system_error(errno, std::generic_category(), "fsync index");
  } catch (...) {
    flock(fd, LOCK_UN);
    close(fd);
    throw;
  }
  flock(fd, LOCK_UN);
  close(fd);
  if (entry.fingerprint.empty()) entry.fingerprint = "-";
  return entry;
}

std::vector<RegistryEntry> registry_list(const std::string& root) {
  std::ifstream is(index_path(root));
  if (!is) return {};
  return parse_index(root, is);
}

RegistryEntry registry_best(const std::string& root,
                            const std::string& model_id) {
  auto entries = registry_list(root);
  const RegistryEntry* best = nullptr;
  for (const auto& e : entries) {
    if (!model_id.empty() && e.model_id != model_id) continue;
    // ties go to the newest entry, i.e. later index lines win
    if (!best || e.validation_rmse <= best->validation_rmse) best = &e;
  }
  if (!best)
    throw std::runtime_error("registry has no entries" +
                             (model_id.empty() ? std::string()
                                               : " for model " + model_id));
  return *best;
}

}  // namespace foodchain
