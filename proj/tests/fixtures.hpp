#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fssaudit/corpus.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("fssaudit_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline fssaudit::Researcher researcher(std::string id, fssaudit::Gender g, std::string family, std::string uni,
                                       std::string sds, fssaudit::Rank rank, int start) {
  fssaudit::Researcher r;
  r.id = std::move(id);
  r.gender = g;
  r.family_name = std::move(family);
  r.university_id = std::move(uni);
  r.sds_id = std::move(sds);
  r.rank = rank;
  r.career_start_year = start;
  return r;
}

inline fssaudit::Publication publication(std::string id, int year, std::string cat, std::int64_t cites,
                                         std::vector<fssaudit::BylineEntry> byline) {
  return {std::move(id), year, std::move(cat), cites, std::move(byline)};
}

}  // namespace fixtures
