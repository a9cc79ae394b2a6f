#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "kgfuse/corpus.hpp"

namespace kgfuse::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("kgfuse-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path data_dir() { return KGFUSE_TEST_DATA_DIR; }

inline constexpr const char* kTicketPassage =
    "I had decided that I wanted to visit my friend Paul whom lives quite a distance away. With this and my "
    "fear of air travel in mind I decided to take a train. After researching and finding one online I was well "
    "on my way to going to see my friend Paul. I drive to the station and decide that I am going to purchase a "
    "round trip ticket as this would be cheaper than just buying both tickets separately. Whenever my train "
    "arrives I have to get in line as they process our tickets. After all this is done I decide to take a seat "
    "by the window. I sit and fall asleep a bit as I ride on the train for hours. After a couple hours we "
    "finally reach the destination and I get off the train, excited to see my friend.";

inline Prompt ticket_prompt() {
  Prompt p;
  p.id = "ticket";
  p.passage = kTicketPassage;
  p.question = "When did they wait for their train?";
  p.answers = {"before buying the ticket", "after buying a ticket"};
  p.gold = 1;
  p.qtype = categorize_question(p.question);
  return p;
}

}  // namespace kgfuse::testing
