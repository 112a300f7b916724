#pragma once

#include <map>
#include <string>
#include <vector>

#include "surfglm/config.hpp"

namespace surfglm {

inline constexpr const char* kPipelineVersion = "1.0.0";

/// Stage runner over one output directory. Each stage validates its inputs,
/// records a manifest (input/output checksums, seed, timing), and is skipped
/// on rerun while the manifest still matches, unless forced.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, bool force);

  void simulate();
  void prep();
  void fit();
  void excur();
  void summarize();
  void lmm();
  void all();

  const PipelineConfig& config() const { return cfg_; }

 private:
  std::string out(const std::string& relative) const;
  std::string session_key(const SessionInput& s) const;
  std::vector<SessionInput> effective_sessions() const;
  std::string effective_mesh_path() const;
  std::string effective_clinical_path() const;
  std::string config_fingerprint() const;
  bool stage_done(const std::string& manifest_path,
                  const std::map<std::string, std::string>& inputs,
                  const std::string& stage) const;

  PipelineConfig cfg_;
  bool force_ = false;
};

}  // namespace surfglm
