#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgd/checkpoint.hpp"
#include "lgd/optim.hpp"
#include "lgd/tensor.hpp"
#include "lgd/variant.hpp"

namespace lgd::model {

inline constexpr std::size_t kLatentChannels = 64;
inline constexpr std::size_t kClasses = 4;
inline constexpr std::size_t kFusionHidden = 32;

// Attention-fusion weights: a shared two-layer MLP over channel statistics
// and a 1x1 conv producing a spatial gate.
template <typename T>
struct FusionParams {
  BasicTensor<T> mlp1_weight;     // [C, hidden]
  BasicTensor<T> mlp1_bias;       // [hidden]
  BasicTensor<T> mlp2_weight;     // [hidden, C]
  BasicTensor<T> mlp2_bias;       // [C]
  BasicTensor<T> spatial_weight;  // [1, C, 1, 1]
  BasicTensor<T> spatial_bias;    // [1]
};

template <typename T>
struct FusionOutput {
  BasicTensor<T> attention;  // [N,C,h,w], in [0,1]
  BasicTensor<T> fused;      // input * attention
};

// attention = sigmoid(channel_logits * spatial_logits), where channel_logits
// = MLP(avgpool(x)) + MLP(maxpool(x)) broadcast over locations and
// spatial_logits = conv1x1(x) broadcast over channels.
template <typename T>
FusionOutput<T> attend(const BasicTensor<T>& x, const FusionParams<T>& p);

// attend(concat(z_he, z_aux)) along channels.
template <typename T>
FusionOutput<T> fuse(const BasicTensor<T>& z_he, const BasicTensor<T>& z_aux, const FusionParams<T>& p);

struct ModelOptions {
  // Train the teacher alongside the student (with its own IHC head) instead
  // of loading a frozen pretrained checkpoint.
  bool joint_teacher = false;
};

struct TrainOutputs {
  Tensor logits;
  std::optional<Tensor> z_hat;   // hallucinated IHC latent
  std::optional<Tensor> z_real;  // teacher latent, detached
  std::optional<Tensor> nuclei;  // K_hat [N,1,h,w]
  std::optional<Tensor> membrane;  // M_hat [N,1,h,w]
  std::optional<Tensor> teacher_logits;  // joint-teacher mode only
};

// The full parameterized network for one variant. Parameters live in a
// name-keyed map: "student.", "teacher.", "hallucinator.", "decoder.",
// "fusion.", "classifier.", "ihc_encoder.".
class ModelGraph {
 public:
  ModelGraph(Variant variant, std::uint64_t seed, ModelOptions options = {});

  // Graph populated from a checkpoint. Missing teacher/decoder entries are
  // allowed, which leaves a graph that can only run forward_infer.
  static ModelGraph from_checkpoint(Variant variant, const NamedTensors& tensors, ModelOptions options = {});

  Variant variant() const { return variant_; }
  VariantFlags flags() const { return flags_; }

  void load_teacher(const NamedTensors& teacher_checkpoint);
  bool has_teacher() const { return teacher_loaded_; }

  // Everything the optimizer updates; the teacher is excluded unless joint.
  std::vector<Parameter> trainable_parameters() const;
  const NamedTensors& state() const { return params_; }
  NamedTensors inference_state() const;

  // One training pass. Components disabled by the variant are absent.
  TrainOutputs forward_train(const Tensor& he, const Tensor& ihc) const;

  // H&E-only logits. Touches neither the teacher nor the decoders. The
  // image_concat and feature_concat baselines additionally need `ihc`.
  Tensor forward_infer(const Tensor& he, const std::optional<Tensor>& ihc = std::nullopt) const;

  Tensor encode_student(const Tensor& he) const;
  Tensor encode_teacher(const Tensor& ihc) const;
  Tensor hallucinate(const Tensor& z_he) const;
  Tensor decode_nuclei(const Tensor& z) const;
  Tensor decode_membrane(const Tensor& z) const;
  FusionParams<float> fusion_params() const;
  Tensor classify(const Tensor& fused) const;

 private:
  struct Uninitialized {};
  ModelGraph(Variant variant, ModelOptions options, Uninitialized);

  const Tensor& param(const std::string& name) const;
  bool uses_hallucinator() const { return flags_.hallucination; }
  std::size_t classifier_width() const;
  Tensor head_logits(const Tensor& z_he, const std::optional<Tensor>& z_aux) const;

  Variant variant_;
  VariantFlags flags_;
  ModelOptions options_;
  NamedTensors params_;
  bool teacher_loaded_ = false;
};

// IHC encoder plus its own 4-way head: the teacher during pretraining and
// the IHC-unimodal baseline.
class TeacherNet {
 public:
  explicit TeacherNet(std::uint64_t seed);
  static TeacherNet from_checkpoint(const NamedTensors& tensors);

  Tensor encode(const Tensor& ihc) const;
  Tensor forward(const Tensor& ihc) const;
  std::vector<Parameter> parameters() const;
  const NamedTensors& state() const { return params_; }

 private:
  TeacherNet() = default;
  NamedTensors params_;
};

// Input scaling shared by every encoder: [0,1] -> [-1,1].
Tensor normalize_input(const Tensor& x);

}  // namespace lgd::model
