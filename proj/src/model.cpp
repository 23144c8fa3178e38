#include "lgd/model.hpp"

#include <cmath>

#include "lgd/errors.hpp"
#include "lgd/ops.hpp"
#include "lgd/rng.hpp"

namespace lgd {

VariantFlags flags_of(Variant v) {
  switch (v) {
    case Variant::A: return {false, false, false, false};
    case Variant::B: return {true, false, false, false};
    case Variant::C: return {true, true, false, false};
    case Variant::D: return {true, true, true, false};
    case Variant::E: return {true, true, false, true};
    case Variant::F: return {true, true, true, true};
    case Variant::feature_concat: return {false, true, false, false};
    case Variant::ihc_unimodal:
    case Variant::image_concat: return {};
  }
  return {};
}

bool needs_teacher(Variant v) { return flags_of(v).hallucination; }

std::string to_string(Variant v) {
  switch (v) {
    case Variant::A: return "A";
    case Variant::B: return "B";
    case Variant::C: return "C";
    case Variant::D: return "D";
    case Variant::E: return "E";
    case Variant::F: return "F";
    case Variant::ihc_unimodal: return "ihc_unimodal";
    case Variant::image_concat: return "image_concat";
    case Variant::feature_concat: return "feature_concat";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::A, Variant::B, Variant::C, Variant::D, Variant::E, Variant::F, Variant::ihc_unimodal,
                    Variant::image_concat, Variant::feature_concat}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidArgument("unknown variant '" + s + "'");
}

namespace model {
namespace {

constexpr std::size_t kWidths[4] = {16, 32, 64, 64};

// Kaiming-uniform weights for a relu network, zero biases.
void init_conv(NamedTensors& params, const std::string& prefix, std::size_t out, std::size_t in, std::size_t k,
               std::uint64_t seed, double gain = 1.0) {
  SplitMix64 rng(mix_seed(seed, fnv1a(prefix)));
  const double bound = gain * std::sqrt(6.0 / static_cast<double>(in * k * k));
  std::vector<float> w(out * in * k * k);
  for (auto& v : w) v = static_cast<float>(rng.uniform(-bound, bound));
  params[prefix + ".weight"] = Tensor({out, in, k, k}, std::move(w), true);
  params[prefix + ".bias"] = Tensor::zeros({out}, true);
}

void init_dense(NamedTensors& params, const std::string& prefix, std::size_t in, std::size_t out, std::uint64_t seed) {
  SplitMix64 rng(mix_seed(seed, fnv1a(prefix)));
  const double bound = std::sqrt(6.0 / static_cast<double>(in));
  std::vector<float> w(in * out);
  for (auto& v : w) v = static_cast<float>(rng.uniform(-bound, bound));
  params[prefix + ".weight"] = Tensor({in, out}, std::move(w), true);
  params[prefix + ".bias"] = Tensor::zeros({out}, true);
}

void init_encoder(NamedTensors& params, const std::string& prefix, std::size_t in_channels, std::uint64_t seed) {
  std::size_t in = in_channels;
  for (int i = 0; i < 4; ++i) {
    init_conv(params, prefix + ".conv" + std::to_string(i + 1), kWidths[i], in, 3, seed);
    in = kWidths[i];
  }
}

void init_fusion(NamedTensors& params, std::size_t channels, std::uint64_t seed) {
  init_dense(params, "fusion.mlp1", channels, kFusionHidden, seed);
  init_dense(params, "fusion.mlp2", kFusionHidden, channels, seed);
  init_conv(params, "fusion.spatial", 1, channels, 1, seed, 0.1);
  // Spatial logits start near 1 so the gate opens as plain channel attention.
  params["fusion.spatial.bias"] = Tensor::full({1}, 1.0f, true);
}

const Tensor& lookup(const NamedTensors& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw InvalidArgument("model has no parameter '" + name + "'");
  return it->second;
}

Tensor conv(const NamedTensors& params, const std::string& prefix, const Tensor& x, std::size_t padding) {
  return ops::conv2d(x, lookup(params, prefix + ".weight"), lookup(params, prefix + ".bias"), 1, padding);
}

// Four conv-relu stages; the first two also halve the resolution.
Tensor run_encoder(const NamedTensors& params, const std::string& prefix, const Tensor& x) {
  if (x.rank() != 4) throw InvalidShape("encoder expects [N,C,H,W], got " + to_string(x.shape()));
  const std::size_t expected = lookup(params, prefix + ".conv1.weight").dim(1);
  if (x.dim(1) != expected) {
    throw InvalidShape("encoder '" + prefix + "' expects " + std::to_string(expected) + " channels, got " +
                       std::to_string(x.dim(1)));
  }
  if (x.dim(2) % 4 != 0 || x.dim(3) % 4 != 0) throw InvalidShape("encoder input H and W must be divisible by 4");
  Tensor h = x;
  for (int i = 0; i < 4; ++i) {
    h = ops::relu(conv(params, prefix + ".conv" + std::to_string(i + 1), h, 1));
    if (i < 2) h = ops::max_pool2d(h, 2);
  }
  return h;
}

bool is_teacher_name(const std::string& name) { return name.starts_with("teacher."); }

}  // namespace

Tensor normalize_input(const Tensor& x) {
  std::vector<float> out(x.data().begin(), x.data().end());
  for (auto& v : out) v = 2.0f * v - 1.0f;
  return Tensor(x.shape(), std::move(out));
}

template <typename T>
FusionOutput<T> attend(const BasicTensor<T>& x, const FusionParams<T>& p) {
  if (x.rank() != 4) throw InvalidShape("attention fusion expects [N,C,h,w], got " + to_string(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1);
  if (p.mlp1_weight.dim(0) != c) throw InvalidShape("fusion MLP width does not match input channels");
  auto mlp = [&](const BasicTensor<T>& v) {
    return ops::dense(ops::relu(ops::dense(v, p.mlp1_weight, p.mlp1_bias)), p.mlp2_weight, p.mlp2_bias);
  };
  const auto channel = ops::add(mlp(ops::mean(x, {2, 3})), mlp(ops::max(x, {2, 3})));
  const auto channel4 = ops::reshape(channel, Shape{n, c, 1, 1});
  const auto spatial = ops::conv2d(x, p.spatial_weight, p.spatial_bias, 1, 0);
  const auto attention = ops::sigmoid(ops::mul(channel4, spatial));
  return {attention, ops::mul(x, attention)};
}

template <typename T>
FusionOutput<T> fuse(const BasicTensor<T>& z_he, const BasicTensor<T>& z_aux, const FusionParams<T>& p) {
  if (z_he.shape() != z_aux.shape()) {
    throw InvalidShape("fuse: " + to_string(z_he.shape()) + " vs " + to_string(z_aux.shape()));
  }
  return attend(ops::concat(std::vector<BasicTensor<T>>{z_he, z_aux}, 1), p);
}

template FusionOutput<float> attend(const Tensor&, const FusionParams<float>&);
template FusionOutput<double> attend(const Tensor64&, const FusionParams<double>&);
template FusionOutput<float> fuse(const Tensor&, const Tensor&, const FusionParams<float>&);
template FusionOutput<double> fuse(const Tensor64&, const Tensor64&, const FusionParams<double>&);

ModelGraph::ModelGraph(Variant variant, ModelOptions options, Uninitialized)
    : variant_(variant), flags_(flags_of(variant)), options_(options) {
  if (variant == Variant::ihc_unimodal) {
    throw InvalidArgument("the IHC-unimodal baseline is the TeacherNet, not a ModelGraph variant");
  }
  if ((flags_.nuclei_aux || flags_.membrane_aux) && !flags_.hallucination) {
    throw InconsistentVariant("auxiliary decoders read the hallucinated latent and need hallucination on");
  }
}

ModelGraph::ModelGraph(Variant variant, std::uint64_t seed, ModelOptions options)
    : ModelGraph(variant, options, Uninitialized{}) {
  init_encoder(params_, "student", variant == Variant::image_concat ? 6 : 3, seed);
  if (flags_.hallucination) {
    init_conv(params_, "hallucinator.conv1", kLatentChannels, kLatentChannels, 3, seed);
    // Zero final conv: the residual block starts as the identity map.
    params_["hallucinator.conv2.weight"] = Tensor::zeros({kLatentChannels, kLatentChannels, 3, 3}, true);
    params_["hallucinator.conv2.bias"] = Tensor::zeros({kLatentChannels}, true);
  }
  if (variant == Variant::feature_concat) init_encoder(params_, "ihc_encoder", 3, seed);
  if (flags_.nuclei_aux) init_conv(params_, "decoder.nuclei", 1, kLatentChannels, 1, seed);
  if (flags_.membrane_aux) init_conv(params_, "decoder.membrane", 1, kLatentChannels, 1, seed);
  if (flags_.attention) init_fusion(params_, classifier_width(), seed);
  init_dense(params_, "classifier", classifier_width(), kClasses, seed);
  if (needs_teacher(variant) && options_.joint_teacher) {
    const TeacherNet teacher(seed);
    for (const auto& [name, t] : teacher.state()) params_[name] = t;
    teacher_loaded_ = true;
  }
}

ModelGraph ModelGraph::from_checkpoint(Variant variant, const NamedTensors& tensors, ModelOptions options) {
  ModelGraph g(variant, options, Uninitialized{});
  for (const auto& [name, t] : tensors) {
    Tensor copy = t.detach();
    copy.set_requires_grad(!is_teacher_name(name) || options.joint_teacher);
    g.params_[name] = copy;
  }
  g.teacher_loaded_ = g.params_.contains("teacher.conv1.weight");
  // Fail early on anything the inference path needs.
  (void)g.param("student.conv1.weight");
  (void)g.param("classifier.weight");
  if (g.flags_.hallucination) (void)g.param("hallucinator.conv2.weight");
  if (g.flags_.attention) (void)g.param("fusion.spatial.weight");
  if (variant == Variant::feature_concat) (void)g.param("ihc_encoder.conv1.weight");
  return g;
}

void ModelGraph::load_teacher(const NamedTensors& teacher_checkpoint) {
  bool any = false;
  for (const auto& [name, t] : teacher_checkpoint) {
    if (!is_teacher_name(name)) continue;
    Tensor copy = t.detach();
    copy.set_requires_grad(options_.joint_teacher);
    params_[name] = copy;
    any = true;
  }
  if (!any || !params_.contains("teacher.conv4.weight")) {
    throw NotPretrained("checkpoint holds no teacher encoder parameters");
  }
  teacher_loaded_ = true;
}

const Tensor& ModelGraph::param(const std::string& name) const { return lookup(params_, name); }

std::size_t ModelGraph::classifier_width() const {
  return (flags_.hallucination || variant_ == Variant::feature_concat) ? 2 * kLatentChannels : kLatentChannels;
}

std::vector<Parameter> ModelGraph::trainable_parameters() const {
  std::vector<Parameter> out;
  for (const auto& [name, t] : params_) {
    if (is_teacher_name(name) && !options_.joint_teacher) continue;
    out.push_back({name, t});
  }
  return out;
}

NamedTensors ModelGraph::inference_state() const { return strip_prefixes(params_, {"teacher.", "decoder."}); }

Tensor ModelGraph::encode_student(const Tensor& he) const { return run_encoder(params_, "student", he); }

Tensor ModelGraph::encode_teacher(const Tensor& ihc) const {
  if (!teacher_loaded_) throw NotPretrained("teacher encoder has not been loaded from a pretraining checkpoint");
  return run_encoder(params_, "teacher", ihc);
}

Tensor ModelGraph::hallucinate(const Tensor& z_he) const {
  if (z_he.rank() != 4 || z_he.dim(1) != kLatentChannels) {
    throw InvalidShape("hallucinator expects [N,64,h,w], got " + to_string(z_he.shape()));
  }
  const Tensor h = ops::relu(conv(params_, "hallucinator.conv1", z_he, 1));
  return ops::add(z_he, conv(params_, "hallucinator.conv2", h, 1));
}

Tensor ModelGraph::decode_nuclei(const Tensor& z) const { return ops::relu(conv(params_, "decoder.nuclei", z, 0)); }

Tensor ModelGraph::decode_membrane(const Tensor& z) const {
  return ops::sigmoid(conv(params_, "decoder.membrane", z, 0));
}

FusionParams<float> ModelGraph::fusion_params() const {
  return {param("fusion.mlp1.weight"), param("fusion.mlp1.bias"),     param("fusion.mlp2.weight"),
          param("fusion.mlp2.bias"),   param("fusion.spatial.weight"), param("fusion.spatial.bias")};
}

Tensor ModelGraph::classify(const Tensor& fused) const {
  return ops::dense(ops::global_avg_pool(fused), param("classifier.weight"), param("classifier.bias"));
}

Tensor ModelGraph::head_logits(const Tensor& z_he, const std::optional<Tensor>& z_aux) const {
  Tensor x = z_aux ? ops::concat(std::vector<Tensor>{z_he, *z_aux}, 1) : z_he;
  if (flags_.attention) x = attend(x, fusion_params()).fused;
  return classify(x);
}

TrainOutputs ModelGraph::forward_train(const Tensor& he, const Tensor& ihc) const {
  const Tensor he_in = normalize_input(he);
  if (variant_ == Variant::image_concat) {
    const Tensor both = ops::concat(std::vector<Tensor>{he_in, normalize_input(ihc)}, 1);
    return TrainOutputs{classify(encode_student(both)), {}, {}, {}, {}, {}};
  }
  const Tensor z_he = encode_student(he_in);
  if (variant_ == Variant::feature_concat) {
    const Tensor z_ihc = run_encoder(params_, "ihc_encoder", normalize_input(ihc));
    return TrainOutputs{head_logits(z_he, z_ihc), {}, {}, {}, {}, {}};
  }
  TrainOutputs out{Tensor(), {}, {}, {}, {}, {}};
  std::optional<Tensor> aux;
  if (flags_.hallucination) {
    if (!teacher_loaded_) throw NotPretrained("distillation requires a pretrained teacher checkpoint");
    const Tensor z_teacher = encode_teacher(normalize_input(ihc));
    out.z_real = z_teacher.detach();
    if (options_.joint_teacher) {
      out.teacher_logits = ops::dense(ops::global_avg_pool(z_teacher), param("teacher.head.weight"),
                                      param("teacher.head.bias"));
    }
    out.z_hat = hallucinate(z_he);
    aux = out.z_hat;
  }
  out.logits = head_logits(z_he, aux);
  if (flags_.nuclei_aux) out.nuclei = decode_nuclei(*out.z_hat);
  if (flags_.membrane_aux) out.membrane = decode_membrane(*out.z_hat);
  return out;
}

Tensor ModelGraph::forward_infer(const Tensor& he, const std::optional<Tensor>& ihc) const {
  const Tensor he_in = normalize_input(he);
  if (variant_ == Variant::image_concat || variant_ == Variant::feature_concat) {
    if (!ihc) throw InvalidArgument(to_string(variant_) + " baseline needs the IHC patch at inference");
    return forward_train(he, *ihc).logits;
  }
  const Tensor z_he = encode_student(he_in);
  std::optional<Tensor> aux;
  if (flags_.hallucination) aux = hallucinate(z_he);
  return head_logits(z_he, aux);
}

TeacherNet::TeacherNet(std::uint64_t seed) {
  init_encoder(params_, "teacher", 3, seed);
  init_dense(params_, "teacher.head", kLatentChannels, kClasses, seed);
}

TeacherNet TeacherNet::from_checkpoint(const NamedTensors& tensors) {
  TeacherNet net;
  for (const auto& [name, t] : tensors) {
    if (!is_teacher_name(name)) continue;
    Tensor copy = t.detach();
    copy.set_requires_grad(true);
    net.params_[name] = copy;
  }
  (void)lookup(net.params_, "teacher.conv1.weight");
  (void)lookup(net.params_, "teacher.head.weight");
  return net;
}

Tensor TeacherNet::encode(const Tensor& ihc) const { return run_encoder(params_, "teacher", normalize_input(ihc)); }

Tensor TeacherNet::forward(const Tensor& ihc) const {
  return ops::dense(ops::global_avg_pool(encode(ihc)), lookup(params_, "teacher.head.weight"),
                    lookup(params_, "teacher.head.bias"));
}

std::vector<Parameter> TeacherNet::parameters() const {
  std::vector<Parameter> out;
  for (const auto& [name, t] : params_) out.push_back({name, t});
  return out;
}

}  // namespace model
}  // namespace lgd
