#pragma once

#include <string>

namespace lgd {

// Ablation rows A-F plus the comparison baselines.
enum class Variant { A, B, C, D, E, F, ihc_unimodal, image_concat, feature_concat };

struct VariantFlags {
  bool hallucination = false;
  bool attention = false;
  bool nuclei_aux = false;
  bool membrane_aux = false;

  bool operator==(const VariantFlags&) const = default;
};

// A: none; B: hallucination with plain concat; C: + attention;
// D: C + nuclei; E: C + membrane; F: all. Baselines carry no LGD flags
// except feature_concat, which uses the attention block.
VariantFlags flags_of(Variant v);

// Variants whose training consumes frozen teacher features.
bool needs_teacher(Variant v);

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

}  // namespace lgd
