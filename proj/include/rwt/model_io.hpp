#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "rwt/regressor.hpp"

namespace rwt {

inline constexpr int kModelFormatVersion = 1;

// JSON document {"format":"rwt-model","version":1,"kind":...} holding every
// parameter; doubles are written in shortest round-trip form, so a reloaded
// model predicts bit-identically. Throws Error(kInvalidParam) for a model
// kind without a serializer.
std::string model_to_json(const Regressor& model);

// Throws Error(kParseError) on malformed JSON and Error(kSchemaMismatch) on a
// wrong format tag, version, kind or shape.
std::unique_ptr<Regressor> model_from_json(std::string_view text);

// Throws Error(kIoError) when the file cannot be written.
void save_model(const std::string& path, const Regressor& model);
// Throws Error(kFileNotFound) when the file cannot be opened.
std::unique_ptr<Regressor> load_model(const std::string& path);

}  // namespace rwt
