#pragma once
// JSON documents: {"kind", "format_version": "1", "payload"}.  Ring elements and fractions
// are decimal strings ("-12", "7/30"); keys come out sorted.

#include "qform/lmonoid.hpp"

#include "json.hpp"

#include <string>

namespace qform::io {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1";

// Parse failure carrying a JSON pointer to the offending value.
class DocError : public InvalidInput {
public:
    DocError(std::string path, const std::string& what) : InvalidInput(what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

json to_json(const Int& x);
json to_json(const Rat& x);
json to_json(const Matrix& m);
json to_json(const QuadraticForm& v);
json to_json(const QuasiFormation& x);
json to_json(const BoundaryIso& f);
json to_json(const LinkingForm& g);
json to_json(const ElementaryCertificate& c);

json document(const std::string& kind, json payload);

// Readers; `at` is the JSON pointer of `j` inside the enclosing document.
Int int_from(const json& j, const std::string& at);
Rat rat_from(const json& j, const std::string& at);
Ring ring_from(const json& j, const std::string& at);
Matrix matrix_from(const json& j, const Ring& r, const std::string& at, std::size_t rows = SIZE_MAX,
                   std::size_t cols = SIZE_MAX);
QuadraticForm form_from(const json& j, const std::string& at);
QuasiFormation quasi_from(const json& j, const std::string& at);
BoundaryIso boundary_iso_from(const json& j, const std::string& at);
LinkingForm linking_from(const json& j, const std::string& at);

// Checks kind and version; returns the payload.
const json& payload_of(const json& doc, const std::string& kind);
std::string kind_of(const json& doc);

}  // namespace qform::io
