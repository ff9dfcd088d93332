// HTTP carcinogenicity predictor client. Request: POST with JSON body
// {"smiles": [..]}; response: {"scores": [..]}. An unreachable or malformed
// backend raises ToolError, which is distinct from any score.
#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "larc/toolbox/tools.hpp"

namespace larc::toolbox {

struct RemoteEndpoint {
  std::string host;
  int port = 80;
  std::string path = "/";

  // Accepts "http://host:port/path"; https is out of scope for this client.
  static RemoteEndpoint parse(const std::string& url) {
    RemoteEndpoint ep;
    std::string rest = url;
    constexpr std::string_view kScheme = "http://";
    if (rest.rfind(kScheme, 0) == 0) rest = rest.substr(kScheme.size());
    const auto slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    ep.path = slash == std::string::npos ? "/" : rest.substr(slash);
    const auto colon = authority.find(':');
    if (colon == std::string::npos) {
      ep.host = authority;
    } else {
      ep.host = authority.substr(0, colon);
      ep.port = std::stoi(authority.substr(colon + 1));
    }
    if (ep.host.empty()) throw ToolError("bad predictor URL: " + url);
    return ep;
  }
};

class RemoteCarcinogenBackend : public CarcinogenBackend {
public:
  explicit RemoteCarcinogenBackend(const std::string& url,
                                   std::chrono::seconds timeout = std::chrono::seconds(30))
      : endpoint_(RemoteEndpoint::parse(url)), timeout_(timeout) {}

  std::vector<double> predict(
      const std::vector<std::string>& canonical_smiles) const override {
    httplib::Client client(endpoint_.host, endpoint_.port);
    client.set_connection_timeout(timeout_.count(), 0);
    client.set_read_timeout(timeout_.count(), 0);

    nlohmann::json body;
    body["smiles"] = canonical_smiles;
    auto res = client.Post(endpoint_.path, body.dump(), "application/json");
    if (!res)
      throw ToolError("carcinogenicity predictor unreachable: " +
                      httplib::to_string(res.error()));
    if (res->status != 200)
      throw ToolError("carcinogenicity predictor returned HTTP " +
                      std::to_string(res->status));
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ToolError(std::string("bad predictor response: ") + e.what());
    }
    if (!parsed.contains("scores") || !parsed["scores"].is_array() ||
        parsed["scores"].size() != canonical_smiles.size())
      throw ToolError("predictor response missing aligned scores array");
    std::vector<double> out;
    out.reserve(canonical_smiles.size());
    for (const auto& v : parsed["scores"]) {
      if (!v.is_number()) throw ToolError("non-numeric predictor score");
      out.push_back(v.get<double>());
    }
    return out;
  }

private:
  RemoteEndpoint endpoint_;
  std::chrono::seconds timeout_;
};

}  // namespace larc::toolbox
