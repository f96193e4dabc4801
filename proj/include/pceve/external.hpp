#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pceve/value_function.hpp"

namespace pceve {

// Moves newline-delimited JSON messages to a model server. call_many keeps at
// most `window` requests in flight and returns responses in arrival order.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual nlohmann::json call(const nlohmann::json& request) = 0;
  virtual std::vector<nlohmann::json> call_many(const std::vector<nlohmann::json>& requests,
                                                unsigned window) = 0;
};

// Spawns `/bin/sh -c command` and talks over its stdin/stdout.
std::unique_ptr<Transport> make_stdio_transport(const std::string& command);
// POSTs each message to <url>/predict.
std::unique_ptr<Transport> make_http_transport(const std::string& url);

namespace wire {

nlohmann::json hello_request();
nlohmann::json predict_request(std::uint64_t id, const RasterImage& img);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace wire

// ValueFunction backed by a remote model. Batches are pipelined over the
// transport and matched back to images by request id.
class ExternalValueFunction final : public ValueFunction {
 public:
  ExternalValueFunction(std::unique_ptr<Transport> transport,
                        std::vector<std::string> class_names, unsigned pool_size);

  unsigned pool_size() const noexcept { return pool_size_; }

 protected:
  LogitVector do_evaluate(const RasterImage& img) const override;
  std::vector<LogitVector> do_evaluate_batch(std::span<const RasterImage> imgs) const override;

 private:
  std::unique_ptr<Transport> transport_;
  unsigned pool_size_;
  mutable std::mutex mutex_;
  mutable std::uint64_t next_id_ = 1;
};

// Endpoint forms: "exec:<command line>", "http:<url>" or a bare http:// URL.
// expected_classes == 0 accepts whatever the server advertises.
std::unique_ptr<ExternalValueFunction> connect_external(const std::string& endpoint,
                                                        unsigned expected_classes,
                                                        unsigned pool_size = 8);

}  // namespace pceve
