#include "pceve/external.hpp"

#include <openssl/evp.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <map>
#include <thread>

#include <httplib.h>

extern char** environ;

namespace pceve {

namespace wire {

nlohmann::json hello_request() { return {{"type", "hello"}}; }

nlohmann::json predict_request(std::uint64_t id, const RasterImage& img) {
  return {{"type", "predict"}, {"id", id}, {"format", "png"}, {"data", base64_encode(encode_png(img))}};
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kMalformedResponse, "base64 length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::kMalformedResponse, "invalid base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

}  // namespace wire

namespace {

nlohmann::json parse_message(const std::string& line) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("unparsable response: ") + e.what());
  }
}

class StdioTransport final : public Transport {
 public:
  explicit StdioTransport(const std::string& command) {
    // A dead server must surface as EPIPE, not kill the client.
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw Error(ErrorCode::kEvaluatorUnavailable, "pipe() failed");
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) {
      posix_spawn_file_actions_addclose(&actions, fd);
    }
    std::string sh = "/bin/sh";
    std::string flag = "-c";
    std::string cmd = command;
    char* argv[] = {sh.data(), flag.data(), cmd.data(), nullptr};
    const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      throw Error(ErrorCode::kEvaluatorUnavailable, "cannot spawn '" + command + "'");
    }
    in_ = ::fdopen(to_child[1], "w");
    out_ = ::fdopen(from_child[0], "r");
  }

  ~StdioTransport() override {
    if (in_ != nullptr) std::fclose(in_);
    if (out_ != nullptr) std::fclose(out_);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }

  nlohmann::json call(const nlohmann::json& request) override {
    write_line(request.dump());
    return parse_message(read_line());
  }

  std::vector<nlohmann::json> call_many(const std::vector<nlohmann::json>& requests,
                                        unsigned window) override {
    window = std::max(1U, window);
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t in_flight = 0;
    bool aborted = false;
    std::exception_ptr writer_error;

    std::thread writer([&] {
      try {
        for (const auto& request : requests) {
          {
            std::unique_lock lock(mutex);
            cv.wait(lock, [&] { return in_flight < window || aborted; });
            if (aborted) return;
            ++in_flight;
          }
          write_line(request.dump());
        }
      } catch (...) {
        writer_error = std::current_exception();
      }
    });

    std::vector<nlohmann::json> responses;
    responses.reserve(requests.size());
    std::exception_ptr reader_error;
    try {
      while (responses.size() < requests.size()) {
        responses.push_back(parse_message(read_line()));
        std::lock_guard lock(mutex);
        --in_flight;
        cv.notify_one();
      }
    } catch (...) {
      reader_error = std::current_exception();
      std::lock_guard lock(mutex);
      aborted = true;
      cv.notify_one();
    }
    writer.join();
    if (writer_error) std::rethrow_exception(writer_error);
    if (reader_error) std::rethrow_exception(reader_error);
    return responses;
  }

 private:
  void write_line(const std::string& line) {
    if (std::fputs(line.c_str(), in_) == EOF || std::fputc('\n', in_) == EOF ||
        std::fflush(in_) == EOF) {
      throw Error(ErrorCode::kEvaluatorUnavailable, "model server closed its input");
    }
  }

  std::string read_line() {
    std::string line;
    int ch;
    while ((ch = std::fgetc(out_)) != EOF && ch != '\n') line.push_back(static_cast<char>(ch));
    if (ch == EOF && line.empty()) {
      throw Error(ErrorCode::kEvaluatorUnavailable, "model server exited");
    }
    return line;
  }

  pid_t pid_ = -1;
  std::FILE* in_ = nullptr;
  std::FILE* out_ = nullptr;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string url) : url_(std::move(url)) {
    while (!url_.empty() && url_.back() == '/') url_.pop_back();
  }

  nlohmann::json call(const nlohmann::json& request) override {
    httplib::Client client(url_);
    return post(client, request);
  }

  std::vector<nlohmann::json> call_many(const std::vector<nlohmann::json>& requests,
                                        unsigned window) override {
    const std::size_t workers = std::clamp<std::size_t>(window, 1, requests.size());
    std::vector<nlohmann::json> responses(requests.size());
    std::vector<std::exception_ptr> errors(workers);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          httplib::Client client(url_);
          client.set_keep_alive(true);
          for (std::size_t i = next++; i < requests.size(); i = next++) {
            responses[i] = post(client, requests[i]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
          next = requests.size();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return responses;
  }

 private:
  nlohmann::json post(httplib::Client& client, const nlohmann::json& request) {
    auto res = client.Post("/predict", request.dump() + "\n", "application/json");
    if (!res) {
      throw Error(ErrorCode::kEvaluatorUnavailable,
                  "POST " + url_ + "/predict failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kEvaluatorUnavailable, "HTTP status " + std::to_string(res->status));
    }
    return parse_message(res->body);
  }

  std::string url_;
};

LogitVector parse_logits(const nlohmann::json& response) {
  const auto& values = response.at("values");
  if (!values.is_array()) throw Error(ErrorCode::kMalformedResponse, "'values' is not an array");
  LogitVector out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) throw Error(ErrorCode::kMalformedResponse, "non-numeric logit");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::unique_ptr<Transport> make_stdio_transport(const std::string& command) {
  return std::make_unique<StdioTransport>(command);
}

std::unique_ptr<Transport> make_http_transport(const std::string& url) {
  return std::make_unique<HttpTransport>(url);
}

ExternalValueFunction::ExternalValueFunction(std::unique_ptr<Transport> transport,
                                             std::vector<std::string> class_names,
                                             unsigned pool_size)
    : ValueFunction(std::move(class_names)),
      transport_(std::move(transport)),
      pool_size_(std::max(1U, pool_size)) {}

LogitVector ExternalValueFunction::do_evaluate(const RasterImage& img) const {
  return do_evaluate_batch(std::span(&img, 1)).front();
}

std::vector<LogitVector> ExternalValueFunction::do_evaluate_batch(
    std::span<const RasterImage> imgs) const {
  std::lock_guard lock(mutex_);
  const std::uint64_t first_id = next_id_;
  next_id_ += imgs.size();

  std::vector<nlohmann::json> requests;
  requests.reserve(imgs.size());
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    requests.push_back(wire::predict_request(first_id + i, imgs[i]));
  }
  const auto responses = transport_->call_many(requests, pool_size_);

  std::vector<LogitVector> out(imgs.size());
  std::vector<bool> seen(imgs.size(), false);
  for (const auto& response : responses) {
    try {
      const std::uint64_t id = response.at("id").get<std::uint64_t>();
      if (id < first_id || id - first_id >= imgs.size() || seen[id - first_id]) {
        throw Error(ErrorCode::kMalformedResponse, "unexpected response id " + std::to_string(id));
      }
      const std::size_t index = id - first_id;
      seen[index] = true;
      const auto type = response.at("type").get<std::string>();
      if (type == "error") {
        throw BatchItemError(ErrorCode::kEvaluatorUnavailable, index,
                             "server error: " + response.value("message", std::string{}));
      }
      if (type != "logits") {
        throw Error(ErrorCode::kMalformedResponse, "unexpected response type '" + type + "'");
      }
      out[index] = parse_logits(response);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kMalformedResponse, e.what());
    }
  }
  return out;
}

std::unique_ptr<ExternalValueFunction> connect_external(const std::string& endpoint,
                                                        unsigned expected_classes,
                                                        unsigned pool_size) {
  std::unique_ptr<Transport> transport;
  if (endpoint.rfind("exec:", 0) == 0) {
    transport = make_stdio_transport(endpoint.substr(5));
  } else if (endpoint.rfind("http://", 0) == 0) {
    transport = make_http_transport(endpoint);
  } else if (endpoint.rfind("http:", 0) == 0) {
    transport = make_http_transport(endpoint.substr(5));
  } else {
    throw Error(ErrorCode::kUsage, "unknown endpoint '" + endpoint + "'");
  }

  nlohmann::json hello;
  try {
    hello = transport->call(wire::hello_request());
  } catch (const Error& e) {
    throw Error(ErrorCode::kHandshakeFailed, e.what());
  }
  unsigned num_classes = 0;
  std::vector<std::string> names;
  try {
    if (hello.at("type").get<std::string>() != "hello") {
      throw Error(ErrorCode::kHandshakeFailed, "server answered hello with " + hello.dump());
    }
    num_classes = hello.at("num_classes").get<unsigned>();
    names = hello.at("class_names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kHandshakeFailed, e.what());
  }
  if (names.size() != num_classes) {
    throw Error(ErrorCode::kHandshakeFailed, "class_names length disagrees with num_classes");
  }
  if (expected_classes != 0 && num_classes != expected_classes) {
    throw Error(ErrorCode::kClassCountMismatch,
                "server reports " + std::to_string(num_classes) + " classes, expected " +
                    std::to_string(expected_classes));
  }
  return std::make_unique<ExternalValueFunction>(std::move(transport), std::move(names), pool_size);
}

}  // namespace pceve
