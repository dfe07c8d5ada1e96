#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "scylla/error.hpp"
#include "scylla/lexicon.hpp"

namespace scylla {

struct TranslationRequest {
  std::string source_text;
  Language source_language;
  Language target_language;
  int n_best = 1;
  bool copy_unknown = true;
};

struct TranslationHypothesis {
  std::string text;
  int rank = 1;
  std::optional<double> score;
  friend bool operator==(const TranslationHypothesis&, const TranslationHypothesis&) = default;
};

struct DictionaryEntry {
  std::string headword;
  Language language;  // language of the headword
  std::vector<std::string> translations;
  std::vector<std::string> synonyms;
  std::string lemma;  // citation form of the headword when it is inflected, else empty
  friend bool operator==(const DictionaryEntry&, const DictionaryEntry&) = default;
};

// Markup a live engine leaves untranslated, e.g. <span translate="no">...</span>.
struct NoTranslateMarkup {
  std::string open;
  std::string close;

  std::string wrap(std::string_view text) const;
  std::string strip(std::string_view text) const;
};

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  // Between 1 and request.n_best hypotheses with ranks 1..k.
  virtual std::vector<TranslationHypothesis> translate(const TranslationRequest& request) const = 0;
  virtual std::optional<NoTranslateMarkup> no_translate() const { return std::nullopt; }
};

class DictionaryProvider {
 public:
  virtual ~DictionaryProvider() = default;
  virtual std::optional<DictionaryEntry> lookup(std::string_view word, std::string_view source_language,
                                                std::string_view target_language) const = 0;
};

// Table-driven NMT stand-in. Each row: src lang, tgt lang, request text,
// then the ranked hypotheses, tab separated. Request text is matched after
// whitespace normalization.
class MockTranslationProvider : public TranslationProvider {
 public:
  MockTranslationProvider() = default;
  static MockTranslationProvider parse(std::string_view text, const std::string& source = "<mock>");
  static MockTranslationProvider load(const std::filesystem::path& path);

  void add(std::string_view source_language, std::string_view target_language, std::string_view text,
           std::vector<std::string> hypotheses);
  std::vector<TranslationHypothesis> translate(const TranslationRequest& request) const override;

  std::size_t size() const { return table_.size(); }

 private:
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::vector<std::string>> table_;
  std::map<std::pair<std::string, std::string>, int> pairs_;
};

// Headword-keyed records: src lang, headword, tgt lang, translations (|),
// optional synonyms (|), optional lemma. Headwords match case-insensitively.
class FileDictionary : public DictionaryProvider {
 public:
  FileDictionary() = default;
  static FileDictionary parse(std::string_view text, const std::string& source = "<dictionary>");
  static FileDictionary load(const std::filesystem::path& path);

  void add(std::string_view target_language, DictionaryEntry entry);
  std::optional<DictionaryEntry> lookup(std::string_view word, std::string_view source_language,
                                        std::string_view target_language) const override;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::tuple<std::string, std::string, std::string>, DictionaryEntry> entries_;
};

// ---------------------------------------------------------------------------
// Retry and caching decorators

struct RetryPolicy {
  int max_attempts = 3;  // including the first try
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{5000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

// Calls fn, retrying on TransportError only.
template <class Fn>
auto with_retry(const RetryPolicy& policy, const Sleeper& sleep, Fn&& fn) -> decltype(fn()) {
  auto delay = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError&) {
      if (attempt >= policy.max_attempts) throw;
    }
    if (sleep) sleep(delay);
    auto next = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier));
    delay = std::min(next, policy.max_backoff);
  }
}

class RetryingTranslationProvider : public TranslationProvider {
 public:
  RetryingTranslationProvider(std::shared_ptr<const TranslationProvider> inner, RetryPolicy policy,
                              Sleeper sleeper = real_sleeper());
  std::vector<TranslationHypothesis> translate(const TranslationRequest& request) const override;
  std::optional<NoTranslateMarkup> no_translate() const override { return inner_->no_translate(); }

 private:
  std::shared_ptr<const TranslationProvider> inner_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

class RetryingDictionary : public DictionaryProvider {
 public:
  RetryingDictionary(std::shared_ptr<const DictionaryProvider> inner, RetryPolicy policy,
                     Sleeper sleeper = real_sleeper());
  std::optional<DictionaryEntry> lookup(std::string_view word, std::string_view source_language,
                                        std::string_view target_language) const override;

 private:
  std::shared_ptr<const DictionaryProvider> inner_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

// Concurrent reads, serialized writes. Errors are not cached.
class CachingTranslationProvider : public TranslationProvider {
 public:
  explicit CachingTranslationProvider(std::shared_ptr<const TranslationProvider> inner);
  std::vector<TranslationHypothesis> translate(const TranslationRequest& request) const override;
  std::optional<NoTranslateMarkup> no_translate() const override { return inner_->no_translate(); }
  std::size_t cached() const;

 private:
  std::shared_ptr<const TranslationProvider> inner_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::vector<TranslationHypothesis>> cache_;
};

class CachingDictionary : public DictionaryProvider {
 public:
  explicit CachingDictionary(std::shared_ptr<const DictionaryProvider> inner);
  std::optional<DictionaryEntry> lookup(std::string_view word, std::string_view source_language,
                                        std::string_view target_language) const override;
  std::size_t cached() const;

 private:
  std::shared_ptr<const DictionaryProvider> inner_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::optional<DictionaryEntry>> cache_;
};

// ---------------------------------------------------------------------------
// HTTP providers

struct HttpConfig {
  // {text} {source} {target} {n} are percent-encoded and substituted.
  std::string endpoint;
  std::string method = "GET";  // GET or POST
  std::string body_template;   // POST body, same placeholders, JSON-escaped
  std::string auth_env;        // environment variable holding the credential
  std::string auth_header = "Authorization";
  std::string auth_prefix;
  std::map<std::string, std::string> headers;
  std::chrono::milliseconds timeout{10000};

  // Translation responses. `hypotheses_path` names an array whose items are
  // strings or objects carrying `text_field`.
  std::string hypotheses_path = "translations";
  std::string text_field = "text";
  std::string score_field;

  // Dictionary responses. A missing `entry_path` or an empty translation
  // list means "no entry".
  std::string entry_path;
  std::string translations_path = "translations";
  std::string synonyms_path = "synonyms";
  std::string lemma_path = "lemma";
  std::vector<int> not_found_status{404};

  std::optional<NoTranslateMarkup> no_translate;
};

// String at a dot-separated path ("data.items.0.text") of a JSON document.
std::optional<std::string> json_path_string(std::string_view json_text, std::string_view path);

std::string percent_encode(std::string_view s);
std::string expand_template(std::string_view tmpl, const std::map<std::string, std::string>& values,
                            bool url_encode);

class HttpTranslationProvider : public TranslationProvider {
 public:
  explicit HttpTranslationProvider(HttpConfig config);
  std::vector<TranslationHypothesis> translate(const TranslationRequest& request) const override;
  std::optional<NoTranslateMarkup> no_translate() const override { return config_.no_translate; }

 private:
  HttpConfig config_;
};

class HttpDictionary : public DictionaryProvider {
 public:
  explicit HttpDictionary(HttpConfig config);
  std::optional<DictionaryEntry> lookup(std::string_view word, std::string_view source_language,
                                        std::string_view target_language) const override;

 private:
  HttpConfig config_;
};

// ---------------------------------------------------------------------------
// Configuration files
//
//   {"kind": "mock", "table": "mock_nbest.tsv"}
//   {"kind": "file", "path": "dictionary.tsv"}
//   {"kind": "http", "endpoint": "...", "retry": {...}, "cache": true, ...}
//
// Relative paths resolve against the config file's directory.

struct ProviderOptions {
  Sleeper sleeper = real_sleeper();
};

std::shared_ptr<const TranslationProvider> load_translation_provider(const std::filesystem::path& path,
                                                                     const ProviderOptions& options = {});
std::shared_ptr<const DictionaryProvider> load_dictionary_provider(const std::filesystem::path& path,
                                                                   const ProviderOptions& options = {});

HttpConfig parse_http_config(std::string_view json_text, const std::string& source = "<config>");
RetryPolicy parse_retry_policy(std::string_view json_text);

}  // namespace scylla
