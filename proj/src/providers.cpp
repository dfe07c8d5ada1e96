#include "scylla/providers.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "scylla/text.hpp"

namespace scylla {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines = text::split(text, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

std::vector<std::string> split_bar(std::string_view field) {
  std::vector<std::string> out;
  for (auto& part : text::split(field, '|')) {
    auto t = std::string(text::trim(part));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string NoTranslateMarkup::wrap(std::string_view text) const {
  return open + std::string(text) + close;
}

std::string NoTranslateMarkup::strip(std::string_view text) const {
  std::string out(text);
  for (const std::string* marker : {&open, &close}) {
    if (marker->empty()) continue;
    std::size_t pos = 0;
    while ((pos = out.find(*marker, pos)) != std::string::npos) out.erase(pos, marker->size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mock NMT

MockTranslationProvider MockTranslationProvider::parse(std::string_view text, const std::string& source) {
  MockTranslationProvider mock;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() < 4) throw ParseError(source, i + 1, "expected src, tgt, request and at least one hypothesis");
    std::vector<std::string> hyps;
    for (std::size_t f = 3; f < fields.size(); ++f) {
      if (!text::trim(fields[f]).empty()) hyps.push_back(fields[f]);
    }
    if (hyps.empty()) throw ParseError(source, i + 1, "no hypotheses");
    mock.add(fields[0], fields[1], fields[2], std::move(hyps));
  }
  return mock;
}

MockTranslationProvider MockTranslationProvider::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void MockTranslationProvider::add(std::string_view source_language, std::string_view target_language,
                                  std::string_view text, std::vector<std::string> hypotheses) {
  table_[{std::string(source_language), std::string(target_language), text::normalize_whitespace(text)}] =
      std::move(hypotheses);
  pairs_[{std::string(source_language), std::string(target_language)}]++;
}

std::vector<TranslationHypothesis> MockTranslationProvider::translate(const TranslationRequest& request) const {
  if (request.n_best < 1) throw std::invalid_argument("n_best must be >= 1");
  if (!pairs_.count({request.source_language, request.target_language})) {
    throw UnsupportedLanguageError("mock has no " + request.source_language + " -> " +
                                   request.target_language + " table");
  }
  std::vector<TranslationHypothesis> out;
  auto it = table_.find({request.source_language, request.target_language,
                         text::normalize_whitespace(request.source_text)});
  if (it == table_.end()) {
    if (!request.copy_unknown) throw ProviderError(404, "no mock entry for: " + request.source_text);
    out.push_back({text::normalize_whitespace(request.source_text), 1, std::nullopt});
    return out;
  }
  const auto& hyps = it->second;
  for (std::size_t i = 0; i < hyps.size() && static_cast<int>(i) < request.n_best; ++i) {
    out.push_back({hyps[i], static_cast<int>(i) + 1, std::nullopt});
  }
  return out;
}

// ---------------------------------------------------------------------------
// File dictionary

FileDictionary FileDictionary::parse(std::string_view text, const std::string& source) {
  FileDictionary dict;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (text::trim(line).empty() || line.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() < 4 || fields.size() > 6) {
      throw ParseError(source, i + 1, "expected 4 to 6 tab-separated fields");
    }
    DictionaryEntry e;
    e.language = fields[0];
    e.headword = std::string(text::trim(fields[1]));
    e.translations = split_bar(fields[3]);
    if (fields.size() > 4) e.synonyms = split_bar(fields[4]);
    if (fields.size() > 5) e.lemma = std::string(text::trim(fields[5]));
    if (e.headword.empty()) throw ParseError(source, i + 1, "empty headword");
    if (e.translations.empty()) throw ParseError(source, i + 1, "entry has no translations");
    dict.add(fields[2], std::move(e));
  }
  return dict;
}

FileDictionary FileDictionary::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

void FileDictionary::add(std::string_view target_language, DictionaryEntry entry) {
  auto key = std::make_tuple(entry.language, text::to_lower(entry.headword), std::string(target_language));
  entries_[key] = std::move(entry);
}

std::optional<DictionaryEntry> FileDictionary::lookup(std::string_view word, std::string_view source_language,
                                                      std::string_view target_language) const {
  auto it = entries_.find({std::string(source_language), text::to_lower(text::trim(word)),
                           std::string(target_language)});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Decorators

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

RetryingTranslationProvider::RetryingTranslationProvider(std::shared_ptr<const TranslationProvider> inner,
                                                         RetryPolicy policy, Sleeper sleeper)
    : inner_(std::move(inner)), policy_(policy), sleeper_(std::move(sleeper)) {}

std::vector<TranslationHypothesis> RetryingTranslationProvider::translate(const TranslationRequest& request) const {
  return with_retry(policy_, sleeper_, [&] { return inner_->translate(request); });
}

RetryingDictionary::RetryingDictionary(std::shared_ptr<const DictionaryProvider> inner, RetryPolicy policy,
                                       Sleeper sleeper)
    : inner_(std::move(inner)), policy_(policy), sleeper_(std::move(sleeper)) {}

std::optional<DictionaryEntry> RetryingDictionary::lookup(std::string_view word, std::string_view source_language,
                                                          std::string_view target_language) const {
  return with_retry(policy_, sleeper_,
                    [&] { return inner_->lookup(word, source_language, target_language); });
}

namespace {

std::string request_key(const TranslationRequest& r) {
  return r.source_language + '\x1f' + r.target_language + '\x1f' + std::to_string(r.n_best) + '\x1f' +
         (r.copy_unknown ? "1" : "0") + '\x1f' + r.source_text;
}

}  // namespace

CachingTranslationProvider::CachingTranslationProvider(std::shared_ptr<const TranslationProvider> inner)
    : inner_(std::move(inner)) {}

std::vector<TranslationHypothesis> CachingTranslationProvider::translate(const TranslationRequest& request) const {
  const std::string key = request_key(request);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto result = inner_->translate(request);
  std::unique_lock lock(mutex_);
  return cache_.emplace(key, std::move(result)).first->second;
}

std::size_t CachingTranslationProvider::cached() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

CachingDictionary::CachingDictionary(std::shared_ptr<const DictionaryProvider> inner) : inner_(std::move(inner)) {}

std::optional<DictionaryEntry> CachingDictionary::lookup(std::string_view word, std::string_view source_language,
                                                         std::string_view target_language) const {
  std::string key = std::string(source_language) + '\x1f' + std::string(target_language) + '\x1f' + std::string(word);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto result = inner_->lookup(word, source_language, target_language);
  std::unique_lock lock(mutex_);
  return cache_.emplace(key, std::move(result)).first->second;
}

std::size_t CachingDictionary::cached() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

const json* walk(const json& root, std::string_view path) {
  const json* cur = &root;
  if (path.empty()) return cur;
  for (const auto& part : text::split(path, '.')) {
    if (cur->is_object()) {
      auto it = cur->find(part);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else if (cur->is_array()) {
      char* end = nullptr;
      unsigned long idx = std::strtoul(part.c_str(), &end, 10);
      if (part.empty() || *end != '\0' || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    } else {
      return nullptr;
    }
  }
  return cur;
}

json parse_json(std::string_view body, const std::string& what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedResponseError(what + ": " + e.what());
  }
}

std::vector<std::string> string_list(const json* node) {
  std::vector<std::string> out;
  if (!node) return out;
  if (node->is_string()) {
    out.push_back(node->get<std::string>());
  } else if (node->is_array()) {
    for (const auto& item : *node) {
      if (item.is_string()) out.push_back(item.get<std::string>());
    }
  }
  return out;
}

std::string json_escape(std::string_view s) {
  std::string dumped = json(std::string(s)).dump();
  return dumped.substr(1, dumped.size() - 2);
}

struct HttpResponse {
  int status = 0;
  std::string body;
};

HttpResponse http_call(const HttpConfig& config, const std::map<std::string, std::string>& values) {
  const std::string url = expand_template(config.endpoint, values, true);
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error("endpoint is not an absolute URL: " + url);
  auto path_start = url.find('/', scheme + 3);
  std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  for (const auto& [k, v] : config.headers) headers.emplace(k, v);
  if (!config.auth_env.empty()) {
    const char* cred = std::getenv(config.auth_env.c_str());
    if (!cred || !*cred) throw ProviderError(401, "credential variable " + config.auth_env + " is not set");
    headers.emplace(config.auth_header, config.auth_prefix + cred);
  }

  httplib::Result res = config.method == "POST"
                            ? client.Post(path, headers, expand_template(config.body_template, values, false),
                                          "application/json")
                            : client.Get(path, headers);
  if (!res) throw TransportError(base + ": " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500) {
    throw TransportError(base + ": HTTP " + std::to_string(res->status));
  }
  return {res->status, res->body};
}

}  // namespace

std::optional<std::string> json_path_string(std::string_view json_text, std::string_view path) {
  json doc = parse_json(json_text, "json_path_string");
  const json* node = walk(doc, path);
  if (!node) return std::nullopt;
  if (node->is_string()) return node->get<std::string>();
  return node->dump();
}

std::string percent_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string expand_template(std::string_view tmpl, const std::map<std::string, std::string>& values,
                            bool url_encode) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += url_encode ? percent_encode(it->second) : json_escape(it->second);
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

HttpTranslationProvider::HttpTranslationProvider(HttpConfig config) : config_(std::move(config)) {}

std::vector<TranslationHypothesis> HttpTranslationProvider::translate(const TranslationRequest& request) const {
  if (request.n_best < 1) throw std::invalid_argument("n_best must be >= 1");
  auto res = http_call(config_, {{"text", request.source_text},
                                 {"source", request.source_language},
                                 {"target", request.target_language},
                                 {"n", std::to_string(request.n_best)}});
  if (res.status < 200 || res.status >= 300) throw ProviderError(res.status, res.body);
  json doc = parse_json(res.body, "translation response");
  const json* list = walk(doc, config_.hypotheses_path);
  if (!list) throw MalformedResponseError("translation response has no " + config_.hypotheses_path);
  json items = list->is_array() ? *list : json::array({*list});

  std::vector<TranslationHypothesis> out;
  for (const auto& item : items) {
    if (static_cast<int>(out.size()) >= request.n_best) break;
    TranslationHypothesis h;
    const json* t = item.is_string() ? &item : walk(item, config_.text_field);
    if (!t || !t->is_string()) throw MalformedResponseError("hypothesis without " + config_.text_field);
    h.text = t->get<std::string>();
    if (config_.no_translate) h.text = config_.no_translate->strip(h.text);
    if (!config_.score_field.empty() && item.is_object()) {
      const json* s = walk(item, config_.score_field);
      if (s && s->is_number()) h.score = s->get<double>();
    }
    h.rank = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(h));
  }
  if (out.empty()) throw MalformedResponseError("translation response has no hypotheses");
  return out;
}

HttpDictionary::HttpDictionary(HttpConfig config) : config_(std::move(config)) {}

std::optional<DictionaryEntry> HttpDictionary::lookup(std::string_view word, std::string_view source_language,
                                                      std::string_view target_language) const {
  auto res = http_call(config_, {{"text", std::string(word)},
                                 {"source", std::string(source_language)},
                                 {"target", std::string(target_language)},
                                 {"n", "1"}});
  for (int s : config_.not_found_status) {
    if (res.status == s) return std::nullopt;
  }
  if (res.status < 200 || res.status >= 300) throw ProviderError(res.status, res.body);
  json doc = parse_json(res.body, "dictionary response");
  const json* entry = walk(doc, config_.entry_path);
  if (!entry || entry->is_null()) return std::nullopt;
  if (!entry->is_object()) throw MalformedResponseError("dictionary entry is not an object");
  DictionaryEntry e;
  e.headword = std::string(word);
  e.language = std::string(source_language);
  e.translations = string_list(walk(*entry, config_.translations_path));
  e.synonyms = string_list(walk(*entry, config_.synonyms_path));
  if (const json* l = walk(*entry, config_.lemma_path); l && l->is_string()) e.lemma = l->get<std::string>();
  if (e.translations.empty()) return std::nullopt;
  return e;
}

// ---------------------------------------------------------------------------
// Config loading

namespace {

std::string get_string(const json& j, const char* key, std::string fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw Error(std::string("config field '") + key + "' must be a string");
  return it->get<std::string>();
}

RetryPolicy retry_from(const json& j) {
  RetryPolicy p;
  if (!j.is_object()) return p;
  p.max_attempts = j.value("max_attempts", p.max_attempts);
  p.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", p.initial_backoff.count()));
  p.multiplier = j.value("multiplier", p.multiplier);
  p.max_backoff = std::chrono::milliseconds(j.value("max_backoff_ms", p.max_backoff.count()));
  if (p.max_attempts < 1) throw Error("retry.max_attempts must be >= 1");
  return p;
}

HttpConfig http_from(const json& j) {
  HttpConfig c;
  c.endpoint = get_string(j, "endpoint", "");
  if (c.endpoint.empty()) throw Error("http provider needs an endpoint");
  c.method = get_string(j, "method", c.method);
  if (c.method != "GET" && c.method != "POST") throw Error("method must be GET or POST");
  c.body_template = get_string(j, "body", c.body_template);
  c.auth_env = get_string(j, "auth_env", c.auth_env);
  c.auth_header = get_string(j, "auth_header", c.auth_header);
  c.auth_prefix = get_string(j, "auth_prefix", c.auth_prefix);
  if (auto it = j.find("headers"); it != j.end() && it->is_object()) {
    for (auto& [k, v] : it->items()) c.headers[k] = v.get<std::string>();
  }
  c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
  c.hypotheses_path = get_string(j, "hypotheses_path", c.hypotheses_path);
  c.text_field = get_string(j, "text_field", c.text_field);
  c.score_field = get_string(j, "score_field", c.score_field);
  c.entry_path = get_string(j, "entry_path", c.entry_path);
  c.translations_path = get_string(j, "translations_path", c.translations_path);
  c.synonyms_path = get_string(j, "synonyms_path", c.synonyms_path);
  c.lemma_path = get_string(j, "lemma_path", c.lemma_path);
  if (auto it = j.find("not_found_status"); it != j.end() && it->is_array()) {
    c.not_found_status = it->get<std::vector<int>>();
  }
  if (auto it = j.find("no_translate"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2) throw Error("no_translate must be [open, close]");
    c.no_translate = NoTranslateMarkup{(*it)[0].get<std::string>(), (*it)[1].get<std::string>()};
  }
  return c;
}

json read_config(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::filesystem::path relative_to(const std::filesystem::path& config, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : config.parent_path() / path;
}

}  // namespace

HttpConfig parse_http_config(std::string_view json_text, const std::string& source) {
  try {
    return http_from(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(source + ": " + e.what());
  }
}

RetryPolicy parse_retry_policy(std::string_view json_text) { return retry_from(json::parse(json_text)); }

std::shared_ptr<const TranslationProvider> load_translation_provider(const std::filesystem::path& path,
                                                                     const ProviderOptions& options) {
  json j = read_config(path);
  std::string kind = get_string(j, "kind", "");
  if (kind == "mock") {
    return std::make_shared<MockTranslationProvider>(
        MockTranslationProvider::load(relative_to(path, get_string(j, "table", ""))));
  }
  if (kind == "http") {
    try {
      std::shared_ptr<const TranslationProvider> p = std::make_shared<HttpTranslationProvider>(http_from(j));
      p = std::make_shared<RetryingTranslationProvider>(p, retry_from(j.value("retry", json::object())),
                                                        options.sleeper);
      if (j.value("cache", false)) p = std::make_shared<CachingTranslationProvider>(p);
      return p;
    } catch (const json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  throw Error(path.string() + ": unknown translation provider kind '" + kind + "'");
}

std::shared_ptr<const DictionaryProvider> load_dictionary_provider(const std::filesystem::path& path,
                                                                   const ProviderOptions& options) {
  json j = read_config(path);
  std::string kind = get_string(j, "kind", "");
  if (kind == "file") {
    return std::make_shared<FileDictionary>(FileDictionary::load(relative_to(path, get_string(j, "path", ""))));
  }
  if (kind == "http") {
    try {
      std::shared_ptr<const DictionaryProvider> p = std::make_shared<HttpDictionary>(http_from(j));
      p = std::make_shared<RetryingDictionary>(p, retry_from(j.value("retry", json::object())), options.sleeper);
      if (j.value("cache", false)) p = std::make_shared<CachingDictionary>(p);
      return p;
    } catch (const json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  throw Error(path.string() + ": unknown dictionary provider kind '" + kind + "'");
}

}  // namespace scylla
