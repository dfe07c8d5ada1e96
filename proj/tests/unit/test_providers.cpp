#include <doctest.h>
#include <httplib.h>
#include <json.hpp>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "scylla/error.hpp"
#include "scylla/providers.hpp"
#include "support.hpp"

using namespace scylla;

namespace {

TranslationRequest request(std::string text, int n = 5, bool copy = true) {
  return {std::move(text), "br-pt", "en", n, copy};
}

// Counts calls and throws the scripted errors first.
class ScriptedProvider : public TranslationProvider {
 public:
  std::vector<std::function<void()>> failures;
  mutable std::atomic<int> calls{0};
  std::vector<TranslationHypothesis> translate(const TranslationRequest& r) const override {
    int i = calls++;
    if (i < static_cast<int>(failures.size())) failures[static_cast<std::size_t>(i)]();
    return {{"echo " + r.source_text, 1, std::nullopt}};
  }
};

class CountingDictionary : public DictionaryProvider {
 public:
  mutable std::atomic<int> calls{0};
  int transport_failures = 0;
  std::optional<DictionaryEntry> lookup(std::string_view word, std::string_view, std::string_view) const override {
    if (calls++ < transport_failures) throw TransportError("down");
    if (word == "none") return std::nullopt;
    return DictionaryEntry{std::string(word), "en", {"x"}, {}, ""};
  }
};

// A local HTTP server on an ephemeral port, stopped on destruction.
struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port) + path; }
  ~LocalServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("scylla_test_" + std::to_string(std::random_device{}()) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return path / name;
  }
};

}  // namespace

TEST_CASE("mock provider returns the table verbatim") {
  const auto& mock = support::mock();
  auto hyps = mock.translate(request("O basketball player score a lay-up.", 1));
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].text == "The basketball player score the lay-up.");
  CHECK(hyps[0].rank == 1);
}

TEST_CASE("mock provider ranks and caps the n-best list") {
  const auto& mock = support::mock();
  const std::string src = "O ponta é o jogador que menos tempo tem para pensar na armação de uma jogada.";
  auto all = mock.translate(request(src, 5));
  REQUIRE(all.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(all[static_cast<std::size_t>(i)].rank == i + 1);
  CHECK(all[1].text == "The winger is the player who has less time to think about setting up a play.");
  auto one = mock.translate(request(src, 1));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == all[0]);
  // Whitespace differences do not matter.
  CHECK(mock.translate(request("  O ponta é o jogador que menos tempo tem para  pensar na armação de uma jogada. ", 2))
            .size() == 2);
}

TEST_CASE("mock provider errors") {
  const auto& mock = support::mock();
  CHECK_THROWS_AS(mock.translate(request("A casa é grande.", 0)), std::invalid_argument);
  auto copied = mock.translate(request("Nada  disto.", 3, true));
  REQUIRE(copied.size() == 1);
  CHECK(copied[0].text == "Nada disto.");
  try {
    mock.translate(request("Nada disto.", 3, false));
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK(e.status() == 404);
  }
  TranslationRequest r{"A casa é grande.", "en", "de", 1, true};
  CHECK_THROWS_AS(mock.translate(r), UnsupportedLanguageError);
  CHECK_THROWS_AS(MockTranslationProvider::parse("br-pt\ten\tonly three\n"), ParseError);
}

TEST_CASE("file dictionary lookups") {
  const auto& dict = support::dictionary();
  auto fwd = dict.lookup("forward", "en", "br-pt");
  REQUIRE(fwd);
  CHECK(fwd->translations == std::vector<std::string>{"atacante", "ponta", "avante"});
  CHECK(fwd->synonyms == std::vector<std::string>{"striker", "attacker"});
  auto winger = dict.lookup("Winger", "en", "br-pt");
  REQUIRE(winger);
  CHECK(winger->translations == std::vector<std::string>{"ponta"});
  auto scored = dict.lookup("scored", "en", "br-pt");
  REQUIRE(scored);
  CHECK(scored->lemma == "score");
  CHECK_FALSE(dict.lookup("zebra", "en", "br-pt"));
  CHECK_FALSE(dict.lookup("forward", "en", "de"));
  CHECK_THROWS_AS(FileDictionary::parse("en\tx\n"), ParseError);
  CHECK_THROWS_AS(FileDictionary::parse("en\tx\tbr-pt\t\n"), ParseError);
}

TEST_CASE("no-translate markup") {
  NoTranslateMarkup m{"<span translate=\"no\">", "</span>"};
  CHECK(m.wrap("lay-up") == "<span translate=\"no\">lay-up</span>");
  CHECK(m.strip("The <span translate=\"no\">lay-up</span> was <span translate=\"no\">fine</span>.") ==
        "The lay-up was fine.");
}

TEST_CASE("retry policy retries transport errors only") {
  std::vector<std::chrono::milliseconds> slept;
  Sleeper fake = [&](std::chrono::milliseconds d) { slept.push_back(d); };
  RetryPolicy policy{4, std::chrono::milliseconds(100), 3.0, std::chrono::milliseconds(500)};

  SUBCASE("transient failures recover") {
    auto inner = std::make_shared<ScriptedProvider>();
    inner->failures = {[] { throw TransportError("reset"); }, [] { throw TransportError("reset"); }};
    RetryingTranslationProvider p(inner, policy, fake);
    auto out = p.translate(request("x"));
    CHECK(out.at(0).text == "echo x");
    CHECK(inner->calls == 3);
    CHECK(slept == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100), std::chrono::milliseconds(300)});
  }
  SUBCASE("gives up after max attempts") {
    auto inner = std::make_shared<ScriptedProvider>();
    for (int i = 0; i < 10; ++i) inner->failures.push_back([] { throw TransportError("down"); });
    RetryingTranslationProvider p(inner, policy, fake);
    CHECK_THROWS_AS(p.translate(request("x")), TransportError);
    CHECK(inner->calls == 4);
    CHECK(slept.size() == 3);
    CHECK(slept.back() == std::chrono::milliseconds(500));
  }
  SUBCASE("provider errors are not retried") {
    auto inner = std::make_shared<ScriptedProvider>();
    inner->failures = {[] { throw ProviderError(403, "forbidden"); }};
    RetryingTranslationProvider p(inner, policy, fake);
    CHECK_THROWS_AS(p.translate(request("x")), ProviderError);
    CHECK(inner->calls == 1);
    CHECK(slept.empty());
  }
  SUBCASE("dictionary retries too") {
    auto inner = std::make_shared<CountingDictionary>();
    inner->transport_failures = 1;
    RetryingDictionary d(inner, policy, fake);
    CHECK(d.lookup("w", "en", "br-pt"));
    CHECK(inner->calls == 2);
  }
}

TEST_CASE("caches return what the inner provider returned") {
  auto inner = std::make_shared<ScriptedProvider>();
  CachingTranslationProvider cache(inner);
  auto a = cache.translate(request("x"));
  auto b = cache.translate(request("x"));
  CHECK(a == b);
  CHECK(inner->calls == 1);
  CHECK(cache.cached() == 1);
  cache.translate(request("x", 2));
  CHECK(cache.cached() == 2);

  auto failing = std::make_shared<ScriptedProvider>();
  failing->failures = {[] { throw TransportError("down"); }};
  CachingTranslationProvider c2(failing);
  CHECK_THROWS_AS(c2.translate(request("y")), TransportError);
  CHECK(c2.cached() == 0);
  CHECK(c2.translate(request("y")).at(0).text == "echo y");

  auto dict = std::make_shared<CountingDictionary>();
  CachingDictionary cd(dict);
  CHECK_FALSE(cd.lookup("none", "en", "br-pt"));
  CHECK_FALSE(cd.lookup("none", "en", "br-pt"));
  CHECK(cd.lookup("w", "en", "br-pt"));
  CHECK(dict->calls == 2);

  // Concurrent readers see one consistent value.
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        if (cache.translate(request("k" + std::to_string(i % 10))).at(0).text != "echo k" + std::to_string(i % 10))
          ++mismatches;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(mismatches == 0);
}

TEST_CASE("template expansion and JSON paths") {
  CHECK(percent_encode("a b/ç") == "a%20b%2F%C3%A7");
  CHECK(expand_template("/t?q={text}&n={n}&x={other}", {{"text", "a&b"}, {"n", "3"}}, true) ==
        "/t?q=a%26b&n=3&x={other}");
  CHECK(expand_template(R"({"q":"{text}"})", {{"text", "say \"hi\""}}, false) == R"({"q":"say \"hi\""})");
  CHECK(json_path_string(R"({"data":{"items":[{"text":"a"},{"text":"b"}]}})", "data.items.1.text") == "b");
  CHECK_FALSE(json_path_string(R"({"data":{}})", "data.items").has_value());
  CHECK_THROWS_AS(json_path_string("{nope", "a"), MalformedResponseError);
}

TEST_CASE("http translation provider against a local server") {
  LocalServer srv;
  std::atomic<int> flaky_calls{0};
  srv.server.Get("/translate", [](const httplib::Request& req, httplib::Response& res) {
    std::string q = req.get_param_value("q");
    int n = std::stoi(req.get_param_value("n"));
    nlohmann::json out;
    out["data"]["translations"] = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
      out["data"]["translations"].push_back({{"translatedText", "<keep>" + q + "</keep> #" + std::to_string(i)},
                                              {"confidence", 1.0 - 0.1 * i}});
    }
    out["n"] = n;
    res.set_content(out.dump(), "application/json");
  });
  srv.server.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
    if (flaky_calls++ < 2) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"translations":["ok"]})", "application/json");
  });
  srv.server.Get("/denied", [](const httplib::Request&, httplib::Response& res) { res.status = 403; });
  srv.server.Get("/garbage", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  srv.server.Post("/post", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    std::string auth = req.get_header_value("X-Key");
    res.set_content(nlohmann::json{{"translations", {body["q"].get<std::string>() + "|" + auth}}}.dump(),
                    "application/json");
  });
  srv.start();

  HttpConfig c;
  c.endpoint = srv.url("/translate?q={text}&src={source}&tgt={target}&n={n}");
  c.hypotheses_path = "data.translations";
  c.text_field = "translatedText";
  c.score_field = "confidence";
  c.no_translate = NoTranslateMarkup{"<keep>", "</keep>"};
  HttpTranslationProvider p(c);
  auto hyps = p.translate(request("a bandeja & tal", 2));
  REQUIRE(hyps.size() == 2);
  CHECK(hyps[0].text == "a bandeja & tal #0");
  CHECK(hyps[1].rank == 2);
  REQUIRE(hyps[1].score);
  CHECK(*hyps[1].score == doctest::Approx(0.9));
  CHECK(p.no_translate()->open == "<keep>");

  HttpConfig flaky;
  flaky.endpoint = srv.url("/flaky");
  auto inner = std::make_shared<HttpTranslationProvider>(flaky);
  int sleeps = 0;
  RetryingTranslationProvider retrying(inner, RetryPolicy{}, [&](std::chrono::milliseconds) { ++sleeps; });
  CHECK(retrying.translate(request("x")).at(0).text == "ok");
  CHECK(sleeps == 2);

  HttpConfig denied;
  denied.endpoint = srv.url("/denied");
  try {
    HttpTranslationProvider(denied).translate(request("x"));
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK(e.status() == 403);
  }
  HttpConfig garbage;
  garbage.endpoint = srv.url("/garbage");
  CHECK_THROWS_AS(HttpTranslationProvider(garbage).translate(request("x")), MalformedResponseError);

  HttpConfig post;
  post.endpoint = srv.url("/post");
  post.method = "POST";
  post.body_template = R"({"q": "{text}", "n": {n}})";
  post.auth_env = "SCYLLA_TEST_KEY";
  post.auth_header = "X-Key";
  post.auth_prefix = "k=";
  ::unsetenv("SCYLLA_TEST_KEY");
  CHECK_THROWS_AS(HttpTranslationProvider(post).translate(request("x")), ProviderError);
  ::setenv("SCYLLA_TEST_KEY", "s3cret", 1);
  CHECK(HttpTranslationProvider(post).translate(request("say \"hi\"")).at(0).text == "say \"hi\"|k=s3cret");
  ::unsetenv("SCYLLA_TEST_KEY");

  HttpConfig closed;
  closed.endpoint = "http://127.0.0.1:1/nothing";
  closed.timeout = std::chrono::milliseconds(500);
  CHECK_THROWS_AS(HttpTranslationProvider(closed).translate(request("x")), TransportError);
}

TEST_CASE("http dictionary against a local server") {
  LocalServer srv;
  srv.server.Get(R"(/dict/(\w+))", [](const httplib::Request& req, httplib::Response& res) {
    std::string w = req.matches[1];
    if (w == "missing") {
      res.status = 404;
      return;
    }
    if (w == "empty") {
      res.set_content(R"({"result":{"senses":[]}})", "application/json");
      return;
    }
    res.set_content(R"({"result":{"senses":["ponta","atacante"],"syn":["striker"],"base":"forward"}})",
                    "application/json");
  });
  srv.start();
  HttpConfig c;
  c.endpoint = srv.url("/dict/{text}");
  c.entry_path = "result";
  c.translations_path = "senses";
  c.synonyms_path = "syn";
  c.lemma_path = "base";
  HttpDictionary d(c);
  auto e = d.lookup("forwards", "en", "br-pt");
  REQUIRE(e);
  CHECK(e->translations == std::vector<std::string>{"ponta", "atacante"});
  CHECK(e->synonyms == std::vector<std::string>{"striker"});
  CHECK(e->lemma == "forward");
  CHECK_FALSE(d.lookup("missing", "en", "br-pt"));
  CHECK_FALSE(d.lookup("empty", "en", "br-pt"));
}

TEST_CASE("provider configuration files") {
  auto mock = load_translation_provider(support::data("fixtures/mock_provider.json"));
  CHECK(mock->translate(request("A casa é grande.", 2)).size() == 2);
  auto dict = load_dictionary_provider(support::data("fixtures/dictionary.json"));
  CHECK(dict->lookup("winger", "en", "br-pt"));

  TempDir dir;
  CHECK_THROWS_AS(load_translation_provider(dir.write("bad.json", R"({"kind": "carrier-pigeon"})")), Error);
  CHECK_THROWS_AS(load_translation_provider(dir.write("broken.json", "{")), Error);
  CHECK_THROWS_AS(load_dictionary_provider(dir.write("nohttp.json", R"({"kind": "http"})")), Error);
  CHECK_THROWS_AS(parse_http_config(R"({"endpoint": "http://x", "method": "PUT"})"), Error);

  auto http = parse_http_config(R"({"endpoint": "http://h/{text}", "method": "POST", "timeout_ms": 250,
      "headers": {"X-A": "1"}, "no_translate": ["<a>", "</a>"], "not_found_status": [404, 410]})");
  CHECK(http.method == "POST");
  CHECK(http.timeout == std::chrono::milliseconds(250));
  CHECK(http.headers.at("X-A") == "1");
  CHECK(http.no_translate->close == "</a>");
  CHECK(http.not_found_status == std::vector<int>{404, 410});

  auto retry = parse_retry_policy(R"({"max_attempts": 5, "initial_backoff_ms": 10, "multiplier": 1.5})");
  CHECK(retry.max_attempts == 5);
  CHECK(retry.initial_backoff == std::chrono::milliseconds(10));
  CHECK(retry.multiplier == 1.5);
  CHECK(retry.max_backoff == std::chrono::milliseconds(5000));
  CHECK_THROWS_AS(parse_retry_policy(R"({"max_attempts": 0})"), Error);

  // Relative table paths resolve next to the config.
  std::filesystem::copy_file(support::data("fixtures/mock_nbest.tsv"), dir.path / "table.tsv");
  auto rel = load_translation_provider(dir.write("rel.json", R"({"kind": "mock", "table": "table.tsv"})"));
  CHECK(rel->translate(request("A casa é grande.", 1)).at(0).text == "The house is big.");

  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server.Get("/t", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 500;
      return;
    }
    res.set_content(R"({"translations":["fine"]})", "application/json");
  });
  srv.start();
  ProviderOptions opts;
  opts.sleeper = [](std::chrono::milliseconds) {};
  auto cfg = dir.write("http.json", R"({"kind": "http", "cache": true, "endpoint": ")" + srv.url("/t") +
                                        R"(", "retry": {"max_attempts": 2}})");
  auto live = load_translation_provider(cfg, opts);
  CHECK(live->translate(request("x")).at(0).text == "fine");
  CHECK(live->translate(request("x")).at(0).text == "fine");
  CHECK(calls == 2);
}
