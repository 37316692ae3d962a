#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "graphmind/util.hpp"

using namespace graphmind;

TEST_CASE("sha256 matches NIST vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("fnv1a64 known values") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("base64 known vectors") {
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_encode("foo") == "Zm9v");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
    std::string out;
    REQUIRE(base64_decode("Zm9vYmFy", out));
    CHECK(out == "foobar");
    CHECK_FALSE(base64_decode("!!!!", out));
    CHECK_FALSE(base64_decode("Zg=", out));
}

TEST_CASE("base64 roundtrip on random binary strings") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<size_t> len(0, 200);
    for (int trial = 0; trial < 200; ++trial) {
        std::string data(len(rng), '\0');
        for (char& c : data) c = char(byte(rng));
        std::string decoded;
        REQUIRE(base64_decode(base64_encode(data), decoded));
        CHECK(decoded == data);
    }
}

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("a-b_c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("Qwen2.5 7B") == std::vector<std::string>{"qwen2", "5", "7b"});
}

TEST_CASE("trim strips edge whitespace only") {
    CHECK(trim("  a b  ") == "a b");
    CHECK(trim("\t\r\n") == "");
    CHECK(trim("x") == "x");
}

TEST_CASE("content tokens drop stop words") {
    auto toks = content_tokens("Who is the director of the film?");
    CHECK(toks == std::vector<std::string>{"director", "film"});
}
