#include <doctest.h>

#include <cstdlib>
#include <string>

#include "shapkit/blackbox.hpp"
#include "shapkit/external_model.hpp"

using namespace shapkit;

namespace {

std::string server_path() {
    const char* env = std::getenv("SHAPKIT_MODEL_SERVER");
    REQUIRE_MESSAGE(env != nullptr, "SHAPKIT_MODEL_SERVER must point at the server binary");
    return env;
}

}  // namespace

TEST_CASE("handshake and first-feature echo") {
    ExternalModel model(server_path() + " --kind first --features 2");
    CHECK(model.feature_count() == 2);
    CHECK(model.predict({{3, 1}, {7, 2}}) == std::vector<double>{3, 7});
    CHECK(model.predict({}) == std::vector<double>{});
}

TEST_CASE("child exit mid-request raises a transport error without hanging") {
    ExternalModel model(server_path() + " --kind first --features 2 --exit-after 1",
                        std::chrono::seconds(5));
    CHECK(model.predict({{1, 2}}) == std::vector<double>{1});
    CHECK_THROWS_AS(model.predict({{3, 4}}), TransportError);
}

TEST_CASE("malformed response raises a protocol error with a payload excerpt") {
    ExternalModel model(server_path() + " --kind first --features 2 --garbage");
    CHECK_THROWS_WITH_AS(model.predict({{1, 2}}), doctest::Contains("{not json"),
                         ProtocolError);
}

TEST_CASE("1000-row roundtrip matches the in-process model exactly") {
    const LinearModel local({2.0, -1.5, 0.25}, 0.75);
    ExternalModel remote(server_path() + " --kind linear --coef 2,-1.5,0.25 --intercept 0.75");
    REQUIRE(remote.feature_count() == 3);

    Matrix batch;
    for (int i = 0; i < 1000; ++i) {
        batch.push_back({0.001 * i, -0.002 * i, 0.5 + 0.0001 * i});
    }
    const auto expected = local.predict(batch);
    const auto actual = remote.predict(batch);
    REQUIRE(actual.size() == expected.size());
    for (std::size_t i = 0; i < actual.size(); ++i) CHECK(actual[i] == expected[i]);
}
