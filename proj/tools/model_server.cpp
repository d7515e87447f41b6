// Minimal wire-protocol model server: reads newline-delimited JSON requests
// on stdin and answers on stdout. Serves the built-in linear model, a
// first-feature echo, or fault-injection modes used by the transport tests.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

int main(int argc, char** argv) {
    CLI::App app{"shapkit wire-protocol model server"};

    std::string kind = "linear";
    std::string coef_csv = "1";
    double intercept = 0.0;
    std::size_t features = 0;
    std::size_t exit_after = 0;
    bool garbage = false;
    app.add_option("--kind", kind, "linear | first")->check(CLI::IsMember({"linear", "first"}));
    app.add_option("--coef", coef_csv, "comma-separated linear coefficients");
    app.add_option("--intercept", intercept, "linear intercept");
    app.add_option("--features", features, "feature count (first-feature mode)");
    app.add_option("--exit-after", exit_after, "exit abruptly after this many predict requests");
    app.add_flag("--garbage", garbage, "answer predict requests with malformed JSON");
    CLI11_PARSE(app, argc, argv);

    std::vector<double> coefficients;
    if (kind == "linear") {
        std::stringstream ss(coef_csv);
        std::string cell;
        while (std::getline(ss, cell, ',')) coefficients.push_back(std::stod(cell));
        features = coefficients.size();
    } else if (features == 0) {
        features = 1;
    }

    std::size_t predicts_served = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
        if (request.is_discarded()) return 1;
        const auto id = request.value("id", std::uint64_t{0});
        const std::string op = request.value("op", "");

        nlohmann::json response;
        response["id"] = id;
        if (op == "meta") {
            response["feature_count"] = features;
        } else if (op == "predict") {
            if (exit_after > 0 && predicts_served >= exit_after) return 0;
            ++predicts_served;
            if (garbage) {
                std::cout << "{not json\n" << std::flush;
                continue;
            }
            std::vector<double> predictions;
            for (const auto& row : request["instances"]) {
                const auto x = row.get<std::vector<double>>();
                if (kind == "first") {
                    predictions.push_back(x.empty() ? 0.0 : x.front());
                } else {
                    double y = intercept;
                    for (std::size_t i = 0; i < x.size() && i < coefficients.size(); ++i)
                        y += coefficients[i] * x[i];
                    predictions.push_back(y);
                }
            }
            response["predictions"] = predictions;
        } else {
            return 1;
        }
        std::cout << response.dump() << "\n" << std::flush;
    }
    return 0;
}
