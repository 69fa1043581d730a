#include <doctest.h>

#include <nlohmann/json.hpp>

#include "memesent/compare.hpp"
#include "memesent/errors.hpp"

using namespace memesent;

TEST_CASE("six mixed-modality rows sort best first") {
    const auto t = compare_report({{"Naive Bayes", "text", 0.32},
                                   {"FFNN+CNN", "text-image", 0.29},
                                   {"Baseline", "-", 0.22},
                                   {"FFNN (Word2Vec)", "text", 0.35},
                                   {"MMBT", "text-image", 0.30},
                                   {"BERT", "text", 0.33}});
    std::vector<std::string> order;
    for (const auto& r : t.rows) order.push_back(r.model);
    CHECK(order == std::vector<std::string>{"FFNN (Word2Vec)", "BERT", "Naive Bayes", "MMBT", "FFNN+CNN", "Baseline"});
}

TEST_CASE("single entry and ties") {
    const auto one = compare_report({{"nb", "text", 0.4}});
    CHECK(one.rows.size() == 1);
    const auto tie = compare_report({{"a", "text", 0.3}, {"b", "text", 0.3}});
    CHECK(tie.rows[0].model == "a");
    CHECK_THROWS_AS(compare_report({}), ValidationError);
}

TEST_CASE("json round trip and text layout") {
    const auto t = compare_report({{"nb", "text", 0.321}, {"fusion", "text-image", 0.287}});
    const auto back = comparison_from_json(nlohmann::json::parse(to_json(t).dump()));
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].model == "nb");
    CHECK(back.rows[1].modality == "text-image");
    CHECK(back.rows[1].macro_f1 == 0.287);
    const auto txt = format_text(t);
    CHECK(txt.find("Modality") != std::string::npos);
    CHECK(txt.find("fusion") != std::string::npos);
}
