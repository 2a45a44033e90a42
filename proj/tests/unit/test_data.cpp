/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"

#include "gce/data/dataset.h"
#include "gce/data/side_info.h"
#include "gce/data/split.h"
#include "gce/error.h"

using namespace gce;

namespace {

Dataset parse(const std::string& text, TabularFormat fmt = TabularFormat::ml100k()) {
  std::istringstream in(text);
  return load_tabular(in, fmt, "test.tsv");
}

std::string raw_item(const Dataset& ds, std::uint32_t id) { return ds.ids[1].key(id); }

// user item rating timestamp rows from (user, item, ts) triples
std::string rows(std::initializer_list<std::tuple<int, int, long>> rs) {
  std::ostringstream out;
  for (const auto& [u, i, t] : rs) out << u << '\t' << i << "\t4\t" << t << '\n';
  return out.str();
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("native MovieLens row") {
  const auto ds = parse("196\t242\t3\t881250949\n");
  REQUIRE(ds.records.size() == 1);
  CHECK(ds.ids[0].key(ds.records[0].user) == "196");
  CHECK(ds.ids[1].key(ds.records[0].item) == "242");
  CHECK(ds.records[0].timestamp == 881250949);
  CHECK(ds.records[0].contexts.empty());
  CHECK(ds.has_timestamps);
}

TEST_CASE("empty file loads and then fails to split") {
  const auto ds = parse("");
  CHECK(ds.records.empty());
  CHECK(ds.user_count() == 0);
  CHECK(ds.item_count() == 0);
  CHECK_THROWS_AS(leave_one_out_split(ds), DataError);
}

TEST_CASE("records are ordered by time within a user") {
  const auto ds = parse(rows({{1, 10, 3}, {1, 11, 1}, {1, 12, 2}}));
  REQUIRE(ds.records.size() == 3);
  CHECK(raw_item(ds, ds.records[0].item) == "11");
  CHECK(raw_item(ds, ds.records[1].item) == "12");
  CHECK(raw_item(ds, ds.records[2].item) == "10");
}

TEST_CASE("ids are dense in first-seen order") {
  const auto ds = parse(rows({{5, 10, 1}, {3, 11, 2}, {5, 12, 3}}));
  CHECK(ds.ids[0].keys() == std::vector<std::string>{"5", "3"});
  CHECK(ds.ids[1].keys() == std::vector<std::string>{"10", "11", "12"});
  CHECK(ds.user_count() == 2);
}

TEST_CASE("malformed rows report the line") {
  try {
    parse("1\t2\t3\t4\n\n1\t2\tx\t5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("test.tsv:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("1\t2\t3\n"), ParseError);
  CHECK_THROWS_AS(parse("1\t2\t3\tnope\n"), ParseError);
}

TEST_CASE("duplicate rows are kept") {
  CHECK(parse(rows({{1, 1, 5}, {1, 1, 5}})).records.size() == 2);
}

TEST_CASE("generic format with header and context columns") {
  TabularFormat fmt;
  fmt.delimiter = ',';
  fmt.user_column = 1;
  fmt.item_column = 0;
  fmt.rating_column.reset();
  fmt.timestamp_column.reset();
  fmt.context_columns = {2};
  fmt.context_names = {"city"};
  fmt.has_header = true;
  const auto ds = parse("item,user,city\na,u1,paris\nb,u1,rome\n", fmt);
  CHECK(ds.schema.size() == 3);
  CHECK(ds.schema[2].name == "city");
  CHECK(ds.schema[2].cardinality == 2);
  CHECK_FALSE(ds.has_timestamps);
  CHECK(ds.records[1].contexts == std::vector<std::uint32_t>{1});
}

TEST_CASE("last clicked item as context") {
  // user 1: items 3, 7, 9 in time order; user 2 has one interaction
  const auto ds = parse(rows({{1, 7, 20}, {2, 5, 15}, {1, 9, 30}, {1, 3, 10}}));
  DeriveStats st;
  const auto d = derive_last_clicked_context(ds, &st);
  REQUIRE(d.records.size() == 2);
  CHECK(d.schema.size() == 3);
  CHECK(d.schema[2].name == "last_item");
  CHECK(d.schema[2].cardinality == d.item_count());
  CHECK(raw_item(d, d.records[0].item) == "7");
  CHECK(d.ids[2].key(d.records[0].contexts[0]) == "3");
  CHECK(raw_item(d, d.records[1].item) == "9");
  CHECK(d.ids[2].key(d.records[1].contexts[0]) == "7");
  CHECK(st.users_dropped == 1);
}

TEST_CASE("contexts follow each user's own history") {
  const auto ds = parse(rows({{1, 10, 1}, {2, 20, 2}, {1, 11, 3}, {2, 21, 4}, {1, 12, 5}}));
  const auto d = derive_last_clicked_context(ds);
  std::map<std::string, std::string> prev;
  for (const auto& r : d.records) prev[raw_item(d, r.item)] = d.ids[2].key(r.contexts[0]);
  CHECK(prev == std::map<std::string, std::string>{{"11", "10"}, {"12", "11"}, {"21", "20"}});
  // size = sum over users of (count - 1)
  CHECK(d.records.size() == (3 - 1) + (2 - 1));
}

TEST_CASE("filter by minimum interactions") {
  const auto ds = parse(rows({{1, 1, 1}, {1, 2, 2}, {2, 1, 1}, {2, 2, 2}, {2, 3, 3}}));
  const auto f = filter(ds, FilterOptions{3, std::nullopt});
  CHECK(f.user_count() == 1);
  CHECK(f.ids[0].keys() == std::vector<std::string>{"2"});
  CHECK(f.records.size() == 3);
  const auto none = parse(rows({{1, 1, 1}}));
  CHECK_THROWS_AS(filter(none, FilterOptions{3, std::nullopt}), DataError);
}

TEST_CASE("filter by item frequency") {
  // item 1 x5, item 2 x3, item 3 x1
  const auto ds = parse(rows({{1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {4, 1, 1}, {5, 1, 1},
                              {1, 2, 2}, {2, 2, 2}, {3, 2, 2}, {1, 3, 3}}));
  const auto f = filter(ds, FilterOptions{1, 2});
  CHECK(f.item_count() == 2);
  CHECK(f.records.size() == 8);
  for (const auto& r : f.records) CHECK(raw_item(f, r.item) != "3");
  const auto same = filter(ds, FilterOptions{1, ds.item_count()});
  CHECK(same.ids[1] == ds.ids[1]);
  CHECK(same.records == ds.records);
}

TEST_CASE("re-densified ids round trip") {
  const auto ds = parse(rows({{9, 1, 1}, {8, 2, 1}, {8, 3, 2}, {8, 4, 3}, {7, 2, 1}, {7, 3, 2}, {7, 5, 3}}));
  const auto f = filter(ds, FilterOptions{3, std::nullopt});
  for (std::uint32_t u = 0; u < f.user_count(); ++u) {
    const auto old = ds.ids[0].find(f.ids[0].key(u));
    REQUIRE(old.has_value());
    CHECK(f.ids[0].find(ds.ids[0].key(*old)) == u);
  }
  for (const auto& r : f.records) {
    CHECK(r.user < f.user_count());
    CHECK(r.item < f.item_count());
  }
}

TEST_CASE("leave one out by time") {
  const auto ds = parse(rows({{1, 1, 1}, {1, 2, 2}, {1, 3, 3}, {1, 4, 4}, {1, 5, 5}}));
  const auto s = leave_one_out_split(ds);
  REQUIRE(s.train.size() == 3);
  CHECK(raw_item(ds, s.validation.at(0).item) == "4");
  CHECK(raw_item(ds, s.test.at(0).item) == "5");
  const auto three = leave_one_out_split(parse(rows({{1, 1, 1}, {1, 2, 2}, {1, 3, 3}})));
  CHECK(three.train.size() == 1);
  CHECK(three.validation.size() == 1);
  CHECK(three.test.size() == 1);
}

TEST_CASE("timestamp ties go to the later row") {
  const auto ds = parse(rows({{1, 1, 1}, {1, 2, 7}, {1, 3, 7}}));
  const auto s = leave_one_out_split(ds);
  CHECK(raw_item(ds, s.test.at(0).item) == "3");
  CHECK(raw_item(ds, s.validation.at(0).item) == "2");
}

TEST_CASE("split rejects users below three") {
  CHECK_THROWS_AS(leave_one_out_split(parse(rows({{1, 1, 1}, {1, 2, 2}}))), DataError);
}

TEST_CASE("split partitions without leakage") {
  std::ostringstream text;
  for (int u = 0; u < 30; ++u) {
    for (int k = 0; k < 3 + u % 5; ++k) text << u << '\t' << (u * 7 + k * 3) % 17 << "\t1\t" << 1000 - u * 10 + k * 37 << '\n';
  }
  const auto ds = parse(text.str());
  const auto s = leave_one_out_split(ds);
  CHECK(s.train.size() + s.validation.size() + s.test.size() == ds.records.size());
  CHECK(s.validation.size() == ds.user_count());
  CHECK(s.test.size() == ds.user_count());
  std::map<std::uint32_t, std::int64_t> max_train;
  for (const auto& r : s.train) max_train[r.user] = std::max(max_train[r.user], *r.timestamp);
  std::map<std::uint32_t, std::int64_t> val;
  for (const auto& r : s.validation) val[r.user] = *r.timestamp;
  for (const auto& r : s.test) {
    CHECK(max_train[r.user] < val[r.user]);
    CHECK(val[r.user] < *r.timestamp);
  }
}

TEST_CASE("side information rows") {
  const auto ds = parse(rows({{1, 10, 1}, {1, 11, 2}, {1, 12, 3}}));
  std::istringstream in("10\tAction\n10\tDrama\n11\tDrama\n10\tAction\n");
  const auto si = load_side_info(in, ds, FieldSchema::kItem);
  CHECK(si.features.rows() == 3);
  CHECK(si.features.cols() == 2);
  CHECK(si.features.row_cols(*ds.ids[1].find("10")).size() == 2);
  CHECK(si.features.row_cols(*ds.ids[1].find("12")).size() == 0);
  const auto drama = *si.vocabulary.find("Drama");
  CHECK(si.features.at(*ds.ids[1].find("10"), drama) == 1.0);
  CHECK(si.features.at(*ds.ids[1].find("11"), drama) == 1.0);
  std::istringstream bad("99\tAction\n");
  CHECK_THROWS_AS(load_side_info(bad, ds, FieldSchema::kItem), DataError);
  std::istringstream skipped("99\tAction\n12\tWestern\n");
  const auto kept = load_side_info(skipped, ds, FieldSchema::kItem, '\t', "<s>", UnknownEntity::skip);
  CHECK(kept.features.nnz() == 1);
  CHECK(kept.vocabulary.size() == 1);
  CHECK(field_index(ds.schema, "item") == FieldSchema::kItem);
  CHECK_THROWS_AS(field_index(ds.schema, "genre"), ConfigError);
}

}  // TEST_SUITE
