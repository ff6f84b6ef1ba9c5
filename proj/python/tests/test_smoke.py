import json
import math

import pytest

import sqlaug


TABLES = [
    {
        "db_id": "concert_singer",
        "table_names_original": ["singer", "concert"],
        "table_names": ["singer", "concert"],
        "column_names_original": [[-1, "*"], [0, "singer_id"], [0, "name"], [0, "age"], [1, "concert_id"], [1, "singer_id"]],
        "column_names": [[-1, "*"], [0, "singer id"], [0, "name"], [0, "age"], [1, "concert id"], [1, "singer id"]],
        "column_types": ["text", "number", "text", "number", "number", "number"],
        "primary_keys": [1, 4],
        "foreign_keys": [[5, 1]],
    }
]


@pytest.fixture
def schema():
    (s,) = sqlaug.parse_schemas(json.dumps(TABLES))
    return s


def test_schema_fields(schema):
    assert schema.db_id == "concert_singer"
    assert schema.tables == ["singer", "concert"]
    assert ("singer", "name", "text") in schema.columns
    assert "concert_singer" in repr(schema)


def test_entities_and_sketch(schema):
    sql = "SELECT T1.name, T1.age FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = T2.singer_id WHERE T1.age > 30"
    ents = sqlaug.extract_entity_sequence(sql, schema)
    assert ents[:2] == ["singer.name", "singer.age"]
    assert len(ents) == len(set(ents))
    assert sqlaug.sketch("SELECT count(*) FROM t") == "SELECT count(*) FROM _TAB_"
    assert sqlaug.sketch("SELECT a FROM t WHERE b = 3") == sqlaug.sketch("SELECT x FROM u WHERE y = 9")
    assert len(sqlaug.deconstruct("SELECT a FROM t UNION SELECT b FROM u")) == 2


def test_exact_match_ignores_values_and_case():
    assert sqlaug.exact_match("select name from singer where age > 5", "SELECT name FROM singer WHERE age > 30")
    assert not sqlaug.exact_match("SELECT age FROM singer", "SELECT name FROM singer")
    assert sqlaug.canonical_sql("SELECT Name FROM singer") == sqlaug.canonical_sql("select name from SINGER")


def test_statistics():
    assert sqlaug.normalized_entropy({"a": 2, "b": 2, "c": 2}) == pytest.approx(1.0, abs=1e-12)
    assert sqlaug.normalized_entropy({"a": 5}) == 0.0
    expected = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    assert sqlaug.normalized_entropy({"a": 3, "b": 1}) == pytest.approx(expected, abs=1e-12)
    same = {("x", "x"): 2, ("y", "y"): 3}
    assert sqlaug.normalized_mutual_information(same) == pytest.approx(1.0, abs=1e-12)
    product = {(a, b): 1 for a in "pq" for b in "rs"}
    assert sqlaug.normalized_mutual_information(product) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(sqlaug.Error):
        sqlaug.normalized_entropy({})


def test_errors(schema):
    with pytest.raises(sqlaug.ResolutionError):
        sqlaug.extract_entity_sequence("SELECT nothing FROM singer", schema)
    with pytest.raises(sqlaug.Error):
        sqlaug.load_schemas("/nonexistent/tables.json")
    with pytest.raises(sqlaug.ParseError):
        sqlaug.parse_schemas("{not json")
    assert issubclass(sqlaug.ParseError, sqlaug.Error)


def test_toy_corpus_and_cli(tmp_path):
    sqlaug.make_toy(str(tmp_path), seed=1, pairs_per_domain=10)
    schemas = sqlaug.load_schemas(str(tmp_path / "tables.json"))
    assert len(schemas) >= 6
    train = sqlaug.load_examples(str(tmp_path / "train.json"), schemas)
    assert len(train) > 0
    stats = sqlaug.dataset_stats(train, schemas)
    assert stats["n_instances"] == len(train)
    for key in ("h_col", "h_sketch", "i_col_sketch"):
        assert 0.0 <= stats[key] <= 1.0

    code, out, err = sqlaug.cli("analyze", tmp_path / "train.json", "--schemas", tmp_path / "tables.json")
    assert code == 0, err
    assert "H~ col" in out
    code, _, err = sqlaug.cli("synthesize", "--config", tmp_path / "missing.json")
    assert code != 0
    assert "synthesize" in err
